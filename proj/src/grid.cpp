#include "exolink/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "exolink/evo.hpp"
#include "exolink/util.hpp"
#include "json_io.hpp"

namespace exo {

namespace {

double step_of(const GridSpec& spec, std::size_t j) {
    if (spec.steps.empty()) return 1.0;
    return spec.steps[j];
}

void check_spec(const GridSpec& spec) {
    if (spec.bounds.size() == 0)
        throw std::invalid_argument("grid spec has no design variables");
    if (!spec.steps.empty() && spec.steps.size() != spec.bounds.size())
        throw std::invalid_argument(
            "grid step list must match the design arity");
    for (std::size_t j = 0; j < spec.bounds.size(); ++j) {
        if (!(step_of(spec, j) > 0.0))
            throw std::invalid_argument("grid steps must be positive");
        if (spec.bounds.b[j].width() < 0.0)
            throw std::invalid_argument("grid bounds are inverted");
    }
}

}  // namespace

std::vector<std::uint64_t> GridSpec::axis_counts() const {
    check_spec(*this);
    std::vector<std::uint64_t> counts(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        // epsilon guard so e.g. width 10 / step 2.5 reliably lands on 5 points
        counts[j] = static_cast<std::uint64_t>(
                        std::floor(bounds.b[j].width() / step_of(*this, j) +
                                   1e-9)) +
                    1;
    }
    return counts;
}

DesignVector GridSpec::point_at(std::uint64_t index) const {
    const auto counts = axis_counts();
    DesignVector d(bounds.size());
    for (std::size_t r = bounds.size(); r-- > 0;) {
        const std::uint64_t c = counts[r];
        const std::uint64_t k = index % c;
        index /= c;
        d[r] = std::min(bounds.b[r].lo +
                            static_cast<double>(k) * step_of(*this, r),
                        bounds.b[r].hi);
    }
    return d;
}

std::uint64_t GridSpec::hash() const {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t j = 0; j < bounds.size(); ++j)
        os << bounds.b[j].lo << ',' << bounds.b[j].hi << ','
           << step_of(*this, j) << ';';
    return fnv1a64(os.str());
}

std::uint64_t grid_cardinality(const GridSpec& spec) {
    std::uint64_t total = 1;
    for (std::uint64_t c : spec.axis_counts()) {
        if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c)
            throw std::overflow_error("grid cardinality overflows 64 bits");
        total *= c;
    }
    return total;
}

GridCheckpoint load_checkpoint(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
        GridCheckpoint c;
        if (doc.at("kind").get<std::string>() != "grid_checkpoint")
            throw std::runtime_error("not a grid checkpoint");
        if (doc.at("format_version").get<int>() != 1)
            throw std::runtime_error("unsupported checkpoint version");
        c.next_index = doc.at("next_index").get<std::uint64_t>();
        c.visited = doc.at("visited").get<std::uint64_t>();
        c.spec_hash =
            std::stoull(doc.at("spec_hash").get<std::string>(), nullptr, 16);
        if (doc.contains("best")) {
            c.best = detail::outcome_from_json(doc.at("best"));
            c.has_best = true;
        }
        return c;
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("corrupt grid checkpoint '" + path +
                                 "': " + e.what());
    }
}

void save_checkpoint(const GridCheckpoint& c, const std::string& path) {
    nlohmann::json doc;
    doc["kind"] = "grid_checkpoint";
    doc["format_version"] = 1;
    doc["next_index"] = c.next_index;
    doc["visited"] = c.visited;
    doc["spec_hash"] = to_hex(c.spec_hash);
    if (c.has_best) doc["best"] = detail::outcome_to_json(c.best);
    atomic_write_file(path, doc.dump(2) + "\n");
}

GridResult run_grid(const GridSpec& spec, const ObjectiveFn& problem,
                    const GridOptions& opts, const GridCheckpoint* resume_from) {
    const std::uint64_t cardinality = grid_cardinality(spec);
    const std::uint64_t spec_hash = spec.hash();

    GridResult res;
    res.cardinality = cardinality;
    std::uint64_t index = 0;

    if (resume_from) {
        if (resume_from->spec_hash != spec_hash)
            throw std::runtime_error(
                "checkpoint does not match this grid specification");
        if (resume_from->next_index > cardinality)
            throw std::runtime_error("checkpoint index is out of range");
        index = resume_from->next_index;
        res.visited = resume_from->visited;
        res.has_best = resume_from->has_best;
        res.best = resume_from->best;
    }

    const std::uint64_t remaining = cardinality - index;
    if (remaining > opts.safety_cap && !opts.force) {
        // time a few points so the refusal message carries a cost estimate
        double per_eval = 0.0;
        const std::uint64_t probes = std::min<std::uint64_t>(3, remaining);
        if (probes > 0) {
            const double t0 = monotonic_seconds();
            for (std::uint64_t k = 0; k < probes; ++k)
                (void)problem(spec.point_at(index + k));
            per_eval = (monotonic_seconds() - t0) / static_cast<double>(probes);
        }
        std::ostringstream os;
        os << "grid has " << remaining
           << " remaining points, above the safety cap of " << opts.safety_cap
           << " (estimated "
           << per_eval * static_cast<double>(remaining) / 3600.0
           << " h at " << per_eval << " s/point); pass force to run anyway";
        throw std::runtime_error(os.str());
    }

    std::uint64_t budget = opts.stop_after
                               ? *opts.stop_after
                               : std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t interval = std::max<std::uint64_t>(
        1, opts.checkpoint_interval);
    std::uint64_t since_checkpoint = 0;
    const std::uint64_t chunk =
        std::max<std::uint64_t>(1024, static_cast<std::uint64_t>(
                                          std::max(opts.workers, 1)) *
                                          256);

    std::vector<EvaluationOutcome> slot;
    while (index < cardinality && budget > 0) {
        std::uint64_t n = std::min<std::uint64_t>(chunk, cardinality - index);
        n = std::min(n, budget);
        if (!opts.checkpoint_path.empty())
            n = std::min(n, interval - since_checkpoint);
        slot.assign(static_cast<std::size_t>(n), {});
        parallel_for(static_cast<std::size_t>(n), opts.workers,
                     [&](std::size_t k) {
                         slot[k] = problem(
                             spec.point_at(index + static_cast<std::uint64_t>(k)));
                     });
        // fixed-order reduction keeps the winner independent of worker count
        for (std::size_t k = 0; k < slot.size(); ++k) {
            if (!res.has_best || deb_compare(slot[k], res.best) > 0) {
                res.best = slot[k];
                res.has_best = true;
            }
        }
        index += n;
        res.visited += n;
        budget -= n;
        since_checkpoint += n;

        if (!opts.checkpoint_path.empty() &&
            (since_checkpoint >= interval || index == cardinality)) {
            GridCheckpoint c;
            c.next_index = index;
            c.visited = res.visited;
            c.has_best = res.has_best;
            c.best = res.best;
            c.spec_hash = spec_hash;
            save_checkpoint(c, opts.checkpoint_path);
            since_checkpoint = 0;
        }
    }

    if (index < cardinality) {
        res.stopped_early = true;
        if (!opts.checkpoint_path.empty() && since_checkpoint > 0) {
            GridCheckpoint c;
            c.next_index = index;
            c.visited = res.visited;
            c.has_best = res.has_best;
            c.best = res.best;
            c.spec_hash = spec_hash;
            save_checkpoint(c, opts.checkpoint_path);
        }
    }
    return res;
}

}  // namespace exo
