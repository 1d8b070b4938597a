#include "exolink/evo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exolink/geometry.hpp"
#include "exolink/util.hpp"

namespace exo {

namespace {

constexpr double kCrunchEpsilon = 1e-9;  // keeps degenerate weights positive

void evaluate_pending(std::vector<Individual>& pop, const ObjectiveFn& fn,
                      int workers, long& evaluated) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (!pop[i].evaluated) todo.push_back(i);
    parallel_for(todo.size(), workers, [&](std::size_t k) {
        Individual& ind = pop[todo[k]];
        try {
            ind.outcome = fn(ind.genes);
        } catch (const std::exception&) {
            // an evaluation error never aborts a run: the individual is
            // ranked behind every ordinary infeasible outcome instead
            ind.outcome = EvaluationOutcome{};
            ind.outcome.design = ind.genes;
            ind.outcome.feasible = false;
            ind.outcome.constraints.solver_failed = true;
            ind.outcome.constraints.total_violation = 1e30;
        }
        ind.evaluated = true;
    });
    evaluated = static_cast<long>(todo.size());
}

std::size_t best_index(const std::vector<Individual>& pop) {
    std::size_t bi = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (deb_compare(pop[i].outcome, pop[bi].outcome) > 0) bi = i;
    return bi;
}

std::vector<Individual> random_population(int n, const DesignBounds& bounds,
                                          Rng& rng) {
    std::vector<Individual> pop(static_cast<std::size_t>(n));
    for (auto& ind : pop) {
        ind.genes.resize(bounds.size());
        for (std::size_t j = 0; j < bounds.size(); ++j)
            ind.genes[j] = rng.uniform(bounds.b[j].lo, bounds.b[j].hi);
    }
    return pop;
}

}  // namespace

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * kPi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

void GaParams::validate() const {
    if (population_size < 2 || population_size % 2 != 0)
        throw std::invalid_argument("GA population size must be even and >= 2");
    if (generations < 1)
        throw std::invalid_argument("GA generation count must be >= 1");
    if (crossover_probability < 0.0 || crossover_probability > 1.0)
        throw std::invalid_argument("crossover probability must be in [0, 1]");
    if (blx_alpha < 0.0)
        throw std::invalid_argument("BLX alpha must be non-negative");
    if (mutation_probability < 0.0 || mutation_probability > 1.0)
        throw std::invalid_argument("mutation probability must be in [0, 1]");
    if (!(mutation_eta > 0.0))
        throw std::invalid_argument("mutation eta must be positive");
}

void BbbcParams::validate() const {
    if (population_size < 2)
        throw std::invalid_argument("BB-BC population size must be >= 2");
    if (generations < 1)
        throw std::invalid_argument("BB-BC generation count must be >= 1");
    if (!(bang_scale > 0.0))
        throw std::invalid_argument("bang scale must be positive");
}

const char* to_string(CrunchMode m) {
    return m == CrunchMode::BestFit ? "best_fit" : "fitness_weighted";
}

CrunchMode crunch_mode_from_string(const std::string& s) {
    if (s == "best_fit") return CrunchMode::BestFit;
    if (s == "fitness_weighted") return CrunchMode::FitnessWeighted;
    throw std::invalid_argument("unknown crunch mode '" + s + "'");
}

int deb_compare(const EvaluationOutcome& a, const EvaluationOutcome& b) {
    if (a.feasible != b.feasible) return a.feasible ? 1 : -1;
    if (!a.feasible) {
        if (a.constraints.total_violation != b.constraints.total_violation)
            return a.constraints.total_violation < b.constraints.total_violation
                       ? 1
                       : -1;
    } else if (a.objective != b.objective) {
        return a.objective > b.objective ? 1 : -1;
    }
    if (a.design < b.design) return 1;
    if (b.design < a.design) return -1;
    return 0;
}

bool deb_better(const EvaluationOutcome& a, const EvaluationOutcome& b) {
    return deb_compare(a, b) > 0;
}

double outcome_score(const EvaluationOutcome& o) {
    return o.feasible ? o.objective : -o.constraints.total_violation;
}

std::vector<std::size_t> tournament_select(const std::vector<Individual>& pop,
                                           Rng& rng) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> parents;
    parents.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = rng.index(n);
        const std::size_t j = rng.index(n);
        parents.push_back(deb_compare(pop[i].outcome, pop[j].outcome) >= 0 ? i
                                                                           : j);
    }
    return parents;
}

std::pair<DesignVector, DesignVector> blx_crossover(const DesignVector& p1,
                                                    const DesignVector& p2,
                                                    double alpha,
                                                    const DesignBounds& bounds,
                                                    Rng& rng) {
    DesignVector c1(p1.size()), c2(p1.size());
    for (std::size_t j = 0; j < p1.size(); ++j) {
        const double lo = std::min(p1[j], p2[j]);
        const double hi = std::max(p1[j], p2[j]);
        const double span = hi - lo;
        c1[j] = rng.uniform(lo - alpha * span, hi + alpha * span);
        c2[j] = rng.uniform(lo - alpha * span, hi + alpha * span);
    }
    bounds.clamp(c1);
    bounds.clamp(c2);
    return {std::move(c1), std::move(c2)};
}

double polynomial_delta(double u, double eta) {
    const double exponent = 1.0 / (eta + 1.0);
    if (u < 0.5) return std::pow(2.0 * u, exponent) - 1.0;
    return 1.0 - std::pow(2.0 * (1.0 - u), exponent);
}

DesignVector polynomial_mutate(const DesignVector& x, const DesignBounds& bounds,
                               double pom, double eta, Rng& rng) {
    DesignVector out = x;
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (rng.uniform() >= pom) continue;
        const double delta = polynomial_delta(rng.uniform(), eta);
        out[j] += delta * bounds.b[j].width();
    }
    bounds.clamp(out);
    return out;
}

std::vector<Individual> survive_mu_plus_lambda(const std::vector<Individual>& P,
                                               const std::vector<Individual>& Q) {
    std::vector<Individual> all;
    all.reserve(P.size() + Q.size());
    all.insert(all.end(), P.begin(), P.end());
    all.insert(all.end(), Q.begin(), Q.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const Individual& a, const Individual& b) {
                         return deb_compare(a.outcome, b.outcome) > 0;
                     });
    all.resize(P.size());
    return all;
}

double bang_offset(double width, int iteration, double scale, Rng& rng) {
    return scale * width * rng.normal() / static_cast<double>(iteration);
}

std::vector<Individual> bang(const Individual& elite, int iteration,
                             const BbbcParams& params, const DesignBounds& bounds,
                             Rng& rng) {
    if (iteration < 2)
        throw std::invalid_argument(
            "bang applies from the second generation onward");
    std::vector<Individual> pop(static_cast<std::size_t>(params.population_size));
    pop[0].genes = elite.genes;  // re-evaluated with the rest of the batch
    for (std::size_t i = 1; i < pop.size(); ++i) {
        pop[i].genes = elite.genes;
        for (std::size_t j = 0; j < bounds.size(); ++j)
            pop[i].genes[j] += bang_offset(bounds.b[j].width(), iteration,
                                           params.bang_scale, rng);
        bounds.clamp(pop[i].genes);
    }
    return pop;
}

DesignVector crunch(const std::vector<Individual>& pop, CrunchMode mode) {
    if (pop.empty()) throw std::invalid_argument("crunch of empty population");
    if (mode == CrunchMode::BestFit) return pop[best_index(pop)].genes;

    // Fitness-weighted center of mass. With feasible individuals present the
    // weights come from objectives (rebased at the worst feasible one);
    // otherwise from violations (rebased at the worst violator).
    std::vector<double> w(pop.size(), 0.0);
    bool any_feasible = false;
    for (const auto& ind : pop) any_feasible |= ind.outcome.feasible;
    if (any_feasible) {
        double worst = 0.0;
        bool first = true;
        for (const auto& ind : pop) {
            if (!ind.outcome.feasible) continue;
            worst = first ? ind.outcome.objective
                          : std::min(worst, ind.outcome.objective);
            first = false;
        }
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (pop[i].outcome.feasible)
                w[i] = pop[i].outcome.objective - worst + kCrunchEpsilon;
    } else {
        double worst = 0.0;
        for (const auto& ind : pop)
            worst = std::max(worst, ind.outcome.constraints.total_violation);
        for (std::size_t i = 0; i < pop.size(); ++i)
            w[i] = worst - pop[i].outcome.constraints.total_violation +
                   kCrunchEpsilon;
    }

    DesignVector cm(pop[0].genes.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        total += w[i];
        for (std::size_t j = 0; j < cm.size(); ++j)
            cm[j] += w[i] * pop[i].genes[j];
    }
    for (double& v : cm) v /= total;
    return cm;
}

int detect_convergence(const std::vector<double>& trace, double threshold,
                       int window) {
    const int T = static_cast<int>(trace.size());
    if (T == 0) return 0;
    for (int k = 1; k <= T; ++k) {
        const int end = window > 0 ? std::min(k + window, T) : T;
        if (trace[static_cast<std::size_t>(end - 1)] -
                trace[static_cast<std::size_t>(k - 1)] <=
            threshold)
            return k;
    }
    return T;
}

OptimizerRun run_ga(const GaParams& params, const ObjectiveFn& problem,
                    const DesignBounds& bounds, std::uint64_t seed,
                    const RunOptions& opts) {
    params.validate();
    if (bounds.size() == 0) throw std::invalid_argument("empty design bounds");
    const double t0 = monotonic_seconds();

    OptimizerRun run;
    run.algorithm = "ga";
    run.seed = seed;

    Rng rng(seed);
    std::vector<Individual> pop =
        random_population(params.population_size, bounds, rng);
    long evaluated = 0;
    evaluate_pending(pop, problem, opts.workers, evaluated);
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) {
                         return deb_compare(a.outcome, b.outcome) > 0;
                     });
    run.trace.push_back(outcome_score(pop.front().outcome));
    run.eval_counts.push_back(evaluated);

    for (int gen = 2; gen <= params.generations; ++gen) {
        const std::vector<std::size_t> parents = tournament_select(pop, rng);
        std::vector<Individual> offspring;
        offspring.reserve(pop.size());
        for (std::size_t k = 0; k + 1 < parents.size(); k += 2) {
            const DesignVector& p1 = pop[parents[k]].genes;
            const DesignVector& p2 = pop[parents[k + 1]].genes;
            DesignVector c1, c2;
            if (rng.uniform() < params.crossover_probability) {
                std::tie(c1, c2) =
                    blx_crossover(p1, p2, params.blx_alpha, bounds, rng);
            } else {
                c1 = p1;
                c2 = p2;
            }
            Individual a, b;
            a.genes = polynomial_mutate(c1, bounds, params.mutation_probability,
                                        params.mutation_eta, rng);
            b.genes = polynomial_mutate(c2, bounds, params.mutation_probability,
                                        params.mutation_eta, rng);
            offspring.push_back(std::move(a));
            offspring.push_back(std::move(b));
        }
        evaluate_pending(offspring, problem, opts.workers, evaluated);
        pop = survive_mu_plus_lambda(pop, offspring);
        run.trace.push_back(outcome_score(pop.front().outcome));
        run.eval_counts.push_back(evaluated);
    }

    run.best = pop.front();
    run.convergence_generation = detect_convergence(run.trace);
    for (long c : run.eval_counts) run.total_evaluations += c;
    run.wall_time_s = monotonic_seconds() - t0;
    return run;
}

OptimizerRun run_bbbc(const BbbcParams& params, const ObjectiveFn& problem,
                      const DesignBounds& bounds, std::uint64_t seed,
                      const RunOptions& opts) {
    params.validate();
    if (bounds.size() == 0) throw std::invalid_argument("empty design bounds");
    const double t0 = monotonic_seconds();

    OptimizerRun run;
    run.algorithm = "bbbc";
    run.seed = seed;

    Rng rng(seed);
    std::vector<Individual> pop =
        random_population(params.population_size, bounds, rng);
    long evaluated = 0;
    evaluate_pending(pop, problem, opts.workers, evaluated);
    Individual best = pop[best_index(pop)];
    run.trace.push_back(outcome_score(best.outcome));
    run.eval_counts.push_back(evaluated);

    for (int gen = 2; gen <= params.generations; ++gen) {
        Individual center;
        center.genes = crunch(pop, params.crunch_mode);
        pop = bang(center, gen, params, bounds, rng);
        evaluate_pending(pop, problem, opts.workers, evaluated);
        const Individual& gen_best = pop[best_index(pop)];
        if (deb_better(gen_best.outcome, best.outcome)) best = gen_best;
        run.trace.push_back(outcome_score(best.outcome));
        run.eval_counts.push_back(evaluated);
    }

    run.best = best;
    run.convergence_generation = detect_convergence(run.trace);
    for (long c : run.eval_counts) run.total_evaluations += c;
    run.wall_time_s = monotonic_seconds() - t0;
    return run;
}

}  // namespace exo
