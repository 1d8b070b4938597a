#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "exolink/design.hpp"
#include "exolink/problem.hpp"

namespace exo {

/**
 * Deterministic random stream for the genetic operators.
 *
 * All operator draws come from one sequential stream so that runs are
 * bit-identical for a fixed seed regardless of how evaluations are
 * parallelized. The uniform/normal transforms are hand-rolled because the
 * standard-library distributions are implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /** Uniform double in [0, 1). */
    double uniform() {
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }
    double uniform(double lo, double hi) {
        return lo == hi ? lo : lo + (hi - lo) * uniform();
    }
    /** Uniform index in [0, n). */
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }
    /** Standard normal via Box-Muller (cached spare). */
    double normal();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct Individual {
    DesignVector genes;
    EvaluationOutcome outcome;
    bool evaluated = false;
};

struct GaParams {
    int population_size = 300;   // n, even
    int generations = 50;        // g, counting the evaluated random init as 1
    double crossover_probability = 1.0;  // per pair
    double blx_alpha = 0.5;
    double mutation_probability = 0.2;   // per gene
    double mutation_eta = 20.0;          // polynomial distribution index
    void validate() const;  // throws std::invalid_argument
};

enum class CrunchMode { BestFit, FitnessWeighted };
const char* to_string(CrunchMode m);
CrunchMode crunch_mode_from_string(const std::string& s);

struct BbbcParams {
    int population_size = 300;
    int generations = 50;  // first generation is the uniform random init
    CrunchMode crunch_mode = CrunchMode::BestFit;
    double bang_scale = 1.0;  // r
    void validate() const;
};

struct OptimizerRun {
    std::string algorithm;           // "ga" | "bbbc"
    std::uint64_t seed = 0;
    std::vector<double> trace;       // best score after each generation
    std::vector<long> eval_counts;   // evaluations per generation
    Individual best;
    int convergence_generation = 0;  // 1-based
    long total_evaluations = 0;
    double wall_time_s = 0.0;        // informational; not part of the canonical record
};

// ----------------------------------------------------------------- operators

/** Deb's rules: +1 when a beats b, -1 when b beats a; lexicographic gene
 *  comparison breaks ties deterministically (0 only for identical genes). */
int deb_compare(const EvaluationOutcome& a, const EvaluationOutcome& b);
bool deb_better(const EvaluationOutcome& a, const EvaluationOutcome& b);

/** Scalar used for traces: objective when feasible, -total_violation when not.
 *  Monotone under deb_compare, so elitist traces never decrease. */
double outcome_score(const EvaluationOutcome& o);

/** Binary tournament with replacement; returns n parent indices. */
std::vector<std::size_t> tournament_select(const std::vector<Individual>& pop,
                                           Rng& rng);

/** BLX-alpha blend of two parents (per-pair crossover probability applied by
 *  the caller); children clamped to bounds. */
std::pair<DesignVector, DesignVector> blx_crossover(const DesignVector& p1,
                                                    const DesignVector& p2,
                                                    double alpha,
                                                    const DesignBounds& bounds,
                                                    Rng& rng);

/** Polynomial-mutation magnitude for a unit draw u (pure helper, exposed for
 *  distribution tests): (2u)^(1/(eta+1)) - 1 below u = 0.5, mirrored above. */
double polynomial_delta(double u, double eta);

/** Per-gene polynomial mutation at probability pom, clamped to bounds. */
DesignVector polynomial_mutate(const DesignVector& x, const DesignBounds& bounds,
                               double pom, double eta, Rng& rng);

/** Elitist mu+lambda: best n of P ∪ Q under deb_compare (stable). */
std::vector<Individual> survive_mu_plus_lambda(const std::vector<Individual>& P,
                                               const std::vector<Individual>& Q);

/** One BB-BC dispersion offset before clamping: scale * width * N(0,1) / i.
 *  Exposed so the offspring distribution can be tested without clamping. */
double bang_offset(double width, int iteration, double scale, Rng& rng);

/** New population spread around cm at iteration i (>= 2); the cm source
 *  individual is injected unchanged in slot 0. */
std::vector<Individual> bang(const Individual& elite, int iteration,
                             const BbbcParams& params, const DesignBounds& bounds,
                             Rng& rng);

/** Center of mass of an evaluated population under the configured mode. */
DesignVector crunch(const std::vector<Individual>& pop, CrunchMode mode);

/** First 1-based generation k whose remaining-window improvement is within
 *  threshold; window = 0 means the remainder of the run (strict reading). */
int detect_convergence(const std::vector<double>& trace, double threshold = 0.5,
                       int window = 0);

// ------------------------------------------------------------------- drivers

struct RunOptions {
    int workers = 1;  // evaluation parallelism; never affects results
};

OptimizerRun run_ga(const GaParams& params, const ObjectiveFn& problem,
                    const DesignBounds& bounds, std::uint64_t seed,
                    const RunOptions& opts = {});

OptimizerRun run_bbbc(const BbbcParams& params, const ObjectiveFn& problem,
                      const DesignBounds& bounds, std::uint64_t seed,
                      const RunOptions& opts = {});

}  // namespace exo
