#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

#include "exolink/problem.hpp"
#include "json.hpp"

using namespace exo;
using nlohmann::json;

namespace {

json fixtures() {
    static json doc = [] {
        std::ifstream in(std::string(EXO_FIXTURE_DIR) + "/golden.json");
        REQUIRE(in.good());
        return json::parse(in);
    }();
    return doc;
}

std::shared_ptr<const LinkageModel> shared_builtin() {
    return {&builtin_model(), [](const LinkageModel*) {}};
}

DesignProblem make_problem(int dv, ProblemConfig cfg = {}) {
    cfg.dv_count = dv;
    return DesignProblem(shared_builtin(), cfg);
}

}  // namespace

// ============================================================================
// objective
// ============================================================================

TEST_CASE("objective modes") {
    CHECK(objective({3.0, 4.0}, ObjectiveMode::Magnitude) ==
          doctest::Approx(5.0));
    CHECK(objective({0.0, 0.0}, ObjectiveMode::Magnitude) == 0.0);
    CHECK(objective({0.0, 0.0}, ObjectiveMode::Literal) == 0.0);
    CHECK(objective({9.0, 16.0}, ObjectiveMode::Literal) ==
          doctest::Approx(5.0));
    CHECK_THROWS_AS((void)objective({-3.0, 1.0}, ObjectiveMode::Literal),
                    std::domain_error);
}

TEST_CASE("magnitude objective is symmetric in the two torques") {
    for (auto [a, b] : {std::pair{1.5, 9.25}, {0.0, 4.0}, {22.1, 2.3}}) {
        CHECK(objective({a, b}, ObjectiveMode::Magnitude) ==
              doctest::Approx(objective({b, a}, ObjectiveMode::Magnitude))
                  .epsilon(1e-15));
    }
}

TEST_CASE("objective mode names round-trip") {
    CHECK(objective_mode_from_string("magnitude") == ObjectiveMode::Magnitude);
    CHECK(objective_mode_from_string("literal") == ObjectiveMode::Literal);
    CHECK(std::string(to_string(ObjectiveMode::Magnitude)) == "magnitude");
    CHECK_THROWS((void)objective_mode_from_string("other"));
}

// ============================================================================
// violation aggregation
// ============================================================================

TEST_CASE("constraint violation normalizes by range width") {
    CHECK(constraint_violation(0, 0, 0, 30, 30, 19.95) == 0.0);
    // 2 mm excess on a 30 mm slider range
    CHECK(constraint_violation(2.0, 0, 0, 30, 30, 19.95) ==
          doctest::Approx(2.0 / 30.0).epsilon(1e-15));
    // components add
    double both = constraint_violation(2.0, 3.0, 0.5, 30, 28, 19.95);
    CHECK(both == doctest::Approx(2.0 / 30 + 3.0 / 28 + 0.5 / 19.95));
    // monotone: doubling a component strictly increases the total
    CHECK(constraint_violation(4.0, 3.0, 0.5, 30, 28, 19.95) > both);
}

// ============================================================================
// full evaluation against the goldens
// ============================================================================

TEST_CASE("reference 6-DV design evaluates to the golden objective") {
    DesignProblem prob = make_problem(6);
    const json f = fixtures().at("golden_default");
    DesignVector d9 = f.at("design").get<DesignVector>();
    DesignVector d6(d9.begin(), d9.begin() + 6);
    EvaluationOutcome out = prob.evaluate(d6);
    CHECK(out.feasible);
    CHECK(out.constraints.total_violation == 0.0);
    CHECK(out.objective ==
          doctest::Approx(f.at("objective_magnitude").get<double>())
              .epsilon(1e-5));
    CHECK(out.torques_at_closed.tau_mcp ==
          doctest::Approx(f.at("tau_mcp_closed").get<double>()).epsilon(1e-5));
    CHECK(out.torques_at_closed.tau_pip ==
          doctest::Approx(f.at("tau_pip_closed").get<double>()).epsilon(1e-5));
}

TEST_CASE("reference 9-DV design evaluates to the golden objective") {
    DesignProblem prob = make_problem(9);
    const json f = fixtures().at("golden_alt");
    EvaluationOutcome out = prob.evaluate(f.at("design").get<DesignVector>());
    CHECK(out.feasible);
    CHECK(out.objective ==
          doctest::Approx(f.at("objective_magnitude").get<double>())
              .epsilon(1e-5));
}

TEST_CASE("evaluation is deterministic") {
    DesignProblem prob = make_problem(6);
    DesignVector d{58, 10, 15, 51, 56, 100};
    EvaluationOutcome a = prob.evaluate(d), b = prob.evaluate(d);
    CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.torques_at_closed, &b.torques_at_closed,
                      sizeof(TorqueResult)) == 0);
    CHECK(a.feasible == b.feasible);
}

// ============================================================================
// rejection and penalty paths
// ============================================================================

TEST_CASE("out-of-bounds or wrong-arity designs are rejected up front") {
    DesignProblem prob = make_problem(6);
    CHECK_THROWS_AS((void)prob.evaluate({58, 10, 15, 51, 56, 101}),
                    std::invalid_argument);  // GH above 100
    CHECK_THROWS_AS((void)prob.evaluate({58, 10, 15, 51, 56}),
                    std::invalid_argument);  // arity 5
    CHECK_THROWS_AS((void)prob.evaluate({58, 10, 15, 51, 56, 100, 35, 16, 37}),
                    std::invalid_argument);  // 9 genes on a 6-DV problem
}

TEST_CASE("tightened slider window turns the golden design infeasible") {
    // golden_default c1 peaks at 31.428...; capping the window at 30 mm
    // leaves a worst excess of exactly peak - 30.
    const json f = fixtures().at("golden_default");
    double c1_peak = f.at("c1_range").at(1).get<double>();
    ProblemConfig cfg;
    cfg.slider1_max = 30.0;
    DesignProblem prob = make_problem(6, cfg);
    DesignVector d9 = f.at("design").get<DesignVector>();
    EvaluationOutcome out = prob.evaluate({d9.begin(), d9.begin() + 6});
    CHECK_FALSE(out.feasible);
    CHECK_FALSE(out.constraints.solver_failed);
    CHECK(out.constraints.slider_violation ==
          doctest::Approx(c1_peak - 30.0).epsilon(1e-4));
    CHECK(out.constraints.total_violation ==
          doctest::Approx((c1_peak - 30.0) / (30.0 - prob.slider1_lo()))
              .epsilon(1e-4));
}

TEST_CASE("tightened ratio band reports the worst ratio excess") {
    // golden_default tau ratio spans [4.364, 9.767...]; a band capped at 4.0
    // is violated by ratio_peak - 4.
    const json f = fixtures().at("golden_default");
    double ratio_peak = f.at("ratio_range").at(1).get<double>();
    ProblemConfig cfg;
    cfg.ratio_hi = 4.0;
    DesignProblem prob = make_problem(6, cfg);
    DesignVector d9 = f.at("design").get<DesignVector>();
    EvaluationOutcome out = prob.evaluate({d9.begin(), d9.begin() + 6});
    CHECK_FALSE(out.feasible);
    CHECK(out.constraints.ratio_violation ==
          doctest::Approx(ratio_peak - 4.0).epsilon(1e-4));
    CHECK(out.constraints.total_violation ==
          doctest::Approx((ratio_peak - 4.0) / (4.0 - 0.05)).epsilon(1e-4));
}

TEST_CASE("solver failure maps to the penalty ceiling") {
    // An in-bounds 6-DV design whose sweep cannot close; found by scanning
    // the bound box deterministically.
    DesignProblem prob = make_problem(6);
    const LinkageModel& m = builtin_model();
    DesignVector failing;
    std::uint64_t probe = 0;
    for (; probe < 4096 && failing.empty(); ++probe) {
        DesignVector d(6);
        std::uint64_t h = probe * 2654435761u;
        for (int i = 0; i < 6; ++i) {
            const Bound& b = prob.bounds().b[i];
            d[i] = b.lo + (double)((h >> (i * 8)) & 0xff) / 255.0 * b.width();
        }
        LinkLengths L = resolve_lengths(m, d);
        if (!flexion_sweep(m, L, 8).complete) failing = d;
    }
    REQUIRE_MESSAGE(!failing.empty(),
                    "no unclosable in-bounds design found in 4096 probes");
    EvaluationOutcome out = prob.evaluate(failing);
    CHECK_FALSE(out.feasible);
    CHECK(out.constraints.solver_failed);
    CHECK(out.constraints.total_violation >=
          prob.config().penalty_ceiling);
    CHECK(out.objective == 0.0);
}

TEST_CASE("literal mode never reports a negative-sum objective") {
    ProblemConfig cfg;
    cfg.objective_mode = ObjectiveMode::Literal;
    DesignProblem prob = make_problem(6, cfg);
    const json f = fixtures().at("golden_default");
    DesignVector d9 = f.at("design").get<DesignVector>();
    EvaluationOutcome out = prob.evaluate({d9.begin(), d9.begin() + 6});
    // This design has positive torques, so literal mode is defined:
    CHECK(out.feasible);
    double want = std::sqrt(f.at("tau_mcp_closed").get<double>() +
                            f.at("tau_pip_closed").get<double>());
    CHECK(out.objective == doctest::Approx(want).epsilon(1e-5));
}

// ============================================================================
// configuration plumbing
// ============================================================================

TEST_CASE("problem validates its configuration") {
    ProblemConfig cfg;
    cfg.dv_count = 7;
    CHECK_THROWS_AS(DesignProblem(shared_builtin(), cfg),
                    std::invalid_argument);
    cfg = {};
    cfg.sweep_steps = 1;
    CHECK_THROWS_AS(DesignProblem(shared_builtin(), cfg),
                    std::invalid_argument);
    cfg = {};
    cfg.ratio_lo = 30.0;  // empty band
    CHECK_THROWS_AS(DesignProblem(shared_builtin(), cfg),
                    std::invalid_argument);
}

TEST_CASE("slider windows inherit from the model unless overridden") {
    DesignProblem def = make_problem(6);
    CHECK(def.slider1_lo() == doctest::Approx(2.0));
    CHECK(def.slider1_hi() == doctest::Approx(55.0));  // proximal phalanx
    CHECK(def.slider2_lo() == doctest::Approx(2.0));
    CHECK(def.slider2_hi() == doctest::Approx(40.0));  // middle phalanx

    ProblemConfig cfg;
    cfg.slider_min = 3.5;
    cfg.slider2_max = 31.0;
    DesignProblem merged = make_problem(6, cfg);
    CHECK(merged.slider1_lo() == doctest::Approx(3.5));
    CHECK(merged.slider2_hi() == doctest::Approx(31.0));
    CHECK(merged.slider1_hi() == doctest::Approx(55.0));
}
