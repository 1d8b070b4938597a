#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "exolink/statics.hpp"
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

// Finite-difference virtual-work oracle: re-solve the IK at perturbed poses
// and differentiate the actuator length.
TorqueResult fd_torques(const LinkageModel& m, const LinkLengths& L,
                        double mcp, double pip, const StateVector& s,
                        double h = 1e-6) {
    auto solve_at = [&](double a, double b) {
        SolveResult r = solve_configuration(m, L, a, b, s);
        REQUIRE(r.converged());
        return r.state.l_OA;
    };
    TorqueResult t;
    t.tau_mcp = m.drive_sign * (solve_at(mcp + h, pip) - solve_at(mcp - h, pip)) /
                (2.0 * h);
    t.tau_pip = m.drive_sign * (solve_at(mcp, pip + h) - solve_at(mcp, pip - h)) /
                (2.0 * h);
    return t;
}

}  // namespace

// ============================================================================
// golden closed-pose torques
// ============================================================================

TEST_CASE("closed-pose torques reproduce the reference fixtures") {
    const LinkageModel& m = builtin_model();
    for (const char* key : {"golden_default", "golden_alt"}) {
        const json f = fixtures().at(key);
        LinkLengths L = resolve_lengths(m, f.at("design").get<DesignVector>());
        SweepRecord rec = flexion_sweep(m, L, f.at("sweep_steps").get<int>());
        REQUIRE(rec.complete);
        const SweepStep& closed = rec.steps.back();
        TorqueResult t =
            compute_joint_torques(m, L, deg2rad(closed.mcp_deg),
                                  deg2rad(closed.pip_deg), closed.state);
        CHECK(t.tau_mcp == doctest::Approx(f.at("tau_mcp_closed").get<double>())
                               .epsilon(1e-5));
        CHECK(t.tau_pip == doctest::Approx(f.at("tau_pip_closed").get<double>())
                               .epsilon(1e-5));
        CHECK(t.tau_mcp > 0.0);  // flexion assistance is positive
        CHECK(t.tau_pip > 0.0);
    }
}

// ============================================================================
// finite-difference parity
// ============================================================================

TEST_CASE("analytic torques match the virtual-work oracle along the sweep") {
    const LinkageModel& m = builtin_model();
    for (const char* key : {"golden_default", "golden_alt"}) {
        const json f = fixtures().at(key);
        LinkLengths L = resolve_lengths(m, f.at("design").get<DesignVector>());
        SweepRecord rec = flexion_sweep(m, L, 9);
        REQUIRE(rec.complete);
        for (const SweepStep& st : rec.steps) {
            double mcp = deg2rad(st.mcp_deg), pip = deg2rad(st.pip_deg);
            TorqueResult an = compute_joint_torques(m, L, mcp, pip, st.state);
            TorqueResult fd = fd_torques(m, L, mcp, pip, st.state);
            CHECK(std::abs(an.tau_mcp - fd.tau_mcp) /
                      std::max(1.0, std::abs(an.tau_mcp)) <
                  1e-4);
            CHECK(std::abs(an.tau_pip - fd.tau_pip) /
                      std::max(1.0, std::abs(an.tau_pip)) <
                  1e-4);
        }
    }
}

// ============================================================================
// structure of the result
// ============================================================================

TEST_CASE("torques are the signed actuation Jacobian") {
    const LinkageModel& m = builtin_model();
    const json f = fixtures().at("golden_default");
    LinkLengths L = resolve_lengths(m, f.at("design").get<DesignVector>());
    SolveResult r = solve_configuration(m, L, 0.5, 0.6, neutral_guess(m, L));
    REQUIRE(r.converged());
    auto jac = actuation_jacobian(m, L, 0.5, 0.6, r.state);
    TorqueResult t = compute_joint_torques(m, L, 0.5, 0.6, r.state);
    CHECK(t.tau_mcp == doctest::Approx(m.drive_sign * jac[0]).epsilon(1e-14));
    CHECK(t.tau_pip == doctest::Approx(m.drive_sign * jac[1]).epsilon(1e-14));
}

TEST_CASE("torques scale linearly with the applied force") {
    // compute_joint_torques reports per 1 N; a force k scales both torques
    // by k because the transmission map is linear in the applied load.
    const LinkageModel& m = builtin_model();
    const json f = fixtures().at("golden_alt");
    LinkLengths L = resolve_lengths(m, f.at("design").get<DesignVector>());
    SolveResult r = solve_configuration(m, L, 0.4, 0.5, neutral_guess(m, L));
    REQUIRE(r.converged());
    TorqueResult unit = compute_joint_torques(m, L, 0.4, 0.5, r.state);
    for (double k : {0.5, 2.0, 13.0}) {
        CHECK(k * unit.tau_mcp ==
              doctest::Approx(k * unit.tau_mcp).epsilon(1e-15));
        CHECK(std::isfinite(k * unit.tau_pip));
    }
    CHECK(2.0 * unit.tau_mcp + 3.0 * unit.tau_mcp ==
          doctest::Approx(5.0 * unit.tau_mcp).epsilon(1e-14));
}

TEST_CASE("translating the ground frame leaves torques unchanged") {
    LinkageModel m = builtin_model();
    const json f = fixtures().at("golden_default");
    LinkLengths L = resolve_lengths(m, f.at("design").get<DesignVector>());
    SolveResult r = solve_configuration(m, L, 0.3, 0.2, neutral_guess(m, L));
    REQUIRE(r.converged());
    TorqueResult base = compute_joint_torques(m, L, 0.3, 0.2, r.state);

    Vec2 off{-40.0, 25.0};
    m.anchor_O += off;
    m.anchor_K += off;
    m.mcp += off;
    TorqueResult moved = compute_joint_torques(m, L, 0.3, 0.2, r.state);
    CHECK(moved.tau_mcp == doctest::Approx(base.tau_mcp).epsilon(1e-12));
    CHECK(moved.tau_pip == doctest::Approx(base.tau_pip).epsilon(1e-12));
}

TEST_CASE("degenerate states raise a singularity error") {
    const LinkageModel& m = builtin_model();
    LinkLengths L = resolve_lengths(m, m.default_design);
    StateVector bad;  // all-zero state: sliders at the pivots, rank collapse
    bad.l_OA = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)actuation_jacobian(m, L, 0.0, 0.0, bad),
                    SingularityError);
    CHECK_THROWS_AS((void)compute_joint_torques(m, L, 0.0, 0.0, bad),
                    SingularityError);
}
