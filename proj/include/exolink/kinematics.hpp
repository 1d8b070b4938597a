#pragma once

#include <array>
#include <string>
#include <vector>

#include "exolink/model.hpp"

namespace exo {

struct SolverSettings {
    double tolerance = 1e-9;      // residual infinity-norm
    int max_iterations = 200;
    double cond_limit = 1e12;     // SingularJacobian above this
    double min_damping = 1e-12;   // give up when backtracking stalls
};

enum class SolveStatus {
    Converged,
    NonConvergence,
    SingularJacobian,
};

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::NonConvergence;
    StateVector state;
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged() const { return status == SolveStatus::Converged; }
};

/** Named point positions of one assembled configuration (mm, hand frame). */
struct PointMap {
    Vec2 O, A, B, C, D, E, F, G, H, I, J, K, MCP, PIP;
};

/**
 * Stacked loop-closure residuals of the chain (8 scalars).
 *
 * Residual blocks, in order:
 *   0-1  slider I: bar-1 arm tip minus proximal-phalanx slider point
 *   2-3  slider J: bar-2 arm tip minus middle-phalanx slider point
 *   4-5  coupler A-B: link end minus bar-1 pin B
 *   6-7  coupler F-G: link end minus piston crank pin G
 *
 * Pose angles are radians here; the public API boundary converts degrees.
 */
std::array<double, 8> assemble_residuals(const LinkageModel& m,
                                         const LinkLengths& L,
                                         double mcp_rad, double pip_rad,
                                         const StateVector& s);

/** Analytic Jacobian of the residuals w.r.t. the 8 state unknowns. */
std::array<std::array<double, 8>, 8> residual_jacobian(const LinkageModel& m,
                                                       const LinkLengths& L,
                                                       double mcp_rad,
                                                       double pip_rad,
                                                       const StateVector& s);

/** Partial of the residuals w.r.t. the two pose angles (radians). */
std::array<std::array<double, 2>, 8> residual_pose_jacobian(
    const LinkageModel& m, const LinkLengths& L, double mcp_rad,
    double pip_rad, const StateVector& s);

/** Positions of all named points for a given state. */
PointMap point_map(const LinkageModel& m, const LinkLengths& L,
                   double mcp_rad, double pip_rad, const StateVector& s);

/** Damped Newton solve of the 8x8 closure system from an initial guess. */
SolveResult solve_configuration(const LinkageModel& m, const LinkLengths& L,
                                double mcp_rad, double pip_rad,
                                const StateVector& guess,
                                const SolverSettings& settings = {});

/**
 * Deterministic assembly-branch construction at the open pose (0, 0).
 * Used to seed the sweep; built from the closed-form slider trajectories
 * of the two phalanx loops plus a coarse scan for the piston branch.
 */
StateVector neutral_guess(const LinkageModel& m, const LinkLengths& L);

struct SweepStep {
    double mcp_deg = 0.0;
    double pip_deg = 0.0;
    StateVector state;
    bool converged = false;
};

struct SweepRecord {
    std::vector<SweepStep> steps;      // truncated at first failure
    bool complete = false;             // all steps converged
    SolveStatus failure = SolveStatus::Converged;  // cause when !complete
    int failed_step = -1;
};

/**
 * Flexion sweep from (0,0) to (80,90) degrees in `steps` linear increments,
 * warm-starting each solve from the previous state. Aborts on the first
 * solver failure; the record keeps the converged prefix and the cause.
 */
SweepRecord flexion_sweep(const LinkageModel& m, const LinkLengths& L,
                          int steps, const SolverSettings& settings = {});

// Dense linear algebra helpers shared by the solver and the statics module.
namespace detail {
// Solves A x = b (8x8) by partial-pivot elimination; returns false when the
// estimated infinity-norm condition number exceeds cond_limit.
bool solve8(const std::array<std::array<double, 8>, 8>& A,
            const std::array<double, 8>& b, std::array<double, 8>& x,
            double cond_limit, double* cond_out = nullptr);
}  // namespace detail

}  // namespace exo
