#include "exolink/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exolink/kinematics.hpp"

namespace exo {

namespace {
// Stand-in ratio excess when tau_pip vanishes and the ratio is undefined.
constexpr double kDegenerateRatioExcess = 1e6;
}  // namespace

const char* to_string(ObjectiveMode m) {
    return m == ObjectiveMode::Magnitude ? "magnitude" : "literal";
}

ObjectiveMode objective_mode_from_string(const std::string& s) {
    if (s == "magnitude") return ObjectiveMode::Magnitude;
    if (s == "literal") return ObjectiveMode::Literal;
    throw std::invalid_argument("unknown objective mode '" + s + "'");
}

double objective(const TorqueResult& t, ObjectiveMode mode) {
    if (mode == ObjectiveMode::Magnitude) return std::hypot(t.tau_mcp, t.tau_pip);
    const double sum = t.tau_mcp + t.tau_pip;
    if (sum < 0.0)
        throw std::domain_error(
            "literal objective undefined for negative torque sum");
    return std::sqrt(sum);
}

double constraint_violation(double c1_excess_mm, double c2_excess_mm,
                            double ratio_excess, double c1_width,
                            double c2_width, double ratio_width) {
    return c1_excess_mm / c1_width + c2_excess_mm / c2_width +
           ratio_excess / ratio_width;
}

DesignProblem::DesignProblem(std::shared_ptr<const LinkageModel> model,
                             ProblemConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
    if (!model_) throw std::invalid_argument("null model");
    if (cfg_.dv_count != 6 && cfg_.dv_count != 9)
        throw std::invalid_argument("dv_count must be 6 or 9");
    if (cfg_.sweep_steps < 2)
        throw std::invalid_argument("sweep_steps must be >= 2");
    if (!(cfg_.ratio_lo < cfg_.ratio_hi))
        throw std::invalid_argument("torque ratio window is empty");
    if (!(cfg_.penalty_ceiling > 0.0))
        throw std::invalid_argument("penalty_ceiling must be positive");
    bounds_ = cfg_.dv_count == 6 ? default_bounds_6dv() : default_bounds_9dv();

    s1_lo_ = cfg_.slider_min >= 0.0 ? cfg_.slider_min : model_->slider1.lo;
    s2_lo_ = cfg_.slider_min >= 0.0 ? cfg_.slider_min : model_->slider2.lo;
    s1_hi_ = cfg_.slider1_max >= 0.0 ? cfg_.slider1_max : model_->slider1.hi;
    s2_hi_ = cfg_.slider2_max >= 0.0 ? cfg_.slider2_max : model_->slider2.hi;
    if (!(s1_lo_ < s1_hi_) || !(s2_lo_ < s2_hi_))
        throw std::invalid_argument("slider windows are empty");
}

EvaluationOutcome DesignProblem::evaluate(const DesignVector& design) const {
    if (design.size() != static_cast<std::size_t>(cfg_.dv_count))
        throw std::invalid_argument("design arity does not match the problem");
    if (!bounds_.contains(design))
        throw std::invalid_argument("design is outside the search bounds");

    EvaluationOutcome out;
    out.design = design;

    const LinkLengths L = resolve_lengths(*model_, design);
    const SweepRecord sweep = flexion_sweep(*model_, L, cfg_.sweep_steps);

    auto fail_with_penalty = [&]() {
        out.constraints.solver_failed = true;
        out.constraints.total_violation = cfg_.penalty_ceiling;
        out.feasible = false;
        out.objective = 0.0;
        return out;
    };
    if (!sweep.complete) return fail_with_penalty();

    double c1_excess = 0.0, c2_excess = 0.0, ratio_excess = 0.0;
    TorqueResult closed{};
    for (std::size_t i = 0; i < sweep.steps.size(); ++i) {
        const SweepStep& st = sweep.steps[i];
        c1_excess = std::max({c1_excess, s1_lo_ - st.state.c1,
                              st.state.c1 - s1_hi_});
        c2_excess = std::max({c2_excess, s2_lo_ - st.state.c2,
                              st.state.c2 - s2_hi_});
        TorqueResult t;
        try {
            t = compute_joint_torques(*model_, L, deg2rad(st.mcp_deg),
                                      deg2rad(st.pip_deg), st.state);
        } catch (const SingularityError&) {
            return fail_with_penalty();
        }
        if (t.tau_pip == 0.0) {
            ratio_excess = std::max(ratio_excess, kDegenerateRatioExcess);
        } else {
            const double ratio = t.tau_mcp / t.tau_pip;
            ratio_excess = std::max({ratio_excess, cfg_.ratio_lo - ratio,
                                     ratio - cfg_.ratio_hi});
        }
        if (i + 1 == sweep.steps.size()) closed = t;
    }

    out.torques_at_closed = closed;
    out.constraints.slider_violation = std::max(c1_excess, 0.0) +
                                       std::max(c2_excess, 0.0);
    out.constraints.ratio_violation = std::max(ratio_excess, 0.0);
    out.constraints.total_violation = constraint_violation(
        std::max(c1_excess, 0.0), std::max(c2_excess, 0.0),
        std::max(ratio_excess, 0.0), s1_hi_ - s1_lo_, s2_hi_ - s2_lo_,
        cfg_.ratio_hi - cfg_.ratio_lo);
    out.feasible = out.constraints.total_violation == 0.0;

    try {
        out.objective = objective(closed, cfg_.objective_mode);
    } catch (const std::domain_error&) {
        // Literal mode with a negative torque sum: the objective is
        // undefined, so the design is rejected as infeasible instead.
        out.objective = 0.0;
        out.feasible = false;
        out.constraints.total_violation +=
            std::abs(closed.tau_mcp + closed.tau_pip);
    }
    return out;
}

}  // namespace exo
