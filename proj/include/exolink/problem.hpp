#pragma once

#include <functional>
#include <memory>
#include <string>

#include "exolink/design.hpp"
#include "exolink/model.hpp"
#include "exolink/statics.hpp"

namespace exo {

enum class ObjectiveMode {
    Magnitude,  // sqrt(tau_mcp^2 + tau_pip^2), default
    Literal,    // sqrt(tau_mcp + tau_pip)
};

const char* to_string(ObjectiveMode m);
ObjectiveMode objective_mode_from_string(const std::string& s);

struct ProblemConfig {
    int dv_count = 6;  // 6 | 9
    ObjectiveMode objective_mode = ObjectiveMode::Magnitude;
    int sweep_steps = 46;
    double ratio_lo = 0.05;
    double ratio_hi = 20.0;
    double penalty_ceiling = 1e3;   // total_violation on solver failure
    // Slider windows; negative = inherit from the model file.
    double slider_min = -1.0;
    double slider1_max = -1.0;
    double slider2_max = -1.0;
};

struct ConstraintReport {
    double slider_violation = 0.0;  // worst excess, mm (c1 + c2 components)
    double ratio_violation = 0.0;   // worst excess beyond [ratio_lo, ratio_hi]
    bool solver_failed = false;
    double total_violation = 0.0;   // normalized sum; 0 iff feasible
};

struct EvaluationOutcome {
    DesignVector design;
    double objective = 0.0;   // N·mm of joint torque per 1 N of rod force
    ConstraintReport constraints;
    bool feasible = false;
    TorqueResult torques_at_closed;
};

/** Objective of a torque pair under the configured mode.
 *  Literal mode with tau_mcp + tau_pip < 0 throws std::domain_error. */
double objective(const TorqueResult& t, ObjectiveMode mode);

/** Normalized violation aggregate: each component divided by its range width. */
double constraint_violation(double c1_excess_mm, double c2_excess_mm,
                            double ratio_excess, double c1_width,
                            double c2_width, double ratio_width);

class DesignProblem {
public:
    DesignProblem(std::shared_ptr<const LinkageModel> model, ProblemConfig cfg);

    /** Full constrained evaluation of one in-bounds design.
     *  Out-of-bounds or wrong-arity designs are rejected (std::invalid_argument). */
    EvaluationOutcome evaluate(const DesignVector& design) const;

    const DesignBounds& bounds() const { return bounds_; }
    const ProblemConfig& config() const { return cfg_; }
    const LinkageModel& model() const { return *model_; }

    // Effective slider windows after model/config merging.
    double slider1_lo() const { return s1_lo_; }
    double slider1_hi() const { return s1_hi_; }
    double slider2_lo() const { return s2_lo_; }
    double slider2_hi() const { return s2_hi_; }

private:
    std::shared_ptr<const LinkageModel> model_;
    ProblemConfig cfg_;
    DesignBounds bounds_;
    double s1_lo_, s1_hi_, s2_lo_, s2_hi_;
};

/** Evaluation callback used by the optimizers (pure function of the design). */
using ObjectiveFn = std::function<EvaluationOutcome(const DesignVector&)>;

}  // namespace exo
