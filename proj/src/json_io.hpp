#pragma once

// Private JSON helpers shared by the grid checkpointing and the experiment
// harness. Not part of the public headers.

#include "exolink/problem.hpp"
#include "json.hpp"

namespace exo::detail {

inline nlohmann::json outcome_to_json(const EvaluationOutcome& o) {
    return {
        {"design", o.design},
        {"objective", o.objective},
        {"feasible", o.feasible},
        {"constraints",
         {{"slider_violation", o.constraints.slider_violation},
          {"ratio_violation", o.constraints.ratio_violation},
          {"solver_failed", o.constraints.solver_failed},
          {"total_violation", o.constraints.total_violation}}},
        {"tau_mcp", o.torques_at_closed.tau_mcp},
        {"tau_pip", o.torques_at_closed.tau_pip},
    };
}

inline EvaluationOutcome outcome_from_json(const nlohmann::json& j) {
    EvaluationOutcome o;
    o.design = j.at("design").get<std::vector<double>>();
    o.objective = j.at("objective").get<double>();
    o.feasible = j.at("feasible").get<bool>();
    const auto& c = j.at("constraints");
    o.constraints.slider_violation = c.at("slider_violation").get<double>();
    o.constraints.ratio_violation = c.at("ratio_violation").get<double>();
    o.constraints.solver_failed = c.at("solver_failed").get<bool>();
    o.constraints.total_violation = c.at("total_violation").get<double>();
    o.torques_at_closed.tau_mcp = j.at("tau_mcp").get<double>();
    o.torques_at_closed.tau_pip = j.at("tau_pip").get<double>();
    return o;
}

}  // namespace exo::detail
