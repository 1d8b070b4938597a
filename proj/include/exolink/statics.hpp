#pragma once

#include <array>
#include <stdexcept>

#include "exolink/kinematics.hpp"
#include "exolink/model.hpp"

namespace exo {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Joint torques for a 1 N actuator force (N·mm, flexion positive). */
struct TorqueResult {
    double tau_mcp = 0.0;
    double tau_pip = 0.0;
};

/**
 * Implicit-function-theorem Jacobian of the actuator length with respect to
 * the two finger angles: (d l_OA / d q_MCP, d l_OA / d q_PIP), in mm/rad.
 * The state must satisfy the closure residuals (converged solve).
 * Throws SingularityError when the closure Jacobian is near-singular.
 */
std::array<double, 2> actuation_jacobian(const LinkageModel& m,
                                         const LinkLengths& L,
                                         double mcp_rad, double pip_rad,
                                         const StateVector& s);

/**
 * Static torque distribution by virtual work: tau_i = sign * d l_OA / d q_i
 * for a unit (1 N) actuator force. The model's drive sign makes flexion
 * assistance positive.
 */
TorqueResult compute_joint_torques(const LinkageModel& m, const LinkLengths& L,
                                   double mcp_rad, double pip_rad,
                                   const StateVector& s);

}  // namespace exo
