#include "exolink/statics.hpp"

namespace exo {

std::array<double, 2> actuation_jacobian(const LinkageModel& m,
                                         const LinkLengths& L,
                                         double mcp_rad, double pip_rad,
                                         const StateVector& s) {
    // Differentiate the closure identity r(x(pose), pose) = 0:
    //   J_x * dx/dpose = -dr/dpose, then read off the l_OA row.
    const auto Jx = residual_jacobian(m, L, mcp_rad, pip_rad, s);
    const auto Jp = residual_pose_jacobian(m, L, mcp_rad, pip_rad, s);

    std::array<double, 2> out{};
    for (int col = 0; col < 2; ++col) {
        std::array<double, 8> rhs{};
        for (int i = 0; i < 8; ++i) rhs[i] = -Jp[i][col];
        std::array<double, 8> dx{};
        double cond = 0.0;
        if (!detail::solve8(Jx, rhs, dx, 1e12, &cond))
            throw SingularityError(
                "closure Jacobian is singular at this configuration");
        out[col] = dx[0];  // state slot 0 = l_OA
    }
    return out;
}

TorqueResult compute_joint_torques(const LinkageModel& m, const LinkLengths& L,
                                   double mcp_rad, double pip_rad,
                                   const StateVector& s) {
    const auto dl = actuation_jacobian(m, L, mcp_rad, pip_rad, s);
    return {m.drive_sign * dl[0], m.drive_sign * dl[1]};
}

}  // namespace exo
