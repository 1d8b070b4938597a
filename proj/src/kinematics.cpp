#include "exolink/kinematics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace exo {

namespace {

// Perpendicular-arm sides of the three right-angle marks (C, E, H).
struct MarkSides {
    double sC = -1.0, sE = -1.0, sH = 1.0;
};

MarkSides mark_sides(const LinkageModel& m) {
    MarkSides s;
    for (const auto& mk : m.marks) {
        if (mk.at == "C") s.sC = mk.side;
        else if (mk.at == "E") s.sE = mk.side;
        else if (mk.at == "H") s.sH = mk.side;
    }
    return s;
}

double inf_norm(const std::array<double, 8>& r) {
    double n = 0.0;
    for (double v : r) n = std::max(n, std::abs(v));
    return n;
}

bool all_finite(const std::array<double, 8>& r) {
    for (double v : r)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::NonConvergence: return "non_convergence";
        case SolveStatus::SingularJacobian: return "singular_jacobian";
    }
    return "unknown";
}

PointMap point_map(const LinkageModel& m, const LinkLengths& L,
                   double mcp_rad, double pip_rad, const StateVector& s) {
    const MarkSides sd = mark_sides(m);
    const double th_p = -mcp_rad;            // proximal phalanx heading
    const double th_m = -(mcp_rad + pip_rad);  // middle phalanx heading
    PointMap p;
    p.O = m.anchor_O;
    p.K = m.anchor_K;
    p.MCP = m.mcp;
    p.PIP = p.MCP + m.proximal_len * dir(th_p);
    p.B = p.K + L.BK * dir(s.q_B);
    p.C = p.K + (L.BK + L.BC) * dir(s.q_B);
    p.D = p.K + (L.BK + L.BC + L.CD) * dir(s.q_B);
    p.I = p.C + L.CI * dir(s.q_B + sd.sC * kPi / 2.0);
    p.E = p.D + L.DE * dir(s.q_D);
    p.F = p.D + (L.DE + L.EF) * dir(s.q_D);
    p.J = p.E + L.EJ * dir(s.q_D + sd.sE * kPi / 2.0);
    p.A = p.O + s.l_OA * dir(s.q_O);
    p.H = p.O + (s.l_OA - L.AH) * dir(s.q_O);
    p.G = p.H + L.GH * dir(s.q_O + sd.sH * kPi / 2.0);
    return p;
}

std::array<double, 8> assemble_residuals(const LinkageModel& m,
                                         const LinkLengths& L,
                                         double mcp_rad, double pip_rad,
                                         const StateVector& s) {
    const PointMap p = point_map(m, L, mcp_rad, pip_rad, s);
    const double th_p = -mcp_rad;
    const double th_m = -(mcp_rad + pip_rad);
    const Vec2 I_f = p.MCP + s.c1 * dir(th_p);
    const Vec2 J_f = p.PIP + s.c2 * dir(th_m);
    const Vec2 Bc = p.A + L.AB * dir(s.q_A) - p.B;    // coupler A-B closure
    const Vec2 Gc = p.F + L.FG * dir(s.q_G) - p.G;    // coupler F-G closure
    return {p.I.x - I_f.x, p.I.y - I_f.y,
            p.J.x - J_f.x, p.J.y - J_f.y,
            Bc.x, Bc.y, Gc.x, Gc.y};
}

std::array<std::array<double, 8>, 8> residual_jacobian(
    const LinkageModel& m, const LinkLengths& L, double mcp_rad,
    double pip_rad, const StateVector& s) {
    const MarkSides sd = mark_sides(m);
    const double th_p = -mcp_rad;
    const double th_m = -(mcp_rad + pip_rad);

    std::array<std::array<double, 8>, 8> J{};
    auto put = [&J](int row, int col, Vec2 v) {
        J[row][col] = v.x;
        J[row + 1][col] = v.y;
    };

    // rows 0-1: slider I loop
    put(0, 3, (L.BK + L.BC) * dirdot(s.q_B) +
                  L.CI * dirdot(s.q_B + sd.sC * kPi / 2.0));
    put(0, 6, -1.0 * dir(th_p));

    // rows 2-3: slider J loop (D rides bar 1)
    put(2, 3, (L.BK + L.BC + L.CD) * dirdot(s.q_B));
    put(2, 5, L.DE * dirdot(s.q_D) + L.EJ * dirdot(s.q_D + sd.sE * kPi / 2.0));
    put(2, 7, -1.0 * dir(th_m));

    // rows 4-5: coupler A-B
    put(4, 0, dir(s.q_O));
    put(4, 1, s.l_OA * dirdot(s.q_O));
    put(4, 2, L.AB * dirdot(s.q_A));
    put(4, 3, -L.BK * dirdot(s.q_B));

    // rows 6-7: coupler F-G (F rides bar 2 whose pin D rides bar 1)
    put(6, 0, -1.0 * dir(s.q_O));
    put(6, 1, -(s.l_OA - L.AH) * dirdot(s.q_O) -
                  L.GH * dirdot(s.q_O + sd.sH * kPi / 2.0));
    put(6, 3, (L.BK + L.BC + L.CD) * dirdot(s.q_B));
    put(6, 4, L.FG * dirdot(s.q_G));
    put(6, 5, (L.DE + L.EF) * dirdot(s.q_D));
    return J;
}

std::array<std::array<double, 2>, 8> residual_pose_jacobian(
    const LinkageModel& m, const LinkLengths& L, double mcp_rad,
    double pip_rad, const StateVector& s) {
    (void)m;
    (void)L;
    const double th_p = -mcp_rad;
    const double th_m = -(mcp_rad + pip_rad);
    // th_p = -mcp and th_m = -(mcp+pip), so the chain factor is -1 and the
    // finger-side terms flip sign once more when moved across the residual.
    const Vec2 dIdm = s.c1 * dirdot(th_p);
    const Vec2 dJdm = m.proximal_len * dirdot(th_p) + s.c2 * dirdot(th_m);
    const Vec2 dJdp = s.c2 * dirdot(th_m);

    std::array<std::array<double, 2>, 8> P{};
    P[0][0] = dIdm.x;
    P[1][0] = dIdm.y;
    P[2][0] = dJdm.x;
    P[3][0] = dJdm.y;
    P[2][1] = dJdp.x;
    P[3][1] = dJdp.y;
    return P;
}

namespace detail {

bool solve8(const std::array<std::array<double, 8>, 8>& A,
            const std::array<double, 8>& b, std::array<double, 8>& x,
            double cond_limit, double* cond_out) {
    constexpr int N = 8;
    std::array<std::array<double, N>, N> lu = A;
    std::array<int, N> perm{};
    for (int i = 0; i < N; ++i) perm[i] = i;

    double norm_a = 0.0;
    for (int i = 0; i < N; ++i) {
        double row = 0.0;
        for (int j = 0; j < N; ++j) row += std::abs(A[i][j]);
        norm_a = std::max(norm_a, row);
    }

    const double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
        int p = k;
        for (int i = k + 1; i < N; ++i)
            if (std::abs(lu[i][k]) > std::abs(lu[p][k])) p = i;
        if (lu[p][k] == 0.0 || !std::isfinite(lu[p][k])) {
            if (cond_out) *cond_out = inf;
            return false;
        }
        if (p != k) {
            std::swap(lu[p], lu[k]);
            std::swap(perm[p], perm[k]);
        }
        for (int i = k + 1; i < N; ++i) {
            lu[i][k] /= lu[k][k];
            for (int j = k + 1; j < N; ++j) lu[i][j] -= lu[i][k] * lu[k][j];
        }
    }

    auto lu_solve = [&](const std::array<double, N>& rhs,
                        std::array<double, N>& out) {
        for (int i = 0; i < N; ++i) out[i] = rhs[perm[i]];
        for (int i = 1; i < N; ++i)
            for (int j = 0; j < i; ++j) out[i] -= lu[i][j] * out[j];
        for (int i = N - 1; i >= 0; --i) {
            for (int j = i + 1; j < N; ++j) out[i] -= lu[i][j] * out[j];
            out[i] /= lu[i][i];
        }
    };

    // infinity-norm condition number via the explicit inverse (N is tiny)
    std::array<double, N> inv_rowsum{};
    std::array<double, N> e{}, col{};
    for (int j = 0; j < N; ++j) {
        e.fill(0.0);
        e[j] = 1.0;
        lu_solve(e, col);
        for (int i = 0; i < N; ++i) inv_rowsum[i] += std::abs(col[i]);
    }
    double norm_inv = 0.0;
    for (int i = 0; i < N; ++i) norm_inv = std::max(norm_inv, inv_rowsum[i]);
    const double cond = norm_a * norm_inv;
    if (cond_out) *cond_out = cond;
    if (!(cond <= cond_limit)) return false;

    lu_solve(b, x);
    return all_finite(x);
}

}  // namespace detail

SolveResult solve_configuration(const LinkageModel& m, const LinkLengths& L,
                                double mcp_rad, double pip_rad,
                                const StateVector& guess,
                                const SolverSettings& settings) {
    SolveResult out;
    std::array<double, 8> x = guess.to_array();
    std::array<double, 8> r =
        assemble_residuals(m, L, mcp_rad, pip_rad, StateVector::from_array(x));
    if (!all_finite(r)) {
        out.state = guess;
        out.residual_norm = std::numeric_limits<double>::infinity();
        return out;
    }
    double rn = inf_norm(r);

    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        if (rn <= settings.tolerance) {
            out.status = SolveStatus::Converged;
            out.state = StateVector::from_array(x);
            out.iterations = iter;
            out.residual_norm = rn;
            return out;
        }
        const auto J = residual_jacobian(m, L, mcp_rad, pip_rad,
                                         StateVector::from_array(x));
        std::array<double, 8> dx{};
        if (!detail::solve8(J, r, dx, settings.cond_limit)) {
            out.status = SolveStatus::SingularJacobian;
            out.state = StateVector::from_array(x);
            out.iterations = iter;
            out.residual_norm = rn;
            return out;
        }

        // backtracking line search on the residual infinity-norm
        double lambda = 1.0;
        while (true) {
            std::array<double, 8> trial = x;
            for (int i = 0; i < 8; ++i) trial[i] -= lambda * dx[i];
            std::array<double, 8> rt = assemble_residuals(
                m, L, mcp_rad, pip_rad, StateVector::from_array(trial));
            const double rtn = all_finite(rt)
                                   ? inf_norm(rt)
                                   : std::numeric_limits<double>::infinity();
            if (rtn < rn || rtn <= settings.tolerance) {
                x = trial;
                r = rt;
                rn = rtn;
                break;
            }
            lambda *= 0.5;
            if (lambda < settings.min_damping) {
                out.status = SolveStatus::NonConvergence;
                out.state = StateVector::from_array(x);
                out.iterations = iter;
                out.residual_norm = rn;
                return out;
            }
        }
    }

    out.status = rn <= settings.tolerance ? SolveStatus::Converged
                                          : SolveStatus::NonConvergence;
    out.state = StateVector::from_array(x);
    out.iterations = settings.max_iterations;
    out.residual_norm = rn;
    return out;
}

StateVector neutral_guess(const LinkageModel& m, const LinkLengths& L) {
    const MarkSides sd = mark_sides(m);

    // Bar 1 carries the I-arm at a right angle: closed-form slider hit on the
    // proximal phalanx (horizontal at the open pose).
    const double R1 = L.BK + L.BC;
    const double W1 = std::hypot(R1, L.CI);
    const Vec2 k_rel = m.anchor_K - m.mcp;
    const double c1 =
        k_rel.x + std::sqrt(std::max(W1 * W1 - k_rel.y * k_rel.y, 1.0));
    const double q_B = std::atan2(-k_rel.y, c1 - k_rel.x) -
                       sd.sC * std::atan2(L.CI, R1);

    const Vec2 D = m.anchor_K + (R1 + L.CD) * dir(q_B);
    const double W2 = std::hypot(L.DE, L.EJ);
    const Vec2 PIP = m.mcp + Vec2{m.proximal_len, 0.0};
    const Vec2 d_rel = D - PIP;
    const double c2 =
        d_rel.x + std::sqrt(std::max(W2 * W2 - d_rel.y * d_rel.y, 1.0));
    const double q_D = std::atan2(-d_rel.y, c2 - d_rel.x) -
                       sd.sE * std::atan2(L.EJ, L.DE);

    const Vec2 B = m.anchor_K + L.BK * dir(q_B);
    const Vec2 F = D + (L.DE + L.EF) * dir(q_D);

    // Coarse scan of A around the circle of radius AB about B, keeping the
    // branch that best closes the F-G coupler loop.
    double best_err = std::numeric_limits<double>::infinity();
    StateVector s;
    s.q_B = q_B;
    s.q_D = q_D;
    s.c1 = c1;
    s.c2 = c2;
    s.l_OA = L.AH + 1.0;
    s.q_A = kPi;
    for (int k = 0; k < 720; ++k) {
        const double phi = 2.0 * kPi * k / 720.0;
        const Vec2 A = B + L.AB * dir(phi);
        const Vec2 rel = A - m.anchor_O;
        const double l_OA = norm(rel);
        if (l_OA < L.AH + 1.0) continue;
        const double q_O = std::atan2(rel.y, rel.x);
        const Vec2 H = m.anchor_O + (l_OA - L.AH) * dir(q_O);
        const Vec2 G = H + L.GH * dir(q_O + sd.sH * kPi / 2.0);
        const double err = std::abs(norm(F - G) - L.FG);
        if (err < best_err) {
            best_err = err;
            s.l_OA = l_OA;
            s.q_O = q_O;
            s.q_A = std::atan2(B.y - A.y, B.x - A.x);
            s.q_G = std::atan2(G.y - F.y, G.x - F.x);
        }
    }
    return s;
}

SweepRecord flexion_sweep(const LinkageModel& m, const LinkLengths& L,
                          int steps, const SolverSettings& settings) {
    if (steps < 2) throw std::invalid_argument("flexion sweep needs >= 2 steps");
    const double mcp_full = 80.0;
    const double pip_full = 90.0;

    SweepRecord rec;
    rec.steps.reserve(static_cast<std::size_t>(steps));
    StateVector warm = neutral_guess(m, L);
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        const double mcp_deg = mcp_full * t;
        const double pip_deg = pip_full * t;
        const SolveResult res =
            solve_configuration(m, L, deg2rad(mcp_deg), deg2rad(pip_deg),
                                warm, settings);
        if (!res.converged()) {
            rec.complete = false;
            rec.failure = res.status;
            rec.failed_step = i;
            return rec;
        }
        rec.steps.push_back({mcp_deg, pip_deg, res.state, true});
        warm = res.state;
    }
    rec.complete = true;
    return rec;
}

}  // namespace exo
