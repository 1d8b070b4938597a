#!/usr/bin/env python3
"""Regenerates the golden test fixtures in tests/fixtures/.

Uses an independent root-finder (scipy's hybrd) and central finite
differences, so the fixtures cross-check the library's damped-Newton solver
and analytic Jacobians rather than mirroring them. Run from the repo root
whenever the bundled model changes:

    python3 scripts/gen_fixtures.py
"""
import json
import math
import os
import sys

import numpy as np
from scipy.optimize import root
from scipy import special

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MODEL_PATH = os.path.join(ROOT, "models", "uhex_planar.json")
OUT_DIR = os.path.join(ROOT, "tests", "fixtures")

DV_NAMES = ["BC", "CD", "DE", "EF", "FG", "GH", "BK", "CI", "EJ"]


def u(t):
    return np.array([math.cos(t), math.sin(t)])


class Model:
    def __init__(self, doc):
        self.O = np.array(doc["anchors"]["O"], float)
        self.K = np.array(doc["anchors"]["K"], float)
        self.MCP = np.array(doc["anchors"]["MCP"], float)
        self.Lp = float(doc["phalanges"]["proximal"])
        self.Lm = float(doc["phalanges"]["middle"])
        lengths = {l["name"]: float(l["length"]) for l in doc["links"]}
        self.AB = lengths["AB"]
        self.AH = lengths["AH"]
        self.defaults = lengths
        sides = {m["at"]: int(m["side"]) for m in doc["right_angle_marks"]}
        self.sC, self.sE, self.sH = sides["C"], sides["E"], sides["H"]
        self.drive_sign = float(doc["actuator"]["drive_sign"])
        st = doc["initial_state"]
        self.initial_state = np.array([
            st["l_OA"], math.radians(st["q_O"]), math.radians(st["q_A"]),
            math.radians(st["q_B"]), math.radians(st["q_G"]),
            math.radians(st["q_D"]), st["c1"], st["c2"],
        ])
        self.default_design = [float(x) for x in doc["default_design"]]


def lengths_of(m, design):
    d = dict(m.defaults)
    for name, val in zip(DV_NAMES, design):
        d[name] = float(val)
    return d


def residuals(s, m, L, pose):
    lOA, qO, qA, qB, qG, qD, c1, c2 = s
    mcp, pip = pose
    th_p = -mcp
    th_m = -(mcp + pip)
    PIP = m.MCP + m.Lp * u(th_p)
    I_f = m.MCP + c1 * u(th_p)
    J_f = PIP + c2 * u(th_m)
    C = m.K + (L["BK"] + L["BC"]) * u(qB)
    D = m.K + (L["BK"] + L["BC"] + L["CD"]) * u(qB)
    I_m = C + L["CI"] * u(qB + m.sC * math.pi / 2)
    E = D + L["DE"] * u(qD)
    F = D + (L["DE"] + L["EF"]) * u(qD)
    J_m = E + L["EJ"] * u(qD + m.sE * math.pi / 2)
    A = m.O + lOA * u(qO)
    H = m.O + (lOA - L["AH"]) * u(qO)
    G = H + L["GH"] * u(qO + m.sH * math.pi / 2)
    B = m.K + L["BK"] * u(qB)
    r = np.empty(8)
    r[0:2] = I_m - I_f
    r[2:4] = J_m - J_f
    r[4:6] = A + L["AB"] * u(qA) - B
    r[6:8] = F + L["FG"] * u(qG) - G
    return r


def solve(s0, m, L, pose):
    sol = root(lambda s: residuals(s, m, L, pose), s0, method="hybr", tol=1e-13)
    ok = sol.success and np.abs(residuals(sol.x, m, L, pose)).max() < 1e-9
    return ok, sol.x


def initial_guess(m, L):
    """Deterministic branch construction at the open pose."""
    R1 = L["BK"] + L["BC"]
    W1 = math.hypot(R1, L["CI"])
    Kx, Ky = m.K - m.MCP
    c1 = Kx + math.sqrt(max(W1 * W1 - Ky * Ky, 1.0))
    qB = math.atan2(-Ky, c1 - Kx) + math.atan2(L["CI"], R1)
    D = m.K + (R1 + L["CD"]) * u(qB)
    W2 = math.hypot(L["DE"], L["EJ"])
    PIP = m.MCP + np.array([m.Lp, 0.0])
    Dx, Dy = D - PIP
    c2 = Dx + math.sqrt(max(W2 * W2 - Dy * Dy, 1.0))
    qD = math.atan2(-Dy, c2 - Dx) + math.atan2(L["EJ"], L["DE"])
    B = m.K + L["BK"] * u(qB)
    F = D + (L["DE"] + L["EF"]) * u(qD)
    best = None
    for k in range(720):
        phi = 2.0 * math.pi * k / 720.0
        A = B + L["AB"] * u(phi)
        rel = A - m.O
        lOA = float(np.linalg.norm(rel))
        if lOA < L["AH"] + 1.0:
            continue
        qO = math.atan2(rel[1], rel[0])
        H = m.O + (lOA - L["AH"]) * u(qO)
        G = H + L["GH"] * u(qO + m.sH * math.pi / 2)
        err = abs(float(np.linalg.norm(F - G)) - L["FG"])
        if best is None or err < best[0]:
            qG = math.atan2(*(G - F)[::-1])
            qA = math.atan2(*(B - A)[::-1])
            best = (err, [lOA, qO, qA, qB, qG, qD, c1, c2])
    return np.array(best[1])


def sweep(m, L, steps, s0=None):
    full = (math.radians(80.0), math.radians(90.0))
    s = initial_guess(m, L) if s0 is None else np.array(s0)
    states, poses = [], []
    for i in range(steps):
        t = i / (steps - 1)
        pose = (full[0] * t, full[1] * t)
        ok, s = solve(s, m, L, pose)
        if not ok:
            return False, states, poses
        states.append(s)
        poses.append(pose)
    return True, states, poses


def torques(s, m, L, pose, h=1e-6):
    out = []
    for axis in (0, 1):
        vals = []
        for sign in (+1, -1):
            p = list(pose)
            p[axis] += sign * h
            ok, sp = solve(s, m, L, tuple(p))
            if not ok:
                return None
            vals.append(sp[0])
        out.append(m.drive_sign * (vals[0] - vals[1]) / (2 * h))
    return out


def main():
    with open(MODEL_PATH) as f:
        doc = json.load(f)
    m = Model(doc)
    os.makedirs(OUT_DIR, exist_ok=True)

    evo_design = [60.0, 10.0, 15.0, 51.0, 56.0, 91.37, 48.50, 10.98, 36.54]
    fixtures = {}

    # Reference states at the open pose, solved from the geometric guess.
    for tag, design in (("default", m.default_design), ("alt", evo_design)):
        L = lengths_of(m, design)
        ok, s = solve(initial_guess(m, L), m, L, (0.0, 0.0))
        assert ok, tag
        fixtures[f"neutral_{tag}"] = {
            "design": design,
            "pose_rad": [0.0, 0.0],
            "state": list(map(float, s)),
            "residual_max": float(np.abs(residuals(s, m, L, (0, 0))).max()),
        }

    # Golden sweep evaluations (46 steps) for both reference designs.
    for tag, design in (("default", m.default_design), ("alt", evo_design)):
        L = lengths_of(m, design)
        ok, states, poses = sweep(m, L, 46)
        assert ok, tag
        tq = torques(states[-1], m, L, poses[-1])
        c1s = [s[6] for s in states]
        c2s = [s[7] for s in states]
        ratios = []
        for s, p in zip(states, poses):
            t2 = torques(s, m, L, p)
            ratios.append(t2[0] / t2[1])
        fixtures[f"golden_{tag}"] = {
            "design": design,
            "sweep_steps": 46,
            "tau_mcp_closed": float(tq[0]),
            "tau_pip_closed": float(tq[1]),
            "objective_magnitude": float(math.hypot(tq[0], tq[1])),
            "c1_range": [min(c1s), max(c1s)],
            "c2_range": [min(c2s), max(c2s)],
            "ratio_range": [min(ratios), max(ratios)],
            "closed_state": list(map(float, states[-1])),
            "feasible": True,
        }

    # A design whose chain cannot close: GH shrunk far below its workable
    # minimum (the 46-step sweep fails at the first pose already).
    probe = [58.0, 10.0, 15.0, 51.0, 56.0, 40.0, 35.0, 16.0, 37.0]
    Lp = lengths_of(m, probe)
    okp, _, _ = sweep(m, Lp, 46)
    assert not okp
    fixtures["probe_unclosable"] = {
        "design": probe,
        "pose_deg": [80.0, 90.0],
        "expect_converged": False,
    }

    # Distribution references for the in-house statistics kernels.
    betas = []
    for a, b, x in [(0.5, 0.5, 0.25), (2.0, 3.0, 0.4), (3.0, 1.0, 0.9),
                    (5.0, 5.0, 0.5), (10.0, 2.0, 0.85), (1.0, 1.0, 0.3),
                    (2.5, 0.5, 0.99), (4.0, 6.0, 0.35)]:
        betas.append({"a": a, "b": b, "x": x,
                      "value": float(special.betainc(a, b, x))})
    pvals = [
        {"kind": "f", "stat": 3.0, "df1": 2, "df2": 6,
         "p": float(special.fdtrc(2, 6, 3.0))},
        {"kind": "f", "stat": 280.515, "df1": 2, "df2": 8,
         "p": float(special.fdtrc(2, 8, 280.515))},
        {"kind": "t", "stat": -2.449489742783178, "df": 4,
         "p": float(2 * special.stdtr(4, -abs(-2.449489742783178)))},
        {"kind": "t", "stat": 1.8, "df": 17,
         "p": float(2 * special.stdtr(17, -1.8))},
    ]
    fixtures["stats_refs"] = {"incomplete_beta": betas, "p_values": pvals}

    out = os.path.join(OUT_DIR, "golden.json")
    with open(out, "w") as f:
        json.dump(fixtures, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    sys.exit(main())
