#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "exolink/design.hpp"
#include "exolink/geometry.hpp"

namespace exo {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration unknowns of the closed chain: actuator extension, five link
// orientations, and the two phalanx slider displacements.
struct StateVector {
    double l_OA = 0.0;  // actuator length O->A (mm)
    double q_O = 0.0;   // piston axis angle (rad)
    double q_A = 0.0;   // coupler A->B angle (rad)
    double q_B = 0.0;   // proximal bar K->B->C->D angle (rad)
    double q_G = 0.0;   // coupler F->G angle (rad)
    double q_D = 0.0;   // distal bar D->E->F angle (rad)
    double c1 = 0.0;    // slider along proximal phalanx from MCP (mm)
    double c2 = 0.0;    // slider along middle phalanx from PIP (mm)

    std::array<double, 8> to_array() const {
        return {l_OA, q_O, q_A, q_B, q_G, q_D, c1, c2};
    }
    static StateVector from_array(const std::array<double, 8>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
    }
};

inline constexpr std::array<const char*, 8> kStateNames = {
    "l_OA", "q_O", "q_A", "q_B", "q_G", "q_D", "c1", "c2"};

// Finger pose, flexion angles in degrees (API convention).
struct FingerPose {
    double mcp_deg = 0.0;
    double pip_deg = 0.0;
};

struct LinkDef {
    std::string name;
    std::string from;
    std::string to;
    double length = 0.0;       // default/fixed length (mm)
    bool design_variable = false;
};

// A point on a rigid bar carrying a perpendicular arm ("right-angle mark").
// side = +1 rotates the arm +90 deg from the bar direction, -1 rotates -90.
struct RightAngleMark {
    std::string at;
    std::string base;
    std::string arm;
    int side = -1;
};

struct JointDef {
    std::string type;              // "revolute" | "prismatic"
    std::vector<std::string> points;
    bool actuated = false;
    std::string along;             // prismatic sliders: "proximal" | "middle"
};

struct SliderLimit {
    double lo = 2.0;
    double hi = 0.0;  // 0 = use phalanx length
};

struct LinkageModel {
    int format_version = 1;
    std::string name;
    std::string description;

    std::vector<std::string> points;
    Vec2 anchor_O, anchor_K, mcp;
    double proximal_len = 0.0;  // MCP->PIP (mm)
    double middle_len = 0.0;    // PIP->tip segment carrying the J slider (mm)

    std::vector<LinkDef> links;
    std::vector<std::vector<std::string>> bars;  // rigid collinear chains
    std::vector<RightAngleMark> marks;
    std::vector<JointDef> joints;

    double drive_sign = 1.0;  // +1: positive actuator force = extension
    SliderLimit slider1, slider2;
    StateVector initial_state;  // neutral-pose assembly branch
    DesignVector default_design;  // canonical order, all 9 entries

    double fixed_length(const std::string& link_name) const;
};

// All link lengths of one concrete design (defaults overridden by the
// design vector entries in canonical order).
struct LinkLengths {
    double BC, CD, DE, EF, FG, GH, BK, CI, EJ;  // optimizable
    double AB, AH;                              // fixed couplers
};

LinkLengths resolve_lengths(const LinkageModel& m, const DesignVector& d);

LinkageModel parse_model(const std::string& json_text);
LinkageModel load_model(const std::string& path);
std::string serialize_model(const LinkageModel& m);
void save_model(const LinkageModel& m, const std::string& path);

// The bundled dorsal finger-exoskeleton model.
const LinkageModel& builtin_model();
std::string builtin_model_json();

}  // namespace exo
