#include "exolink/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "exolink/util.hpp"
#include "json.hpp"

namespace exo {

using nlohmann::json;

namespace {

// The bundled dorsal finger-exoskeleton reconstruction. Kept byte-for-byte in
// sync with models/uhex_planar.json (a unit test guards the pairing).
constexpr const char* kBuiltinJson = R"JSON({
  "format_version": 1,
  "name": "uhex_planar",
  "description": "Planar closed-chain finger-exoskeleton linkage (documented reconstruction). Hand frame: MCP joint at the origin, finger flexing in -y. Lengths in mm, angles in degrees. The actuator is a through-rod linear cylinder O-A: the crank point H rides the rod axis at a fixed setback AH behind the tip A (the rod may protrude past the cylinder base, so the signed extension l_OA can be negative on one assembly branch). Sized for a long adult finger (proximal 55 mm, middle 40 mm).",
  "points": ["O", "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "MCP", "PIP"],
  "anchors": {
    "O": [20.0, -10.0],
    "K": [-63.0, 34.0],
    "MCP": [0.0, 0.0]
  },
  "phalanges": {
    "proximal": 55.0,
    "middle": 40.0
  },
  "links": [
    {"name": "BC", "from": "B", "to": "C", "length": 58.0, "design_variable": true},
    {"name": "CD", "from": "C", "to": "D", "length": 10.0, "design_variable": true},
    {"name": "DE", "from": "D", "to": "E", "length": 15.0, "design_variable": true},
    {"name": "EF", "from": "E", "to": "F", "length": 51.0, "design_variable": true},
    {"name": "FG", "from": "F", "to": "G", "length": 56.0, "design_variable": true},
    {"name": "GH", "from": "G", "to": "H", "length": 100.0, "design_variable": true},
    {"name": "BK", "from": "K", "to": "B", "length": 35.0, "design_variable": true},
    {"name": "CI", "from": "C", "to": "I", "length": 16.0, "design_variable": true},
    {"name": "EJ", "from": "E", "to": "J", "length": 37.0, "design_variable": true},
    {"name": "AB", "from": "A", "to": "B", "length": 60.0, "design_variable": false},
    {"name": "AH", "from": "A", "to": "H", "length": 18.0, "design_variable": false}
  ],
  "bars": [
    ["K", "B", "C", "D"],
    ["D", "E", "F"]
  ],
  "right_angle_marks": [
    {"at": "C", "base": "K", "arm": "I", "side": -1},
    {"at": "E", "base": "D", "arm": "J", "side": -1},
    {"at": "H", "base": "O", "arm": "G", "side": 1}
  ],
  "joints": [
    {"type": "prismatic", "points": ["O", "A"], "actuated": true},
    {"type": "prismatic", "points": ["I"], "along": "proximal", "limits": [2.0, 55.0]},
    {"type": "prismatic", "points": ["J"], "along": "middle", "limits": [2.0, 40.0]},
    {"type": "revolute", "points": ["K"]},
    {"type": "revolute", "points": ["A"]},
    {"type": "revolute", "points": ["B"]},
    {"type": "revolute", "points": ["D"]},
    {"type": "revolute", "points": ["F"]},
    {"type": "revolute", "points": ["G"]},
    {"type": "revolute", "points": ["MCP"]},
    {"type": "revolute", "points": ["PIP"]}
  ],
  "actuator": {
    "drive_sign": 1.0
  },
  "default_design": [58.0, 10.0, 15.0, 51.0, 56.0, 100.0, 35.0, 16.0, 37.0],
  "initial_state": {
    "l_OA": -90.9017619679032,
    "q_O": -78.22690949665618,
    "q_A": 239.84767722355767,
    "q_B": -11.356728860067307,
    "q_G": 76.16515525276277,
    "q_D": 47.836739816910004,
    "c1": 25.028404506727263,
    "c2": 20.477660298463586
  }
}
)JSON";

Vec2 parse_vec2(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2)
        throw ModelError(what + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

double require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ModelError(what + " must be strictly positive");
    return v;
}

void validate(const LinkageModel& m) {
    // point table
    std::set<std::string> pts(m.points.begin(), m.points.end());
    if (pts.size() != m.points.size())
        throw ModelError("duplicate point names");
    auto need_point = [&](const std::string& p, const std::string& ctx) {
        if (!pts.count(p))
            throw ModelError("undeclared point '" + p + "' referenced by " + ctx);
    };
    for (const char* p : {"O", "A", "B", "C", "D", "E", "F", "G", "H",
                          "I", "J", "K", "MCP", "PIP"})
        need_point(p, "the supported topology family");

    // links
    std::set<std::string> link_names;
    for (const auto& l : m.links) {
        if (!link_names.insert(l.name).second)
            throw ModelError("duplicate link name '" + l.name + "'");
        need_point(l.from, "link " + l.name);
        need_point(l.to, "link " + l.name);
        require_positive(l.length, "length of link " + l.name);
    }
    for (const char* req : {"BC", "CD", "DE", "EF", "FG", "GH",
                            "BK", "CI", "EJ", "AB", "AH"})
        if (!link_names.count(req))
            throw ModelError(std::string("missing required link '") + req + "'");

    // joint census: exactly one actuated joint, exactly two passive sliders
    int actuated = 0, sliders = 0;
    for (const auto& j : m.joints) {
        if (j.type != "revolute" && j.type != "prismatic")
            throw ModelError("unknown joint type '" + j.type + "'");
        for (const auto& p : j.points) need_point(p, "a joint");
        if (j.type == "prismatic") {
            if (j.actuated) {
                ++actuated;
            } else {
                ++sliders;
                if (j.along != "proximal" && j.along != "middle")
                    throw ModelError("passive slider must run along a phalanx");
            }
        } else if (j.actuated) {
            throw ModelError("revolute joints cannot be actuated in this family");
        }
    }
    if (actuated != 1)
        throw ModelError("model must declare exactly one actuated joint");
    if (sliders != 2)
        throw ModelError("model must declare exactly two passive sliders");

    // rigid bars: two collinear chains, K->...->D and D->...->F
    if (m.bars.size() != 2 || m.bars[0].size() < 2 || m.bars[1].size() < 2)
        throw ModelError("expected two rigid bar chains");
    if (m.bars[0].front() != "K" || m.bars[0].back() != "D" ||
        m.bars[1].front() != "D" || m.bars[1].back() != "F")
        throw ModelError("bar chains must run K..D and D..F");

    // right-angle marks at C, E and H
    std::set<std::string> mark_at;
    for (const auto& mk : m.marks) {
        need_point(mk.at, "a right-angle mark");
        need_point(mk.arm, "a right-angle mark");
        if (mk.side != 1 && mk.side != -1)
            throw ModelError("right-angle mark side must be +1 or -1");
        mark_at.insert(mk.at);
    }
    if (mark_at != std::set<std::string>{"C", "E", "H"})
        throw ModelError("right-angle marks must sit at C, E and H");

    require_positive(m.proximal_len, "proximal phalanx length");
    require_positive(m.middle_len, "middle phalanx length");
    if (m.drive_sign != 1.0 && m.drive_sign != -1.0)
        throw ModelError("drive_sign must be +1 or -1");
    if (m.slider1.lo >= (m.slider1.hi > 0 ? m.slider1.hi : m.proximal_len) ||
        m.slider2.lo >= (m.slider2.hi > 0 ? m.slider2.hi : m.middle_len))
        throw ModelError("slider windows are empty");
    if (m.default_design.size() != kDesignLinkNames.size())
        throw ModelError("default_design must list all 9 optimizable lengths");

    // connectivity: union the links, bars and sliders over the point graph and
    // require one component containing the grounded points
    std::map<std::string, std::string> parent;
    for (const auto& p : m.points) parent[p] = p;
    std::function<std::string(const std::string&)> find =
        [&](const std::string& x) -> std::string {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    auto unite = [&](const std::string& a, const std::string& b) {
        parent[find(a)] = find(b);
    };
    for (const auto& l : m.links) unite(l.from, l.to);
    for (const auto& bar : m.bars)
        for (std::size_t i = 1; i < bar.size(); ++i) unite(bar[i - 1], bar[i]);
    // anatomical chain and slider attachments
    unite("MCP", "PIP");
    unite("MCP", "I");
    unite("PIP", "J");
    unite("O", "A");  // actuator
    unite("MCP", "K");  // both grounded to the hand
    unite("MCP", "O");
    const std::string root = find("MCP");
    for (const auto& p : m.points)
        if (find(p) != root)
            throw ModelError("linkage graph is disconnected at point '" + p + "'");
}

LinkageModel from_json(const json& doc) {
    if (!doc.is_object()) throw ModelError("model document must be an object");
    LinkageModel m;
    if (!doc.contains("format_version"))
        throw ModelError("missing format_version");
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != 1)
        throw ModelError("unsupported format_version " +
                         std::to_string(m.format_version));
    m.name = doc.value("name", "");
    m.description = doc.value("description", "");
    for (const auto& p : doc.at("points")) m.points.push_back(p.get<std::string>());
    const auto& anchors = doc.at("anchors");
    m.anchor_O = parse_vec2(anchors.at("O"), "anchors.O");
    m.anchor_K = parse_vec2(anchors.at("K"), "anchors.K");
    m.mcp = parse_vec2(anchors.at("MCP"), "anchors.MCP");
    m.proximal_len = doc.at("phalanges").at("proximal").get<double>();
    m.middle_len = doc.at("phalanges").at("middle").get<double>();
    for (const auto& l : doc.at("links")) {
        LinkDef d;
        d.name = l.at("name").get<std::string>();
        d.from = l.at("from").get<std::string>();
        d.to = l.at("to").get<std::string>();
        d.length = l.at("length").get<double>();
        d.design_variable = l.value("design_variable", false);
        m.links.push_back(std::move(d));
    }
    for (const auto& bar : doc.at("bars")) {
        std::vector<std::string> chain;
        for (const auto& p : bar) chain.push_back(p.get<std::string>());
        m.bars.push_back(std::move(chain));
    }
    for (const auto& mk : doc.at("right_angle_marks")) {
        RightAngleMark r;
        r.at = mk.at("at").get<std::string>();
        r.base = mk.at("base").get<std::string>();
        r.arm = mk.at("arm").get<std::string>();
        r.side = mk.at("side").get<int>();
        m.marks.push_back(std::move(r));
    }
    for (const auto& j : doc.at("joints")) {
        JointDef d;
        d.type = j.at("type").get<std::string>();
        for (const auto& p : j.at("points")) d.points.push_back(p.get<std::string>());
        d.actuated = j.value("actuated", false);
        d.along = j.value("along", "");
        if (j.contains("limits")) {
            const auto& lim = j.at("limits");
            if (!lim.is_array() || lim.size() != 2)
                throw ModelError("joint limits must be [lo, hi]");
            if (d.along == "proximal")
                m.slider1 = {lim[0].get<double>(), lim[1].get<double>()};
            else if (d.along == "middle")
                m.slider2 = {lim[0].get<double>(), lim[1].get<double>()};
        }
        m.joints.push_back(std::move(d));
    }
    m.drive_sign = doc.at("actuator").at("drive_sign").get<double>();
    for (const auto& v : doc.at("default_design"))
        m.default_design.push_back(v.get<double>());

    const auto& st = doc.at("initial_state");
    StateVector s;
    s.l_OA = st.at("l_OA").get<double>();
    s.q_O = deg2rad(st.at("q_O").get<double>());
    s.q_A = deg2rad(st.at("q_A").get<double>());
    s.q_B = deg2rad(st.at("q_B").get<double>());
    s.q_G = deg2rad(st.at("q_G").get<double>());
    s.q_D = deg2rad(st.at("q_D").get<double>());
    s.c1 = st.at("c1").get<double>();
    s.c2 = st.at("c2").get<double>();
    m.initial_state = s;

    if (m.slider1.hi <= 0) m.slider1.hi = m.proximal_len;
    if (m.slider2.hi <= 0) m.slider2.hi = m.middle_len;
    validate(m);
    return m;
}

json to_json(const LinkageModel& m) {
    json doc;
    doc["format_version"] = m.format_version;
    doc["name"] = m.name;
    doc["description"] = m.description;
    doc["points"] = m.points;
    doc["anchors"] = {{"O", {m.anchor_O.x, m.anchor_O.y}},
                      {"K", {m.anchor_K.x, m.anchor_K.y}},
                      {"MCP", {m.mcp.x, m.mcp.y}}};
    doc["phalanges"] = {{"proximal", m.proximal_len}, {"middle", m.middle_len}};
    json links = json::array();
    for (const auto& l : m.links)
        links.push_back({{"name", l.name},
                         {"from", l.from},
                         {"to", l.to},
                         {"length", l.length},
                         {"design_variable", l.design_variable}});
    doc["links"] = links;
    doc["bars"] = m.bars;
    json marks = json::array();
    for (const auto& mk : m.marks)
        marks.push_back({{"at", mk.at}, {"base", mk.base},
                         {"arm", mk.arm}, {"side", mk.side}});
    doc["right_angle_marks"] = marks;
    json joints = json::array();
    for (const auto& j : m.joints) {
        json jj = {{"type", j.type}, {"points", j.points}};
        if (j.actuated) jj["actuated"] = true;
        if (!j.along.empty()) {
            jj["along"] = j.along;
            const SliderLimit& lim = j.along == "proximal" ? m.slider1 : m.slider2;
            jj["limits"] = {lim.lo, lim.hi};
        }
        joints.push_back(std::move(jj));
    }
    doc["joints"] = joints;
    doc["actuator"] = {{"drive_sign", m.drive_sign}};
    doc["default_design"] = m.default_design;
    doc["initial_state"] = {
        {"l_OA", m.initial_state.l_OA},  {"q_O", rad2deg(m.initial_state.q_O)},
        {"q_A", rad2deg(m.initial_state.q_A)}, {"q_B", rad2deg(m.initial_state.q_B)},
        {"q_G", rad2deg(m.initial_state.q_G)}, {"q_D", rad2deg(m.initial_state.q_D)},
        {"c1", m.initial_state.c1},      {"c2", m.initial_state.c2}};
    return doc;
}

}  // namespace

double LinkageModel::fixed_length(const std::string& link_name) const {
    for (const auto& l : links)
        if (l.name == link_name) return l.length;
    throw ModelError("unknown link name '" + link_name + "'");
}

LinkLengths resolve_lengths(const LinkageModel& m, const DesignVector& d) {
    if (d.size() != 6 && d.size() != 9)
        throw ModelError("design vector must have 6 or 9 entries");
    for (double v : d)
        if (!(v > 0.0)) throw ModelError("design lengths must be positive");
    LinkLengths L{};
    double* slots[9] = {&L.BC, &L.CD, &L.DE, &L.EF, &L.FG,
                        &L.GH, &L.BK, &L.CI, &L.EJ};
    for (std::size_t i = 0; i < kDesignLinkNames.size(); ++i)
        *slots[i] = m.fixed_length(kDesignLinkNames[i]);
    for (std::size_t i = 0; i < d.size(); ++i) *slots[i] = d[i];
    L.AB = m.fixed_length("AB");
    L.AH = m.fixed_length("AH");
    return L;
}

LinkageModel parse_model(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model JSON parse error: ") + e.what());
    }
    try {
        return from_json(doc);
    } catch (const json::exception& e) {
        throw ModelError(std::string("model schema error: ") + e.what());
    }
}

LinkageModel load_model(const std::string& path) {
    return parse_model(read_file(path));
}

std::string serialize_model(const LinkageModel& m) {
    return to_json(m).dump(2) + "\n";
}

void save_model(const LinkageModel& m, const std::string& path) {
    atomic_write_file(path, serialize_model(m));
}

std::string builtin_model_json() { return kBuiltinJson; }

const LinkageModel& builtin_model() {
    static const LinkageModel model = parse_model(kBuiltinJson);
    return model;
}

}  // namespace exo
