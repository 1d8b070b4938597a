#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <fstream>
#include <string>

#include "exolink.h"
#include "json.hpp"

using nlohmann::json;

namespace {

json fixtures() {
    static json doc = [] {
        std::ifstream in(std::string(EXO_FIXTURE_DIR) + "/golden.json");
        REQUIRE(in.good());
        return json::parse(in);
    }();
    return doc;
}

struct Str {
    char* p = nullptr;
    ~Str() { exo_string_free(p); }
    json parsed() const { return json::parse(std::string(p ? p : "")); }
};

struct Model {
    exo_model* m = nullptr;
    ~Model() { exo_model_free(m); }
};

struct Problem {
    exo_problem* p = nullptr;
    ~Problem() { exo_problem_free(p); }
};

}  // namespace

// ============================================================================
// plumbing
// ============================================================================

TEST_CASE("version and error-message surfaces") {
    const char* v = exo_version();
    REQUIRE(v != nullptr);
    CHECK(std::strchr(v, '.') != nullptr);
    // error message is per-thread and survives until the next call
    exo_model* m = nullptr;
    CHECK(exo_model_load(nullptr, &m) == EXO_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(exo_last_error_message()) > 0);
}

TEST_CASE("null arguments are refused uniformly") {
    exo_model* m = nullptr;
    Str out;
    CHECK(exo_model_load("builtin", nullptr) == EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_model_from_json(nullptr, &m) == EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_model_to_json(nullptr, &out.p) == EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_problem_create(nullptr, "{}", nullptr) ==
          EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_optimize(nullptr, "ga", "{}", 1, 1, &out.p) ==
          EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_grid_search(nullptr, "{}", 1, &out.p) ==
          EXO_ERR_INVALID_ARGUMENT);
    CHECK(exo_report_from_dir(nullptr, &out.p) == EXO_ERR_INVALID_ARGUMENT);
    // freeing null is a no-op
    exo_string_free(nullptr);
    exo_model_free(nullptr);
    exo_problem_free(nullptr);
}

// ============================================================================
// model handles
// ============================================================================

TEST_CASE("builtin model round-trips through JSON") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Str js;
    REQUIRE(exo_model_to_json(m.m, &js.p) == EXO_OK);
    json doc = js.parsed();
    CHECK(doc.at("format_version") == 1);
    CHECK(doc.at("phalanges").at("proximal") == 55.0);

    Model m2;
    REQUIRE(exo_model_from_json(js.p, &m2.m) == EXO_OK);
    Str js2;
    REQUIRE(exo_model_to_json(m2.m, &js2.p) == EXO_OK);
    CHECK(std::string(js.p) == std::string(js2.p));
}

TEST_CASE("model errors map to the config status") {
    exo_model* m = nullptr;
    CHECK(exo_model_from_json("{\"format_version\": 9}", &m) ==
          EXO_ERR_CONFIG);
    CHECK(m == nullptr);
    CHECK(exo_model_from_json("not json", &m) == EXO_ERR_CONFIG);
    CHECK(exo_model_load("/no/such/file.json", &m) != EXO_OK);
}

// ============================================================================
// problem evaluation
// ============================================================================

TEST_CASE("evaluate reproduces the golden objective through the C surface") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Problem p;
    REQUIRE(exo_problem_create(m.m, "{\"dv_count\": 6}", &p.p) == EXO_OK);

    const json f = fixtures().at("golden_default");
    std::vector<double> d = f.at("design").get<std::vector<double>>();
    d.resize(6);
    Str out;
    REQUIRE(exo_problem_evaluate(p.p, d.data(), d.size(), &out.p) == EXO_OK);
    json o = out.parsed();
    CHECK(o.at("feasible").get<bool>());
    CHECK(o.at("objective").get<double>() ==
          doctest::Approx(f.at("objective_magnitude").get<double>())
              .epsilon(1e-5));
    CHECK(o.at("tau_mcp").get<double>() ==
          doctest::Approx(f.at("tau_mcp_closed").get<double>()).epsilon(1e-5));
}

TEST_CASE("problem configuration errors") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    exo_problem* p = nullptr;
    CHECK(exo_problem_create(m.m, "{\"dv_count\": 7}", &p) != EXO_OK);
    CHECK(p == nullptr);
    CHECK(exo_problem_create(m.m, "{\"mystery\": 1}", &p) == EXO_ERR_CONFIG);
    CHECK(exo_problem_create(m.m, "{bad", &p) == EXO_ERR_CONFIG);
}

TEST_CASE("wrong-arity designs are invalid arguments") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Problem p;
    REQUIRE(exo_problem_create(m.m, "{}", &p.p) == EXO_OK);
    double five[5] = {58, 10, 15, 51, 56};
    Str out;
    CHECK(exo_problem_evaluate(p.p, five, 5, &out.p) ==
          EXO_ERR_INVALID_ARGUMENT);
    double oob[6] = {58, 10, 15, 51, 56, 101};
    CHECK(exo_problem_evaluate(p.p, oob, 6, &out.p) ==
          EXO_ERR_INVALID_ARGUMENT);
}

// ============================================================================
// optimizers
// ============================================================================

TEST_CASE("optimize returns a canonical run record") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Problem p;
    REQUIRE(exo_problem_create(m.m,
                               "{\"dv_count\": 6, \"sweep_steps\": 8}",
                               &p.p) == EXO_OK);
    Str out;
    REQUIRE(exo_optimize(p.p, "ga",
                         "{\"population_size\": 8, \"generations\": 3}", 5, 2,
                         &out.p) == EXO_OK);
    json r = out.parsed();
    CHECK(r.at("algorithm") == "ga");
    CHECK(r.at("seed") == 5);
    CHECK(r.at("total_evaluations") == 24);
    CHECK(r.at("trace").size() == 3);
    CHECK(r.at("best_genes").size() == 6);

    // determinism through the C surface
    Str again;
    REQUIRE(exo_optimize(p.p, "ga",
                         "{\"population_size\": 8, \"generations\": 3}", 5, 1,
                         &again.p) == EXO_OK);
    CHECK(std::string(out.p) == std::string(again.p));
}

TEST_CASE("optimizer parameter errors map to config status") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Problem p;
    REQUIRE(exo_problem_create(m.m, "{\"sweep_steps\": 8}", &p.p) == EXO_OK);
    Str out;
    CHECK(exo_optimize(p.p, "pso", "{}", 1, 1, &out.p) == EXO_ERR_CONFIG);
    CHECK(exo_optimize(p.p, "ga", "{\"population_size\": 7}", 1, 1, &out.p) ==
          EXO_ERR_CONFIG);
    CHECK(exo_optimize(p.p, "ga", "{\"oops\": 1}", 1, 1, &out.p) ==
          EXO_ERR_CONFIG);
}

TEST_CASE("grid search through the C surface") {
    Model m;
    REQUIRE(exo_model_load("builtin", &m.m) == EXO_OK);
    Problem p;
    REQUIRE(exo_problem_create(m.m,
                               "{\"dv_count\": 6, \"sweep_steps\": 8}",
                               &p.p) == EXO_OK);
    Str out;
    REQUIRE(exo_grid_search(p.p,
                            "{\"steps\": [22, 20, 36, 36, 36, 18]}", 4,
                            &out.p) == EXO_OK);
    json r = out.parsed();
    CHECK(r.at("cardinality") == 2 * 2 * 2 * 2 * 2 * 3);
    CHECK(r.at("visited") == r.at("cardinality"));
    CHECK_FALSE(r.at("stopped_early").get<bool>());

    // cap refusal surfaces as a runtime failure
    Str refused;
    CHECK(exo_grid_search(p.p, "{\"safety_cap\": 10}", 1, &refused.p) ==
          EXO_ERR_RUNTIME);
    // resume without a checkpoint path is a config error
    Str bad;
    CHECK(exo_grid_search(p.p, "{\"resume\": true}", 1, &bad.p) ==
          EXO_ERR_CONFIG);
}
