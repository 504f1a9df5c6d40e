#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "rspomdp/serialization.hpp"
#include "rspomdp/simulate.hpp"
#include "test_support.hpp"

using namespace rspomdp;
using namespace testsupport;

namespace {

void check_models_equal(const ModelSpec& a, const ModelSpec& b) {
    CHECK(a.x_states == b.x_states);
    CHECK(a.y_states == b.y_states);
    CHECK(a.actions == b.actions);
    CHECK(a.admissible == b.admissible);
    CHECK(a.beta == b.beta);
    REQUIRE(a.q.size() == b.q.size());
    for (std::size_t i = 0; i < a.q.size(); ++i) CHECK(a.q[i] == b.q[i]);
    REQUIRE(a.c.size() == b.c.size());
    for (std::size_t i = 0; i < a.c.size(); ++i) CHECK(a.c[i] == b.c[i]);
    REQUIRE(a.q0.size() == b.q0.size());
    for (std::size_t i = 0; i < a.q0.size(); ++i) CHECK(a.q0[i] == b.q0[i]);
    CHECK(a.utility.describe() == b.utility.describe());
}

} // namespace

TEST_SUITE("serialization") {

TEST_CASE("format_double round-trips exactly") {
    std::mt19937_64 rng(1501);
    for (int i = 0; i < 200; ++i) {
        double v = (uniform(rng, 0.0, 1.0) - 0.5) * std::pow(10.0, uniform_int(rng, -12, 12));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("model documents round-trip bit for bit") {
    std::mt19937_64 rng(1503);
    for (Utility u : {Utility::linear(), Utility::exponential(-0.75),
                      Utility::piecewise_linear_concave({{0.0, 0.0}, {1.0, 1.0}, {3.0, 2.0}})}) {
        RandomModelOptions opt;
        opt.utility = u;
        opt.restrict_admissible = true;
        const ModelSpec m = random_model(rng, opt);
        const ModelSpec back = model_from_json_text(model_to_json_text(m));
        check_models_equal(m, back);
        CHECK(validate(back).ok());
    }
}

TEST_CASE("admissible actions may be given by index") {
    ModelSpec m = machine_model(Utility::linear());
    nlohmann::json j = nlohmann::json::parse(model_to_json_text(m));
    j["admissible"] = {{0, 1}, {1, 0, 1}};
    const ModelSpec back = model_from_json_text(j.dump());
    CHECK(back.admissible == m.admissible); // sorted and deduplicated
}

TEST_CASE("malformed model documents are rejected") {
    const ModelSpec m = machine_model(Utility::linear());
    const nlohmann::json good = nlohmann::json::parse(model_to_json_text(m));

    auto mangled = [&good](auto fn) {
        nlohmann::json j = good;
        fn(j);
        return j.dump();
    };

    CHECK_THROWS_AS(model_from_json_text("not json"), InvalidFile);
    CHECK_THROWS_AS(model_from_json_text("{}"), InvalidFile);
    CHECK_THROWS_AS(model_from_json_text(mangled([](nlohmann::json& j) { j.erase("q0"); })),
                    InvalidFile);
    CHECK_THROWS_AS(model_from_json_text(mangled([](nlohmann::json& j) { j["beta"] = "high"; })),
                    InvalidFile);
    CHECK_THROWS_AS(model_from_json_text(mangled([](nlohmann::json& j) { j["q0"] = {0.7}; })),
                    InvalidFile);
    CHECK_THROWS_AS(
        model_from_json_text(mangled([](nlohmann::json& j) { j["admissible"][0][1] = "oops"; })),
        InvalidFile);
    CHECK_THROWS_AS(
        model_from_json_text(mangled([](nlohmann::json& j) { j["utility"]["variant"] = "cubic"; })),
        InvalidFile);
    CHECK_THROWS_AS(
        model_from_json_text(mangled(
            [](nlohmann::json& j) { j["c"][0][0][0] = std::numeric_limits<double>::infinity(); })),
        InvalidFile);
    CHECK_THROWS_AS(
        model_from_json_text(mangled([](nlohmann::json& j) { j["q"][0][0].erase(1); })),
        InvalidFile);
}

TEST_CASE("utility fragments round-trip and reject gamma zero") {
    for (Utility u : {Utility::linear(), Utility::exponential(2.5), Utility::power(-0.5),
                      Utility::log(),
                      Utility::piecewise_linear_concave({{0.0, 0.0}, {2.0, 1.0}})}) {
        const Utility back = utility_from_json_text(utility_to_json_text(u));
        CHECK(back.describe() == u.describe());
        CHECK(back(1.5) == u(1.5));
    }
    CHECK_THROWS_AS(utility_from_json_text(R"({"variant":"exponential","gamma":0})"), InvalidFile);
    CHECK_THROWS_AS(utility_from_json_text(R"({"variant":"power"})"), InvalidFile);
}

TEST_CASE("measure documents round-trip canonically") {
    const JointMeasure mu({{1, 0.25, 0.5}, {0, 1.0, 0.25}, {0, -0.5, 0.25}});
    const JointMeasure back = measure_from_json_text(measure_to_json_text(mu));
    CHECK(linf_distance(mu, back) == 0.0);
    REQUIRE(back.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(back.atoms()[i].y == mu.atoms()[i].y);
        CHECK(back.atoms()[i].s == mu.atoms()[i].s);
        CHECK(back.atoms()[i].w == mu.atoms()[i].w);
    }
    CHECK_THROWS_AS(measure_from_json_text(R"({"atoms":[[0,1]]})"), InvalidFile);
    CHECK_THROWS_AS(measure_from_json_text(R"({"atoms":[[0,1,"w"]]})"), InvalidFile);
}

TEST_CASE("policy documents round-trip and preserve the replayed value") {
    std::mt19937_64 rng(1511);
    const ModelSpec m = machine_model(Utility::linear());
    const PolicyTree pol = solve_finite(m, 3, 0).roots.front().policy.clone();
    const std::string text = policy_to_json_text(m, pol);
    const PolicyTree back = policy_from_json_text(m, text);

    CHECK(back.x0 == pol.x0);
    CHECK(back.horizon == pol.horizon);
    CHECK(enumerate_value(m, back, 3, 0) == doctest::Approx(enumerate_value(m, pol, 3, 0))
                                                .epsilon(1e-14));
}

TEST_CASE("solver output files act as policy documents") {
    const ModelSpec m = machine_model(Utility::linear());
    const SolveResult all = solve_finite_all(m, 2);
    const std::string one0 = policy_to_json_text(m, all.roots[0].policy);
    const std::string one1 = policy_to_json_text(m, all.roots[1].policy);
    const std::string both = "{\"policy\":[" + one0 + "," + one1 + "]}";
    const std::string only0 = "{\"policy\":[" + one0 + "]}";

    CHECK(policy_from_json_text(m, both, 1).x0 == 1);
    CHECK(policy_from_json_text(m, only0).x0 == 0); // single entry needs no selector
    // Several roots but none chosen; a chosen root that is not in the file;
    // a plain document whose root disagrees with the request.
    CHECK_THROWS_AS(policy_from_json_text(m, both), InvalidFile);
    CHECK_THROWS_AS(policy_from_json_text(m, only0, 1), InvalidFile);
    CHECK_THROWS_AS(policy_from_json_text(m, one0, 1), InvalidFile);
}

TEST_CASE("house documents round-trip") {
    std::mt19937_64 rng(1517);
    const HouseModel h = random_house(rng, 2, 3, 2, Utility::power(0.5));
    const HouseModel back = house_from_json_text(house_to_json_text(h));
    CHECK(back.thetas == h.thetas);
    CHECK(back.offer_grid == h.offer_grid);
    CHECK(back.q_offer == h.q_offer);
    CHECK(back.c_theta == h.c_theta);
    CHECK(back.q0 == h.q0);
    CHECK(back.utility.describe() == h.utility.describe());
    CHECK(back.horizon == 0); // horizon is not part of the document
    CHECK_THROWS_AS(house_from_json_text("{\"thetas\":[\"a\"]}"), InvalidFile);
}

TEST_CASE("reservation tables print one row per node") {
    HouseModel h;
    h.thetas = {"only"};
    h.offer_grid = {0.0, 1.0, 2.0};
    h.q_offer = {{0.2, 0.5, 0.3}};
    h.c_theta = {0.1};
    h.q0 = {1.0};
    h.horizon = 2;
    const ReservationTable table = reservation_levels(h);
    const std::string csv = reservation_csv(h, table);

    REQUIRE(csv.rfind("n,node,threshold\n", 0) == 0);
    CHECK(csv.find("\n0,,") != std::string::npos); // root row has an empty multiset
    CHECK(csv.find("\n1,0,") != std::string::npos);
    CHECK(csv.find("\n1,2,") != std::string::npos);
    const std::size_t rows = static_cast<std::size_t>(
        std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == table.rows.size() + 1);
}

TEST_CASE("validation reports serialize violations verbatim") {
    ModelSpec m = machine_model(Utility::linear());
    m.q0[0] = 0.9;
    const nlohmann::json bad = nlohmann::json::parse(validation_to_json_text(validate(m)));
    CHECK(bad["ok"] == false);
    REQUIRE(bad["violations"].is_array());
    CHECK(bad["violations"][0].get<std::string>().find("sum") != std::string::npos);

    const nlohmann::json good =
        nlohmann::json::parse(validation_to_json_text(validate(machine_model(Utility::linear()))));
    CHECK(good["ok"] == true);
    CHECK(good["violations"].empty());
}

TEST_CASE("errors serialize with stable names") {
    CHECK(error_to_json_text(DomainError("boom")) ==
          R"({"error":"DomainError","message":"boom"})");
    CHECK(error_to_json_text(UnreachableObservation("gone", 0.0)) ==
          R"({"error":"UnreachableObservation","message":"gone"})");
}

TEST_CASE("missing files raise invalid-file") {
    CHECK_THROWS_AS(read_text_file("/nonexistent/path/model.json"), InvalidFile);
    CHECK_THROWS_AS(load_model("/nonexistent/path/model.json"), InvalidFile);
}

} // TEST_SUITE
