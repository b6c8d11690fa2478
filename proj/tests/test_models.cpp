#include <doctest.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mkin/fk.hpp"
#include "mkin/models.hpp"

using namespace mkin;

namespace {

std::vector<std::string> catalog() {
    std::vector<std::string> names = builtin_names();
    for (const auto& f : fixture_names()) names.push_back(f);
    return names;
}

std::array<int, 4> type_counts(const Topology& t) {
    std::array<int, 4> h{};
    for (const auto& it : t.iteps) h[static_cast<int>(it.type)] += static_cast<int>(it.group.size());
    return h;
}

std::string golden_path(const std::string& model) {
    return std::string(MKIN_MODELS_DIR) + "/" + model + ".mrdf.json";
}

bool regenerate() {
    const char* v = std::getenv("MKIN_UPDATE_GOLDENS");
    return v && std::string(v) == "1";
}

}  // namespace

TEST_CASE("built-in counts") {
    const std::map<std::string, std::array<int, 3>> table{
        {"TCCHS", {11, 34, 11}}, {"STHS", {8, 16, 4}}, {"SSHS", {8, 22, 7}}, {"RH", {7, 25, 9}},
        {"LHD", {5, 9, 2}},      {"VD", {4, 6, 1}},    {"DJ", {6, 12, 3}},   {"SH", {4, 20, 8}}};
    for (const auto& [n, e] : table) {
        CAPTURE(n);
        const RobotCounts c = compile(builtin_robot(n)).counts();
        CHECK(c.links == e[0]);
        CHECK(c.joints == e[1]);
        CHECK(c.actuators == e[2]);
    }
}

TEST_CASE("unit fixtures") {
    const Robot b = compile(unit_fixture("B"));
    CHECK(b.counts().links == 2);
    CHECK(b.n_actuators() == 1);
    int revolute = 0;
    for (const auto& j : b.joints)
        if (j.type == JointType::Revolute && !b.is_actuator_link(j.child)) ++revolute;
    CHECK(revolute == 1);
    CHECK_THROWS_AS(unit_fixture("E"), ModelError);
    CHECK_THROWS_AS(builtin_robot("XYZ"), ModelError);
}

TEST_CASE("parameters are validated") {
    CHECK_THROWS_AS(builtin_robot("TCCHS", {0.0}), ModelError);
    CHECK_THROWS_AS(builtin_robot("TCCHS", {-1.0}), ModelError);
    ModelBuilder b("flat");
    const Vec3 Y = Vec3::UnitY();
    b.link("g", {0, 0, 0}).link("p", {1, 0, 0}).link("q", {2, 0, 0});
    b.revolute("g_p", "g", "p", Y).revolute("p_q", "p", "q", Y);
    b.link("r", {3, 0, 0}).revolute("q_r", "q", "r", Y).closure("r_g", "r", "g", {4, 0, 0});
    CHECK_THROWS_AS(b.build(), ModelError);
}

TEST_CASE("catalog models are valid and acyclic after contraction") {
    for (const auto& n : catalog()) {
        CAPTURE(n);
        const Robot r = compile(catalog_model(n));
        CHECK(validate(r).ok());
        CHECK_NOTHROW(build_topology(r));
        CHECK(r.link_id(default_end_effector(n)) >= 0);
    }
}

TEST_CASE("rest configurations are closed and non-singular") {
    for (const auto& n : catalog()) {
        CAPTURE(n);
        const Robot r = compile(catalog_model(n));
        const Topology t = build_topology(r);
        Configuration c = rest_configuration(r);
        for (const auto& fb : t.graph.four_bars) {
            CHECK(closure_residual(r, c, fb) <= 1e-12);
            CHECK_NOTHROW(solve_four_bar_closure(r, fb, c));
        }
    }
}

TEST_CASE("scaling keeps classification") {
    for (const auto& n : builtin_names()) {
        CAPTURE(n);
        const auto h1 = type_counts(build_topology(compile(builtin_robot(n))));
        for (double s : {0.5, 3.0}) {
            const Robot r = compile(builtin_robot(n, {s}));
            CHECK(type_counts(build_topology(r)) == h1);
            const Robot base = compile(builtin_robot(n));
            for (int a = 0; a < r.n_actuators(); ++a) {
                CHECK(std::abs(r.actuators[a].lower - s * base.actuators[a].lower) <= 1e-12);
                CHECK(std::abs(r.actuators[a].upper - s * base.actuators[a].upper) <= 1e-12);
            }
        }
    }
}

TEST_CASE("redundant copies are mirror images") {
    for (const auto& n : builtin_names()) {
        const Robot r = compile(builtin_robot(n));
        const Configuration c = rest_configuration(r);
        for (const auto& cls : r.redundancy_classes()) {
            CAPTURE(n);
            for (int a : cls) CHECK(std::abs(c.lengths[a] - c.lengths[cls[0]]) <= 1e-12);
        }
    }
}

TEST_CASE("generators match the checked-in goldens") {
    for (const auto& n : catalog()) {
        CAPTURE(n);
        const RobotDescription d = catalog_model(n);
        const std::string text = serialize_mrdf(d);
        const std::string path = golden_path(d.name);
        if (regenerate()) {
            std::filesystem::create_directories(MKIN_MODELS_DIR);
            std::ofstream(path, std::ios::binary) << text;
        }
        std::ifstream in(path, std::ios::binary);
        REQUIRE_MESSAGE(in.good(), "missing golden " << path << " (run with MKIN_UPDATE_GOLDENS=1)");
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str() == text);
        CHECK(serialize_mrdf(load_mrdf_file(path)) == text);
    }
}
