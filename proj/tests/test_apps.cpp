#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <sstream>

#include "mkin/apps.hpp"
#include "mkin/models.hpp"

using namespace mkin;

namespace {

struct Loaded {
    Robot robot;
    Topology topo;
    int ee;
    explicit Loaded(const std::string& name)
        : robot(compile(catalog_model(name))), topo(build_topology(robot)), ee(robot.link_id(default_end_effector(name))) {}
};

Transform pose_at(const Loaded& m, const std::vector<double>& L) {
    Configuration c = rest_configuration(m.robot);
    forward_kinematics(m.robot, m.topo, L, c);
    return c.world[m.ee];
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("workspace endpoints") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    WorkspaceSpec spec;
    spec.end_effector = m.ee;
    spec.samples = {2};
    const auto out = sample_workspace(m.robot, m.topo, c, spec);
    REQUIRE(out.size() == 2);
    CHECK(out[0].lengths[0] == m.robot.actuators[0].lower);
    CHECK(out[1].lengths[0] == m.robot.actuators[0].upper);
}

TEST_CASE("workspace arc of a revolute fixture") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    WorkspaceSpec spec;
    spec.end_effector = m.ee;
    spec.samples = {21};
    const auto out = sample_workspace(m.robot, m.topo, c, spec);
    REQUIRE(out.size() == 21);
    const Vec3 pivot = c.world[m.ee].t;
    const Vec3 tip(0, 0, 1);
    for (const auto& s : out) {
        CHECK(s.feasible);
        CHECK(std::abs((s.pose * tip - pivot).norm() - 1.0) <= 1e-9);
    }
    CHECK((out.front().pose * tip - out.back().pose * tip).norm() > 0.1);
}

TEST_CASE("workspace grid order and reproducibility") {
    const Loaded m("LHD");
    const Configuration c = rest_configuration(m.robot);
    WorkspaceSpec spec;
    spec.end_effector = m.ee;
    spec.samples = {3, 3};
    const auto mask = relevant_actuators(m.robot, m.topo, m.ee);
    std::vector<int> reps;
    for (int a = 0; a < m.robot.n_actuators(); ++a)
        if (mask[a]) reps.push_back(a);
    REQUIRE(reps.size() == 2);
    const auto out = sample_workspace(m.robot, m.topo, c, spec);
    REQUIRE(out.size() == 9);
    auto grid = [&](int a, int i) {
        const Actuator& act = m.robot.actuators[a];
        return act.lower + (act.upper - act.lower) * i / 2.0;
    };
    for (int k = 0; k < 9; ++k) {
        CAPTURE(k);
        CHECK(std::abs(out[k].lengths[reps[0]] - grid(reps[0], k / 3)) <= 1e-15);
        CHECK(std::abs(out[k].lengths[reps[1]] - grid(reps[1], k % 3)) <= 1e-15);
        CHECK(pose_distance(pose_at(m, out[k].lengths), out[k].pose) <= 1e-6);
    }
}

TEST_CASE("workspace leaves irrelevant actuators and the session alone") {
    const Loaded m("TCCHS");
    Configuration c = rest_configuration(m.robot);
    forward_kinematics(m.robot, m.topo, [&] {
        auto L = c.lengths;
        L[10] = m.robot.actuators[10].lower;
        return L;
    }(), c);
    const Configuration before = c;
    WorkspaceSpec spec;
    spec.end_effector = m.robot.link_id("canopy");
    spec.samples = {2};
    const auto out = sample_workspace(m.robot, m.topo, c, spec);
    int relevant = 0;
    for (bool b : relevant_actuators(m.robot, m.topo, spec.end_effector)) relevant += b;
    CHECK(out.size() == (1u << relevant));
    for (const auto& s : out) CHECK(s.lengths[10] == before.lengths[10]);
    CHECK(c.q == before.q);
}

TEST_CASE("workspace errors") {
    const Loaded m("TCCHS");
    const Configuration c = rest_configuration(m.robot);
    WorkspaceSpec spec;
    spec.end_effector = m.ee;
    spec.samples = {100};
    CHECK(workspace_size(m.robot, m.topo, spec) == 100'000'000L);
    CHECK_THROWS_AS(sample_workspace(m.robot, m.topo, c, spec), ContractError);
    spec.samples = {1};
    CHECK_THROWS_AS(sample_workspace(m.robot, m.topo, c, spec), ContractError);
    spec.samples = {3, 3};
    CHECK_THROWS_AS(sample_workspace(m.robot, m.topo, c, spec), ContractError);
}

TEST_CASE("via-point interpolation") {
    const Transform a = Transform::translation(0, 0, 0);
    Transform b(Eigen::AngleAxisd(1.0, Vec3::UnitZ()).toRotationMatrix(), Vec3(2, 0, 0));
    const Transform c = Transform::translation(2, 2, 0);
    for (auto kind : {Interpolation::Linear, Interpolation::CatmullRom}) {
        const std::vector<Transform> via{a, b, c};
        CHECK(pose_distance(interpolate_via(via, 0.0, kind), a) <= 1e-12);
        CHECK(pose_distance(interpolate_via(via, 0.5, kind), b) <= 1e-12);
        CHECK(pose_distance(interpolate_via(via, 1.0, kind), c) <= 1e-12);
    }
    const Transform mid = interpolate_via({a, b}, 0.5, Interpolation::Linear);
    CHECK((mid.t - Vec3(1, 0, 0)).norm() <= 1e-12);
    CHECK(std::abs(so3_log(mid.R).z() - 0.5) <= 1e-12);
    // Catmull-Rom bends through the middle point
    const Transform cr = interpolate_via({a, b, c}, 0.25, Interpolation::CatmullRom);
    CHECK(cr.t.y() < 0.0);
}

TEST_CASE("trajectory at the current pose stays put") {
    const Loaded m("TCCHS");
    const Configuration c = rest_configuration(m.robot);
    TrajectorySpec spec;
    spec.end_effector = m.ee;
    spec.via = {c.world[m.ee], c.world[m.ee]};
    spec.samples = 4;
    const auto pts = generate_trajectory(m.robot, m.topo, c, spec);
    REQUIRE(pts.size() == 4);
    for (const auto& p : pts) {
        CHECK(p.lengths == c.lengths);
        CHECK(p.psi <= 1e-6);
    }
}

TEST_CASE("trajectory endpoints recover generating lengths") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    const Actuator& a = m.robot.actuators[0];
    const double l0 = a.lower + 0.2 * (a.upper - a.lower), l1 = a.lower + 0.9 * (a.upper - a.lower);
    TrajectorySpec spec;
    spec.end_effector = m.ee;
    spec.via = {pose_at(m, {l0}), pose_at(m, {l1})};
    spec.samples = 2;
    auto pts = generate_trajectory(m.robot, m.topo, c, spec);
    REQUIRE(pts.size() == 2);
    CHECK(pose_distance(pts[0].target, spec.via[0]) <= 1e-12);
    CHECK(pose_distance(pts[1].target, spec.via[1]) <= 1e-12);
    CHECK(std::abs(pts[0].lengths[0] - l0) <= 1e-3);
    CHECK(std::abs(pts[1].lengths[0] - l1) <= 1e-3);

    spec.samples = 25;
    pts = generate_trajectory(m.robot, m.topo, c, spec);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        CAPTURE(k);
        if (k > 0) CHECK(pts[k].t > pts[k - 1].t);
        CHECK(pts[k].converged);
        CHECK(pts[k].lengths[0] >= a.lower);
        CHECK(pts[k].lengths[0] <= a.upper);
        // dense grid over the stroke
        double best = 1e300, best_l = 0;
        for (int i = 0; i < 10000; ++i) {
            const double l = a.lower + (a.upper - a.lower) * i / 9999.0;
            const double v = pose_distance(pose_at(m, {l}), pts[k].target);
            if (v < best) best = v, best_l = l;
        }
        CHECK(std::abs(pts[k].lengths[0] - best_l) <= 1e-3);
        if (k > 0) CHECK(std::abs(pts[k].lengths[0] - pts[k - 1].lengths[0]) <= 0.1 * (a.upper - a.lower));
    }
}

TEST_CASE("trajectory errors") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    TrajectorySpec spec;
    spec.end_effector = m.ee;
    spec.via = {c.world[m.ee]};
    CHECK_THROWS_AS(generate_trajectory(m.robot, m.topo, c, spec), ContractError);
    spec.via = {c.world[m.ee], c.world[m.ee], c.world[m.ee]};
    spec.samples = 2;
    CHECK_THROWS_AS(generate_trajectory(m.robot, m.topo, c, spec), ContractError);
}

TEST_CASE("output formats") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    WorkspaceSpec ws;
    ws.end_effector = m.ee;
    ws.samples = {5};
    const auto samples = sample_workspace(m.robot, m.topo, c, ws);
    std::ostringstream jl, csv;
    write_workspace_jsonl(jl, samples);
    write_workspace_csv(csv, m.robot, samples);
    CHECK(count_lines(jl.str()) == 5);
    CHECK(count_lines(csv.str()) == 6);
    CHECK(jl.str().find("\"quaternion\"") != std::string::npos);
    CHECK(csv.str().rfind("feasible,x,y,z,qw,qx,qy,qz,jack\n", 0) == 0);

    TrajectorySpec ts;
    ts.end_effector = m.ee;
    ts.via = {c.world[m.ee], c.world[m.ee]};
    ts.samples = 3;
    const auto pts = generate_trajectory(m.robot, m.topo, c, ts);
    std::ostringstream tj, tc;
    write_trajectory_jsonl(tj, pts);
    write_trajectory_csv(tc, m.robot, pts);
    CHECK(count_lines(tj.str()) == 3);
    CHECK(count_lines(tc.str()) == 4);
    CHECK(tj.str().find("\"psi\"") != std::string::npos);
}
