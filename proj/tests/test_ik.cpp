#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "mkin/ik.hpp"
#include "mkin/models.hpp"

using namespace mkin;

namespace {

constexpr double kPi = std::numbers::pi;
const Solver1D kAll[] = {Solver1D::GSS, Solver1D::Brent, Solver1D::Newton, Solver1D::Secant};

struct Loaded {
    Robot robot;
    Topology topo;
    int ee;
    explicit Loaded(const std::string& name)
        : robot(compile(catalog_model(name))), topo(build_topology(robot)), ee(robot.link_id(default_end_effector(name))) {}
};

std::vector<double> random_lengths(const Loaded& m, std::mt19937_64& rng) {
    std::vector<double> L = rest_configuration(m.robot).lengths;
    for (const auto& it : m.topo.iteps) {
        const Actuator& a = m.robot.actuators[it.actuator];
        const double v = std::uniform_real_distribution<>(a.lower, a.upper)(rng);
        for (int g : it.group) L[g] = v;
    }
    return L;
}

Transform pose_at(const Loaded& m, const std::vector<double>& L) {
    Configuration c = rest_configuration(m.robot);
    forward_kinematics(m.robot, m.topo, L, c);
    return c.world[m.ee];
}

// Links reachable from `from` along tree joints, by breadth-first search over the joint list.
std::vector<bool> downstream(const Robot& r, int from) {
    std::vector<bool> seen(r.n_links(), false);
    std::deque<int> q{from};
    seen[from] = true;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (const auto& j : r.joints)
            if (!j.closure && j.parent == u && !seen[j.child]) {
                seen[j.child] = true;
                q.push_back(j.child);
            }
    }
    return seen;
}

}  // namespace

TEST_CASE("solver names") {
    for (Solver1D s : kAll) CHECK(parse_solver(solver_name(s)) == s);
    CHECK_FALSE(parse_solver("bfgs").has_value());
}

TEST_CASE("golden_section_search") {
    CHECK(std::abs(golden_section_search([](double x) { return (x - 0.3) * (x - 0.3); }, 0, 1, 1e-8) - 0.3) <= 1e-7);
    CHECK(golden_section_search([](double) { return 4.0; }, 2, 6, 1e-9) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::abs(golden_section_search([](double x) { return -std::sin(x); }, 0, kPi, 1e-8) - kPi / 2) <= 1e-6);
    CHECK_THROWS_AS(golden_section_search([](double x) { return x; }, 1, 0, 1e-6), ContractError);
    int calls = 0;
    golden_section_search([&](double x) { ++calls; return (x - 0.3) * (x - 0.3); }, -1, 1, 1e-6);
    // each step keeps a fraction phi of the bracket
    const double phi = (std::sqrt(5.0) - 1) / 2;
    CHECK(calls == 2 + static_cast<int>(std::ceil(std::log(1e-6 / 2) / std::log(phi))));
}

TEST_CASE("minimize_1d") {
    auto quad = [](double x) { return (x - 0.3) * (x - 0.3); };
    for (Solver1D s : kAll) {
        CAPTURE(solver_name(s));
        CHECK(std::abs(minimize_1d(s, quad, 0, 1, 1e-9, 0.9) - 0.3) <= 1e-6);
        // boundary optimum
        CHECK(std::abs(minimize_1d(s, [](double x) { return x * x; }, 1, 2, 1e-9, 1.7) - 1.0) <= 1e-6);
        // failing evaluations count as +inf
        auto holed = [](double x) {
            if (x > 0.6) throw SolveError("outside");
            return std::abs(x - 0.5);
        };
        const double x = minimize_1d(s, holed, 0, 1, 1e-9, 0.1);
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        CHECK(holed(x) <= holed(0.1));
    }
    CHECK(std::abs(minimize_1d(Solver1D::Brent, [](double x) { return std::abs(x - 0.5); }, 0, 1, 1e-8, 0) - 0.5) <=
          1e-7);
    // never worse than the warm start
    auto wavy = [](double x) { return std::cos(12 * x) + 0.1 * x; };
    for (Solver1D s : kAll)
        for (double w : {0.05, 0.26, 0.5, 0.8}) CHECK(wavy(minimize_1d(s, wavy, 0, 1, 1e-8, w)) <= wavy(w) + 1e-8);
}

TEST_CASE("objective") {
    const Loaded m("TCCHS");
    const Configuration c = rest_configuration(m.robot);
    const Transform here = c.world[m.ee];
    CHECK(objective(m.robot, m.topo, c.lengths, here, m.ee, c) <= 1e-12);
    Transform up = here;
    up.t += Vec3(0, 0, 2);
    CHECK(std::abs(objective(m.robot, m.topo, c.lengths, up, m.ee, c) - 2.0) <= 1e-12);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const auto L = random_lengths(m, rng);
        const Transform target = pose_at(m, L);
        Configuration copy = c;
        CHECK(objective(m.robot, m.topo, L, target, m.ee, copy) <= 1e-9);
        // the caller's configuration is untouched
        CHECK(copy.q == c.q);
    }
}

TEST_CASE("relevant actuators") {
    SUBCASE("canopy of TCCHS ignores the tail beam jack") {
        const Loaded m("TCCHS");
        const auto mask = relevant_actuators(m.robot, m.topo, m.robot.link_id("canopy"));
        CHECK_FALSE(mask[10]);
        int n = 0;
        for (bool b : mask) n += b;
        CHECK(n <= 6);
    }
    SUBCASE("single actuator") {
        const Loaded m("B");
        CHECK(relevant_actuators(m.robot, m.topo, m.ee) == std::vector<bool>{true});
    }
    SUBCASE("matches a reachability oracle on every link of every model") {
        std::vector<std::string> names = builtin_names();
        for (const auto& f : fixture_names()) names.push_back(f);
        for (const auto& n : names) {
            const Loaded m(n);
            const auto classes = m.robot.redundancy_classes();
            for (int e = 0; e < m.robot.n_links(); ++e) {
                CAPTURE(n);
                CAPTURE(e);
                const auto mask = relevant_actuators(m.robot, m.topo, e);
                for (const auto& cls : classes) {
                    const Actuator& a = m.robot.actuators[cls[0]];
                    const bool reach = downstream(m.robot, a.tube_parent)[e] || downstream(m.robot, a.rod_parent)[e];
                    CHECK(mask[cls[0]] == reach);
                    for (std::size_t i = 1; i < cls.size(); ++i) CHECK_FALSE(mask[cls[i]]);
                }
            }
        }
    }
}

TEST_CASE("target at the current pose converges in one iteration") {
    for (const std::string n : {"TCCHS", "RH", "B"}) {
        CAPTURE(n);
        const Loaded m(n);
        const Configuration c = rest_configuration(m.robot);
        IkProblem p;
        p.end_effector = m.ee;
        p.target = c.world[m.ee];
        const IkResult r = solve_ik(m.robot, m.topo, c, p);
        CHECK(r.converged);
        CHECK(r.iterations == 1);
        CHECK(r.lengths == c.lengths);
        CHECK(r.psi <= 1e-9);
    }
}

TEST_CASE("1-DoF fixtures recover generating lengths") {
    std::mt19937_64 rng(11);
    for (const std::string n : {"A", "B", "C"}) {
        const Loaded m(n);
        const Configuration c = rest_configuration(m.robot);
        for (Solver1D s : kAll)
            for (int k = 0; k < 10; ++k) {
                CAPTURE(n);
                CAPTURE(solver_name(s));
                const auto L = random_lengths(m, rng);
                IkProblem p;
                p.end_effector = m.ee;
                p.target = pose_at(m, L);
                p.options.solver = s;
                const IkResult r = solve_ik(m.robot, m.topo, c, p);
                CHECK(r.converged);
                CHECK(r.psi <= 1e-6);
                CHECK(std::abs(r.lengths[0] - L[0]) <= 1e-3);
                CHECK(pose_distance(r.config.world[m.ee], p.target) <= 1e-3);
            }
    }
}

TEST_CASE("unreachable target matches a dense grid") {
    const Loaded m("B");
    const Configuration c = rest_configuration(m.robot);
    const Actuator& a = m.robot.actuators[0];
    Transform far;
    far.R = Eigen::AngleAxisd(2.5, Vec3::UnitY()).toRotationMatrix();
    far.t = Vec3(6, 0, -4);
    double best = 1e300, best_l = 0;
    for (int k = 0; k < 10000; ++k) {
        const double l = a.lower + (a.upper - a.lower) * k / 9999.0;
        const double v = objective(m.robot, m.topo, {l}, far, m.ee, c);
        if (v < best) best = v, best_l = l;
    }
    for (Solver1D s : kAll) {
        CAPTURE(solver_name(s));
        IkProblem p;
        p.end_effector = m.ee;
        p.target = far;
        p.options.solver = s;
        const IkResult r = solve_ik(m.robot, m.topo, c, p);
        CHECK(r.converged);
        CHECK(r.psi > 1.0);
        CHECK(std::abs(r.psi - best) <= 1e-3);
        CHECK(std::abs(r.lengths[0] - best_l) <= 1e-3);
    }
}

TEST_CASE("coupled robots: trace, bounds and group equality") {
    std::mt19937_64 rng(5);
    for (const std::string n : {"TCCHS", "STHS", "SSHS", "D", "indirect_lock"}) {
        const Loaded m(n);
        const Configuration c = rest_configuration(m.robot);
        for (int k = 0; k < 3; ++k) {
            CAPTURE(n);
            IkProblem p;
            p.end_effector = m.ee;
            p.target = pose_at(m, random_lengths(m, rng));
            const IkResult r = solve_ik(m.robot, m.topo, c, p);
            CHECK(r.converged);
            CHECK(r.psi <= 1e-3);
            CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations + 1));
            for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-6);
            for (int i = 0; i < m.robot.n_actuators(); ++i) {
                CHECK(r.lengths[i] >= m.robot.actuators[i].lower);
                CHECK(r.lengths[i] <= m.robot.actuators[i].upper);
                CHECK(std::abs(r.config.lengths[i] - r.lengths[i]) <= 1e-6);
            }
            for (const auto& it : m.topo.iteps)
                for (int g : it.group) CHECK(r.lengths[g] == r.lengths[it.actuator]);
            CHECK(std::abs(pose_distance(r.config.world[m.ee], p.target) - r.psi) <= 1e-12);
        }
    }
}

TEST_CASE("irrelevant actuators keep their lengths") {
    const Loaded m("TCCHS");
    const int canopy = m.robot.link_id("canopy");
    std::mt19937_64 rng(9);
    const Configuration c = rest_configuration(m.robot);
    IkProblem p;
    p.end_effector = canopy;
    p.target = pose_at(m, random_lengths(m, rng));
    const IkResult r = solve_ik(m.robot, m.topo, c, p);
    CHECK(r.lengths[10] == c.lengths[10]);
}

TEST_CASE("determinism and multistart") {
    const Loaded m("STHS");
    std::mt19937_64 rng(21);
    const Configuration c = rest_configuration(m.robot);
    IkProblem p;
    p.end_effector = m.ee;
    p.target = pose_at(m, random_lengths(m, rng));
    p.options.multistart = 3;
    p.options.seed = 42;
    const IkResult a = solve_ik(m.robot, m.topo, c, p), b = solve_ik(m.robot, m.topo, c, p);
    CHECK(a.lengths == b.lengths);
    CHECK(a.trace == b.trace);
    CHECK(a.evaluations == b.evaluations);
    p.options.multistart = 1;
    const IkResult single = solve_ik(m.robot, m.topo, c, p);
    CHECK(a.psi <= single.psi);
    CHECK(a.evaluations > single.evaluations);
}

TEST_CASE("iteration cap gives a non-converged best-so-far result") {
    const Loaded m("TCCHS");
    std::mt19937_64 rng(2);
    const Configuration c = rest_configuration(m.robot);
    IkProblem p;
    p.end_effector = m.ee;
    p.target = pose_at(m, random_lengths(m, rng));
    p.options.max_iterations = 2;
    IkResult r;
    CHECK_NOTHROW(r = solve_ik(m.robot, m.topo, c, p));
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
    CHECK(r.trace.size() == 2);
    CHECK(r.psi == r.trace.back());

    p.end_effector = 99;
    CHECK_THROWS_AS(solve_ik(m.robot, m.topo, c, p), ContractError);
}
