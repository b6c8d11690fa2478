#include "mkin/ik.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "mkin/error.hpp"

namespace mkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe(const ScalarFn& f, double x) {
    try {
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    } catch (const Error&) {
        return kInf;
    }
}

// Psi is a norm and has a kink at zero, so the derivative-based solvers work on f^2.
struct Squared {
    const ScalarFn& f;
    double operator()(double x) const {
        const double v = safe(f, x);
        return v * v;
    }
};

// Central-difference derivatives with step h, shifted inward near the bounds.
bool derivatives(const Squared& g, double x, double h, double a, double b, double& d1, double& d2) {
    const double xc = std::clamp(x, a + h, b - h);
    const double fm = g(xc - h), f0 = g(xc), fp = g(xc + h);
    if (!std::isfinite(fm) || !std::isfinite(f0) || !std::isfinite(fp)) return false;
    d1 = (fp - fm) / (2 * h);
    d2 = (fp - 2 * f0 + fm) / (h * h);
    return true;
}

// The difference step follows the iterates down so the h^2 error term does not stall them.
double next_step(double moved, double a, double b) {
    return std::clamp(0.1 * std::abs(moved), 1e-7 * (b - a), 1e-4 * (b - a));
}

// Halve the step until g does not increase.
std::optional<double> damped(const Squared& g, double x, double xn, double a, double b) {
    const double gx = g(x);
    for (int i = 0; i < 30; ++i) {
        xn = std::clamp(xn, a, b);
        if (g(xn) <= gx) return xn;
        xn = x + 0.5 * (xn - x);
    }
    return std::nullopt;
}

constexpr int kMaxSteps = 100;

std::optional<double> newton_1d(const ScalarFn& f, double a, double b, double tol, double x) {
    const Squared g{f};
    if (!std::isfinite(g(x))) return std::nullopt;
    double h = 1e-4 * (b - a);
    for (int it = 0; it < kMaxSteps; ++it) {
        double d1, d2;
        if (!derivatives(g, x, h, a, b, d1, d2) || !(d2 > 0.0)) return std::nullopt;
        const auto xn = damped(g, x, x - d1 / d2, a, b);
        if (!xn) return std::nullopt;
        if (std::abs(*xn - x) <= tol) return *xn;
        h = next_step(*xn - x, a, b);
        x = *xn;
    }
    return x;
}

std::optional<double> secant_1d(const ScalarFn& f, double a, double b, double tol, double x) {
    const Squared g{f};
    if (!std::isfinite(g(x))) return std::nullopt;
    double h = 1e-4 * (b - a);
    auto slope = [&](double p) {
        const double pc = std::clamp(p, a + h, b - h);
        return (g(pc + h) - g(pc - h)) / (2 * h);
    };
    double x0 = x, x1 = std::clamp(x + 0.01 * (b - a), a, b);
    if (x1 == x0) x1 = std::clamp(x - 0.01 * (b - a), a, b);
    if (g(x1) > g(x0)) std::swap(x0, x1);
    double s0 = slope(x0), s1 = slope(x1);
    for (int it = 0; it < kMaxSteps; ++it) {
        if (!std::isfinite(s0) || !std::isfinite(s1) || s1 == s0) return std::nullopt;
        const auto x2 = damped(g, x1, x1 - s1 * (x1 - x0) / (s1 - s0), a, b);
        if (!x2) return std::nullopt;
        if (std::abs(*x2 - x1) <= tol) return *x2;
        h = next_step(*x2 - x1, a, b);
        x0 = x1;
        x1 = *x2;
        // both slopes at the current difference step
        s0 = slope(x0);
        s1 = slope(x1);
    }
    return x1;
}

}  // namespace

std::string solver_name(Solver1D s) {
    switch (s) {
        case Solver1D::GSS: return "gss";
        case Solver1D::Brent: return "brent";
        case Solver1D::Newton: return "newton";
        case Solver1D::Secant: return "secant";
    }
    return "?";
}

std::optional<Solver1D> parse_solver(const std::string& name) {
    for (Solver1D s : {Solver1D::GSS, Solver1D::Brent, Solver1D::Newton, Solver1D::Secant})
        if (solver_name(s) == name) return s;
    return std::nullopt;
}

double golden_section_search(const ScalarFn& f, double a, double b, double tol) {
    if (!(a < b) || !(tol > 0.0)) throw ContractError("golden_section_search: need a < b and tol > 0");
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = safe(f, c), fd = safe(f, d);
    while (b - a > tol) {
        if (fc == fd) {
            // a tie keeps [c, d]
            a = c;
            b = d;
            c = b - phi * (b - a);
            d = a + phi * (b - a);
            fc = safe(f, c);
            fd = safe(f, d);
        } else if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = safe(f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = safe(f, d);
        }
    }
    return 0.5 * (a + b);
}

double minimize_1d(Solver1D kind, const ScalarFn& f, double a, double b, double tol, double warm) {
    warm = std::clamp(warm, a, b);
    double x = warm;
    switch (kind) {
        case Solver1D::GSS: x = golden_section_search(f, a, b, tol); break;
        case Solver1D::Brent: {
            // boost stops on a relative tolerance of 2^(1-bits) in x
            const double rel = tol / (4.0 * std::max({std::abs(a), std::abs(b), tol}));
            const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(rel))) + 1, 8,
                                        std::numeric_limits<double>::digits / 2);
            x = boost::math::tools::brent_find_minima([&](double v) { return safe(f, v); }, a, b, bits).first;
            break;
        }
        case Solver1D::Newton: {
            auto r = newton_1d(f, a, b, tol, warm);
            x = r ? *r : golden_section_search(f, a, b, tol);
            break;
        }
        case Solver1D::Secant: {
            auto r = secant_1d(f, a, b, tol, warm);
            x = r ? *r : golden_section_search(f, a, b, tol);
            break;
        }
    }
    x = std::clamp(x, a, b);
    return safe(f, x) < safe(f, warm) ? x : warm;
}

double objective(const Robot& R, const Topology& topo, const std::vector<double>& lengths, const Transform& target,
                 int ee, const Configuration& cfg, const FkOptions& fk) {
    Configuration scratch = cfg;
    forward_kinematics(R, topo, lengths, scratch, fk);
    return pose_distance(scratch.world[ee], target);
}

std::vector<bool> relevant_actuators(const Robot& R, const Topology& topo, int ee) {
    IntMatrix tree = IntMatrix::Zero(R.n_links(), R.n_links());
    for (const auto& j : R.joints)
        if (!j.closure) tree(j.parent, j.child) = 1;
    std::vector<bool> mask(R.n_actuators(), false);
    for (const auto& it : topo.iteps) {
        const Actuator& a = R.actuators[it.actuator];
        mask[it.actuator] = !topo_path(tree, a.tube_parent, ee).empty() || !topo_path(tree, a.rod_parent, ee).empty();
    }
    return mask;
}

namespace {

struct Run {
    std::vector<double> L;
    Configuration cfg;
    double psi = kInf;
    std::vector<double> trace;
    bool converged = false;
    int iterations = 0;
};

Run descend(const Robot& R, const Topology& topo, const IkProblem& P, const std::vector<bool>& mask, Configuration cfg,
            std::vector<double> L, long& evals) {
    const IkOptions& o = P.options;
    Run run;
    double prev = kInf;
    for (int k = 0; k < o.max_iterations; ++k) {
        for (const auto& it : topo.iteps) {
            if (!mask[it.actuator]) continue;
            const Actuator& a = R.actuators[it.actuator];
            // scratch copies start from the session configuration
            const Configuration session = cfg;
            std::vector<double> trial = L;
            auto f = [&](double x) {
                ++evals;
                for (int g : it.group) trial[g] = x;
                return objective(R, topo, trial, P.target, P.end_effector, session, o.fk);
            };
            const double x = minimize_1d(o.solver, f, a.lower, a.upper, o.inner_tol * (a.upper - a.lower),
                                         L[it.actuator]);
            std::vector<double> next = L;
            for (int g : it.group) next[g] = x;
            try {
                forward_kinematics(R, topo, next, cfg, o.fk);
                L = next;
            } catch (const SolveError&) {
                // keep the last feasible lengths
            }
        }
        const double psi = pose_distance(cfg.world[P.end_effector], P.target);
        run.trace.push_back(psi);
        if (std::abs(psi - prev) < o.tol) {
            run.converged = true;
            run.iterations = k;
            break;
        }
        prev = psi;
        run.iterations = k + 1;
    }
    run.L = std::move(L);
    run.cfg = std::move(cfg);
    run.psi = run.trace.empty() ? pose_distance(run.cfg.world[P.end_effector], P.target) : run.trace.back();
    return run;
}

}  // namespace

IkResult solve_ik(const Robot& R, const Topology& topo, const Configuration& start, const IkProblem& P) {
    if (P.end_effector < 0 || P.end_effector >= R.n_links())
        throw ContractError("solve_ik: end-effector link out of range");
    if (!(P.options.tol > 0.0) || P.options.max_iterations < 1 || P.options.multistart < 1)
        throw ContractError("solve_ik: invalid options");
    const auto mask = relevant_actuators(R, topo, P.end_effector);

    std::vector<double> L0 = start.lengths;
    for (const auto& it : topo.iteps) {
        const Actuator& a = R.actuators[it.actuator];
        const double v = std::clamp(L0[it.actuator], a.lower, a.upper);
        for (int g : it.group) L0[g] = v;
    }

    long evals = 0;
    std::mt19937_64 rng(P.options.seed);
    std::optional<Run> best;
    for (int s = 0; s < P.options.multistart; ++s) {
        Configuration cfg = start;
        std::vector<double> L = L0;
        if (s > 0) {
            for (const auto& it : topo.iteps) {
                if (!mask[it.actuator]) continue;
                const Actuator& a = R.actuators[it.actuator];
                const double v = std::uniform_real_distribution<double>(a.lower, a.upper)(rng);
                for (int g : it.group) L[g] = v;
            }
            try {
                forward_kinematics(R, topo, L, cfg, P.options.fk);
            } catch (const SolveError&) {
                continue;
            }
        } else if (L != start.lengths) {
            forward_kinematics(R, topo, L, cfg, P.options.fk);
        }
        Run run = descend(R, topo, P, mask, std::move(cfg), std::move(L), evals);
        if (!best || run.psi < best->psi) best = std::move(run);
    }

    IkResult res;
    res.lengths = best->L;
    res.psi = best->psi;
    res.trace = best->trace;
    res.converged = best->converged;
    res.iterations = best->iterations;
    res.evaluations = evals;
    res.config = best->cfg;
    return res;
}

}  // namespace mkin
