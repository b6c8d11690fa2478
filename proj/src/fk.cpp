#include "mkin/fk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mkin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

Transform child_pose(const Robot& R, const Transform& parent_world, int joint, double q) {
    const Joint& j = R.joints[joint];
    return parent_world * joint_transform(j.type, j.axis, q, j.origin) * R.links[j.child].T;
}

void update_world(const Robot& R, Configuration& cfg) {
    const int n = R.n_links();
    cfg.world.resize(n);
    for (int k = 0; k < n; ++k) {
        const int pj = R.links[k].parent_joint;
        cfg.world[k] = pj < 0 ? R.links[k].T : child_pose(R, cfg.world[R.joints[pj].parent], pj, cfg.q[pj]);
    }
    cfg.lengths.resize(R.n_actuators());
    for (int a = 0; a < R.n_actuators(); ++a) cfg.lengths[a] = actuator_length(R, cfg, a);
}

Configuration rest_configuration(const Robot& R) {
    Configuration cfg;
    cfg.q.assign(R.joints.size(), 0.0);
    update_world(R, cfg);
    look_at_refine(R, cfg);
    return cfg;
}

Vec3 mount_point(const Robot& R, const Configuration& cfg, int link) {
    const Joint& j = R.joints[R.links[link].parent_joint];
    return cfg.world[j.parent] * j.origin.t;
}

double actuator_length(const Robot& R, const Configuration& cfg, int a) {
    const Actuator& act = R.actuators[a];
    return (mount_point(R, cfg, act.tube) - mount_point(R, cfg, act.rod)).norm();
}

double closure_residual(const Robot& R, const Configuration& cfg, const FourBar& fb) {
    const Vec3 from_d = cfg.world[fb.d] * R.joints[fb.j_da].origin.t;
    const Vec3 from_a = cfg.world[fb.a] * R.joints[fb.j_ad].origin.t;
    return (from_d - from_a).norm();
}

RootResult solve_scalar_root(const RootProblem& p) {
    if (!(p.lo <= p.hi) || !(p.tol > 0.0)) throw ContractError("solve_scalar_root: invalid bracket or tolerance");
    RootResult res;
    auto F = [&](double x) {
        ++res.evaluations;
        try {
            const double v = p.f(x);
            return std::isfinite(v) ? v : kNaN;
        } catch (const Error&) {
            return kNaN;
        }
    };
    double best_x = p.x0, best_f = std::numeric_limits<double>::infinity();
    auto note = [&](double x, double fx) {
        if (std::isfinite(fx) && std::abs(fx) < best_f) {
            best_f = std::abs(fx);
            best_x = x;
        }
    };

    // Bisect a sign change; false if the interval collapses without reaching tol.
    auto bisect = [&](double lo, double flo, double hi) {
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (lo + hi);
            const double fm = F(m);
            note(m, fm);
            if (!std::isfinite(fm)) return false;
            if (std::abs(fm) <= p.tol) {
                res.x = m;
                res.residual = fm;
                return true;
            }
            if ((fm <= 0.0) == (flo <= 0.0)) {
                lo = m;
                flo = fm;
            } else {
                hi = m;
            }
            if (std::abs(hi - lo) < 1e-15 * std::max(1.0, std::abs(m))) return false;
        }
        return false;
    };

    const double x0 = std::clamp(p.x0, p.lo, p.hi);
    const double f0 = F(x0);
    note(x0, f0);
    double x = x0, fx = f0;
    for (int it = 0; it < 50 && std::isfinite(fx); ++it) {
        if (std::abs(fx) <= p.tol) break;
        const double h = 1e-7 * std::max(1.0, std::abs(x));
        const double d = (F(x + h) - F(x - h)) / (2.0 * h);
        if (!std::isfinite(d) || d == 0.0) break;
        double step = -fx / d;
        bool accepted = false;
        for (int k = 0; k < 10 && !accepted; ++k, step *= 0.5) {
            const double xn = x + step;
            if (xn < p.lo || xn > p.hi) continue;
            const double fn = F(xn);
            note(xn, fn);
            if (std::isfinite(fn) && std::abs(fn) < std::abs(fx)) {
                x = xn;
                fx = fn;
                accepted = true;
            }
        }
        if (!accepted) break;
    }
    if (std::isfinite(fx) && std::abs(fx) <= p.tol) {
        // A long Newton run can hop over a nearer root; sample the way back and take the first sign change.
        const int n = static_cast<int>(std::min(8.0, std::floor(std::abs(x - x0) / (0.05 * (p.hi - p.lo)))));
        double a = x0, fa = f0;
        for (int k = 1; k < n && std::isfinite(fa); ++k) {
            const double b = x0 + (x - x0) * k / n;
            const double fb = F(b);
            if (!std::isfinite(fb)) break;
            if ((fa <= 0.0) != (fb <= 0.0) && bisect(a, fa, b)) return res;
            a = b;
            fa = fb;
        }
        res.x = x;
        res.residual = fx;
        return res;
    }

    // Scan outward from the warm start and bisect the nearest sign change.
    const int n = 64;
    for (int dir : {+1, -1}) {
        const double end = dir > 0 ? p.hi : p.lo;
        double a = x0, fa = f0;
        for (int k = 1; k <= n; ++k) {
            const double b = x0 + (end - x0) * k / n;
            const double fb = F(b);
            note(b, fb);
            if (std::isfinite(fa) && std::isfinite(fb) && (fa <= 0.0) != (fb <= 0.0) && bisect(a, fa, b)) return res;
            a = b;
            fa = fb;
        }
    }
    throw SolveError("no root found in [" + fmt(p.lo) + ", " + fmt(p.hi) + "]; best residual " + fmt(best_f) +
                     " at " + fmt(best_x));
}

void solve_four_bar_closure(const Robot& R, const FourBar& fb, Configuration& cfg) {
    const Joint& jbc = R.joints[fb.j_bc];
    const Joint& jcd = R.joints[fb.j_cd];
    const Vec3 pin_d = R.joints[fb.j_da].origin.t;
    const Vec3 pin_a = cfg.world[fb.a] * R.joints[fb.j_ad].origin.t;
    const Transform& Fa = cfg.world[fb.a];
    double u = cfg.q[fb.j_bc], v = cfg.q[fb.j_cd];
    double r_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
        const Transform Fb = child_pose(R, Fa, fb.j_ab, cfg.q[fb.j_ab]);
        const Transform Fc = child_pose(R, Fb, fb.j_bc, u);
        const Transform Fd = child_pose(R, Fc, fb.j_cd, v);
        const Vec3 p = Fd * pin_d;
        const Vec3 r = p - pin_a;
        r_norm = r.norm();
        if (r_norm < 1e-13) break;
        Eigen::Matrix<double, 3, 2> Jm;
        Jm.col(0) = (Fb.R * jbc.axis).cross(p - Fb * jbc.origin.t);
        Jm.col(1) = (Fc.R * jcd.axis).cross(p - Fc * jcd.origin.t);
        Eigen::Vector2d delta = Jm.colPivHouseholderQr().solve(-r);
        if (!delta.allFinite()) break;
        if (delta.norm() > 0.5) delta *= 0.5 / delta.norm();
        u += delta(0);
        v += delta(1);
        if (delta.norm() < 1e-15) break;
    }
    if (!(r_norm <= 1e-9))
        throw SolveError("four-bar [" + R.links[fb.a].name + ", " + R.links[fb.b].name + ", " + R.links[fb.c].name +
                         ", " + R.links[fb.d].name + "] closure failed (residual " + fmt(r_norm) + ")");
    cfg.q[fb.j_bc] = u;
    cfg.q[fb.j_cd] = v;
    update_world(R, cfg);
}

namespace {

double bracket_half_width(const Robot& R, const Joint& j, int actuator) {
    if (j.type == JointType::Prismatic) {
        const Actuator& a = R.actuators[actuator];
        return std::max(a.upper - a.lower, 1e-9);
    }
    return M_PI;
}

/// Angle that takes the link's x axis (at q = 0) onto the projection of `target` about the joint axis.
double aim_angle(const Robot& R, const Configuration& cfg, int link, const Vec3& target, bool& ok) {
    const Joint& j = R.joints[R.links[link].parent_joint];
    const Transform& P = cfg.world[j.parent];
    const Vec3 w = (P.R * j.axis).normalized();
    const Vec3 o = P * j.origin.t;
    const Vec3 x0 = (P.R * j.origin.R * R.links[link].T.R).col(0);
    const Vec3 d = target - o;
    const Vec3 xp = x0 - w * w.dot(x0);
    const Vec3 dp = d - w * w.dot(d);
    ok = xp.norm() > 1e-12 && dp.norm() > 1e-12;
    if (!ok) return cfg.q[j.id];
    const double th = std::atan2(w.dot(xp.cross(dp)), xp.dot(dp));
    return cfg.q[j.id] + std::remainder(th - cfg.q[j.id], 2.0 * M_PI);
}

}  // namespace

void look_at_refine(const Robot& R, Configuration& cfg) {
    bool changed = false;
    for (const auto& a : R.actuators) {
        const Vec3 pt = mount_point(R, cfg, a.tube);
        const Vec3 pr = mount_point(R, cfg, a.rod);
        for (auto [link, target] : {std::pair{a.tube, pr}, std::pair{a.rod, pt}}) {
            bool ok = false;
            const double th = aim_angle(R, cfg, link, target, ok);
            const int j = R.links[link].parent_joint;
            if (ok && cfg.q[j] != th) {
                cfg.q[j] = th;
                changed = true;
            }
        }
    }
    if (changed) update_world(R, cfg);
}

void solve_itep(const Robot& R, const Topology& topo, const Itep& it, double target, Configuration& cfg,
                const FkOptions& opt) {
    const Actuator& act = R.actuators[it.actuator];
    if (target < act.lower - 1e-12 || target > act.upper + 1e-12)
        throw SolveError("actuator '" + act.name + "': target " + fmt(target) + " outside bounds [" + fmt(act.lower) +
                         ", " + fmt(act.upper) + "]");
    if (std::abs(cfg.lengths[it.actuator] - target) <= opt.tol) return;

    RootProblem p;
    p.tol = opt.tol;
    const int i = it.actuator;

    if (it.type == ItepType::A || it.type == ItepType::B) {
        const int j = it.driven_joint;
        p.x0 = cfg.q[j];
        p.f = [&](double th) {
            cfg.q[j] = th;
            update_world(R, cfg);
            return cfg.lengths[i] - target;
        };
        const double w = bracket_half_width(R, R.joints[j], i);
        p.lo = p.x0 - w;
        p.hi = p.x0 + w;
        const double x = solve_scalar_root(p).x;
        p.f(x);
        return;
    }

    const FourBar& fb = topo.graph.four_bars[it.four_bar];
    const int j = fb.j_ab;
    const double q_bc0 = cfg.q[fb.j_bc], q_cd0 = cfg.q[fb.j_cd];
    double warm_bc = q_bc0, warm_cd = q_cd0;

    // Type D: the loop's structural revolute joint keeps the locked actuator at its length.
    const int jr = it.type == ItepType::D ? it.loop.revolute_joint : -1;
    const int k = it.type == ItepType::D ? it.loop.locked_actuator : -1;
    const double lk = k >= 0 ? cfg.lengths[k] : 0.0;
    double warm_r = jr >= 0 ? cfg.q[jr] : 0.0;

    p.x0 = cfg.q[j];
    p.lo = p.x0 - M_PI;
    p.hi = p.x0 + M_PI;
    p.f = [&](double th) {
        cfg.q[j] = th;
        cfg.q[fb.j_bc] = warm_bc;
        cfg.q[fb.j_cd] = warm_cd;
        if (jr >= 0) cfg.q[jr] = warm_r;
        update_world(R, cfg);
        solve_four_bar_closure(R, fb, cfg);
        warm_bc = cfg.q[fb.j_bc];
        warm_cd = cfg.q[fb.j_cd];
        if (jr >= 0) {
            RootProblem inner;
            inner.tol = opt.tol * 0.1;
            inner.x0 = warm_r;
            inner.lo = warm_r - M_PI;
            inner.hi = warm_r + M_PI;
            inner.f = [&](double a) {
                cfg.q[jr] = a;
                update_world(R, cfg);
                return cfg.lengths[k] - lk;
            };
            const double a = solve_scalar_root(inner).x;
            inner.f(a);
            warm_r = a;
        }
        return cfg.lengths[i] - target;
    };
    const double x = solve_scalar_root(p).x;
    const double r = p.f(x);
    if (!(std::abs(r) <= opt.tol)) throw SolveError("actuator '" + act.name + "': final residual " + fmt(r));
}

void forward_kinematics(const Robot& R, const Topology& topo, const std::vector<double>& targets,
                        Configuration& cfg, const FkOptions& opt) {
    if (static_cast<int>(targets.size()) != R.n_actuators())
        throw ContractError("forward_kinematics: expected " + std::to_string(R.n_actuators()) + " target lengths");
    const Configuration saved = cfg;
    int current = -1;
    try {
        for (const auto& a : R.actuators) {
            current = a.id;
            if (!std::isfinite(targets[a.id]) || targets[a.id] < a.lower - 1e-12 || targets[a.id] > a.upper + 1e-12)
                throw SolveError("target " + fmt(targets[a.id]) + " outside bounds [" + fmt(a.lower) + ", " +
                                 fmt(a.upper) + "]");
        }
        for (const Itep& it : topo.iteps) {
            current = it.actuator;
            for (int peer : it.group)
                if (std::abs(targets[peer] - targets[it.actuator]) > 1e-9)
                    throw SolveError("redundant actuators '" + R.actuators[it.actuator].name + "' and '" +
                                     R.actuators[peer].name + "' need equal targets");
        }
        for (const Itep& it : topo.iteps) {
            current = it.actuator;
            solve_itep(R, topo, it, targets[it.actuator], cfg, opt);
        }
        current = -1;
        if (opt.look_at) look_at_refine(R, cfg);
    } catch (const Error& e) {
        cfg = saved;
        if (current < 0) throw SolveError(e.what());
        throw SolveError("actuator '" + R.actuators[current].name + "': " + e.what());
    }
}

}  // namespace mkin
