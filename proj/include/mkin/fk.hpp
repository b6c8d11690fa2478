#pragma once

#include <functional>
#include <vector>

#include "mkin/robot.hpp"
#include "mkin/topology.hpp"

namespace mkin {

struct Configuration {
    std::vector<double> q;          ///< per joint (rad or m); closure joints stay 0
    std::vector<Transform> world;   ///< per link
    std::vector<double> lengths;    ///< per actuator, measured from `world`
};

/// All joint parameters zero, poses and lengths evaluated.
Configuration rest_configuration(const Robot& robot);

/// Recompute every link pose and actuator length from q.
void update_world(const Robot& robot, Configuration& cfg);

/// Pose of a link from its parent's pose and the joint parameter.
Transform child_pose(const Robot& robot, const Transform& parent_world, int joint, double q);

/// World position of the mount-joint origin of a tube or rod link.
Vec3 mount_point(const Robot& robot, const Configuration& cfg, int link);

double actuator_length(const Robot& robot, const Configuration& cfg, int actuator);

/// World distance between the two sides of the four-bar's closing pin.
double closure_residual(const Robot& robot, const Configuration& cfg, const FourBar& fb);

struct RootProblem {
    std::function<double(double)> f;  ///< residual; may throw or return NaN outside its domain
    double x0 = 0.0;
    double lo = -1.0, hi = 1.0;
    double tol = 1e-6;
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int evaluations = 0;
};

/// Newton with central differences from x0, bisection on the nearest sign change as fallback. Throws SolveError.
RootResult solve_scalar_root(const RootProblem& p);

/// Solve J_bc and J_cd for the current J_ab, warm-started from cfg. Updates q and world. Throws SolveError.
void solve_four_bar_closure(const Robot& robot, const FourBar& fb, Configuration& cfg);

struct FkOptions {
    double tol = 1e-10;     ///< internal length tolerance (stricter than the reported 1e-6)
    bool look_at = true;
};

/// Drive one ITEP so its actuator reaches `target`. Throws SolveError.
void solve_itep(const Robot& robot, const Topology& topo, const Itep& itep, double target, Configuration& cfg,
                const FkOptions& opt = {});

/// Point tube and rod links at each other; lengths are unaffected.
void look_at_refine(const Robot& robot, Configuration& cfg);

/// Solve every active actuator in ascending id. On error cfg is restored and SolveError names the actuator.
void forward_kinematics(const Robot& robot, const Topology& topo, const std::vector<double>& targets,
                        Configuration& cfg, const FkOptions& opt = {});

}  // namespace mkin
