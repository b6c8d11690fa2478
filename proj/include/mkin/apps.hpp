#pragma once

#include <ostream>
#include <vector>

#include "mkin/ik.hpp"

namespace mkin {

struct WorkspaceSpec {
    int end_effector = -1;
    /// Samples per relevant actuator in ascending id; a single entry applies to all.
    std::vector<int> samples{11};
    long cap = 1'000'000;
    FkOptions fk;
};

struct WorkspaceSample {
    std::vector<double> lengths;
    Transform pose;
    bool feasible = true;
};

/// Grid size for the spec, or ContractError if malformed. Does not check the cap.
long workspace_size(const Robot& robot, const Topology& topo, const WorkspaceSpec& spec);

/// FK over the Cartesian grid of relevant actuator lengths, row-major by ascending actuator id.
/// Every point starts from `session`; irrelevant actuators keep its lengths.
/// Throws ContractError before solving if the grid exceeds the cap.
std::vector<WorkspaceSample> sample_workspace(const Robot& robot, const Topology& topo, const Configuration& session,
                                              const WorkspaceSpec& spec);

enum class Interpolation { Linear, CatmullRom };

struct TrajectorySpec {
    int end_effector = -1;
    std::vector<Transform> via;
    int samples = 2;
    Interpolation interpolation = Interpolation::Linear;
    IkOptions ik;
};

struct TrajectoryPoint {
    double t = 0.0;
    Transform target;
    std::vector<double> lengths;
    Transform achieved;
    double psi = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Pose on the via-point curve at t in [0,1]; via points sit at uniform knots.
/// Rotations are slerped, translations linear or uniform Catmull-Rom.
Transform interpolate_via(const std::vector<Transform>& via, double t, Interpolation kind);

/// IK at `samples` uniform t values, each warm-started from the previous solution.
std::vector<TrajectoryPoint> generate_trajectory(const Robot& robot, const Topology& topo, const Configuration& start,
                                                 const TrajectorySpec& spec);

void write_workspace_jsonl(std::ostream& os, const std::vector<WorkspaceSample>& samples);
void write_workspace_csv(std::ostream& os, const Robot& robot, const std::vector<WorkspaceSample>& samples);
void write_trajectory_jsonl(std::ostream& os, const std::vector<TrajectoryPoint>& points);
void write_trajectory_csv(std::ostream& os, const Robot& robot, const std::vector<TrajectoryPoint>& points);

}  // namespace mkin
