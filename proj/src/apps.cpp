#include "mkin/apps.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "mkin/json_io.hpp"

namespace mkin {

namespace {

std::vector<int> relevant_reps(const Robot& R, const Topology& topo, int ee) {
    const auto mask = relevant_actuators(R, topo, ee);
    std::vector<int> reps;
    for (int a = 0; a < R.n_actuators(); ++a)
        if (mask[a]) reps.push_back(a);
    return reps;
}

std::vector<int> counts_for(const WorkspaceSpec& spec, std::size_t n) {
    if (spec.samples.size() == 1) return std::vector<int>(n, spec.samples[0]);
    if (spec.samples.size() != n)
        throw ContractError("workspace: expected " + std::to_string(n) + " sample counts, got " +
                            std::to_string(spec.samples.size()));
    return spec.samples;
}

void pose_csv(std::ostream& os, const Transform& T) {
    const Eigen::Vector4d q = to_quaternion_wxyz(T.R);
    os << T.t.x() << ',' << T.t.y() << ',' << T.t.z() << ',' << q[0] << ',' << q[1] << ',' << q[2] << ',' << q[3];
}

void lengths_csv(std::ostream& os, const std::vector<double>& L) {
    for (double l : L) os << ',' << l;
}

std::string pose_header(const std::string& p) {
    return p + "x," + p + "y," + p + "z," + p + "qw," + p + "qx," + p + "qy," + p + "qz";
}

}  // namespace

long workspace_size(const Robot& R, const Topology& topo, const WorkspaceSpec& spec) {
    if (spec.end_effector < 0 || spec.end_effector >= R.n_links())
        throw ContractError("workspace: end-effector link out of range");
    const auto reps = relevant_reps(R, topo, spec.end_effector);
    long total = 1;
    for (int n : counts_for(spec, reps.size())) {
        if (n < 2) throw ContractError("workspace: each actuator needs at least 2 samples");
        // saturate instead of overflowing
        total = total > (1L << 40) / n ? (1L << 40) : total * n;
    }
    return total;
}

std::vector<WorkspaceSample> sample_workspace(const Robot& R, const Topology& topo, const Configuration& session,
                                              const WorkspaceSpec& spec) {
    const long total = workspace_size(R, topo, spec);
    if (total > spec.cap)
        throw ContractError("workspace: grid of " + std::to_string(total) + " points exceeds the cap of " +
                            std::to_string(spec.cap));
    const auto reps = relevant_reps(R, topo, spec.end_effector);
    const auto counts = counts_for(spec, reps.size());

    std::vector<WorkspaceSample> out;
    out.reserve(total);
    std::vector<int> idx(reps.size(), 0);
    for (long k = 0; k < total; ++k) {
        std::vector<double> L = session.lengths;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const Actuator& a = R.actuators[reps[i]];
            const double v = a.lower + (a.upper - a.lower) * idx[i] / (counts[i] - 1);
            for (int g : topo.of_actuator(reps[i]).group) L[g] = v;
        }
        WorkspaceSample s;
        s.lengths = L;
        Configuration scratch = session;
        try {
            forward_kinematics(R, topo, L, scratch, spec.fk);
            s.pose = scratch.world[spec.end_effector];
        } catch (const SolveError&) {
            s.feasible = false;
        }
        out.push_back(std::move(s));
        // last index varies fastest
        for (int i = static_cast<int>(reps.size()) - 1; i >= 0; --i) {
            if (++idx[i] < counts[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

Transform interpolate_via(const std::vector<Transform>& via, double t, Interpolation kind) {
    if (via.size() < 2) throw ContractError("trajectory: need at least 2 via points");
    const int segs = static_cast<int>(via.size()) - 1;
    t = std::clamp(t, 0.0, 1.0);
    const int s = std::min(static_cast<int>(std::floor(t * segs)), segs - 1);
    const double u = t * segs - s;

    const Eigen::Quaterniond q0(via[s].R), q1(via[s + 1].R);
    Transform out;
    out.R = q0.slerp(u, q1).toRotationMatrix();
    const Vec3& p1 = via[s].t;
    const Vec3& p2 = via[s + 1].t;
    if (kind == Interpolation::Linear) {
        out.t = (1 - u) * p1 + u * p2;
    } else {
        const Vec3& p0 = s > 0 ? via[s - 1].t : p1;
        const Vec3& p3 = s + 2 <= segs ? via[s + 2].t : p2;
        const double u2 = u * u, u3 = u2 * u;
        out.t = 0.5 * ((2 * p1) + (-p0 + p2) * u + (2 * p0 - 5 * p1 + 4 * p2 - p3) * u2 + (-p0 + 3 * p1 - 3 * p2 + p3) * u3);
    }
    return out;
}

std::vector<TrajectoryPoint> generate_trajectory(const Robot& R, const Topology& topo, const Configuration& start,
                                                 const TrajectorySpec& spec) {
    if (spec.via.size() < 2) throw ContractError("trajectory: need at least 2 via points");
    if (spec.samples < static_cast<int>(spec.via.size()))
        throw ContractError("trajectory: sample count must be at least the number of via points");
    std::vector<TrajectoryPoint> out;
    Configuration cfg = start;
    for (int k = 0; k < spec.samples; ++k) {
        TrajectoryPoint p;
        p.t = static_cast<double>(k) / (spec.samples - 1);
        p.target = interpolate_via(spec.via, p.t, spec.interpolation);
        IkProblem prob;
        prob.end_effector = spec.end_effector;
        prob.target = p.target;
        prob.options = spec.ik;
        IkResult r = solve_ik(R, topo, cfg, prob);
        p.lengths = r.lengths;
        p.achieved = r.config.world[spec.end_effector];
        p.psi = r.psi;
        p.converged = r.converged;
        p.iterations = r.iterations;
        cfg = std::move(r.config);
        out.push_back(std::move(p));
    }
    return out;
}

void write_workspace_jsonl(std::ostream& os, const std::vector<WorkspaceSample>& samples) {
    for (const auto& s : samples) {
        nlohmann::json j{{"lengths", s.lengths}, {"feasible", s.feasible}};
        j["pose"] = s.feasible ? pose_to_json(s.pose) : nlohmann::json(nullptr);
        os << j.dump() << '\n';
    }
}

void write_workspace_csv(std::ostream& os, const Robot& R, const std::vector<WorkspaceSample>& samples) {
    os << "feasible," << pose_header("");
    for (const auto& a : R.actuators) os << ',' << a.name;
    os << '\n';
    os.precision(17);
    for (const auto& s : samples) {
        os << (s.feasible ? 1 : 0) << ',';
        pose_csv(os, s.pose);
        lengths_csv(os, s.lengths);
        os << '\n';
    }
}

void write_trajectory_jsonl(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
    for (const auto& p : points) {
        nlohmann::json j{{"t", p.t},
                         {"target", pose_to_json(p.target)},
                         {"lengths", p.lengths},
                         {"pose", pose_to_json(p.achieved)},
                         {"psi", p.psi},
                         {"converged", p.converged},
                         {"iterations", p.iterations}};
        os << j.dump() << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const Robot& R, const std::vector<TrajectoryPoint>& points) {
    os << "t,psi,converged,iterations," << pose_header("target_") << ',' << pose_header("");
    for (const auto& a : R.actuators) os << ',' << a.name;
    os << '\n';
    os.precision(17);
    for (const auto& p : points) {
        os << p.t << ',' << p.psi << ',' << (p.converged ? 1 : 0) << ',' << p.iterations << ',';
        pose_csv(os, p.target);
        os << ',';
        pose_csv(os, p.achieved);
        lengths_csv(os, p.lengths);
        os << '\n';
    }
}

}  // namespace mkin
