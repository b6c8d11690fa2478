#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mkin/geometry.hpp"
#include "mkin/mrdf.hpp"

namespace mkin {

using IntMatrix = Eigen::MatrixXi;

struct VisualPart {
    Transform offset;  ///< relative to the link frame
    GeometrySpec geometry;
};

struct Link {
    int id = -1;
    std::string name;
    Transform T;                   ///< link transform relative to its parent joint
    std::vector<VisualPart> visuals;
    std::vector<std::string> merged;  ///< names of links folded in through fixed joints
    int parent_joint = -1;         ///< tree joint; -1 for the base
    int actuator = -1;             ///< owning actuator for tube/rod links
};

struct Joint {
    int id = -1;
    std::string name;
    int parent = -1;
    int child = -1;
    JointType type = JointType::Fixed;
    Vec3 axis = Vec3::UnitZ();     ///< unit, parent frame
    Transform origin;              ///< relative to the parent link frame
    bool closure = false;          ///< loop-closing joint, not used to place its child
};

struct Actuator {
    int id = -1;
    std::string name;
    int tube = -1, rod = -1;
    int tube_parent = -1, rod_parent = -1;
    int tube_joint = -1, rod_joint = -1;
    double lower = 0.0, upper = 1.0;
};

struct RobotCounts {
    int links = 0;      ///< excluding tube and rod links
    int joints = 0;     ///< a closure pair counts once; includes mount joints
    int actuators = 0;
};

struct Robot {
    std::string name;
    std::vector<Link> links;          ///< ID order is also a parent-before-child order
    std::vector<Joint> joints;
    std::vector<Actuator> actuators;
    IntMatrix J;    ///< n_L x n_L directed joint codes
    IntMatrix At;   ///< n_A x n_L tube incidence
    IntMatrix Ar;   ///< n_A x n_L rod incidence
    IntMatrix Rd;   ///< n_A x n_A redundancy, unit diagonal

    int n_links() const { return static_cast<int>(links.size()); }
    int n_actuators() const { return static_cast<int>(actuators.size()); }
    /// Joint id from p to c or -1.
    int joint_between(int p, int c) const;
    int link_id(std::string_view name) const;      ///< -1 if unknown; matches merged names too
    int actuator_id(std::string_view name) const;  ///< -1 if unknown
    bool is_actuator_link(int link) const { return links[link].actuator >= 0; }
    RobotCounts counts() const;
    /// Redundancy classes, each sorted, ordered by smallest member.
    std::vector<std::vector<int>> redundancy_classes() const;
};

/// Merge fixed chains, assign IDs and build the joint/incidence/redundancy matrices. Throws ModelError.
Robot compile(const RobotDescription& desc);

struct Finding {
    std::string severity;  ///< ERROR | WARNING
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

ValidationReport validate(const Robot& robot);

}  // namespace mkin
