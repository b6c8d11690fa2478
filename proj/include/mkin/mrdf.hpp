#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkin/geometry.hpp"

namespace mkin {

struct PoseSpec {
    Vec3 translation = Vec3::Zero();
    Vec3 rpy = Vec3::Zero();  ///< roll, pitch, yaw (rad)

    Transform to_transform() const { return {rpy_to_matrix(rpy), translation}; }
};

struct GeometrySpec {
    std::string type = "box";  ///< box | cylinder | capsule | sphere | mesh
    std::vector<double> dims{1.0, 1.0, 1.0};
    std::string path;  ///< mesh only, kept verbatim
};

struct VisualSpec {
    PoseSpec offset;
    GeometrySpec geometry;
};

struct LinkSpec {
    std::string name;
    PoseSpec transformation;
    VisualSpec visual;
};

struct JointSpec {
    std::string name;
    std::string parent;
    std::string child;
    std::string type;  ///< revolute | prismatic | fixed
    PoseSpec origin;
    std::optional<Vec3> axis;
};

struct MountSpec {
    std::string link;
    std::string parent;
};

struct ActuatorSpec {
    std::string name;
    MountSpec tube;
    MountSpec rod;
    double lower = 0.0;
    double upper = 1.0;
    std::vector<std::string> redundant;
};

struct RobotDescription {
    std::string name;
    std::vector<LinkSpec> links;
    std::vector<JointSpec> joints;
    std::vector<ActuatorSpec> actuators;
};

struct ParseOptions {
    /// Reject lower >= upper while parsing. The validator turns this off so it can report the finding itself.
    bool check_bounds = true;
};

/// Throws ParseError with a message naming the offending entry.
RobotDescription parse_mrdf(std::string_view text, const ParseOptions& opts = {});

/// Deterministic key order, two-space indent, trailing newline.
std::string serialize_mrdf(const RobotDescription& desc);

RobotDescription load_mrdf_file(const std::string& path, const ParseOptions& opts = {});

}  // namespace mkin
