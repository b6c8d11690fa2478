#pragma once

#include <string>
#include <vector>

#include "mkin/mrdf.hpp"

namespace mkin {

struct ModelParams {
    double scale = 1.0;  ///< uniform length factor, > 0
};

/// Names of the eight built-in robots.
const std::vector<std::string>& builtin_names();
/// Names of the minimal unit fixtures.
const std::vector<std::string>& fixture_names();

/// Throws ModelError for unknown names or invalid params.
RobotDescription builtin_robot(const std::string& name, const ModelParams& params = {});
RobotDescription unit_fixture(const std::string& kind, const ModelParams& params = {});
/// Built-in robot or unit fixture by name.
RobotDescription catalog_model(const std::string& name, const ModelParams& params = {});

/// Default IK end-effector link name for a catalog model.
std::string default_end_effector(const std::string& name);

/// Authors planar mechanisms in world coordinates at rest. Link frames sit on their inbound pin and
/// start world-aligned, so joint origins are differences of world points.
class ModelBuilder {
public:
    explicit ModelBuilder(std::string name, double scale = 1.0);

    ModelBuilder& link(const std::string& name, const Vec3& origin);
    ModelBuilder& revolute(const std::string& name, const std::string& parent, const std::string& child,
                           const Vec3& axis);
    ModelBuilder& prismatic(const std::string& name, const std::string& parent, const std::string& child,
                            const Vec3& axis);
    /// Fixed closure pair between d and a pinned at a world point.
    ModelBuilder& closure(const std::string& name, const std::string& d, const std::string& a, const Vec3& pin);
    /// Reverse revolute on the child's pin, forming a coaxial two-link loop.
    ModelBuilder& bearing(const std::string& name, const std::string& parent, const std::string& child,
                          const Vec3& axis);

    struct Mount {
        std::string parent;
        Vec3 point;
    };
    /// Actuator with bounds [l0 - retract, l0 + extend], l0 the rest length.
    ModelBuilder& actuator(const std::string& name, const Mount& tube, const Mount& rod, const Vec3& mount_axis,
                           double retract, double extend, const std::vector<std::string>& redundant = {});
    /// Redundant copies shifted by each offset; every copy lists all the others.
    ModelBuilder& actuator_group(const std::vector<std::string>& names, const std::vector<Vec3>& offsets,
                                 const Mount& tube, const Mount& rod, const Vec3& mount_axis, double retract,
                                 double extend);

    RobotDescription build() const;

private:
    struct PendingActuator {
        std::string name;
        Mount tube, rod;
        Vec3 axis;
        double lower, upper;
        std::vector<std::string> redundant;
    };
    const Vec3& origin_of(const std::string& link) const;
    std::string name_;
    double s_;
    std::vector<std::pair<std::string, Vec3>> links_;
    std::vector<JointSpec> joints_;
    std::vector<PendingActuator> actuators_;
};

}  // namespace mkin
