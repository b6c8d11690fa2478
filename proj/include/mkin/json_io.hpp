#pragma once

#include <json.hpp>

#include "mkin/fk.hpp"

namespace mkin {

/// {"translation": [x,y,z], "quaternion": [w,x,y,z]}
nlohmann::json pose_to_json(const Transform& T);

/// Missing fields default to identity; the quaternion is normalized. Throws ContractError.
Transform pose_from_json(const nlohmann::json& j);

/// World poses of all links keyed by name, and actuator lengths keyed by name.
nlohmann::json configuration_json(const Robot& robot, const Configuration& cfg);

}  // namespace mkin
