#include "mkin/json_io.hpp"

namespace mkin {

namespace {

Vec3 vec3(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ContractError(std::string("pose: '") + what + "' needs 3 numbers");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw ContractError(std::string("pose: '") + what + "' needs 3 numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

}  // namespace

nlohmann::json pose_to_json(const Transform& T) {
    const Eigen::Vector4d q = to_quaternion_wxyz(T.R);
    return {{"translation", {T.t.x(), T.t.y(), T.t.z()}}, {"quaternion", {q[0], q[1], q[2], q[3]}}};
}

Transform pose_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ContractError("pose: expected an object");
    Transform T;
    if (j.contains("translation")) T.t = vec3(j["translation"], "translation");
    if (j.contains("quaternion")) {
        const auto& q = j["quaternion"];
        if (!q.is_array() || q.size() != 4) throw ContractError("pose: 'quaternion' needs [w,x,y,z]");
        Eigen::Vector4d v;
        for (int i = 0; i < 4; ++i) {
            if (!q[i].is_number()) throw ContractError("pose: 'quaternion' needs [w,x,y,z]");
            v[i] = q[i].get<double>();
        }
        if (!(v.norm() > 1e-12)) throw ContractError("pose: zero quaternion");
        T.R = from_quaternion_wxyz(v.normalized());
    } else if (j.contains("rpy")) {
        throw ContractError("pose: use 'quaternion' [w,x,y,z]; rpy is only used in model files");
    }
    return T;
}

nlohmann::json configuration_json(const Robot& R, const Configuration& cfg) {
    nlohmann::json links = nlohmann::json::object(), lengths = nlohmann::json::object();
    for (const auto& l : R.links) links[l.name] = pose_to_json(cfg.world[l.id]);
    for (const auto& a : R.actuators) lengths[a.name] = cfg.lengths[a.id];
    return {{"links", links}, {"lengths", lengths}};
}

}  // namespace mkin
