#include "mkin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mkin {

Mat4 Transform::matrix() const {
    Mat4 M = Mat4::Identity();
    M.topLeftCorner<3, 3>() = R;
    M.topRightCorner<3, 1>() = t;
    return M;
}

Mat3 skew(const Vec3& v) {
    Mat3 S;
    S << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
         -v.y(), v.x(), 0;
    return S;
}

Mat3 rodrigues(const Vec3& axis, double theta) {
    if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9)
        throw GeometryError("rodrigues: axis is not normalized");
    const Mat3 K = skew(axis);
    return Mat3::Identity() + std::sin(theta) * K + (1.0 - std::cos(theta)) * K * K;
}

Mat3 rpy_to_matrix(const Vec3& rpy) {
    const Mat3 rx = rodrigues(Vec3::UnitX(), rpy.x());
    const Mat3 ry = rodrigues(Vec3::UnitY(), rpy.y());
    const Mat3 rz = rodrigues(Vec3::UnitZ(), rpy.z());
    return rz * ry * rx;
}

Vec3 matrix_to_rpy(const Mat3& R) {
    const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
    double roll, yaw;
    if (std::abs(std::cos(pitch)) > 1e-12) {
        roll = std::atan2(R(2, 1), R(2, 2));
        yaw = std::atan2(R(1, 0), R(0, 0));
    } else {
        // gimbal lock: fold everything into yaw
        roll = 0.0;
        yaw = std::atan2(-R(0, 1), R(1, 1));
    }
    return {roll, pitch, yaw};
}

Transform joint_transform(JointType type, const Vec3& axis, double theta, const Transform& origin) {
    switch (type) {
        case JointType::Fixed:
            return origin;
        case JointType::Revolute:
            return {rodrigues(axis, theta) * origin.R, origin.t};
        case JointType::Prismatic:
            if (std::abs(axis.norm() - 1.0) > 1e-9) throw GeometryError("joint_transform: axis is not normalized");
            return {origin.R, origin.t + theta * axis};
        default:
            throw ContractError("joint_transform: only revolute, prismatic and fixed joints can be evaluated");
    }
}

Transform chain_transform(std::span<const Transform> transforms) {
    Transform acc;
    for (const auto& T : transforms) acc = acc * T;
    return acc;
}

Vec3 so3_log(const Mat3& R) {
    const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));  // 2 sin(th) a
    const double s = 0.5 * w.norm();
    const double c = 0.5 * (R.trace() - 1.0);
    const double theta = std::atan2(s, c);
    if (theta < 1e-6) return 0.5 * w;  // first order, exact to O(th^3)
    if (theta > std::numbers::pi - 1e-3) {
        // axis from the symmetric part: S = cos(th) I + (1 - cos(th)) a a^T
        const Mat3 S = 0.5 * (R + R.transpose());
        const Mat3 aa = (S - c * Mat3::Identity()) / (1.0 - c);
        int k = 0;
        aa.diagonal().maxCoeff(&k);
        Vec3 a = aa.col(k) / std::sqrt(std::max(aa(k, k), 0.0));
        if (a.dot(w) < 0.0) a = -a;
        return theta * a.normalized();
    }
    return (theta / (2.0 * s)) * w;
}

Twist se3_log(const Transform& T) {
    const Vec3 w = so3_log(T.R);
    const double theta = w.norm();
    const Mat3 W = skew(w);
    double coef;
    if (theta < 1e-6) {
        coef = 1.0 / 12.0 + theta * theta / 720.0;
    } else {
        coef = (1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) / (theta * theta);
    }
    const Mat3 Vinv = Mat3::Identity() - 0.5 * W + coef * W * W;
    Twist out;
    out.head<3>() = w;
    out.tail<3>() = Vinv * T.t;
    return out;
}

double pose_distance(const Transform& a, const Transform& b) {
    return se3_log(a.inverse() * b).norm();
}

Eigen::Vector4d to_quaternion_wxyz(const Mat3& R) {
    Eigen::Quaterniond q(R);
    q.normalize();
    if (q.w() < 0) q.coeffs() = -q.coeffs();
    return {q.w(), q.x(), q.y(), q.z()};
}

Mat3 from_quaternion_wxyz(const Eigen::Vector4d& v) {
    Eigen::Quaterniond q(v[0], v[1], v[2], v[3]);
    if (q.norm() < 1e-12) throw GeometryError("quaternion has zero norm");
    return q.normalized().toRotationMatrix();
}

}  // namespace mkin
