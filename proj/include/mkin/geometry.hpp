#pragma once

#include <Eigen/Dense>
#include <span>

#include "mkin/error.hpp"

namespace mkin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
/// Angular part first (rad), then linear part (m).
using Twist = Eigen::Matrix<double, 6, 1>;

/// Joint type codes as stored in the joint matrix.
enum class JointType : int { None = 0, Revolute = 1, Prismatic = 2, Fixed = 3, Generalized = 4 };

/// Rigid transform kept as a rotation/translation pair; column vectors, left multiplication.
struct Transform {
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();

    Transform() = default;
    Transform(const Mat3& rot, const Vec3& trans) : R(rot), t(trans) {}

    static Transform identity() { return {}; }
    static Transform translation(double x, double y, double z) { return {Mat3::Identity(), Vec3(x, y, z)}; }
    static Transform translation(const Vec3& v) { return {Mat3::Identity(), v}; }
    static Transform rotation(const Mat3& rot) { return {rot, Vec3::Zero()}; }

    Transform operator*(const Transform& o) const { return {R * o.R, R * o.t + t}; }
    Vec3 operator*(const Vec3& p) const { return R * p + t; }
    Transform inverse() const { return {R.transpose(), -(R.transpose() * t)}; }
    Mat4 matrix() const;
};

Mat3 skew(const Vec3& v);

/// R = I + sin(theta)[a]x + (1 - cos(theta))[a]x^2. Throws GeometryError for non-unit axes.
Mat3 rodrigues(const Vec3& axis, double theta);

/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rpy_to_matrix(const Vec3& rpy);
Vec3 matrix_to_rpy(const Mat3& R);

/// Parent-to-child transform of a joint with parameter theta.
/// Revolute joints turn about the axis (parent frame) through the joint origin,
/// prismatic joints slide the origin along the axis, fixed joints return the origin.
Transform joint_transform(JointType type, const Vec3& axis, double theta, const Transform& origin);

/// Left-to-right product; identity for an empty list.
Transform chain_transform(std::span<const Transform> transforms);

Twist se3_log(const Transform& T);
Vec3 so3_log(const Mat3& R);

/// || log(Ta^-1 Tb) ||_2
double pose_distance(const Transform& a, const Transform& b);

/// Unit quaternion as [w, x, y, z].
Eigen::Vector4d to_quaternion_wxyz(const Mat3& R);
Mat3 from_quaternion_wxyz(const Eigen::Vector4d& q);

}  // namespace mkin
