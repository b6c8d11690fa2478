#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mkin/geometry.hpp"
#include "oracles.hpp"

using namespace mkin;

TEST_CASE("rodrigues basic cases") {
    CHECK((rodrigues(Vec3(0.3, 0.4, 0.5).normalized(), 0.0) - Mat3::Identity()).norm() < 1e-15);
    const Vec3 y = rodrigues(Vec3::UnitZ(), std::numbers::pi / 2) * Vec3::UnitX();
    CHECK((y - Vec3::UnitY()).norm() < 1e-15);
    CHECK_THROWS_AS(rodrigues(Vec3(1, 1, 0), 0.3), GeometryError);
}

TEST_CASE("rodrigues agrees with the quaternion oracle") {
    const Vec3 a = Vec3(1, 1, 1).normalized();
    CHECK((rodrigues(a, 0.7) - oracle::quat_rotation(a, 0.7)).cwiseAbs().maxCoeff() <= 1e-12);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 ax = oracle::random_unit(rng);
        const double th = std::uniform_real_distribution<>(-4, 4)(rng);
        CHECK((rodrigues(ax, th) - oracle::quat_rotation(ax, th)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("rodrigues inverse and orthonormality") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const Vec3 ax = oracle::random_unit(rng);
        const double th = std::uniform_real_distribution<>(-6, 6)(rng);
        const Mat3 R = rodrigues(ax, th);
        CHECK((R * rodrigues(ax, -th) - Mat3::Identity()).norm() < 1e-9);
        CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-9);
        CHECK(std::abs(R.determinant() - 1.0) < 1e-9);
    }
}

TEST_CASE("rpy convention is Rz*Ry*Rx") {
    const Vec3 rpy(0.1, -0.4, 2.0);
    const Mat3 expect = oracle::quat_rotation(Vec3::UnitZ(), 2.0) * oracle::quat_rotation(Vec3::UnitY(), -0.4) *
                        oracle::quat_rotation(Vec3::UnitX(), 0.1);
    CHECK((rpy_to_matrix(rpy) - expect).norm() < 1e-12);
    CHECK((matrix_to_rpy(expect) - rpy).norm() < 1e-12);
}

TEST_CASE("joint_transform") {
    const Transform origin(rpy_to_matrix(Vec3(0.2, 0.1, -0.3)), Vec3(0.5, -1, 2));
    SUBCASE("prismatic zero displacement") {
        const Transform T = joint_transform(JointType::Prismatic, Vec3::UnitX(), 0.0, origin);
        CHECK((T.matrix() - origin.matrix()).norm() == 0.0);
    }
    SUBCASE("fixed returns origin exactly") {
        const Transform T = joint_transform(JointType::Fixed, Vec3::Zero(), 12.0, origin);
        CHECK((T.matrix() - origin.matrix()).norm() == 0.0);
    }
    SUBCASE("revolute about z by pi at translate(1,0,0)") {
        const Transform T = joint_transform(JointType::Revolute, Vec3::UnitZ(), std::numbers::pi,
                                            Transform::translation(1, 0, 0));
        // rotate first, then translate: Trans(1,0,0) * Rot_z(pi)
        Mat4 rot = Mat4::Identity();
        rot.topLeftCorner<3, 3>() = oracle::quat_rotation(Vec3::UnitZ(), std::numbers::pi);
        Mat4 tr = Mat4::Identity();
        tr(0, 3) = 1.0;
        CHECK((T.matrix() - tr * rot).norm() < 1e-12);
    }
    SUBCASE("prismatic slides along the parent-frame axis") {
        const Vec3 a = Vec3(0, 1, 1).normalized();
        const Transform T = joint_transform(JointType::Prismatic, a, 0.7, origin);
        CHECK((T.t - (origin.t + 0.7 * a)).norm() < 1e-15);
        CHECK((T.R - origin.R).norm() == 0.0);
    }
    SUBCASE("generalized is rejected") {
        CHECK_THROWS_AS(joint_transform(JointType::Generalized, Vec3::UnitZ(), 0.1, origin), ContractError);
    }
}

TEST_CASE("chain_transform") {
    CHECK((chain_transform({}).matrix() - Mat4::Identity()).norm() == 0.0);
    std::mt19937_64 rng(5);
    std::vector<Transform> ts;
    for (int i = 0; i < 3; ++i) ts.push_back(oracle::random_transform(rng, 2.0));
    const std::vector<Transform> one{ts[0]};
    CHECK((chain_transform(one).matrix() - ts[0].matrix()).norm() == 0.0);
    const Mat4 dense = (ts[0].matrix() * ts[1].matrix()) * ts[2].matrix();
    CHECK((chain_transform(ts).matrix() - dense).norm() < 1e-12);

    std::vector<Transform> more;
    for (int i = 0; i < 4; ++i) more.push_back(oracle::random_transform(rng, 1.0));
    std::vector<Transform> all = ts;
    all.insert(all.end(), more.begin(), more.end());
    CHECK((chain_transform(all).matrix() - (chain_transform(ts) * chain_transform(more)).matrix()).norm() < 1e-12);
}

TEST_CASE("se3_log") {
    CHECK(se3_log(Transform()).norm() == 0.0);
    const Twist tw = se3_log(Transform::translation(0, 0, 1));
    Twist expect;
    expect << 0, 0, 0, 0, 0, 1;
    CHECK((tw - expect).norm() < 1e-15);

    std::mt19937_64 rng(7);
    const Transform T(oracle::quat_rotation(oracle::random_unit(rng), 0.9), Vec3(0.3, -2.0, 1.1));
    CHECK((oracle::se3_exp(se3_log(T)).matrix() - T.matrix()).norm() < 1e-8);
}

TEST_CASE("se3 exp(log) round trip incl. near pi") {
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        Transform T = oracle::random_transform(rng, 5.0);
        if (i % 4 == 0) {
            const double eps = std::pow(10.0, -std::uniform_real_distribution<>(0, 12)(rng));
            T.R = oracle::quat_rotation(oracle::random_unit(rng), std::numbers::pi - eps);
        }
        if (i % 50 == 0) T.R = oracle::quat_rotation(oracle::random_unit(rng), std::numbers::pi);
        worst = std::max(worst, (oracle::se3_exp(se3_log(T)).matrix() - T.matrix()).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("pose_distance") {
    std::mt19937_64 rng(17);
    const Transform T = oracle::random_transform(rng, 1.0);
    CHECK(pose_distance(T, T) < 1e-12);
    CHECK(pose_distance(Transform(), Transform::translation(3, 4, 0)) == doctest::Approx(5.0).epsilon(1e-15));
    const Transform rz = Transform::rotation(oracle::quat_rotation(Vec3::UnitZ(), 0.3));
    CHECK(pose_distance(Transform(), rz) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(oracle::log_norm(rz) == doctest::Approx(0.3).epsilon(1e-12));
    for (int i = 0; i < 200; ++i) {
        const Transform a = oracle::random_transform(rng, 1.0);
        const Transform b = oracle::random_transform(rng, 1.0);
        const Transform g = oracle::random_transform(rng, 3.0);
        CHECK(std::abs(pose_distance(a, b) - pose_distance(b, a)) < 1e-9);
        CHECK(std::abs(pose_distance(g * a, g * b) - pose_distance(a, b)) < 1e-9);
        CHECK(pose_distance(a, b) > 0.0);
    }
}
