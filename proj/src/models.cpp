#include "mkin/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mkin {

namespace {

const Vec3 Y = Vec3::UnitY();
const Vec3 Z = Vec3::UnitZ();
const Vec3 X = Vec3::UnitX();

PoseSpec at(const Vec3& t) {
    PoseSpec p;
    p.translation = t;
    return p;
}

}  // namespace

ModelBuilder::ModelBuilder(std::string name, double scale) : name_(std::move(name)), s_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ModelError("model scale must be positive");
}

const Vec3& ModelBuilder::origin_of(const std::string& link) const {
    for (const auto& [n, o] : links_)
        if (n == link) return o;
    throw ModelError("model '" + name_ + "': unknown link '" + link + "'");
}

ModelBuilder& ModelBuilder::link(const std::string& name, const Vec3& origin) {
    links_.emplace_back(name, origin * s_);
    return *this;
}

ModelBuilder& ModelBuilder::revolute(const std::string& name, const std::string& parent, const std::string& child,
                                     const Vec3& axis) {
    JointSpec j;
    j.name = name;
    j.parent = parent;
    j.child = child;
    j.type = "revolute";
    j.origin = at(origin_of(child) - origin_of(parent));
    j.axis = axis;
    joints_.push_back(j);
    return *this;
}

ModelBuilder& ModelBuilder::prismatic(const std::string& name, const std::string& parent, const std::string& child,
                                      const Vec3& axis) {
    revolute(name, parent, child, axis);
    joints_.back().type = "prismatic";
    return *this;
}

ModelBuilder& ModelBuilder::closure(const std::string& name, const std::string& d, const std::string& a,
                                    const Vec3& pin) {
    const Vec3 p = pin * s_;
    for (auto [from, to, suffix] : {std::tuple{d, a, "_da"}, std::tuple{a, d, "_ad"}}) {
        JointSpec j;
        j.name = name + suffix;
        j.parent = from;
        j.child = to;
        j.type = "fixed";
        j.origin = at(p - origin_of(from));
        joints_.push_back(j);
    }
    return *this;
}

ModelBuilder& ModelBuilder::bearing(const std::string& name, const std::string& parent, const std::string& child,
                                    const Vec3& axis) {
    JointSpec j;
    j.name = name;
    j.parent = child;
    j.child = parent;
    j.type = "revolute";
    j.origin = at(origin_of(parent) - origin_of(child));
    j.axis = -axis;
    joints_.push_back(j);
    return *this;
}

ModelBuilder& ModelBuilder::actuator(const std::string& name, const Mount& tube, const Mount& rod,
                                     const Vec3& mount_axis, double retract, double extend,
                                     const std::vector<std::string>& redundant) {
    PendingActuator a;
    a.name = name;
    a.tube = {tube.parent, tube.point * s_};
    a.rod = {rod.parent, rod.point * s_};
    a.axis = mount_axis;
    const double l0 = (a.tube.point - a.rod.point).norm();
    a.lower = l0 - retract * s_;
    a.upper = l0 + extend * s_;
    if (!(a.lower > 0.0) || !(a.lower < a.upper))
        throw ModelError("model '" + name_ + "': actuator '" + name + "' gets invalid bounds");
    a.redundant = redundant;
    actuators_.push_back(a);
    return *this;
}

ModelBuilder& ModelBuilder::actuator_group(const std::vector<std::string>& names, const std::vector<Vec3>& offsets,
                                           const Mount& tube, const Mount& rod, const Vec3& mount_axis,
                                           double retract, double extend) {
    for (std::size_t k = 0; k < names.size(); ++k) {
        std::vector<std::string> others;
        for (std::size_t m = 0; m < names.size(); ++m)
            if (m != k) others.push_back(names[m]);
        actuator(names[k], {tube.parent, tube.point + offsets[k]}, {rod.parent, rod.point + offsets[k]}, mount_axis,
                 retract, extend, others);
    }
    return *this;
}

RobotDescription ModelBuilder::build() const {
    RobotDescription d;
    d.name = name_;

    // points carried by each structural link, in its own frame, for the visual box
    std::map<std::string, std::vector<Vec3>> pts;
    for (const auto& [n, o] : links_) pts[n].push_back(Vec3::Zero());
    for (const auto& j : joints_) pts[j.parent].push_back(j.origin.translation);
    for (const auto& a : actuators_) {
        pts[a.tube.parent].push_back(a.tube.point - origin_of(a.tube.parent));
        pts[a.rod.parent].push_back(a.rod.point - origin_of(a.rod.parent));
    }

    const double thick = 0.1 * s_;
    bool first = true;
    for (const auto& [n, o] : links_) {
        LinkSpec l;
        l.name = n;
        if (first) l.transformation = at(o);
        first = false;
        Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
        for (const Vec3& p : pts[n]) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        l.visual.offset = at(0.5 * (lo + hi));
        const Vec3 ext = (hi - lo).cwiseMax(Vec3::Constant(thick));
        l.visual.geometry.type = "box";
        l.visual.geometry.dims = {ext.x(), ext.y(), ext.z()};
        d.links.push_back(l);
    }
    d.joints = joints_;

    for (const auto& a : actuators_) {
        const double l0 = (a.tube.point - a.rod.point).norm();
        for (auto [suffix, m, radius, frac] :
             {std::tuple{"_tube", &a.tube, 0.05, 0.45}, std::tuple{"_rod", &a.rod, 0.03, 0.55}}) {
            LinkSpec l;
            l.name = a.name + suffix;
            l.visual.offset.translation = Vec3(0.5 * frac * l0, 0.0, 0.0);
            l.visual.offset.rpy = Vec3(0.0, M_PI / 2, 0.0);
            l.visual.geometry.type = "cylinder";
            l.visual.geometry.dims = {radius * s_, frac * l0};
            d.links.push_back(l);
            JointSpec j;
            j.name = a.name + suffix + "_mount";
            j.parent = m->parent;
            j.child = l.name;
            j.type = "revolute";
            j.origin = at(m->point - origin_of(m->parent));
            j.axis = a.axis;
            d.joints.push_back(j);
        }
        ActuatorSpec as;
        as.name = a.name;
        as.tube = {a.name + "_tube", a.tube.parent};
        as.rod = {a.name + "_rod", a.rod.parent};
        as.lower = a.lower;
        as.upper = a.upper;
        as.redundant = a.redundant;
        d.actuators.push_back(as);
    }

    // reject zero-area four-bars: closure from d back to a over three tree joints
    std::map<std::string, const JointSpec*> inbound;
    for (const auto& j : joints_)
        if (j.type != "fixed" && !inbound.count(j.child)) inbound[j.child] = &j;
    for (const auto& j : joints_) {
        if (j.type != "fixed" || j.name.size() < 3 || j.name.substr(j.name.size() - 3) != "_da") continue;
        std::vector<Vec3> quad{origin_of(j.parent) + j.origin.translation};
        std::string cur = j.parent;
        for (int k = 0; k < 3 && inbound.count(cur); ++k) {
            quad.push_back(origin_of(cur));
            cur = inbound[cur]->parent;
        }
        if (cur != j.child || quad.size() != 4) continue;
        Vec3 area = Vec3::Zero();
        for (int k = 0; k < 4; ++k) area += quad[k].cross(quad[(k + 1) % 4]);
        if (0.5 * area.norm() < 1e-6 * s_ * s_)
            throw ModelError("model '" + name_ + "': four-bar closed by '" + j.name + "' is degenerate");
    }
    return d;
}

namespace {

using M = ModelBuilder::Mount;

// Lemniscate support: rear and front links carry the shield, the canopy hinges on the shield.
void two_leg_core(ModelBuilder& b) {
    b.link("base", {0, 0, 0})
        .link("rear_link", {-1.2, 0, 0.3})
        .link("shield", {-1.5, 0, 0.9})
        .link("front_link", {-0.7, 0, 1.0})
        .link("canopy", {-1.0, 0, 1.9});
    b.revolute("base_rear", "base", "rear_link", Y)
        .revolute("rear_shield", "rear_link", "shield", Y)
        .revolute("shield_front", "shield", "front_link", Y)
        .closure("front_base", "front_link", "base", {-0.4, 0, 0.3})
        .revolute("shield_canopy", "shield", "canopy", Y);
}

RobotDescription tcchs(double s) {
    ModelBuilder b("TCCHS", s);
    two_leg_core(b);
    b.link("tail_beam", {-1.6, 0, 1.0})
        .link("tail_plate", {-2.2, 0, 1.0})
        .link("front_beam", {1.6, 0, 1.9})
        .link("guard_arm", {2.4, 0, 1.8})
        .link("guard_coupler", {2.6, 0, 1.3})
        .link("guard_plate", {2.9, 0, 1.35});
    b.revolute("shield_tail", "shield", "tail_beam", Y)
        .prismatic("tail_slide", "tail_beam", "tail_plate", -X)
        .revolute("canopy_beam", "canopy", "front_beam", Y)
        .revolute("beam_arm", "front_beam", "guard_arm", Y)
        .revolute("arm_coupler", "guard_arm", "guard_coupler", Y)
        .revolute("coupler_plate", "guard_coupler", "guard_plate", Y)
        .closure("plate_beam", "guard_plate", "front_beam", {2.8, 0, 1.85});
    const std::vector<Vec3> pair{{0, 0.5, 0}, {0, -0.5, 0}};
    b.actuator_group({"front_leg_l", "front_leg_r"}, pair, {"base", {0.6, 0, 0.3}}, {"canopy", {0.8, 0, 1.9}}, Y,
                     0.12, 0.12)
        .actuator_group({"rear_leg_l", "rear_leg_r"}, pair, {"base", {-1.1, 0, 0.3}}, {"canopy", {-0.6, 0, 1.9}}, Y,
                        0.12, 0.12)
        .actuator_group({"tail_jack_l", "tail_jack_r"}, {{0, 0.4, 0}, {0, -0.4, 0}}, {"shield", {-1.1, 0, 0.6}},
                        {"tail_beam", {-2.1, 0, 0.8}}, Y, 0.1, 0.1)
        .actuator_group({"beam_jack_l", "beam_jack_r"}, {{0, 0.4, 0}, {0, -0.4, 0}}, {"canopy", {1.0, 0, 1.5}},
                        {"front_beam", {2.0, 0, 1.75}}, Y, 0.06, 0.06)
        .actuator_group({"tail_ram_l", "tail_ram_r"}, {{0, 0.3, 0}, {0, -0.3, 0}}, {"tail_beam", {-1.7, 0, 0.95}},
                        {"tail_plate", {-2.5, 0, 0.95}}, Y, 0.2, 0.3)
        .actuator("guard_jack", {"front_beam", {2.1, 0, 1.7}}, {"guard_coupler", {2.75, 0, 1.32}}, Y, 0.05, 0.05);
    return b.build();
}

RobotDescription sths(double s) {
    ModelBuilder b("STHS", s);
    b.link("base", {0, 0, 0})
        .link("rear_link", {-1.0, 0, 0.3})
        .link("shield", {-1.1, 0, 1.2})
        .link("front_link", {-0.5, 0, 1.1})
        .link("canopy", {-0.8, 0, 1.9})
        .link("front_beam", {1.4, 0, 1.9})
        .link("side_guard", {0.3, 0, 1.75})
        .link("front_flap", {2.0, 0, 1.9});
    b.revolute("base_rear", "base", "rear_link", Y)
        .revolute("rear_shield", "rear_link", "shield", Y)
        .revolute("shield_front", "shield", "front_link", Y)
        .closure("front_base", "front_link", "base", {-0.2, 0, 0.3})
        .revolute("shield_canopy", "shield", "canopy", Y)
        .revolute("canopy_beam", "canopy", "front_beam", Y)
        .prismatic("guard_slide", "canopy", "side_guard", Y)
        .revolute("beam_flap", "front_beam", "front_flap", Y);
    const M leg_t{"base", {0.3, 0, 0.3}}, leg_r{"canopy", {0.5, 0, 1.9}};
    b.actuator("leg_l", {"base", leg_t.point + Vec3(0, 0.5, 0)}, {"canopy", leg_r.point + Vec3(0, 0.5, 0)}, Y, 0.12,
               0.12, {"leg_r", "leg_c"})
        .actuator("leg_r", {"base", leg_t.point + Vec3(0, -0.5, 0)}, {"canopy", leg_r.point + Vec3(0, -0.5, 0)}, Y,
                  0.12, 0.12, {"leg_l", "leg_c"})
        .actuator("balance_jack", {"shield", {-0.6, 0.25, 1.3}}, {"canopy", {-0.2, 0.25, 1.75}}, Y, 0.06, 0.06)
        .actuator("leg_c", leg_t, leg_r, Y, 0.12, 0.12, {"leg_l", "leg_r"});
    return b.build();
}

RobotDescription sshs(double s) {
    ModelBuilder b("SSHS", s);
    two_leg_core(b);
    b.link("extension", {1.2, 0, 1.95})
        .link("flap", {1.8, 0, 1.95})
        .link("face_guard", {1.8, 0, 1.6});
    b.prismatic("canopy_slide", "canopy", "extension", X)
        .revolute("extension_flap", "extension", "flap", Y)
        .revolute("flap_guard", "flap", "face_guard", Y);
    const std::vector<Vec3> pair{{0, 0.5, 0}, {0, -0.5, 0}};
    b.actuator_group({"front_leg_l", "front_leg_r"}, pair, {"base", {0.6, 0, 0.3}}, {"canopy", {0.8, 0, 1.9}}, Y,
                     0.12, 0.12)
        .actuator_group({"rear_leg_l", "rear_leg_r"}, pair, {"base", {-1.1, 0, 0.3}}, {"canopy", {-0.6, 0, 1.9}}, Y,
                        0.12, 0.12)
        .actuator_group({"slide_ram_l", "slide_ram_r"}, {{0, 0.3, 0}, {0, -0.3, 0}}, {"canopy", {0.6, 0, 2.0}},
                        {"extension", {1.4, 0, 2.0}}, Y, 0.2, 0.3)
        .actuator("flap_jack", {"extension", {1.3, 0, 1.85}}, {"flap", {2.1, 0, 1.7}}, Y, 0.06, 0.06);
    return b.build();
}

RobotDescription rh(double s) {
    ModelBuilder b("RH", s);
    b.link("chassis", {0, 0, 0})
        .link("shovel", {1.8, 0, 0.3})
        .link("stabilizer", {-1.0, 0, 0.4})
        .link("cutter_head", {0.8, 0, 1.2})
        .link("gathering_arm", {2.3, 0, 0.25})
        .link("stabilizer_foot", {-1.6, 0, 0.2})
        .link("conveyor", {-1.2, 0, 0.8});
    b.revolute("chassis_shovel", "chassis", "shovel", Y)
        .revolute("chassis_stabilizer", "chassis", "stabilizer", Y)
        .revolute("slewing", "chassis", "cutter_head", Z)
        .bearing("slewing_ring", "chassis", "cutter_head", Z)
        .revolute("shovel_arm", "shovel", "gathering_arm", Y)
        .prismatic("foot_slide", "stabilizer", "stabilizer_foot", -Z)
        .revolute("stabilizer_conveyor", "stabilizer", "conveyor", Y);
    b.actuator_group({"slew_upper", "slew_lower"}, {{0, 0, 0.1}, {0, 0, -0.1}}, {"chassis", {0.2, 0.6, 1.2}},
                     {"cutter_head", {1.1, 0.4, 1.2}}, Z, 0.12, 0.12)
        .actuator_group({"shovel_jack_l", "shovel_jack_r"}, {{0, 0.6, 0}, {0, -0.6, 0}}, {"chassis", {1.0, 0, 0.8}},
                        {"shovel", {2.0, 0, 0.55}}, Y, 0.08, 0.08)
        .actuator_group({"stabilizer_jack_l", "stabilizer_jack_r"}, {{0, 0.6, 0}, {0, -0.6, 0}},
                        {"chassis", {-0.3, 0, 0.8}}, {"stabilizer", {-1.4, 0, 0.6}}, Y, 0.08, 0.08)
        .actuator_group({"arm_jack_l", "arm_jack_r"}, {{0, 0.4, 0}, {0, -0.4, 0}}, {"shovel", {2.0, 0, 0.45}},
                        {"gathering_arm", {2.6, 0, 0.4}}, Y, 0.04, 0.04)
        .actuator("foot_ram", {"stabilizer", {-1.6, 0, 0.7}}, {"stabilizer_foot", {-1.6, 0, 0.1}}, Y, 0.15, 0.25);
    return b.build();
}

RobotDescription lhd(double s) {
    ModelBuilder b("LHD", s);
    b.link("front_frame", {0, 0, 0})
        .link("lift_arm", {0, 0, 0.5})
        .link("coupler", {0.6, 0, 1.2})
        .link("bucket", {1.3, 0, 1.0})
        .link("ejector", {1.0, 0, 1.5});
    b.revolute("frame_arm", "front_frame", "lift_arm", Y)
        .revolute("arm_coupler", "lift_arm", "coupler", Y)
        .revolute("coupler_bucket", "coupler", "bucket", Y)
        .closure("bucket_frame", "bucket", "front_frame", {1.0, 0, 0.3})
        .prismatic("ejector_slide", "coupler", "ejector", X);
    b.actuator("tilt_jack", {"front_frame", {-0.5, 0, 0.3}}, {"lift_arm", {0.2, 0, 0.95}}, Y, 0.06, 0.06)
        .actuator("ejector_ram", {"coupler", {0.4, 0, 1.5}}, {"ejector", {1.0, 0, 1.5}}, Y, 0.15, 0.25);
    return b.build();
}

RobotDescription vd(double s) {
    ModelBuilder b("VD", s);
    b.link("door_frame", {0, 0, 0})
        .link("leaf_a", {0, 0, 0})
        .link("connector", {0.8, 0, 0.6})
        .link("leaf_b", {1.6, 0, 0.5});
    b.revolute("frame_leaf_a", "door_frame", "leaf_a", Y)
        .revolute("leaf_a_connector", "leaf_a", "connector", Y)
        .revolute("connector_leaf_b", "connector", "leaf_b", Y)
        .closure("leaf_b_frame", "leaf_b", "door_frame", {1.4, 0, -0.2});
    b.actuator("door_jack", {"door_frame", {-0.6, 0, 0.5}}, {"leaf_a", {0.4, 0, 0.3}}, Y, 0.08, 0.08);
    return b.build();
}

RobotDescription dj(double s) {
    ModelBuilder b("DJ", s);
    b.link("carrier", {0, 0, 0})
        .link("boom", {0.5, 0, 1.0})
        .link("stabilizer", {-1.0, 0, 0.2})
        .link("drill_holder", {2.5, 0, 1.2})
        .link("stabilizer_pad", {-1.0, 0, 0.0})
        .link("rock_drill", {2.5, 0, 0.6});
    b.revolute("carrier_boom", "carrier", "boom", Y)
        .prismatic("stabilizer_slide", "carrier", "stabilizer", -Z)
        .revolute("boom_holder", "boom", "drill_holder", Y)
        .revolute("stabilizer_pad_pivot", "stabilizer", "stabilizer_pad", Y)
        .revolute("holder_drill", "drill_holder", "rock_drill", Y)
        .closure("drill_carrier", "rock_drill", "carrier", {0.5, 0, 0.4});
    b.actuator("boom_jack", {"carrier", {0.0, 0, 0.3}}, {"boom", {1.3, 0, 1.0}}, Y, 0.1, 0.1)
        .actuator("stabilizer_ram", {"carrier", {-1.0, 0, 0.8}}, {"stabilizer", {-1.0, 0, 0.2}}, Y, 0.15, 0.25)
        .actuator("pad_jack", {"stabilizer", {-0.6, 0, 0.4}}, {"stabilizer_pad", {-1.4, 0, -0.05}}, Y, 0.05, 0.05);
    return b.build();
}

RobotDescription sh(double s) {
    ModelBuilder b("SH", s);
    b.link("body", {0, 0, 0})
        .link("left_arm", {1.5, 0, 0.8})
        .link("right_arm", {-1.5, 0, 0.8})
        .link("left_cowl", {2.5, 0, 0.8});
    b.revolute("body_left", "body", "left_arm", Y)
        .revolute("body_right", "body", "right_arm", Y)
        .bearing("right_bearing", "body", "right_arm", Y)
        .revolute("left_cowl_pivot", "left_arm", "left_cowl", Y);
    const std::vector<Vec3> triple{{0, 0.4, 0}, {0, 0, 0}, {0, -0.4, 0}};
    b.actuator_group({"left_lift_a", "left_lift_b", "left_lift_c"}, triple, {"body", {0.6, 0, 0.3}},
                     {"left_arm", {1.9, 0, 0.55}}, Y, 0.1, 0.1)
        .actuator_group({"right_lift_a", "right_lift_b", "right_lift_c"}, triple, {"body", {-0.6, 0, 0.3}},
                        {"right_arm", {-1.9, 0, 0.55}}, Y, 0.1, 0.1)
        .actuator_group({"cowl_jack_l", "cowl_jack_r"}, {{0, 0.3, 0}, {0, -0.3, 0}}, {"left_arm", {2.0, 0, 1.0}},
                        {"left_cowl", {2.8, 0, 1.1}}, Y, 0.05, 0.05);
    return b.build();
}

// Unit fixtures

RobotDescription fixture_a(double s) {
    ModelBuilder b("fixture_A", s);
    b.link("base", {0, 0, 0}).link("slider", {1, 0, 0});
    b.prismatic("slide", "base", "slider", X);
    b.actuator("ram", {"base", {0, 0, 0}}, {"slider", {1, 0, 0}}, Y, 0.5, 1.0);
    return b.build();
}

RobotDescription fixture_b(double s) {
    ModelBuilder b("fixture_B", s);
    b.link("base", {0, 0, 0}).link("arm", {0, 0, 0});
    b.revolute("pivot", "base", "arm", Y);
    const double l0 = std::sqrt(2.0);
    b.actuator("jack", {"base", {1, 0, 0}}, {"arm", {0, 0, 1}}, Y, l0 - 0.3, 1.9 - l0);
    return b.build();
}

void parallelogram(ModelBuilder& b) {
    b.link("base", {0, 0, 0}).link("crank", {0, 0, 0}).link("coupler", {0, 0, 1}).link("rocker", {1, 0, 1});
    b.revolute("base_crank", "base", "crank", Y)
        .revolute("crank_coupler", "crank", "coupler", Y)
        .revolute("coupler_rocker", "coupler", "rocker", Y)
        .closure("rocker_base", "rocker", "base", {1, 0, 0});
}

RobotDescription fixture_c(double s) {
    ModelBuilder b("fixture_C", s);
    parallelogram(b);
    b.actuator("crank_jack", {"base", {-1, 0, 0}}, {"crank", {0, 0, 0.5}}, Y, 0.25, 0.25);
    return b.build();
}

RobotDescription fixture_parallelogram(double s) {
    ModelBuilder b("fixture_fourbar_parallelogram", s);
    parallelogram(b);
    return b.build();
}

void shield_core(ModelBuilder& b) {
    b.link("base", {0, 0, 0})
        .link("rear_link", {-1.0, 0, 0.3})
        .link("shield", {-1.1, 0, 1.2})
        .link("front_link", {-0.5, 0, 1.1})
        .link("canopy", {-0.8, 0, 1.9});
    b.revolute("base_rear", "base", "rear_link", Y)
        .revolute("rear_shield", "rear_link", "shield", Y)
        .revolute("shield_front", "shield", "front_link", Y)
        .closure("front_base", "front_link", "base", {-0.2, 0, 0.3})
        .revolute("shield_canopy", "shield", "canopy", Y);
}

RobotDescription fixture_d(double s) {
    ModelBuilder b("fixture_D", s);
    shield_core(b);
    b.actuator("leg", {"base", {0.3, 0, 0.3}}, {"canopy", {0.5, 0, 1.9}}, Y, 0.12, 0.12)
        .actuator("balance_jack", {"shield", {-0.6, 0, 1.3}}, {"canopy", {-0.2, 0, 1.75}}, Y, 0.06, 0.06);
    return b.build();
}

RobotDescription fixture_indirect(double s) {
    ModelBuilder b("fixture_indirect_lock", s);
    two_leg_core(b);
    b.actuator("front_leg", {"base", {0.6, 0, 0.3}}, {"canopy", {0.8, 0, 1.9}}, Y, 0.12, 0.12)
        .actuator("rear_leg", {"base", {-1.1, 0, 0.3}}, {"canopy", {-0.6, 0, 1.9}}, Y, 0.12, 0.12);
    return b.build();
}

using Generator = RobotDescription (*)(double);

const std::map<std::string, Generator>& robots() {
    static const std::map<std::string, Generator> m{{"TCCHS", tcchs}, {"STHS", sths}, {"SSHS", sshs},
                                                     {"RH", rh},       {"LHD", lhd},   {"VD", vd},
                                                     {"DJ", dj},       {"SH", sh}};
    return m;
}

const std::map<std::string, Generator>& fixtures() {
    static const std::map<std::string, Generator> m{{"A", fixture_a},
                                                     {"B", fixture_b},
                                                     {"C", fixture_c},
                                                     {"D", fixture_d},
                                                     {"fourbar_parallelogram", fixture_parallelogram},
                                                     {"indirect_lock", fixture_indirect}};
    return m;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> v{"TCCHS", "STHS", "SSHS", "RH", "LHD", "VD", "DJ", "SH"};
    return v;
}

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> v{"A", "B", "C", "D", "fourbar_parallelogram", "indirect_lock"};
    return v;
}

RobotDescription builtin_robot(const std::string& name, const ModelParams& p) {
    auto it = robots().find(name);
    if (it == robots().end()) throw ModelError("unknown built-in robot '" + name + "'");
    return it->second(p.scale);
}

RobotDescription unit_fixture(const std::string& kind, const ModelParams& p) {
    auto it = fixtures().find(kind);
    if (it == fixtures().end()) throw ModelError("unknown unit fixture '" + kind + "'");
    return it->second(p.scale);
}

RobotDescription catalog_model(const std::string& name, const ModelParams& p) {
    if (robots().count(name)) return builtin_robot(name, p);
    return unit_fixture(name, p);
}

std::string default_end_effector(const std::string& name) {
    static const std::map<std::string, std::string> ee{
        {"TCCHS", "canopy"}, {"STHS", "canopy"},     {"SSHS", "canopy"},       {"RH", "cutter_head"},
        {"LHD", "bucket"},   {"VD", "leaf_a"},       {"DJ", "rock_drill"},     {"SH", "left_arm"},
        {"A", "slider"},     {"B", "arm"},           {"C", "coupler"},         {"D", "canopy"},
        {"fourbar_parallelogram", "coupler"},        {"indirect_lock", "canopy"}};
    auto it = ee.find(name);
    if (it == ee.end()) throw ModelError("no default end-effector for '" + name + "'");
    return it->second;
}

}  // namespace mkin
