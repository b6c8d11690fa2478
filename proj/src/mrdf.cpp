#include "mkin/mrdf.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace mkin {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) fail(where, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "number is not finite");
    return d;
}

Vec3 get_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where, "expected an array of 3 numbers");
    return {get_number(v[0], where), get_number(v[1], where), get_number(v[2], where)};
}

PoseSpec get_pose(const json& obj, const char* key, const std::string& where) {
    PoseSpec p;
    auto it = obj.find(key);
    if (it == obj.end()) return p;
    const std::string w = where + "." + key;
    if (!it->is_object()) fail(w, "expected an object");
    if (auto t = it->find("translation"); t != it->end()) p.translation = get_vec3(*t, w + ".translation");
    if (auto r = it->find("rpy"); r != it->end()) p.rpy = get_vec3(*r, w + ".rpy");
    return p;
}

std::size_t expected_dims(const std::string& type) {
    if (type == "box") return 3;
    if (type == "cylinder" || type == "capsule") return 2;
    if (type == "sphere") return 1;
    return 0;
}

VisualSpec get_visual(const json& link, const std::string& where) {
    VisualSpec v;
    auto it = link.find("visual");
    if (it == link.end()) return v;
    const std::string w = where + ".visual";
    if (!it->is_object()) fail(w, "expected an object");
    v.offset = get_pose(*it, "offset", w);
    auto g = it->find("geometry");
    if (g == it->end()) return v;
    const std::string gw = w + ".geometry";
    if (!g->is_object()) fail(gw, "expected an object");
    v.geometry.type = get_string(*g, "type", gw);
    if (v.geometry.type == "mesh") {
        v.geometry.path = get_string(*g, "path", gw);
        v.geometry.dims.clear();
        return v;
    }
    const std::size_t n = expected_dims(v.geometry.type);
    if (n == 0) fail(gw, "unknown geometry type '" + v.geometry.type + "'");
    const json& dims = require(*g, "dims", gw);
    if (!dims.is_array() || dims.size() != n)
        fail(gw, "'" + v.geometry.type + "' needs " + std::to_string(n) + " dims");
    v.geometry.dims.clear();
    for (const auto& d : dims) {
        const double x = get_number(d, gw + ".dims");
        if (!(x > 0.0)) fail(gw, "dims must be positive");
        v.geometry.dims.push_back(x);
    }
    return v;
}

ojson pose_json(const PoseSpec& p) {
    ojson o;
    o["translation"] = {p.translation.x(), p.translation.y(), p.translation.z()};
    o["rpy"] = {p.rpy.x(), p.rpy.y(), p.rpy.z()};
    return o;
}

template <class T>
void check_unique(const std::vector<T>& items, const char* kind) {
    std::unordered_set<std::string> seen;
    for (const auto& it : items)
        if (!seen.insert(it.name).second) throw ParseError(std::string("duplicate ") + kind + " name '" + it.name + "'");
}

}  // namespace

RobotDescription parse_mrdf(std::string_view text, const ParseOptions& opts) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON syntax error at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError("document: top level must be an object");
    static const std::set<std::string> allowed{"name", "links", "joints", "actuators"};
    for (const auto& [k, _] : doc.items())
        if (!allowed.count(k)) throw ParseError("document: unknown top-level key '" + k + "'");

    RobotDescription d;
    d.name = get_string(doc, "name", "document");

    const json& links = require(doc, "links", "document");
    if (!links.is_array()) throw ParseError("document: 'links' must be an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string w = "links[" + std::to_string(i) + "]";
        if (!links[i].is_object()) fail(w, "expected an object");
        LinkSpec l;
        l.name = get_string(links[i], "name", w);
        l.transformation = get_pose(links[i], "transformation", w);
        l.visual = get_visual(links[i], w);
        d.links.push_back(std::move(l));
    }

    if (auto js = doc.find("joints"); js != doc.end()) {
        if (!js->is_array()) throw ParseError("document: 'joints' must be an array");
        for (std::size_t i = 0; i < js->size(); ++i) {
            const json& jj = (*js)[i];
            const std::string w = "joints[" + std::to_string(i) + "]";
            if (!jj.is_object()) fail(w, "expected an object");
            JointSpec j;
            j.name = get_string(jj, "name", w);
            j.parent = get_string(jj, "parent", w);
            j.child = get_string(jj, "child", w);
            j.type = get_string(jj, "type", w);
            if (j.type != "revolute" && j.type != "prismatic" && j.type != "fixed")
                fail(w, "invalid joint type '" + j.type + "'");
            j.origin = get_pose(jj, "origin", w);
            if (auto a = jj.find("axis"); a != jj.end()) j.axis = get_vec3(*a, w + ".axis");
            if (j.type == "fixed" && j.axis) fail(w, "fixed joint '" + j.name + "' must not have an axis");
            if (j.type != "fixed" && !j.axis) fail(w, "joint '" + j.name + "' needs an axis");
            if (j.axis && j.axis->norm() < 1e-12) fail(w, "joint '" + j.name + "' has a zero axis");
            if (j.parent == j.child) fail(w, "joint '" + j.name + "' connects a link to itself");
            d.joints.push_back(std::move(j));
        }
    }

    if (auto as = doc.find("actuators"); as != doc.end()) {
        if (!as->is_array()) throw ParseError("document: 'actuators' must be an array");
        for (std::size_t i = 0; i < as->size(); ++i) {
            const json& aj = (*as)[i];
            const std::string w = "actuators[" + std::to_string(i) + "]";
            if (!aj.is_object()) fail(w, "expected an object");
            ActuatorSpec a;
            a.name = get_string(aj, "name", w);
            for (auto [key, mount] : {std::pair{"tube", &a.tube}, std::pair{"rod", &a.rod}}) {
                const json& m = require(aj, key, w);
                if (!m.is_object()) fail(w, std::string("'") + key + "' must be an object");
                mount->link = get_string(m, "link", w + "." + key);
                mount->parent = get_string(m, "parent", w + "." + key);
            }
            const json& b = require(aj, "bounds", w);
            if (!b.is_array() || b.size() != 2) fail(w, "'bounds' must be [lower, upper]");
            a.lower = get_number(b[0], w + ".bounds");
            a.upper = get_number(b[1], w + ".bounds");
            if (opts.check_bounds && !(a.lower < a.upper))
                fail(w, "actuator '" + a.name + "' has bounds with lower >= upper");
            if (auto r = aj.find("redundant"); r != aj.end()) {
                if (!r->is_array()) fail(w, "'redundant' must be an array");
                for (const auto& s : *r) {
                    if (!s.is_string()) fail(w, "'redundant' entries must be strings");
                    a.redundant.push_back(s.get<std::string>());
                }
            }
            d.actuators.push_back(std::move(a));
        }
    }

    check_unique(d.links, "link");
    check_unique(d.joints, "joint");
    check_unique(d.actuators, "actuator");

    std::unordered_set<std::string> link_names, act_names;
    for (const auto& l : d.links) link_names.insert(l.name);
    for (const auto& a : d.actuators) act_names.insert(a.name);
    auto resolve = [&](const std::string& name, const std::string& who) {
        if (!link_names.count(name)) throw ParseError(who + ": unresolved link reference '" + name + "'");
    };
    for (const auto& j : d.joints) {
        resolve(j.parent, "joint '" + j.name + "'");
        resolve(j.child, "joint '" + j.name + "'");
    }
    for (const auto& a : d.actuators) {
        const std::string who = "actuator '" + a.name + "'";
        resolve(a.tube.link, who);
        resolve(a.tube.parent, who);
        resolve(a.rod.link, who);
        resolve(a.rod.parent, who);
        for (const auto& r : a.redundant)
            if (!act_names.count(r)) throw ParseError(who + ": unresolved actuator reference '" + r + "'");
    }
    return d;
}

std::string serialize_mrdf(const RobotDescription& d) {
    ojson doc;
    doc["name"] = d.name;
    doc["links"] = ojson::array();
    for (const auto& l : d.links) {
        ojson o;
        o["name"] = l.name;
        o["transformation"] = pose_json(l.transformation);
        ojson geom;
        geom["type"] = l.visual.geometry.type;
        if (l.visual.geometry.type == "mesh")
            geom["path"] = l.visual.geometry.path;
        else
            geom["dims"] = l.visual.geometry.dims;
        o["visual"] = {{"offset", pose_json(l.visual.offset)}, {"geometry", geom}};
        doc["links"].push_back(o);
    }
    doc["joints"] = ojson::array();
    for (const auto& j : d.joints) {
        ojson o;
        o["name"] = j.name;
        o["parent"] = j.parent;
        o["child"] = j.child;
        o["type"] = j.type;
        o["origin"] = pose_json(j.origin);
        if (j.axis) o["axis"] = {j.axis->x(), j.axis->y(), j.axis->z()};
        doc["joints"].push_back(o);
    }
    doc["actuators"] = ojson::array();
    for (const auto& a : d.actuators) {
        ojson o;
        o["name"] = a.name;
        o["tube"] = {{"link", a.tube.link}, {"parent", a.tube.parent}};
        o["rod"] = {{"link", a.rod.link}, {"parent", a.rod.parent}};
        o["bounds"] = {a.lower, a.upper};
        o["redundant"] = a.redundant;
        doc["actuators"].push_back(o);
    }
    return doc.dump(2) + "\n";
}

RobotDescription load_mrdf_file(const std::string& path, const ParseOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mrdf(ss.str(), opts);
}

}  // namespace mkin
