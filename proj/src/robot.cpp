#include "mkin/robot.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mkin {

int Robot::joint_between(int p, int c) const {
    for (const auto& j : joints)
        if (j.parent == p && j.child == c) return j.id;
    return -1;
}

int Robot::link_id(std::string_view name) const {
    for (const auto& l : links) {
        if (l.name == name) return l.id;
        for (const auto& m : l.merged)
            if (m == name) return l.id;
    }
    return -1;
}

int Robot::actuator_id(std::string_view name) const {
    for (const auto& a : actuators)
        if (a.name == name) return a.id;
    return -1;
}

RobotCounts Robot::counts() const {
    RobotCounts c;
    c.actuators = n_actuators();
    for (const auto& l : links)
        if (l.actuator < 0) ++c.links;
    std::set<std::pair<int, int>> closure_pairs;
    for (const auto& j : joints) {
        if (j.closure && j.type == JointType::Fixed) {
            closure_pairs.insert({std::min(j.parent, j.child), std::max(j.parent, j.child)});
        } else {
            ++c.joints;
        }
    }
    c.joints += static_cast<int>(closure_pairs.size());
    return c;
}

std::vector<std::vector<int>> Robot::redundancy_classes() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(actuators.size(), false);
    for (int i = 0; i < n_actuators(); ++i) {
        if (seen[i]) continue;
        std::vector<int> cls;
        for (int j = 0; j < n_actuators(); ++j)
            if (j == i || Rd(i, j) != 0) {
                cls.push_back(j);
                seen[j] = true;
            }
        out.push_back(cls);
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        p[b] = a;
        return true;
    }
};

JointType parse_type(const std::string& s) {
    if (s == "revolute") return JointType::Revolute;
    if (s == "prismatic") return JointType::Prismatic;
    return JointType::Fixed;
}

struct RawJoint {
    int decl = -1;
    int parent = -1, child = -1;  // group ids (declaration index of group root)
    JointType type;
    Vec3 axis;
    Transform origin;
    bool closure = false;
};

}  // namespace

Robot compile(const RobotDescription& desc) {
    const int nl = static_cast<int>(desc.links.size());
    if (nl == 0) throw ModelError("robot has no links");
    std::unordered_map<std::string, int> lidx;
    for (int i = 0; i < nl; ++i) lidx[desc.links[i].name] = i;
    auto L = [&](const std::string& n) {
        auto it = lidx.find(n);
        if (it == lidx.end()) throw ModelError("unresolved link reference '" + n + "'");
        return it->second;
    };

    const int nj = static_cast<int>(desc.joints.size());
    std::vector<JointType> types(nj);
    std::vector<bool> closure(nj, false);
    for (int k = 0; k < nj; ++k) types[k] = parse_type(desc.joints[k].type);

    // Opposite joints between the same pair: both fixed -> closure pair, otherwise the later one is auxiliary.
    std::map<std::pair<int, int>, int> by_pair;
    for (int k = 0; k < nj; ++k) {
        const auto key = std::pair{L(desc.joints[k].parent), L(desc.joints[k].child)};
        if (by_pair.count(key)) throw ModelError("duplicate joint from '" + desc.joints[k].parent + "' to '" + desc.joints[k].child + "'");
        by_pair[key] = k;
    }
    for (int k = 0; k < nj; ++k) {
        auto it = by_pair.find({L(desc.joints[k].child), L(desc.joints[k].parent)});
        if (it == by_pair.end()) continue;
        const int o = it->second;
        if (types[k] == JointType::Fixed && types[o] == JointType::Fixed) {
            closure[k] = closure[o] = true;
        } else if (types[k] == JointType::Fixed || types[o] == JointType::Fixed) {
            throw ModelError("joints '" + desc.joints[k].name + "' and '" + desc.joints[o].name +
                             "' close a loop with mixed fixed/moving types");
        } else if (k > o) {
            closure[k] = true;
        }
    }

    // merge fixed chains
    UnionFind uf(nl);
    std::vector<int> fixed_parent(nl, -1);
    for (int k = 0; k < nj; ++k) {
        if (types[k] != JointType::Fixed || closure[k]) continue;
        const int p = L(desc.joints[k].parent), c = L(desc.joints[k].child);
        if (fixed_parent[c] >= 0 || !uf.unite(p, c))
            throw ModelError("fixed joint '" + desc.joints[k].name + "' closes a cycle that is not a rigid aggregate");
        fixed_parent[c] = k;
    }
    // group root = member without a fixed parent; offsets of members in the root frame
    std::vector<int> group_root(nl, -1);
    std::vector<Transform> offset(nl);
    for (int i = 0; i < nl; ++i) {
        int r = i;
        std::vector<int> chain;
        while (fixed_parent[r] >= 0) {
            chain.push_back(r);
            r = L(desc.joints[fixed_parent[r]].parent);
        }
        group_root[i] = r;
        Transform off;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const auto& fj = desc.joints[fixed_parent[*it]];
            off = off * fj.origin.to_transform() * desc.links[*it].transformation.to_transform();
        }
        offset[i] = off;
    }

    std::vector<RawJoint> raw;
    for (int k = 0; k < nj; ++k) {
        if (types[k] == JointType::Fixed && !closure[k]) continue;
        const auto& js = desc.joints[k];
        const int p = L(js.parent), c = L(js.child);
        RawJoint r;
        r.decl = k;
        r.parent = group_root[p];
        r.child = group_root[c];
        r.type = types[k];
        r.closure = closure[k];
        if (r.parent == r.child)
            throw ModelError("joint '" + js.name + "' connects two links of the same rigid aggregate");
        if (!r.closure && group_root[c] != c)
            throw ModelError("link '" + js.child + "' has a fixed parent and is also the child of joint '" + js.name + "'");
        r.origin = offset[p] * js.origin.to_transform();
        r.axis = js.axis ? Vec3(offset[p].R * js.axis->normalized()) : Vec3::UnitZ();
        raw.push_back(r);
    }

    // tree structure over groups
    std::vector<int> inbound(nl, -1);
    std::vector<std::vector<int>> children(nl);
    for (int k = 0; k < static_cast<int>(raw.size()); ++k) {
        if (raw[k].closure) continue;
        const int c = raw[k].child;
        if (inbound[c] >= 0)
            throw ModelError("link '" + desc.links[c].name + "' has more than one parent joint");
        inbound[c] = k;
        children[raw[k].parent].push_back(k);
    }
    int base = -1;
    for (int i = 0; i < nl; ++i) {
        if (group_root[i] != i || inbound[i] >= 0) continue;
        if (base >= 0)
            throw ModelError("more than one base link ('" + desc.links[base].name + "', '" + desc.links[i].name + "')");
        base = i;
    }
    if (base < 0) throw ModelError("no base link: every link has a parent joint");

    std::vector<int> dist(nl, -1);
    std::deque<int> q{base};
    dist[base] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int k : children[u]) {
            const int v = raw[k].child;
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    for (int i = 0; i < nl; ++i)
        if (group_root[i] == i && dist[i] < 0)
            throw ModelError("link '" + desc.links[i].name + "' is not connected to the base");

    // actuator parts
    const int na = static_cast<int>(desc.actuators.size());
    std::vector<int> owner(nl, -1);
    for (int a = 0; a < na; ++a) {
        const auto& as = desc.actuators[a];
        for (const MountSpec* m : {&as.tube, &as.rod}) {
            const int g = group_root[L(m->link)];
            const std::string who = "actuator '" + as.name + "'";
            if (g != L(m->link)) throw ModelError(who + ": '" + m->link + "' is merged into another link");
            if (owner[g] >= 0) throw ModelError(who + ": link '" + m->link + "' already belongs to an actuator");
            if (inbound[g] < 0 || raw[inbound[g]].type != JointType::Revolute)
                throw ModelError(who + ": '" + m->link + "' must be mounted by a revolute joint");
            if (raw[inbound[g]].parent != group_root[L(m->parent)])
                throw ModelError(who + ": '" + m->link + "' is not mounted on '" + m->parent + "'");
            for (const auto& r : raw)
                if (r.parent == g) throw ModelError(who + ": '" + m->link + "' must be a leaf");
            owner[g] = a;
        }
    }

    // ids: structural links by distance then declaration; then tube/rod per actuator
    std::vector<int> order;
    for (int i = 0; i < nl; ++i)
        if (group_root[i] == i && owner[i] < 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return dist[x] < dist[y]; });
    for (int a = 0; a < na; ++a) {
        order.push_back(L(desc.actuators[a].tube.link));
        order.push_back(L(desc.actuators[a].rod.link));
    }
    std::vector<int> id_of(nl, -1);
    for (int k = 0; k < static_cast<int>(order.size()); ++k) id_of[order[k]] = k;

    Robot R;
    R.name = desc.name;
    const int n = static_cast<int>(order.size());
    R.links.resize(n);
    for (int k = 0; k < n; ++k) {
        const int g = order[k];
        Link& l = R.links[k];
        l.id = k;
        l.name = desc.links[g].name;
        l.T = desc.links[g].transformation.to_transform();
        l.actuator = owner[g];
        for (int i = 0; i < nl; ++i) {
            if (group_root[i] != g) continue;
            if (i != g) l.merged.push_back(desc.links[i].name);
            // member visual expressed in the root link frame
            l.visuals.push_back({offset[i] * desc.links[i].visual.offset.to_transform(), desc.links[i].visual.geometry});
        }
    }

    // joints: tree joints by child id, then closures by (parent, child)
    std::vector<int> jorder(raw.size());
    std::iota(jorder.begin(), jorder.end(), 0);
    std::stable_sort(jorder.begin(), jorder.end(), [&](int x, int y) {
        const auto kx = std::tuple(raw[x].closure, raw[x].closure ? id_of[raw[x].parent] : id_of[raw[x].child], id_of[raw[x].child]);
        const auto ky = std::tuple(raw[y].closure, raw[y].closure ? id_of[raw[y].parent] : id_of[raw[y].child], id_of[raw[y].child]);
        return kx < ky;
    });
    R.J = IntMatrix::Zero(n, n);
    for (int k = 0; k < static_cast<int>(jorder.size()); ++k) {
        const RawJoint& r = raw[jorder[k]];
        Joint j;
        j.id = k;
        j.name = desc.joints[r.decl].name;
        j.parent = id_of[r.parent];
        j.child = id_of[r.child];
        j.type = r.type;
        j.axis = r.axis;
        j.origin = r.origin;
        j.closure = r.closure;
        R.J(j.parent, j.child) = static_cast<int>(j.type);
        if (!j.closure) R.links[j.child].parent_joint = k;
        R.joints.push_back(j);
    }

    std::unordered_map<std::string, int> aidx;
    for (int a = 0; a < na; ++a) aidx[desc.actuators[a].name] = a;
    R.At = IntMatrix::Zero(na, n);
    R.Ar = IntMatrix::Zero(na, n);
    R.Rd = IntMatrix::Zero(na, na);
    for (int a = 0; a < na; ++a) {
        const auto& as = desc.actuators[a];
        Actuator act;
        act.id = a;
        act.name = as.name;
        act.tube = id_of[L(as.tube.link)];
        act.rod = id_of[L(as.rod.link)];
        act.tube_parent = id_of[group_root[L(as.tube.parent)]];
        act.rod_parent = id_of[group_root[L(as.rod.parent)]];
        act.tube_joint = R.links[act.tube].parent_joint;
        act.rod_joint = R.links[act.rod].parent_joint;
        act.lower = as.lower;
        act.upper = as.upper;
        if (act.tube_parent == act.rod_parent)
            throw ModelError("actuator '" + as.name + "' has tube and rod on the same link");
        R.At(a, act.tube) = 1;
        R.Ar(a, act.rod) = 1;
        R.Rd(a, a) = 1;
        for (const auto& r : as.redundant) {
            auto it = aidx.find(r);
            if (it == aidx.end()) throw ModelError("actuator '" + as.name + "': unresolved actuator reference '" + r + "'");
            R.Rd(a, it->second) = 1;
        }
        R.actuators.push_back(act);
    }
    return R;
}

ValidationReport validate(const Robot& R) {
    ValidationReport rep;
    auto add = [&](std::string code, std::string msg) { rep.findings.push_back({"ERROR", std::move(code), std::move(msg)}); };
    for (const auto& j : R.joints)
        if (j.type != JointType::Revolute && j.type != JointType::Prismatic && j.type != JointType::Fixed)
            add("joint-type", "joint '" + j.name + "' has a type other than revolute/prismatic/fixed");
    for (const auto& a : R.actuators) {
        std::ostringstream b;
        b << "[" << a.lower << ", " << a.upper << "]";
        if (!(a.lower < a.upper)) add("inverted-bounds", "actuator '" + a.name + "' has inverted bounds " + b.str());
        if (a.lower < 0.0) add("negative-bounds", "actuator '" + a.name + "' has a negative lower bound " + b.str());
    }
    const int na = R.n_actuators();
    for (int i = 0; i < na; ++i) {
        if (R.Rd(i, i) != 1) add("redundancy-diagonal", "actuator '" + R.actuators[i].name + "' is not redundant to itself");
        for (int j = i + 1; j < na; ++j)
            if (R.Rd(i, j) != R.Rd(j, i))
                add("redundancy-asymmetric", "redundancy not symmetric between '" + R.actuators[i].name + "' and '" +
                                                 R.actuators[j].name + "'");
    }
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int k = 0; k < na; ++k)
                if (i < k && R.Rd(i, j) && R.Rd(j, k) && !R.Rd(i, k) && R.Rd(i, j) == R.Rd(j, i) && R.Rd(j, k) == R.Rd(k, j))
                    add("redundancy-classes", "redundancy classes overlap: '" + R.actuators[i].name + "' and '" +
                                                  R.actuators[k].name + "' share '" + R.actuators[j].name + "'");
    return rep;
}

}  // namespace mkin
