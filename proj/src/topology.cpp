#include "mkin/topology.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mkin {

namespace {

constexpr int R_ = static_cast<int>(JointType::Revolute);
constexpr int P_ = static_cast<int>(JointType::Prismatic);
constexpr int F_ = static_cast<int>(JointType::Fixed);
constexpr int G_ = static_cast<int>(JointType::Generalized);

int depth(const Robot& R, int l) {
    int d = 0;
    while (R.links[l].parent_joint >= 0) {
        l = R.joints[R.links[l].parent_joint].parent;
        ++d;
    }
    return d;
}

std::vector<std::vector<int>> tarjan(const IntMatrix& J) {
    const int n = static_cast<int>(J.rows());
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> out;
    int counter = 0;
    std::function<void(int)> strong = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (int w = 0; w < n; ++w) {
            if (J(v, w) == 0) continue;
            if (index[w] < 0) {
                strong(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<int> comp;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(comp);
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) strong(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::string link_list(const Robot& R, const std::vector<int>& ls) {
    std::string s;
    for (int l : ls) s += (s.empty() ? "" : ", ") + R.links[l].name;
    return "[" + s + "]";
}

bool is_acyclic(const IntMatrix& J) {
    const int n = static_cast<int>(J.rows());
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (J(i, j)) ++indeg[j];
    std::deque<int> q;
    for (int i = 0; i < n; ++i)
        if (!indeg[i]) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        ++seen;
        for (int v = 0; v < n; ++v)
            if (J(u, v) && --indeg[v] == 0) q.push_back(v);
    }
    return seen == n;
}

}  // namespace

char itep_letter(ItepType t) { return "ABCD"[static_cast<int>(t)]; }

int ContractedGraph::four_bar_of(int from, int to) const {
    for (const auto& e : edges)
        if (e.from == from && e.to == to) return e.four_bar;
    return -1;
}

std::vector<FourBar> find_four_bars(const Robot& R) {
    std::vector<FourBar> out;
    for (const auto& comp : tarjan(R.J)) {
        if (comp.size() <= 2) continue;
        if (comp.size() != 4)
            throw TopologyError("unsupported loop of " + std::to_string(comp.size()) + " links " + link_list(R, comp) +
                                ": only planar four-bars are handled");
        FourBar f;
        f.a = *std::min_element(comp.begin(), comp.end(), [&](int x, int y) {
            return std::pair(depth(R, x), x) < std::pair(depth(R, y), y);
        });
        auto next = [&](int from) {
            for (int to : comp) {
                const int j = R.joint_between(from, to);
                if (j >= 0 && !R.joints[j].closure && R.joints[j].type == JointType::Revolute) return std::pair(to, j);
            }
            throw TopologyError("four-bar " + link_list(R, comp) + " is not a revolute chain from its ground '" +
                                R.links[f.a].name + "'");
        };
        std::tie(f.b, f.j_ab) = next(f.a);
        std::tie(f.c, f.j_bc) = next(f.b);
        std::tie(f.d, f.j_cd) = next(f.c);
        f.j_da = R.joint_between(f.d, f.a);
        f.j_ad = R.joint_between(f.a, f.d);
        if (f.j_da < 0 || f.j_ad < 0 || R.joints[f.j_da].type != JointType::Fixed ||
            R.joints[f.j_ad].type != JointType::Fixed)
            throw TopologyError("four-bar " + link_list(R, comp) + " lacks a fixed closure pair between '" +
                                R.links[f.d].name + "' and '" + R.links[f.a].name + "'");
        out.push_back(f);
    }
    return out;
}

ContractedGraph contract_four_bars(const Robot& R) {
    ContractedGraph g;
    g.J = R.J;
    g.four_bars = find_four_bars(R);
    // auxiliary closures outside four-bars (two-link loops) carry no extra mobility
    for (const auto& j : R.joints)
        if (j.closure && j.type != JointType::Fixed) g.J(j.parent, j.child) = 0;

    auto add_edge = [&](int from, int to, int fb) {
        g.J(from, to) = G_;
        for (const auto& e : g.edges)
            if (e.from == from && e.to == to) return;
        g.edges.push_back({from, to, fb});
    };
    for (int k = 0; k < static_cast<int>(g.four_bars.size()); ++k) {
        const FourBar& f = g.four_bars[k];
        g.J(f.a, f.b) = g.J(f.b, f.c) = g.J(f.c, f.d) = g.J(f.d, f.a) = g.J(f.a, f.d) = 0;
        for (int x : {f.b, f.c, f.d}) {
            if (g.J.row(x).cwiseAbs().sum() > 0) add_edge(f.a, x, k);
            for (const auto& a : R.actuators)
                if (a.tube_parent == x || a.rod_parent == x) add_edge(f.a, x, k);
        }
        for (const auto& a : R.actuators) {
            const bool tin = a.tube_parent != f.a && f.contains(a.tube_parent);
            const bool rin = a.rod_parent != f.a && f.contains(a.rod_parent);
            if (tin && rin) add_edge(a.tube_parent, a.rod_parent, k);
        }
    }
    if (!is_acyclic(g.J)) throw TopologyError("joint graph is still cyclic after four-bar contraction");
    return g;
}

std::vector<int> topo_path(const IntMatrix& J, int from, int to) {
    const int n = static_cast<int>(J.rows());
    if (from == to) return {from};
    std::vector<int> prev(n, -2);
    std::deque<int> q{from};
    prev[from] = -1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v = 0; v < n; ++v) {
            if (J(u, v) == 0 || prev[v] != -2) continue;
            prev[v] = u;
            if (v == to) {
                std::vector<int> path{to};
                for (int w = u; w != -1; w = prev[w]) path.push_back(w);
                std::reverse(path.begin(), path.end());
                return path;
            }
            q.push_back(v);
        }
    }
    return {};
}

std::vector<int> lock_actuator(IntMatrix& J, const Robot& R, int a) {
    const Actuator& act = R.actuators[a];
    const int t = act.tube, r = act.rod, pt = act.tube_parent, pr = act.rod_parent;
    std::vector<int> P = topo_path(J, pt, pr);
    if (!P.empty()) {
        if (P.size() == 2) {
            J(pt, pr) = F_;
        } else {
            J(r, t) = F_;
            J(t, pt) = R_;
            J(pt, t) = 0;
        }
        return P;
    }
    P = topo_path(J, pr, pt);
    if (P.empty())
        throw TopologyError("actuator '" + act.name + "': no path between '" + R.links[pt].name + "' and '" +
                            R.links[pr].name + "'");
    if (P.size() == 2) {
        J(pr, pt) = F_;
    } else {
        J(t, r) = F_;
        J(r, pr) = R_;
        J(pr, r) = 0;
    }
    return P;
}

namespace {

Itep classify_path(const Robot& R, const ContractedGraph& g, const IntMatrix& Jp, int rep, const std::vector<int>& P) {
    Itep it;
    it.actuator = rep;
    it.path = P;
    int moving = 0, u0 = -1, v0 = -1;
    for (std::size_t k = 0; k + 1 < P.size(); ++k) {
        const int code = Jp(P[k], P[k + 1]);
        if (code == F_) continue;
        ++moving;
        u0 = P[k];
        v0 = P[k + 1];
    }
    const std::string who = "actuator '" + R.actuators[rep].name + "'";
    if (moving != 1)
        throw TopologyError(who + ": path " + link_list(R, P) + " has " + std::to_string(moving) +
                            " moving joints; no ITEP type matches (outside the supported scope)");
    const int code = Jp(u0, v0);
    if (code == G_) {
        it.type = ItepType::C;
        it.four_bar = g.four_bar_of(u0, v0);
        if (it.four_bar < 0) throw TopologyError(who + ": generalized joint without a source four-bar");
        it.driven_joint = g.four_bars[it.four_bar].j_ab;
    } else if (code == R_ || code == P_) {
        it.type = code == P_ ? ItepType::A : ItepType::B;
        it.driven_joint = R.joint_between(u0, v0);
        if (it.driven_joint < 0 || R.is_actuator_link(u0) || R.is_actuator_link(v0))
            throw TopologyError(who + ": driving joint on path " + link_list(R, P) + " is not a structural joint");
    } else {
        throw TopologyError(who + ": unknown joint code on path " + link_list(R, P));
    }
    return it;
}

Itep classify_loop(const Robot& R, const ContractedGraph& g, const IntMatrix& Jp, int rep, const std::vector<int>& Pa,
                   const std::vector<int>& Pb, const std::map<int, std::vector<int>>& indirect) {
    Itep it;
    it.actuator = rep;
    it.type = ItepType::D;
    it.path = Pa;
    it.path.insert(it.path.end(), Pb.begin() + 1, Pb.end());
    const std::string who = "actuator '" + R.actuators[rep].name + "'";
    const std::vector<int>& L = it.path;

    LocalLoop& loop = it.loop;
    int fixed = 0, gen = 0, rev = 0;
    for (std::size_t k = 0; k + 1 < L.size(); ++k) {
        const int u = L[k], v = L[k + 1], code = Jp(u, v);
        if (code == F_) {
            ++fixed;
        } else if (code == G_) {
            ++gen;
            loop.generalized_from = u;
            loop.generalized_to = v;
        } else if (code == R_) {
            ++rev;
            const bool structural = !R.is_actuator_link(u) && !R.is_actuator_link(v);
            if (structural) {
                loop.revolute_joint = R.joint_between(u, v);
                if (loop.revolute_joint < 0) throw TopologyError(who + ": loop joint is not a declared joint");
            }
        } else {
            throw TopologyError(who + ": local loop " + link_list(R, L) + " contains a prismatic joint (unsupported)");
        }
        if (R.is_actuator_link(u) && loop.locked_actuator < 0) loop.locked_actuator = R.links[u].actuator;
    }
    std::set<int> nodes(L.begin(), L.end() - 1);
    const int n = static_cast<int>(nodes.size()) - fixed;
    const int j = gen + rev;
    loop.mobility = 3 * (n - 1) - 2 * j;
    for (int l : nodes)
        if (!(R.is_actuator_link(l) && R.actuators[R.links[l].actuator].rod == l)) loop.links.push_back(l);
    if (n != 4 || gen != 1 || rev != 3 || loop.revolute_joint < 0 || loop.locked_actuator < 0)
        throw TopologyError(who + ": local loop " + link_list(R, L) +
                            " is not a generalized four-bar with one generalized and three revolute joints");
    if (loop.mobility != 1) throw TopologyError(who + ": local loop mobility is not 1");
    auto ind = indirect.find(loop.locked_actuator);
    if (ind == indirect.end() || ind->second.size() != 3)
        throw TopologyError(who + ": local loop is not closed by an indirect lock with a three-link path");
    loop.four_bar = g.four_bar_of(loop.generalized_from, loop.generalized_to);
    if (loop.four_bar < 0) throw TopologyError(who + ": generalized joint without a source four-bar");
    it.four_bar = loop.four_bar;
    it.driven_joint = g.four_bars[loop.four_bar].j_ab;
    return it;
}

}  // namespace

std::vector<Itep> extract_iteps(const Robot& R, const ContractedGraph& g) {
    const int na = R.n_actuators();
    std::vector<bool> done(na, false);
    std::vector<Itep> out;
    for (int i = 0; i < na; ++i) {
        if (done[i]) continue;
        IntMatrix Jp = g.J;
        std::map<int, std::vector<int>> indirect;
        for (int j = 0; j < na; ++j) {
            if (R.Rd(i, j) != 0) continue;
            auto P = lock_actuator(Jp, R, j);
            if (P.size() > 2) indirect[j] = P;
        }
        const Actuator& a = R.actuators[i];
        const auto Pa = topo_path(Jp, a.tube_parent, a.rod_parent);
        const auto Pb = topo_path(Jp, a.rod_parent, a.tube_parent);
        Itep it;
        if (!Pa.empty() && !Pb.empty())
            it = classify_loop(R, g, Jp, i, Pa, Pb, indirect);
        else if (!Pa.empty() || !Pb.empty())
            it = classify_path(R, g, Jp, i, Pa.empty() ? Pb : Pa);
        else
            throw TopologyError("actuator '" + a.name + "': tube and rod parents are not connected");
        for (int j = 0; j < na; ++j)
            if (R.Rd(i, j) != 0) {
                it.group.push_back(j);
                done[j] = true;
            }
        out.push_back(it);
    }
    return out;
}

Topology build_topology(const Robot& R) {
    Topology t;
    t.graph = contract_four_bars(R);
    t.iteps = extract_iteps(R, t.graph);
    t.itep_of.assign(R.n_actuators(), -1);
    for (int k = 0; k < static_cast<int>(t.iteps.size()); ++k)
        for (int a : t.iteps[k].group) t.itep_of[a] = k;
    return t;
}

std::string topology_dot(const Robot& R, const Topology& topo) {
    static const char* label[] = {"", "R", "P", "F", "G"};
    std::ostringstream os;
    os << "digraph \"" << R.name << "\" {\n  rankdir=TB;\n";
    for (const auto& l : R.links) {
        if (l.actuator >= 0) continue;
        os << "  L" << l.id << " [label=\"L" << l.id << "\\n" << l.name << "\"];\n";
    }
    const IntMatrix& J = topo.graph.J;
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j) {
            if (!J(i, j) || R.is_actuator_link(i) || R.is_actuator_link(j)) continue;
            os << "  L" << i << " -> L" << j << " [label=\"" << label[J(i, j)] << "\"];\n";
        }
    for (const auto& a : R.actuators) {
        const auto& it = topo.of_actuator(a.id);
        os << "  L" << a.tube_parent << " -> L" << a.rod_parent << " [label=\"ACT A" << a.id << " ("
           << itep_letter(it.type) << ")\", style=dashed, color=orange];\n";
    }
    os << "}\n";
    return os.str();
}

std::string topology_json(const Robot& R, const Topology& topo) {
    using ojson = nlohmann::ordered_json;
    ojson doc;
    doc["robot"] = R.name;
    doc["links"] = ojson::array();
    for (const auto& l : R.links)
        doc["links"].push_back({{"id", l.id}, {"name", l.name}, {"actuator", l.actuator}});
    doc["four_bars"] = ojson::array();
    for (const auto& f : topo.graph.four_bars) doc["four_bars"].push_back(f.links());
    doc["contracted"] = ojson::array();
    const IntMatrix& J = topo.graph.J;
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j)
            if (J(i, j)) doc["contracted"].push_back({i, j, J(i, j)});
    doc["redundancy_classes"] = R.redundancy_classes();
    doc["iteps"] = ojson::array();
    for (const auto& a : R.actuators) {
        const Itep& it = topo.of_actuator(a.id);
        ojson o;
        o["actuator"] = a.id;
        o["name"] = a.name;
        o["itep"] = topo.itep_of[a.id];
        o["type"] = std::string(1, itep_letter(it.type));
        o["path"] = it.path;
        if (it.type == ItepType::D) {
            o["loop"] = it.loop.links;
            o["locked_actuator"] = it.loop.locked_actuator;
        }
        doc["iteps"].push_back(o);
    }
    ojson hist = {{"A", 0}, {"B", 0}, {"C", 0}, {"D", 0}};
    for (const auto& a : R.actuators) {
        auto& h = hist[std::string(1, itep_letter(topo.of_actuator(a.id).type))];
        h = h.get<int>() + 1;
    }
    doc["histogram"] = hist;
    return doc.dump(2) + "\n";
}

}  // namespace mkin
