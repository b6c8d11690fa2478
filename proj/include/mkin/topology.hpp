#pragma once

#include <string>
#include <vector>

#include "mkin/robot.hpp"

namespace mkin {

/// Planar four-bar (a, b, c, d); a is the ground link.
struct FourBar {
    int a = -1, b = -1, c = -1, d = -1;
    int j_ab = -1, j_bc = -1, j_cd = -1;  ///< j_ab is the designated input joint
    int j_da = -1, j_ad = -1;             ///< closure pair
    std::vector<int> links() const { return {a, b, c, d}; }
    bool contains(int l) const { return l == a || l == b || l == c || l == d; }
};

struct GeneralizedEdge {
    int from = -1;
    int to = -1;
    int four_bar = -1;
};

struct ContractedGraph {
    IntMatrix J;
    std::vector<FourBar> four_bars;
    std::vector<GeneralizedEdge> edges;
    /// Four-bar behind the generalized edge from -> to, or -1.
    int four_bar_of(int from, int to) const;
};

enum class ItepType { A, B, C, D };
char itep_letter(ItepType t);

/// The 1-DoF local loop created by locking an indirectly connected actuator.
struct LocalLoop {
    std::vector<int> links;     ///< rigid bodies on the loop; the merged tube/rod is represented by its tube link
    int locked_actuator = -1;
    int generalized_from = -1, generalized_to = -1;
    int revolute_joint = -1;    ///< structural revolute joint on the loop
    int four_bar = -1;          ///< inner four-bar behind the generalized edge
    int mobility = 0;           ///< planar 3(n-1) - 2j
};

struct Itep {
    int actuator = -1;                 ///< representative of the redundancy group
    std::vector<int> group;            ///< all actuators sharing this ITEP
    ItepType type = ItepType::A;
    std::vector<int> path;             ///< link ids; closed (first == last) for type D
    int driven_joint = -1;             ///< A/B: the joint between the parents; C/D: four-bar input joint
    int four_bar = -1;                 ///< C/D: index into ContractedGraph::four_bars
    LocalLoop loop;                    ///< D only
};

struct Topology {
    ContractedGraph graph;
    std::vector<Itep> iteps;           ///< one per redundancy group, ordered by representative
    std::vector<int> itep_of;          ///< actuator -> index into iteps
    const Itep& of_actuator(int a) const { return iteps[itep_of[a]]; }
};

/// Tarjan SCCs of the directed joint graph; size-4 components become four-bars, size-2 are ignored.
std::vector<FourBar> find_four_bars(const Robot& robot);

ContractedGraph contract_four_bars(const Robot& robot);

/// BFS shortest directed path (ascending neighbour order) including both ends, or empty.
std::vector<int> topo_path(const IntMatrix& J, int from, int to);

/// Lock actuator `a` in the working matrix. Returns the parent-to-parent path that was found.
std::vector<int> lock_actuator(IntMatrix& J, const Robot& robot, int a);

std::vector<Itep> extract_iteps(const Robot& robot, const ContractedGraph& graph);

/// Full pipeline: contraction then ITEP extraction.
Topology build_topology(const Robot& robot);

std::string topology_dot(const Robot& robot, const Topology& topo);
std::string topology_json(const Robot& robot, const Topology& topo);

}  // namespace mkin
