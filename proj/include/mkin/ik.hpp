#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mkin/fk.hpp"

namespace mkin {

enum class Solver1D { GSS, Brent, Newton, Secant };

std::string solver_name(Solver1D s);
/// "gss" | "brent" | "newton" | "secant"
std::optional<Solver1D> parse_solver(const std::string& name);

using ScalarFn = std::function<double(double)>;

/// Bracket shrinks by (sqrt(5)-1)/2 per step; returns the final bracket midpoint.
double golden_section_search(const ScalarFn& f, double a, double b, double tol);

/// Bounded minimization. The result never scores worse than `warm`.
double minimize_1d(Solver1D kind, const ScalarFn& f, double a, double b, double tol, double warm);

struct IkOptions {
    double tol = 1e-6;             ///< outer |dPsi| criterion
    int max_iterations = 200;
    Solver1D solver = Solver1D::GSS;
    double inner_tol = 1e-6;       ///< relative to each actuator's stroke
    int multistart = 1;
    std::uint64_t seed = 0;
    FkOptions fk;
};

struct IkProblem {
    int end_effector = -1;
    Transform target;
    IkOptions options;
};

struct IkResult {
    std::vector<double> lengths;   ///< per actuator; peers carry the representative's value
    double psi = 0.0;
    std::vector<double> trace;     ///< psi after each sweep
    bool converged = false;
    int iterations = 0;
    long evaluations = 0;
    Configuration config;          ///< configuration at `lengths`
};

/// Pose error of the end-effector after FK to `lengths`, run on a copy of cfg. Throws SolveError.
double objective(const Robot& robot, const Topology& topo, const std::vector<double>& lengths,
                 const Transform& target, int end_effector, const Configuration& cfg, const FkOptions& fk = {});

/// One representative per redundancy group whose tube or rod parent reaches the end-effector.
std::vector<bool> relevant_actuators(const Robot& robot, const Topology& topo, int end_effector);

/// Gauss-Seidel sweeps over the relevant actuators. Never throws for non-convergence.
IkResult solve_ik(const Robot& robot, const Topology& topo, const Configuration& start, const IkProblem& problem);

}  // namespace mkin
