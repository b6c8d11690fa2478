#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mkin/ik.hpp"

namespace mkin {

struct FkTrial {
    std::array<int, 4> active{};  ///< active actuators per ITEP type A..D
    double seconds = 0.0;
};

struct FkTiming {
    std::vector<FkTrial> trials;
    std::array<double, 4> per_type{};  ///< least-squares seconds per active actuator of each type
    double r2 = 0.0;
    double mean_seconds = 0.0;
    int failures = 0;
};

/// FK from rest with a random subset of redundancy groups moved to random in-bounds lengths.
/// Each trial is timed as the fastest of `repeats` runs, taken in interleaved passes over all trials. `all_active` moves every group.
FkTiming fk_timing(const Robot& robot, const Topology& topo, int trials, std::uint64_t seed, int repeats = 5,
                   bool all_active = false);

/// Coefficients of y ~ X c without intercept and the centred R^2. Unused columns get 0.
std::pair<std::vector<double>, double> fit_no_intercept(const std::vector<std::vector<double>>& X,
                                                        const std::vector<double>& y);

struct IkTrials {
    int trials = 0;
    int converged = 0;
    std::vector<int> iterations;
    std::vector<double> psi;
    std::vector<double> seconds;
    std::vector<double> max_length_error;  ///< vs the generating lengths, relevant groups only
    double median_iterations() const;
    double median_seconds() const;
    double mean_seconds() const;
    double median_psi() const;
    double p95_psi() const;
};

/// IK from rest toward targets produced by FK from random in-bounds lengths.
IkTrials ik_trials(const Robot& robot, const Topology& topo, int end_effector, int trials, std::uint64_t seed,
                   const IkOptions& options = {});

double median(std::vector<double> v);
double percentile(std::vector<double> v, double p);

}  // namespace mkin
