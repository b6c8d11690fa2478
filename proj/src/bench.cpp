#include "mkin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace mkin {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> random_lengths(const Robot& R, const Topology& topo, const std::vector<double>& base,
                                   std::mt19937_64& rng, const std::vector<bool>& move) {
    std::vector<double> L = base;
    for (std::size_t i = 0; i < topo.iteps.size(); ++i) {
        const Itep& it = topo.iteps[i];
        const Actuator& a = R.actuators[it.actuator];
        const double v = std::uniform_real_distribution<>(a.lower, a.upper)(rng);
        if (!move[i]) continue;
        for (int g : it.group) L[g] = v;
    }
    return L;
}

}  // namespace

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    // linear interpolation between order statistics
    const double pos = p / 100.0 * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

std::pair<std::vector<double>, double> fit_no_intercept(const std::vector<std::vector<double>>& X,
                                                        const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    const int p = X.empty() ? 0 : static_cast<int>(X[0].size());
    std::vector<int> used;
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i)
            if (X[i][j] != 0.0) {
                used.push_back(j);
                break;
            }
    Eigen::MatrixXd A(n, used.size());
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        b[i] = y[i];
        for (std::size_t k = 0; k < used.size(); ++k) A(i, k) = X[i][used[k]];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    std::vector<double> coef(p, 0.0);
    for (std::size_t k = 0; k < used.size(); ++k) coef[used[k]] = c[k];
    const double mean = b.mean();
    const double ss_res = (A * c - b).squaredNorm();
    const double ss_tot = (b.array() - mean).square().sum();
    return {coef, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

FkTiming fk_timing(const Robot& R, const Topology& topo, int trials, std::uint64_t seed, int repeats,
                   bool all_active) {
    FkTiming out;
    std::mt19937_64 rng(seed);
    const Configuration rest = rest_configuration(R);
    std::vector<std::vector<double>> targets;
    std::vector<FkTrial> pending;
    for (int k = 0; k < trials; ++k) {
        std::vector<bool> move(topo.iteps.size(), true);
        if (!all_active)
            for (std::size_t i = 0; i < move.size(); ++i) move[i] = std::bernoulli_distribution(0.5)(rng);
        targets.push_back(random_lengths(R, topo, rest.lengths, rng, move));
        FkTrial t;
        t.seconds = 1e300;
        for (std::size_t i = 0; i < move.size(); ++i)
            if (move[i]) t.active[static_cast<int>(topo.iteps[i].type)] += static_cast<int>(topo.iteps[i].group.size());
        pending.push_back(t);
    }
    // repeats are interleaved across trials so a scheduler stall hits at most one repeat of a trial
    std::vector<bool> ok(trials, true);
    for (int r = 0; r < std::max(1, repeats); ++r)
        for (int k = 0; k < trials; ++k) {
            if (!ok[k]) continue;
            Configuration c = rest;
            const auto t0 = Clock::now();
            try {
                forward_kinematics(R, topo, targets[k], c);
            } catch (const SolveError&) {
                ok[k] = false;
            }
            pending[k].seconds = std::min(pending[k].seconds, since(t0));
        }
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int k = 0; k < trials; ++k) {
        if (!ok[k]) {
            ++out.failures;
            continue;
        }
        const FkTrial& t = pending[k];
        out.trials.push_back(t);
        X.push_back({double(t.active[0]), double(t.active[1]), double(t.active[2]), double(t.active[3])});
        y.push_back(t.seconds);
    }
    if (!y.empty()) {
        const auto [coef, r2] = fit_no_intercept(X, y);
        std::copy(coef.begin(), coef.end(), out.per_type.begin());
        out.r2 = r2;
        out.mean_seconds = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    }
    return out;
}

double IkTrials::median_iterations() const { return median({iterations.begin(), iterations.end()}); }
double IkTrials::median_seconds() const { return median(seconds); }
double IkTrials::mean_seconds() const {
    return seconds.empty() ? 0.0 : std::accumulate(seconds.begin(), seconds.end(), 0.0) / seconds.size();
}
double IkTrials::median_psi() const { return median(psi); }
double IkTrials::p95_psi() const { return percentile(psi, 95); }

IkTrials ik_trials(const Robot& R, const Topology& topo, int ee, int trials, std::uint64_t seed,
                   const IkOptions& options) {
    IkTrials out;
    std::mt19937_64 rng(seed);
    const Configuration rest = rest_configuration(R);
    const auto mask = relevant_actuators(R, topo, ee);
    const std::vector<bool> all(topo.iteps.size(), true);
    for (int k = 0; k < trials; ++k) {
        const auto L = random_lengths(R, topo, rest.lengths, rng, all);
        Configuration g = rest;
        forward_kinematics(R, topo, L, g);
        IkProblem p;
        p.end_effector = ee;
        p.target = g.world[ee];
        p.options = options;
        const auto t0 = Clock::now();
        const IkResult r = solve_ik(R, topo, rest, p);
        out.seconds.push_back(since(t0));
        ++out.trials;
        out.converged += r.converged;
        out.iterations.push_back(r.iterations);
        out.psi.push_back(r.psi);
        double err = 0.0;
        for (int a = 0; a < R.n_actuators(); ++a)
            if (mask[a]) err = std::max(err, std::abs(r.lengths[a] - L[a]));
        out.max_length_error.push_back(err);
    }
    return out;
}

}  // namespace mkin
