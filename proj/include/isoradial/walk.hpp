#pragma once

#include "isoradial/domain.hpp"

#include <cstdint>
#include <vector>

namespace isoradial {

// Step law of the tan(theta) walk at a Gamma vertex: targets[k] = opposite(u, k).
struct StepDistribution
{
    std::vector<int> targets;
    std::vector<double> prob;
};
StepDistribution step_distribution(const QuadGraph& g, int u);

struct StepMoments
{
    double mean_re = 0, mean_im = 0;
    double var_re = 0, var_im = 0, cov = 0;
    double T = 0; // delta^2 sum sin(2 theta) / sum tan(theta)
};
StepMoments step_moments(const QuadGraph& g, int u);

// Vose alias table.
class AliasTable
{
public:
    explicit AliasTable(const std::vector<double>& weights);
    int sample(double u1, double u2) const;
    int size() const { return static_cast<int>(prob_.size()); }

private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

// Counter-based generator: uniform in [0, 1) keyed by (seed, trial, step, lane).
double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t lane);

struct WalkConfig
{
    std::uint64_t seed = 1;
    std::int64_t max_steps = 0; // 0 means 100 (diam / delta)^2
    std::int64_t trials = 1;
    int threads = 0;            // 0 means hardware concurrency
};

struct ExitSample
{
    int pair = -1; // -1 when truncated
    std::int64_t steps = 0;
    bool truncated = false;
};

class Walker
{
public:
    explicit Walker(const DiscreteDomain& d);
    const DiscreteDomain& domain() const { return *d_; }
    std::int64_t default_max_steps() const { return default_budget_; }
    ExitSample simulate_exit(int u, std::uint64_t seed, std::uint64_t trial, std::int64_t max_steps) const;

private:
    const DiscreteDomain* d_;
    std::vector<AliasTable> tables_; // by interior index
    std::int64_t default_budget_ = 0;
};

ExitSample simulate_exit(const DiscreteDomain& d, int u, const WalkConfig& cfg, std::uint64_t trial);

struct McEstimate
{
    double estimate = 0;
    double stderr_ = 0;
    std::int64_t hits = 0;
    std::int64_t used = 0;      // trials that exited
    std::int64_t truncated = 0; // excluded from the estimate
};
McEstimate mc_harmonic_measure(const DiscreteDomain& d, int u, const std::vector<int>& pairs, const WalkConfig& cfg);
// Exit counts per pair over cfg.trials trajectories; the last entry counts truncated ones.
std::vector<std::int64_t> mc_exit_histogram(const DiscreteDomain& d, int u, const WalkConfig& cfg);

} // namespace isoradial
