#include "isoradial/walk.hpp"

#include "isoradial/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace isoradial {

StepDistribution step_distribution(const QuadGraph& g, int u)
{
    if (!g.is_gamma(u)) throw PreconditionViolated("walk steps are defined on Gamma");
    if (!g.full_star(u)) throw PreconditionViolated("vertex lacks a full star");
    const int n = static_cast<int>(g.star(u).size());
    if (n < 3) throw PreconditionViolated("vertex has fewer than 3 neighbours");
    StepDistribution s;
    double total = 0;
    for (int k = 0; k < n; ++k) {
        s.targets.push_back(g.opposite(u, k));
        s.prob.push_back(g.diag_weight(u, k));
        total += s.prob.back();
    }
    for (double& p : s.prob) p /= total;
    return s;
}

StepMoments step_moments(const QuadGraph& g, int u)
{
    auto s = step_distribution(g, u);
    StepMoments m;
    double sin_sum = 0, tan_sum = 0;
    for (std::size_t k = 0; k < s.targets.size(); ++k) {
        cplx x = g.pos(s.targets[k]) - g.pos(u);
        m.mean_re += s.prob[k] * x.real();
        m.mean_im += s.prob[k] * x.imag();
        m.var_re += s.prob[k] * x.real() * x.real();
        m.var_im += s.prob[k] * x.imag() * x.imag();
        m.cov += s.prob[k] * x.real() * x.imag();
        double th = g.rhombus(g.star(u)[k].rhombus).theta;
        sin_sum += std::sin(2 * th);
        tan_sum += std::tan(th);
    }
    m.T = g.delta() * g.delta() * sin_sum / tan_sum;
    return m;
}

AliasTable::AliasTable(const std::vector<double>& weights)
{
    const int n = static_cast<int>(weights.size());
    if (n == 0) throw EmptyInput("alias table needs weights");
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) throw PreconditionViolated("weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0) throw PreconditionViolated("weights sum to zero");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (int i = 0; i < n; ++i) {
        scaled[i] = weights[i] * n / total;
        (scaled[i] < 1 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        int s = small.back(), l = large.back();
        small.pop_back();
        large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = scaled[l] + scaled[s] - 1;
        (scaled[l] < 1 ? small : large).push_back(l);
    }
    for (int i : large) prob_[i] = 1;
    for (int i : small) prob_[i] = 1;
}

int AliasTable::sample(double u1, double u2) const
{
    int i = std::min(static_cast<int>(u1 * prob_.size()), size() - 1);
    return u2 < prob_[i] ? i : alias_[i];
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t lane)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ (step * 2 + lane));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Walker::Walker(const DiscreteDomain& d) : d_(&d)
{
    const QuadGraph& g = d.graph();
    if (d.num_interior() == 0) throw EmptyDomain("no interior vertices");
    for (int u : d.interior()) tables_.emplace_back(step_distribution(g, u).prob);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    auto grow = [&](cplx p) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    };
    for (int u : d.interior()) grow(g.pos(u));
    for (const auto& p : d.boundary()) grow(g.pos(p.a));
    double diam = std::hypot(xmax - xmin, ymax - ymin) / g.delta();
    default_budget_ = static_cast<std::int64_t>(std::ceil(100 * diam * diam)) + 100;
}

ExitSample Walker::simulate_exit(int u, std::uint64_t seed, std::uint64_t trial, std::int64_t max_steps) const
{
    const DiscreteDomain& d = *d_;
    const QuadGraph& g = d.graph();
    if (!d.is_interior(u)) throw PreconditionViolated("start vertex is not interior");
    if (max_steps <= 0) max_steps = default_budget_;
    ExitSample out;
    int cur = u;
    for (std::int64_t s = 0; s < max_steps; ++s) {
        int k = tables_[d.interior_index(cur)].sample(counter_uniform(seed, trial, s, 0), counter_uniform(seed, trial, s, 1));
        out.steps = s + 1;
        int p = d.pair_at(cur, k);
        if (p >= 0) {
            out.pair = p;
            return out;
        }
        cur = g.opposite(cur, k);
    }
    out.truncated = true;
    return out;
}

ExitSample simulate_exit(const DiscreteDomain& d, int u, const WalkConfig& cfg, std::uint64_t trial)
{
    return Walker(d).simulate_exit(u, cfg.seed, trial, cfg.max_steps);
}

std::vector<std::int64_t> mc_exit_histogram(const DiscreteDomain& d, int u, const WalkConfig& cfg)
{
    if (cfg.trials < 1) throw PreconditionViolated("at least one trial required");
    Walker w(d);
    if (!d.is_interior(u)) throw PreconditionViolated("start vertex is not interior");
    int nt = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nt = static_cast<int>(std::min<std::int64_t>(nt, cfg.trials));
    std::vector<std::vector<std::int64_t>> shards(nt, std::vector<std::int64_t>(d.num_pairs() + 1, 0));
    auto job = [&](int t) {
        for (std::int64_t i = t; i < cfg.trials; i += nt) {
            auto e = w.simulate_exit(u, cfg.seed, static_cast<std::uint64_t>(i), cfg.max_steps);
            ++shards[t][e.truncated ? d.num_pairs() : e.pair];
        }
    };
    if (nt == 1) {
        job(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(job, t);
        for (auto& th : pool) th.join();
    }
    std::vector<std::int64_t> hist(d.num_pairs() + 1, 0);
    for (const auto& s : shards)
        for (std::size_t i = 0; i < s.size(); ++i) hist[i] += s[i];
    return hist;
}

McEstimate mc_harmonic_measure(const DiscreteDomain& d, int u, const std::vector<int>& pairs, const WalkConfig& cfg)
{
    auto hist = mc_exit_histogram(d, u, cfg);
    std::vector<char> in(d.num_pairs(), 0);
    for (int p : pairs) {
        if (p < 0 || p >= d.num_pairs()) throw NotOnBoundary("pair id out of range");
        in[p] = 1;
    }
    McEstimate m;
    m.truncated = hist.back();
    for (int p = 0; p < d.num_pairs(); ++p) {
        m.used += hist[p];
        if (in[p]) m.hits += hist[p];
    }
    if (m.used == 0) return m;
    double n = static_cast<double>(m.used);
    m.estimate = static_cast<double>(m.hits) / n;
    m.stderr_ = std::sqrt(m.estimate * (1 - m.estimate) / n);
    return m;
}

} // namespace isoradial
