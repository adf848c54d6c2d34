#include <doctest.h>

#include "helpers.hpp"
#include "isoradial/errors.hpp"
#include "isoradial/solvers.hpp"
#include "isoradial/walk.hpp"

#include <numeric>

using namespace isoradial;
using namespace testing_helpers;
using std::numbers::pi;

TEST_CASE("step distributions")
{
    auto sq = square_lattice(1.0, 4);
    int u0 = sq.nearest_vertex(0, Color::Gamma);
    auto s = step_distribution(sq, u0);
    REQUIRE(s.prob.size() == 4);
    for (double p : s.prob) CHECK(p == 0.25);
    CHECK_THROWS_AS(step_distribution(sq, sq.nearest_vertex(cplx(1, 0), Color::GammaStar)), PreconditionViolated);

    // pi/3 lattice: the Gamma half-angles are pi/6 or pi/3, so steps carry tan(pi/6) or tan(pi/3)
    std::vector<double> a(8, 0.0), b(8, pi / 3);
    auto tri = build_quadgraph(a, b, 1.0);
    int c = tri.nearest_vertex(tri.positions()[tri.num_vertices() / 2], Color::Gamma);
    auto st = step_distribution(tri, c);
    double total = 0;
    for (int k = 0; k < static_cast<int>(st.prob.size()); ++k) {
        double th = tri.rhombus(tri.star(c)[k].rhombus).theta;
        total += std::tan(th);
        CHECK((std::abs(th - pi / 6) < 1e-12 || std::abs(th - pi / 3) < 1e-12));
    }
    for (int k = 0; k < static_cast<int>(st.prob.size()); ++k)
        CHECK(st.prob[k] == doctest::Approx(std::tan(tri.rhombus(tri.star(c)[k].rhombus).theta) / total).epsilon(1e-14));
}

TEST_CASE("step moments match the quadratic variation")
{
    for (std::uint64_t seed : {1, 2, 3}) {
        auto g = random_isoradial(seed, 8, 0.3, 1.0);
        int checked = 0;
        for (int u = 0; u < g.num_vertices(); ++u) {
            if (!g.is_gamma(u) || !g.full_star(u)) continue;
            auto s = step_distribution(g, u);
            double sum = 0, floor = 1;
            for (double p : s.prob) {
                sum += p;
                floor = std::min(floor, p);
            }
            CHECK(std::abs(sum - 1) < 1e-14);
            CHECK(floor > 0.01);
            auto m = step_moments(g, u);
            CHECK(std::abs(m.mean_re) < 1e-12);
            CHECK(std::abs(m.mean_im) < 1e-12);
            CHECK(std::abs(m.var_re - m.T) < 1e-12);
            CHECK(std::abs(m.var_im - m.T) < 1e-12);
            CHECK(std::abs(m.cov) < 1e-12);
            CHECK(m.T <= 1.0 + 1e-12);
            ++checked;
        }
        CHECK(checked > 50);
    }
}

TEST_CASE("alias tables carry the exact mass")
{
    std::vector<double> w{0.3, 2.0, 0.0, 1.1, 0.6, 5.0};
    AliasTable t(w);
    // each column is hit with probability 1/n; the coin splits it between the column and its alias
    double total = 0;
    for (double x : w) total += x;
    std::vector<double> mass(w.size(), 0.0);
    const int n = static_cast<int>(w.size());
    const int grid = 4000;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < grid; ++j) mass[t.sample((i + 0.5) / n, (j + 0.5) / grid)] += 1.0 / (n * grid);
    for (int i = 0; i < n; ++i) CHECK(std::abs(mass[i] - w[i] / total) < 1.0 / grid);
    CHECK_THROWS_AS(AliasTable({}), EmptyInput);
    CHECK_THROWS_AS(AliasTable({0.0, 0.0}), PreconditionViolated);
}

TEST_CASE("counter generator")
{
    CHECK(counter_uniform(1, 2, 3, 0) == counter_uniform(1, 2, 3, 0));
    CHECK(counter_uniform(1, 2, 3, 0) != counter_uniform(1, 2, 3, 1));
    double s = 0, s2 = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        double x = counter_uniform(9, i, 0, 0);
        CHECK(x >= 0);
        CHECK(x < 1);
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / N - 0.5) < 4 * std::sqrt(1.0 / 12 / N));
    CHECK(std::abs(s2 / N - 1.0 / 3) < 0.003);
}

TEST_CASE("single vertex domain exits in one step")
{
    auto sq = shared(square_lattice(1.0, 4));
    auto d = discretize(sq, Region::disc(0, 1.2));
    REQUIRE(d.num_interior() == 1);
    WalkConfig cfg;
    cfg.trials = 40000;
    int u = d.interior()[0];
    for (int i = 0; i < 10; ++i) CHECK(simulate_exit(d, u, cfg, i).steps == 1);
    auto h = mc_exit_histogram(d, u, cfg);
    CHECK(h.back() == 0);
    double sigma = std::sqrt(cfg.trials * 0.25 * 0.75);
    for (int p = 0; p < 4; ++p) CHECK(std::abs(h[p] - cfg.trials / 4.0) <= 4 * sigma);
}

TEST_CASE("walks are deterministic per seed and independent of threading")
{
    auto g = shared(random_isoradial(4, 14, 0.3, 1.0));
    auto d = discretize(g, Region::disc(0, 8));
    int u = g->nearest_vertex(0, Color::Gamma);
    Walker w(d);
    for (int t = 0; t < 20; ++t) {
        auto a = w.simulate_exit(u, 5, t, 0), b = w.simulate_exit(u, 5, t, 0);
        CHECK(a.pair == b.pair);
        CHECK(a.steps == b.steps);
    }
    WalkConfig one{5, 0, 3000, 1}, four{5, 0, 3000, 4};
    CHECK(mc_exit_histogram(d, u, one) == mc_exit_histogram(d, u, four));
    WalkConfig other{6, 0, 3000, 1};
    CHECK(mc_exit_histogram(d, u, one) != mc_exit_histogram(d, u, other));
}

TEST_CASE("Monte Carlo matches the harmonic measure on a disc")
{
    for (std::uint64_t seed : {0, 1}) {
        auto region = Region::disc(0, 10);
        auto g = lattice_for(seed, 1.0, region);
        auto d = discretize(g, region);
        DirichletSystem sys(d);
        int u = g->nearest_vertex(cplx(1.5, -2), Color::Gamma);
        auto exact = harmonic_measure_all(sys, u);

        WalkConfig cfg;
        cfg.seed = 11 + seed;
        cfg.trials = 100000;
        auto h = mc_exit_histogram(d, u, cfg);
        CHECK(h.back() == 0);
        // quarter arcs by direction from the centre
        for (int q = 0; q < 4; ++q) {
            double p = 0, cnt = 0;
            for (int k = 0; k < d.num_pairs(); ++k) {
                double t = std::arg(g->pos(d.boundary()[k].a));
                if (t < 0) t += 2 * pi;
                if (static_cast<int>(t / (pi / 2)) != q) continue;
                p += exact[k];
                cnt += static_cast<double>(h[k]);
            }
            double n = static_cast<double>(cfg.trials);
            CHECK(std::abs(cnt / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
        }

        std::vector<int> all(d.num_pairs());
        std::iota(all.begin(), all.end(), 0);
        cfg.trials = 2000;
        auto full = mc_harmonic_measure(d, u, all, cfg);
        CHECK(full.estimate == 1.0);
        CHECK(full.stderr_ == 0.0);

        cfg.max_steps = 3;
        auto cut = mc_harmonic_measure(d, u, all, cfg);
        CHECK(cut.truncated > 0);
        CHECK(cut.used + cut.truncated == cfg.trials);
    }
}
