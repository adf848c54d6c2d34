// Acceptance report: one PASS/FAIL line per criterion, detail lines indented.
// Exits 0 once every criterion has been evaluated; --strict turns any FAIL into exit 1.

#include "helpers.hpp"
#include "isoradial/errors.hpp"
#include "isoradial/harness.hpp"
#include "isoradial/kernels.hpp"
#include "isoradial/operators.hpp"
#include "isoradial/solvers.hpp"
#include "isoradial/walk.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstring>
#include <iostream>
#include <numeric>
#include <random>

using namespace isoradial;
using namespace testing_helpers;
using std::numbers::pi;

namespace {

struct Outcome
{
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
    }
    void note(const std::string& what) { details.push_back("info " + what); }
};

const std::vector<std::uint64_t> kSeeds{0, 1, 2};

std::string lattice_name(std::uint64_t seed) { return seed ? fmt::format("random:{}", seed) : "square"; }

double ratio_spread(const std::vector<double>& xs)
{
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *lo > 0 ? *hi / *lo : INFINITY;
}

// ---------------------------------------------------------------- 1

Outcome exact_identities()
{
    Outcome out;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1, 1);
    double green_formula = 0, factor = 0, poly = 0, moments = 0, prob = 0, oasg = 0, paths = 0, rec1 = 0, rec2 = 0;
    for (auto seed : kSeeds) {
        const Region region = Region::disc(0, 3.0);
        auto g = lattice_for(seed, 0.25, region);
        auto d = discretize(g, region);

        auto G = sample(*g, Support::Gamma, [&](cplx) { return cplx(U(rng), U(rng)); });
        auto H = sample(*g, Support::Gamma, [&](cplx) { return cplx(U(rng), U(rng)); });
        double scale = 0;
        for (int u : d.interior()) scale += g->weights().mu_gamma[u];
        green_formula = std::max(green_formula, greens_formula_residual(d, G, H) / scale);

        auto L = sample(*g, Support::Lambda, [&](cplx) { return cplx(U(rng), U(rng)); });
        double mu_min = INFINITY;
        for (int u : d.interior()) mu_min = std::min(mu_min, g->weights().mu_lambda[u]);
        factor = std::max(factor, factorization_check(d, L) * mu_min);

        const std::vector<std::pair<std::function<cplx(cplx)>, double>> polys{
            {[](cplx p) { return cplx(p.real()); }, 0},
            {[](cplx p) { return cplx(p.imag()); }, 0},
            {[](cplx p) { return cplx(p.real() * p.real() - p.imag() * p.imag()); }, 0},
            {[](cplx p) { return cplx(p.real() * p.imag()); }, 0},
            {[](cplx p) { return cplx(std::norm(p)); }, 4}};
        for (const auto& [f, lap] : polys)
            for (int u : d.interior())
                poly = std::max(poly, std::abs(laplacian_at(*g, [&](int v) { return f(g->pos(v)); }, u) - lap));

        for (int u : d.interior()) {
            auto m = step_moments(*g, u);
            double d2 = g->delta() * g->delta();
            moments = std::max({moments, std::abs(m.mean_re) / g->delta(), std::abs(m.mean_im) / g->delta(),
                                std::abs(m.var_re - m.T) / d2, std::abs(m.var_im - m.T) / d2, std::abs(m.cov) / d2});
        }

        DirichletSystem sys(d);
        for (int i = 0; i < d.num_interior(); i += 23) {
            int v0 = d.interior()[i];
            auto w = harmonic_measure_all(sys, v0);
            double sum = 0, neg = 0;
            for (double x : w) {
                sum += x;
                neg = std::min(neg, x);
            }
            prob = std::max({prob, std::abs(sum - 1), -neg});
            auto Gd = green_domain(sys, v0);
            for (int p = 0; p < d.num_pairs(); ++p) {
                const auto& bp = d.boundary()[p];
                oasg = std::max(oasg, std::abs(w[p] + g->diag_weight(bp.a_int, bp.slot) * Gd.at_interior(bp.a_int)));
            }
        }

        // unit scale for exponentials and Cauchy reconstruction
        auto g1 = lattice_for(seed, 1.0, Region::disc(0, 9.0));
        std::vector<int> gam;
        for (int v = 0; v < g1->num_vertices(); ++v)
            if (g1->is_gamma(v) && std::abs(g1->pos(v)) < 7) gam.push_back(v);
        std::uniform_int_distribution<std::size_t> pick(0, gam.size() - 1);
        for (int t = 0; t < 50; ++t) {
            int a = gam[pick(rng)], b = gam[pick(rng)];
            auto q1 = choose_path(*g1, a, b), q2 = choose_path(*g1, a, b, g1->pos(b) - g1->pos(a), 100 + t);
            for (int k = 0; k < 10; ++k) {
                cplx lam(2 * U(rng), 2 * U(rng));
                cplx e1 = discrete_exponential(*g1, lam, q1), e2 = discrete_exponential(*g1, lam, q2);
                paths = std::max(paths, std::abs(e1 - e2) / std::abs(e1));
            }
        }
        auto dc = discretize(g1, Region::disc(0.1, 5.0));
        ContourSpec spec;
        int z0 = g1->nearest_rhombus(cplx(0.6, -0.4));
        auto K = [&](int v) { return cauchy_kernel(*g1, v, z0, spec); };
        auto one = sample(*g1, Support::Diamond, [](cplx) { return cplx(1); });
        auto twoz = sample(*g1, Support::Diamond, [](cplx z) { return 2.0 * z; });
        rec1 = std::max(rec1, std::abs(cauchy_reconstruct(dc, one, z0, K) - 1.0));
        rec2 = std::max(rec2, std::abs(cauchy_reconstruct(dc, twoz, z0, K) - 2.0 * g1->rhombus(z0).center));
    }
    out.require(green_formula <= 1e-9, fmt::format("Green's formula residual / sum mu = {:.2e}", green_formula));
    out.require(factor <= 1e-9, fmt::format("Laplacian = 4 d dbar = 4 dbar d, scaled by min mu = {:.2e}", factor));
    out.require(poly <= 1e-9, fmt::format("harmonic polynomials and Laplacian of |z|^2 = 4: {:.2e}", poly));
    out.require(moments <= 1e-9, fmt::format("random-walk moment identities: {:.2e}", moments));
    out.require(prob <= 1e-9, fmt::format("harmonic measure is a probability vector: {:.2e}", prob));
    out.require(oasg <= 1e-9, fmt::format("omega(v0; a) = -tan(theta) G(a_int; v0): {:.2e}", oasg));
    out.require(paths <= 1e-9, fmt::format("discrete exponentials are path independent: {:.2e}", paths));
    out.require(rec1 <= 1e-7 && rec2 <= 1e-7, fmt::format("Cauchy reconstruction of 1 and 2z: {:.2e}, {:.2e}", rec1, rec2));
    return out;
}

// ---------------------------------------------------------------- 2

Outcome free_green_criterion()
{
    Outcome out;
    ContourSpec spec;
    for (auto seed : kSeeds) {
        auto g = lattice_for(seed, 1.0, Region::disc(0, 53));
        int u0 = g->nearest_vertex(0, Color::Gamma);
        double nb = 0;
        for (int k = 0; k < static_cast<int>(g->star(u0).size()); ++k) {
            double th = g->rhombus(g->star(u0)[k].rhombus).theta;
            nb = std::max(nb, std::abs(free_green_tilde(*g, g->opposite(u0, k), u0, spec) - th / std::tan(th) / pi));
        }
        auto G = [&](int v) { return cplx(free_green(*g, v, u0, spec)); };
        double lap = std::abs(g->weights().mu_gamma[u0] * laplacian_at(*g, G, u0).real() - 1.0);

        std::vector<double> dist, err;
        double bound = 0;
        for (double r : {2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 16.0, 23.0, 32.0, 40.0, 49.0})
            for (double ang : {0.4, 2.3, 4.4}) {
                int u = g->nearest_vertex(g->pos(u0) + std::polar(r, ang), Color::Gamma);
                double dd = std::abs(g->pos(u) - g->pos(u0));
                if (dd < 2 || dd > 50) continue;
                double e = std::abs(G(u).real() - continuous_green_ref(g->pos(u), g->pos(u0)));
                dist.push_back(dd);
                err.push_back(e);
                bound = std::max(bound, e * dd * dd);
            }
        double slope = loglog_slope(dist, err);
        auto name = lattice_name(seed);
        out.require(nb <= 1e-7, fmt::format("{}: neighbour values vs theta cot(theta)/pi: {:.2e}", name, nb));
        out.require(slope <= -1.7, fmt::format("{}: error slope over 2 <= r <= 50: {:.3f}, max error r^2 = {:.3e}", name, slope, bound));
        out.require(lap <= 1e-6, fmt::format("{}: |mu Laplacian G(u0) - 1| = {:.2e}", name, lap));
    }
    return out;
}

// ---------------------------------------------------------------- 3

Outcome cauchy_criterion()
{
    Outcome out;
    ContourSpec spec;
    for (auto seed : kSeeds) {
        auto g = seed ? random_isoradial(seed, 36, 0.3, 1.0) : square_lattice(1.0, 36);
        int z0 = g.nearest_rhombus(cplx(0.2, 0.1));
        const auto& r = g.rhombus(z0);
        double literal = 0, doubled = 0, ratio_lo = INFINITY, ratio_hi = 0;
        cplx total = 0;
        for (int j = 0; j < 4; ++j) {
            cplx muK = -g.weights().edge_mu[z0][j] * cauchy_kernel(g, r.v[j], z0, spec);
            double ang = g.corner_angle(z0, j) / pi;
            literal = std::max(literal, std::abs(muK - ang));
            doubled = std::max(doubled, std::abs(muK - 2 * ang));
            ratio_lo = std::min(ratio_lo, muK.real() / ang);
            ratio_hi = std::max(ratio_hi, muK.real() / ang);
            total += muK;
        }
        LatticeFunction K(g, Support::Lambda);
        for (int v = 0; v < g.num_vertices(); ++v)
            if (std::abs(g.pos(v) - r.center) < 5) K.set(v, cauchy_kernel(g, v, z0, spec));
        auto dK = dbar_lambda(g, K);
        double at_pole = std::abs(g.weights().mu_diamond[z0] * dK.at(z0) - 1.0), off = 0;
        for (int z : dK.ids())
            if (z != z0) off = std::max(off, std::abs(dK.at(z)));

        std::vector<double> dist, err;
        for (double R : {4.0, 8.0, 16.0, 32.0})
            for (double ang : {0.3, 1.9, 3.7, 5.1}) {
                cplx p = r.center + std::polar(R, ang);
                if (std::abs(p) > 34) continue;
                int v = g.nearest_vertex(p, Color::Gamma);
                cplx ref = continuous_cauchy_ref(g.pos(v), r.center, cauchy_far_field_tau(g, v, z0));
                dist.push_back(std::abs(g.pos(v) - r.center));
                err.push_back(std::abs(cauchy_kernel(g, v, z0, spec) - ref));
            }
        double slope = loglog_slope(dist, err);
        auto name = lattice_name(seed);
        out.require(literal <= 1e-7, fmt::format("{}: corner values vs angle/pi: {:.3e} (ratio {:.3f}..{:.3f})", name, literal,
                                                 ratio_lo, ratio_hi));
        out.note(fmt::format("{}: corner values vs 2 angle/pi: {:.2e}, corner sum - 4: {:.2e}", name, doubled, std::abs(total - 4.0)));
        out.require(at_pole <= 1e-7 && off <= 1e-7,
                    fmt::format("{}: mu dbar K(z0) - 1 = {:.2e}, dbar K elsewhere {:.2e}", name, at_pole, off));
        out.require(slope <= -1.7, fmt::format("{}: far-field error slope {:.3f}", name, slope));
    }
    return out;
}

// ---------------------------------------------------------------- 4

SuiteOptions suite_options()
{
    SuiteOptions opt;
    for (auto seed : kSeeds) opt.lattices.push_back(LatticeSpec::parse(lattice_name(seed)));
    return opt;
}

Outcome convergence_criterion(const std::filesystem::path& report)
{
    Outcome out;
    reference::validate();
    auto opt = suite_options();
    std::vector<ConvergenceRecord> recs;
    for (auto* exp : {&exp_hm_convergence, &exp_green_convergence, &exp_poisson_convergence}) {
        auto r = (*exp)(opt);
        recs.insert(recs.end(), r.begin(), r.end());
    }
    emit_report(recs, report);
    int passed = 0, total = 0;
    for (const auto& s : summarize(recs)) {
        ++total;
        passed += s.pass;
        if (!s.pass) {
            std::string errs;
            for (const auto& r : families(recs)[s.key]) errs += fmt::format(" {:.4g}", r.error);
            out.require(false, fmt::format("{}: errors{} ({})", s.key, errs,
                                           s.threshold > 0 ? fmt::format("final target {}", s.threshold) : "must decrease"));
        }
    }
    out.note(fmt::format("{} of {} families pass; report in {}", passed, total, report.string()));
    out.pass = passed == total;
    return out;
}

// ---------------------------------------------------------------- 5

Outcome estimate_criterion()
{
    Outcome out;
    const std::vector<double> deltas{0.1, 0.05, 0.025};
    for (auto seed : kSeeds) {
        auto lat = LatticeSpec::parse(lattice_name(seed));
        double qmin = 1;
        std::vector<double> cU, cV, C1, C2, mv;
        for (double delta : deltas) {
            qmin = std::min(qmin, quarter_arc_min(lat, delta));
            auto rc = rect_constants(lat, delta, 1, 0.5);
            cU.push_back(rc.cU);
            cV.push_back(rc.cV);
            auto rg = regularity_constants(lat, delta);
            C1.push_back(rg.C1);
            C2.push_back(rg.C2);
            mv.push_back(rg.mean_value);
        }
        auto name = lat.name();
        out.require(qmin >= 0.05, fmt::format("{}: quarter-arc measure from the half-radius disc >= {:.4f}", name, qmin));
        out.require(ratio_spread(cU) <= 2 && ratio_spread(cV) <= 2,
                    fmt::format("{}: rectangle constants cU {:.3f}/{:.3f}/{:.3f}, cV {:.3f}/{:.3f}/{:.3f}", name, cU[0], cU[1],
                                cU[2], cV[0], cV[1], cV[2]));
        out.require(ratio_spread(C1) <= 2 && ratio_spread(C2) <= 2,
                    fmt::format("{}: Harnack constants C1 {:.3f}/{:.3f}/{:.3f}, C2 {:.3f}/{:.3f}/{:.3f}", name, C1[0], C1[1],
                                C1[2], C2[0], C2[1], C2[2]));
        out.require(ratio_spread(mv) <= 2,
                    fmt::format("{}: mean-value constant {:.4f}/{:.4f}/{:.4f}", name, mv[0], mv[1], mv[2]));

        auto lat5 = seed ? LatticeSpec::parse(fmt::format("random:{}:0.5", seed)) : lat;
        double worst = 0, worst03 = 0;
        for (double R : {10.0, 20.0, 40.0}) {
            worst = std::max(worst, disc_exit_ratio(lat5, R));
            if (seed) worst03 = std::max(worst03, disc_exit_ratio(lat, R));
        }
        out.require(worst <= 20, fmt::format("{}: disc exit max/min of R omega over R = 10, 20, 40: {:.2f}", lat5.name(), worst));
        if (seed) out.note(fmt::format("{}: same ratio with eta 0.3: {:.2f}", name, worst03));
    }
    auto opt = suite_options();
    int fits = 0, skipped = 0;
    double beta_min = INFINITY, C_max = 0;
    for (const auto& r : beurling_records(opt)) {
        if (r.metric == "skipped") ++skipped;
        if (r.metric == "beta") {
            ++fits;
            beta_min = std::min(beta_min, r.error);
        }
        if (r.metric == "C") C_max = std::max(C_max, r.error);
    }
    out.require(fits > 0 && beta_min > 0 && std::isfinite(C_max),
                fmt::format("Beurling fits: {} fitted, {} skipped (too little spread), min beta {:.3f}, max C {:.3f}", fits,
                            skipped, beta_min, C_max));
    return out;
}

// ---------------------------------------------------------------- 6

Outcome monte_carlo_criterion()
{
    Outcome out;
    struct Case
    {
        std::uint64_t seed;
        Region region;
    };
    const std::vector<Case> domains{
        {0, Region::disc(0, 8)},
        {1, Region::disc(cplx(0.5, -0.3), 7.5)},
        {2, Region::rect(6, 9)},
        {3, Region::polygon({cplx(-6, -6), cplx(6, -6), cplx(6, 0), cplx(0, 0), cplx(0, 6), cplx(-6, 6)})},
    };
    std::mt19937_64 rng(2024);
    int ok = 0, total = 0;
    double worst = 0;
    for (const auto& c : domains) {
        auto g = lattice_for(c.seed, 1.0, c.region);
        auto d = discretize(g, c.region);
        DirichletSystem sys(d);
        auto cycle = boundary_cycle(d);
        const int n = static_cast<int>(cycle.size());
        for (int k = 0; k < 10; ++k) {
            int u = d.interior()[rng() % d.interior().size()];
            int start = static_cast<int>(rng() % n), len = n / 8 + static_cast<int>(rng() % (3 * n / 8));
            auto arc = boundary_arc(d, cycle[start], cycle[(start + len) % n]);
            double p = harmonic_measure(sys, u, arc);
            WalkConfig cfg;
            cfg.seed = 1000 + total;
            cfg.trials = 100000;
            cfg.threads = 1;
            auto mc = mc_harmonic_measure(d, u, arc, cfg);
            double sigma = std::sqrt(p * (1 - p) / static_cast<double>(mc.used));
            double z = sigma > 0 ? std::abs(mc.estimate - p) / sigma : (mc.estimate == p ? 0 : INFINITY);
            worst = std::max(worst, z);
            ok += z <= 4 && mc.truncated == 0;
            ++total;
        }
    }
    out.require(ok >= 0.95 * total, fmt::format("{} of {} cases within 4 sigma, largest deviation {:.2f} sigma", ok, total, worst));
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    std::filesystem::path report = "acceptance_report";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;
        else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) report = argv[++i];
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 exact identities", exact_identities},
        {"2 free Green's function", free_green_criterion},
        {"3 Cauchy kernel", cauchy_criterion},
        {"4 convergence suite", [&] { return convergence_criterion(report); }},
        {"5 estimates", estimate_criterion},
        {"6 Monte Carlo", monte_carlo_criterion},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.require(false, fmt::format("threw {}", e.what()));
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << fmt::format("{} criterion {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", name, secs);
        for (const auto& line : o.details) std::cout << "    " << line << "\n";
        std::cout.flush();
    }
    std::cout << fmt::format("{} of {} criteria pass\n", criteria.size() - failed, criteria.size());
    return strict && failed ? 1 : 0;
}
