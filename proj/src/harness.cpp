#include "isoradial/harness.hpp"

#include "isoradial/errors.hpp"
#include "isoradial/kernels.hpp"
#include "isoradial/solvers.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

namespace isoradial {

using std::numbers::pi;

LatticeSpec LatticeSpec::parse(const std::string& text)
{
    LatticeSpec s;
    if (text == "square") return s;
    if (text.rfind("random:", 0) != 0) throw FormatError("unknown lattice '" + text + "'");
    s.kind = "random";
    std::string rest = text.substr(7);
    auto colon = rest.find(':');
    try {
        s.seed = std::stoull(rest.substr(0, colon));
        if (colon != std::string::npos) s.eta = std::stod(rest.substr(colon + 1));
    } catch (const std::logic_error&) {
        throw FormatError("bad lattice spec '" + text + "'");
    }
    return s;
}

std::string LatticeSpec::name() const
{
    if (kind == "square") return "square";
    std::string out = "random:" + std::to_string(seed);
    if (eta != 0.3) {
        char buf[32];
        auto r = std::to_chars(buf, buf + sizeof buf, eta);
        out += ":" + std::string(buf, r.ptr);
    }
    return out;
}

QuadGraph LatticeSpec::make(double delta, int extent) const
{
    return kind == "square" ? square_lattice(delta, extent) : random_isoradial(seed, extent, eta, delta);
}

std::shared_ptr<const QuadGraph> LatticeSpec::fit(double delta, const Region& region) const
{
    double reach = 0;
    if (region.kind == Region::Kind::Disc) reach = std::abs(region.center) + region.radius;
    if (region.kind == Region::Kind::Rect) reach = std::max(region.S, region.T);
    for (cplx p : region.poly) reach = std::max(reach, std::abs(p));
    return fit_lattice([&](int e) { return make(delta, e); }, region, static_cast<int>(reach / delta) + 2);
}

// ---------------------------------------------------------------- references

namespace reference {

double disc_arc_measure(cplx u, double t1, double t2)
{
    cplx e1 = std::polar(1.0, t1), e2 = std::polar(1.0, t2);
    double ang = std::arg((e2 - u) / (e1 - u));
    if (ang < 0) ang += 2 * pi;
    return ang / pi - (t2 - t1) / (2 * pi);
}

cplx disc_arc_measure_2d(cplx u, double t1, double t2)
{
    cplx e1 = std::polar(1.0, t1), e2 = std::polar(1.0, t2);
    // h = Im f / pi with f = log(e2 - u) - log(e1 - u); 2 dh = f' / (i pi)
    cplx fp = -1.0 / (e2 - u) + 1.0 / (e1 - u);
    return fp / (cplx(0, 1) * pi);
}

double disc_green_star(cplx u, cplx v) { return std::log(std::abs(1.0 - std::conj(v) * u)) / (2 * pi); }

cplx disc_green_star_2d(cplx u, cplx v) { return -std::conj(v) / (1.0 - std::conj(v) * u) / (2 * pi); }

double disc_poisson(cplx u, cplx v, cplx a)
{
    auto k = [&](cplx x) { return (1 - std::norm(x)) / std::norm(x - a); };
    return k(u) / k(v);
}

double halfdisc_poisson(cplx z, cplx a)
{
    auto phi = [](cplx x) {
        cplx w = (1.0 + x) / (1.0 - x);
        return w * w;
    };
    double p = phi(a).real();
    cplx w = phi(z);
    return (1 - p) * (1 - p) / 4 * w.imag() / std::norm(w - p);
}

namespace {

double poisson_integral(cplx u, double t1, double t2, const std::function<double(double)>& f)
{
    auto g = [&](double t) { return f(t) * (1 - std::norm(u)) / std::norm(std::polar(1.0, t) - u) / (2 * pi); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, t1, t2, 20, 1e-13);
}

void expect(bool ok, const std::string& what)
{
    if (!ok) throw OracleFailure(what);
}

double laplacian_fd(const std::function<double(cplx)>& f, cplx z, double h)
{
    return (f(z + h) + f(z - h) + f(z + cplx(0, h)) + f(z - cplx(0, h)) - 4 * f(z)) / (h * h);
}

} // namespace

void validate()
{
    const cplx pts[] = {cplx(0, 0), cplx(0.3, 0.1), cplx(-0.5, 0.4), cplx(0.2, -0.7)};
    for (cplx u : pts) {
        for (auto [t1, t2] : {std::pair{-pi / 3, pi / 3}, std::pair{pi / 2, pi}, std::pair{1.0, 4.0}}) {
            double q = poisson_integral(u, t1, t2, [](double) { return 1.0; });
            expect(std::abs(q - disc_arc_measure(u, t1, t2)) < 1e-10, "arc measure disagrees with the Poisson integral");
            double h = 1e-5;
            for (cplx e : {cplx(1, 0), cplx(0, 1), std::polar(1.0, 0.7)}) {
                double fd = (disc_arc_measure(u + h * e, t1, t2) - disc_arc_measure(u - h * e, t1, t2)) / (2 * h);
                expect(std::abs(fd - (disc_arc_measure_2d(u, t1, t2) * e).real()) < 1e-7, "arc measure gradient");
            }
        }
        for (cplx v : {cplx(0.3, 0.2), cplx(-0.1, 0.5)}) {
            double q = poisson_integral(u, 0, 2 * pi,
                                        [&](double t) { return std::log(std::abs(std::polar(1.0, t) - v)) / (2 * pi); });
            expect(std::abs(q - disc_green_star(u, v)) < 1e-10, "disc Green correction disagrees with the Poisson integral");
            double h = 1e-5;
            for (cplx e : {cplx(1, 0), cplx(0, 1)}) {
                double fd = (disc_green_star(u + h * e, v) - disc_green_star(u - h * e, v)) / (2 * h);
                expect(std::abs(fd - (disc_green_star_2d(u, v) * e).real()) < 1e-7, "disc Green correction gradient");
            }
        }
        cplx a = std::polar(1.0, 0.9), v(0.1, -0.2);
        expect(std::abs(disc_poisson(v, v, a) - 1) < 1e-14, "disc Poisson normalization");
        expect(std::abs(laplacian_fd([&](cplx x) { return disc_poisson(x, v, a); }, u, 1e-3)) < 1e-3 * (1 + disc_poisson(u, v, a)),
               "disc Poisson kernel is not harmonic");
    }
    for (double al : {pi / 3, pi / 2, 2 * pi / 3}) {
        cplx a = std::polar(1.0, al);
        auto P = [&](cplx z) { return halfdisc_poisson(z, a); };
        double h = 1e-6;
        expect(std::abs((P(cplx(0, h)) - P(cplx(0, -h))) / (2 * h) - 1) < 1e-6, "half-disc kernel slope at 0");
        for (double x : {-0.7, -0.2, 0.4, 0.9}) expect(std::abs(P(x)) < 1e-12, "half-disc kernel on the diameter");
        for (double t : {0.2, 1.3, 2.9})
            if (std::abs(t - al) > 0.3) expect(std::abs(P(std::polar(1.0, t))) < 1e-9, "half-disc kernel on the arc");
        for (cplx z : {cplx(0.1, 0.3), cplx(-0.4, 0.5)})
            expect(std::abs(laplacian_fd(P, z, 1e-3)) < 1e-3 * (1 + P(z)), "half-disc kernel is not harmonic");
        expect(P(cplx(0, 0.5)) > 0, "half-disc kernel sign");
    }
}

} // namespace reference

// ---------------------------------------------------------------- helpers

namespace {

const std::vector<cplx> kDiscPoints{cplx(0, 0),    cplx(0.3, 0),   cplx(0, 0.4),     cplx(-0.5, 0.2),
                                    cplx(0.3, -0.5), cplx(-0.2, -0.3), cplx(0.55, 0.35), cplx(-0.6, -0.4)};
const std::vector<cplx> kHalfDiscPoints{cplx(0, 0.4),    cplx(0, 0.6),   cplx(-0.3, 0.4),
                                        cplx(0.35, 0.3), cplx(0.1, 0.7), cplx(-0.5, 0.25)};

Region half_disc()
{
    std::vector<cplx> pts;
    const int n = 256;
    for (int k = 0; k <= n; ++k) pts.push_back(std::polar(1.0, pi * k / n));
    return Region::polygon(pts);
}

Region corner_disc()
{
    std::vector<cplx> pts{0};
    const int n = 192;
    for (int k = 0; k <= n; ++k) pts.push_back(std::polar(1.0, pi / 4 + 1.5 * pi * k / n));
    return Region::polygon(pts);
}

// Runs fn(i) for i < n on up to `threads` workers; outputs are merged in index order.
std::vector<ConvergenceRecord> run_cells(int n, int threads,
                                         const std::function<std::vector<ConvergenceRecord>(int)>& fn)
{
    std::vector<std::vector<ConvergenceRecord>> out(n);
    std::vector<std::exception_ptr> err(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    int nt = std::max(1, std::min(threads, n));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    std::vector<ConvergenceRecord> all;
    for (auto& v : out) all.insert(all.end(), v.begin(), v.end());
    return all;
}

// Point where the Gamma edge a_int -> a leaves the unit circle.
cplx circle_crossing(const QuadGraph& g, const BoundaryPair& bp)
{
    cplx a = g.pos(bp.a), b = g.pos(bp.a_int), e = a - b;
    double A = std::norm(e), B = 2 * (std::conj(b) * e).real(), C = std::norm(b) - 1;
    double disc = B * B - 4 * A * C;
    if (disc < 0) return a;
    double s = std::clamp((-B + std::sqrt(disc)) / (2 * A), 0.0, 1.0);
    return b + s * e;
}

// Pairs of the unit disc whose edge crosses the circle inside the arc from t1 to t2.
std::vector<int> arc_pairs(const DiscreteDomain& d, double t1, double t2)
{
    std::vector<int> out;
    for (int p = 0; p < d.num_pairs(); ++p) {
        double t = std::arg(circle_crossing(d.graph(), d.boundary()[p]));
        while (t < t1) t += 2 * pi;
        if (t < t2) out.push_back(p);
    }
    return out;
}

std::vector<int> test_vertices(const DiscreteDomain& d, const std::vector<cplx>& pts)
{
    std::vector<int> out;
    for (cplx p : pts) {
        int u = d.graph().nearest_vertex(p, Color::Gamma);
        if (!d.is_interior(u)) throw PreconditionViolated("test point is not interior");
        out.push_back(u);
    }
    return out;
}

double value_gap(const DomainFunction& H, const std::vector<int>& us, const std::function<double(cplx)>& ref)
{
    double worst = 0;
    for (int u : us) worst = std::max(worst, std::abs(H.at_interior(u) - ref(H.domain->graph().pos(u))));
    return worst;
}

// Difference quotients on the edges at each test vertex u against Re(2 dh(u) * e).
double gradient_gap(const DomainFunction& H, const std::vector<int>& us, const std::function<cplx(cplx)>& ref2d)
{
    const QuadGraph& g = H.domain->graph();
    double worst = 0;
    for (int u : us)
        for (int k = 0; k < static_cast<int>(g.star(u).size()); ++k) {
            cplx w = g.pos(g.opposite(u, k)), x = g.pos(u);
            double len = std::abs(w - x);
            double dq = (H.across(u, k) - H.at_interior(u)) / len;
            double ex = (ref2d(x) * ((w - x) / len)).real();
            worst = std::max(worst, std::abs(dq - ex));
        }
    return worst;
}

int nearest_pair(const DiscreteDomain& d, cplx target, const std::vector<char>* exclude = nullptr)
{
    int best = -1;
    double bd = INFINITY;
    for (int p = 0; p < d.num_pairs(); ++p) {
        if (exclude && (*exclude)[p]) continue;
        double dist = std::abs(d.graph().pos(d.boundary()[p].a) - target);
        if (dist < bd) {
            bd = dist;
            best = p;
        }
    }
    return best;
}

// omega(.; {a}) = -tan(theta) G(a_int; .), so the continuous pole is the circle point nearest a_int.
cplx effective_pole(const QuadGraph& g, const BoundaryPair& bp)
{
    cplx x = g.pos(bp.a_int);
    return x / std::abs(x);
}

std::string fmt_double(double x)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

} // namespace

// ---------------------------------------------------------------- convergence experiments

std::vector<ConvergenceRecord> exp_hm_convergence(const SuiteOptions& opt)
{
    reference::validate();
    const Region disc = Region::disc(0, 1);
    const std::vector<std::pair<double, double>> arcs{{-pi / 3, pi / 3}, {pi / 2, pi}};
    const int nd = static_cast<int>(opt.deltas.size());
    return run_cells(static_cast<int>(opt.lattices.size()) * nd, opt.threads, [&](int cell) {
        const LatticeSpec& lat = opt.lattices[cell / nd];
        double delta = opt.deltas[cell % nd];
        auto g = lat.fit(delta, disc);
        DiscreteDomain d = discretize(g, disc);
        DirichletSystem sys(d);
        auto us = test_vertices(d, kDiscPoints);
        std::vector<ConvergenceRecord> out;
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            auto [t1, t2] = arcs[i];
            std::vector<double> f(d.num_pairs(), 0.0);
            for (int p : arc_pairs(d, t1, t2)) f[p] = 1;
            auto H = sys.solve(f);
            std::string tag = "arc" + std::to_string(i + 1);
            out.push_back({"hm", lat.name(), disc.tag(), delta, "value:" + tag,
                           value_gap(H, us, [&](cplx u) { return reference::disc_arc_measure(u, t1, t2); }),
                           "closed-form disc arc measure"});
            out.push_back({"hm", lat.name(), disc.tag(), delta, "gradient:" + tag,
                           gradient_gap(H, us, [&](cplx u) { return reference::disc_arc_measure_2d(u, t1, t2); }),
                           "closed-form disc arc measure gradient"});
        }
        return out;
    });
}

std::vector<ConvergenceRecord> exp_green_convergence(const SuiteOptions& opt)
{
    reference::validate();
    const Region disc = Region::disc(0, 1);
    const std::vector<cplx> poles{cplx(0, 0), cplx(0.3, 0.2)};
    const int nd = static_cast<int>(opt.deltas.size());
    return run_cells(static_cast<int>(opt.lattices.size()) * nd, opt.threads, [&](int cell) {
        const LatticeSpec& lat = opt.lattices[cell / nd];
        double delta = opt.deltas[cell % nd];
        auto g = lat.fit(delta, disc);
        DiscreteDomain d = discretize(g, disc);
        DirichletSystem sys(d);
        KernelCache kc(*g, ContourSpec{});
        auto us = test_vertices(d, kDiscPoints);
        std::vector<ConvergenceRecord> out;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            int v0 = g->nearest_vertex(poles[i], Color::Gamma);
            cplx v = g->pos(v0);
            auto Gs = green_star(sys, v0, kc);
            std::string tag = "pole" + std::to_string(i + 1);
            out.push_back({"green", lat.name(), disc.tag(), delta, "value:" + tag,
                           value_gap(Gs, us, [&](cplx u) { return reference::disc_green_star(u, v); }),
                           "closed-form disc Green correction"});
            out.push_back({"green", lat.name(), disc.tag(), delta, "gradient:" + tag,
                           gradient_gap(Gs, us, [&](cplx u) { return reference::disc_green_star_2d(u, v); }),
                           "closed-form disc Green correction gradient"});
        }
        return out;
    });
}

std::vector<ConvergenceRecord> exp_poisson_convergence(const SuiteOptions& opt)
{
    reference::validate();
    const Region disc = Region::disc(0, 1);
    const Region hd = half_disc();
    const double S = 0.5, T = 0.5;
    const int nd = static_cast<int>(opt.deltas.size());
    return run_cells(static_cast<int>(opt.lattices.size()) * nd, opt.threads, [&](int cell) {
        const LatticeSpec& lat = opt.lattices[cell / nd];
        double delta = opt.deltas[cell % nd];
        std::vector<ConvergenceRecord> out;

        // interior normalization on the disc
        {
            auto g = lat.fit(delta, disc);
            DiscreteDomain d = discretize(g, disc);
            DirichletSystem sys(d);
            auto us = test_vertices(d, kDiscPoints);
            int v0 = g->nearest_vertex(0, Color::Gamma);
            int i = 0;
            for (double al : {0.3, 2.2, 4.0}) {
                int ap = nearest_pair(d, std::polar(1.0, al));
                cplx a = effective_pole(*g, d.boundary()[ap]);
                auto P = poisson_interior(sys, v0, ap);
                cplx v = g->pos(v0);
                out.push_back({"poisson_interior", lat.name(), disc.tag(), delta, "value:a" + std::to_string(++i),
                               value_gap(P, us, [&](cplx u) { return reference::disc_poisson(u, v, a); }),
                               "disc Poisson kernel normalized at v"});
            }
        }
        // boundary normalization on the upper half-disc
        {
            auto g = lat.fit(delta, Region::rect(5 * S, 5 * T));
            DiscreteDomain d = discretize(g, hd);
            DirichletSystem sys(d);
            auto us = test_vertices(d, kHalfDiscPoints);
            auto L = lower_boundary(d, 1.0);
            std::vector<char> inL(d.num_pairs(), 0);
            for (int p : L) inL[p] = 1;
            int o = -1;
            double best = INFINITY;
            for (int p : L)
                if (std::abs(g->pos(d.boundary()[p].a)) < best) {
                    best = std::abs(g->pos(d.boundary()[p].a));
                    o = p;
                }
            int o_int = d.boundary()[o].a_int;
            auto g3 = gIm_approx(g, 3 * S, 3 * T), g5 = gIm_approx(g, 5 * S, 5 * T);
            out.push_back({"poisson_boundary", lat.name(), "halfdisc", delta, "gim_box_gap",
                           std::abs(g3.value(o_int) - g5.value(o_int)) / delta, "box factor 3 against 5, in units of delta"});
            int i = 0;
            for (double al : {pi / 3, pi / 2, 2 * pi / 3}) {
                int ap = nearest_pair(d, std::polar(1.0, al), &inL);
                cplx a = effective_pole(*g, d.boundary()[ap]);
                auto P = poisson_boundary(sys, ap, o, S, T);
                out.push_back({"poisson_boundary", lat.name(), "halfdisc", delta, "value:a" + std::to_string(++i),
                               value_gap(P, us, [&](cplx u) { return reference::halfdisc_poisson(u, a); }),
                               "half-disc kernel with unit normal derivative at 0"});
            }
        }
        return out;
    });
}

// ---------------------------------------------------------------- Beurling and estimates

BeurlingFit exp_beurling(const LatticeSpec& lat, double delta, const std::string& geometry)
{
    BeurlingFit fit;
    fit.geometry = geometry;
    Region region = geometry == "flat" ? Region::rect(1, 1) : geometry == "corner" ? corner_disc()
                                                                                    : throw FormatError("unknown geometry");
    auto g = lat.fit(delta, region);
    DiscreteDomain d = discretize(g, region);
    std::vector<char> inE(d.num_pairs(), 0);
    for (int p = 0; p < d.num_pairs(); ++p) {
        cplx a = g->pos(d.boundary()[p].a);
        inE[p] = geometry == "flat" ? a.imag() >= 1 : std::abs(a) >= 0.9;
    }
    std::vector<double> f(inE.begin(), inE.end());
    auto H = solve_dirichlet(d, f);
    for (double dist = delta; dist <= 0.4 + 1e-12; dist *= 2) {
        cplx p = geometry == "flat" ? cplx(0, dist) : cplx(-dist, 0);
        int u = g->nearest_vertex(p, Color::Gamma);
        if (!d.is_interior(u)) continue;
        double db = INFINITY, de = INFINITY;
        for (int q = 0; q < d.num_pairs(); ++q) {
            double x = std::abs(g->pos(d.boundary()[q].a) - g->pos(u));
            db = std::min(db, x);
            if (inE[q]) de = std::min(de, x);
        }
        fit.ratio.push_back(db / de);
        fit.omega.push_back(H.at_interior(u));
    }
    if (fit.ratio.size() < 3) throw InsufficientSpread("fewer than three sample points");
    auto [lo, hi] = std::minmax_element(fit.ratio.begin(), fit.ratio.end());
    if (*hi < 4 * *lo) throw InsufficientSpread("distance ratios span less than a factor 4");
    std::vector<ConvergenceRecord> pts;
    for (std::size_t i = 0; i < fit.ratio.size(); ++i) pts.push_back({"", "", "", fit.ratio[i], "", fit.omega[i], ""});
    fit.beta = fit_rate(pts).slope;
    for (std::size_t i = 0; i < fit.ratio.size(); ++i)
        fit.C = std::max(fit.C, fit.omega[i] / std::pow(fit.ratio[i], fit.beta));
    return fit;
}

std::vector<ConvergenceRecord> beurling_records(const SuiteOptions& opt)
{
    const int nd = static_cast<int>(opt.deltas.size());
    return run_cells(static_cast<int>(opt.lattices.size()) * nd, opt.threads, [&](int cell) {
        const LatticeSpec& lat = opt.lattices[cell / nd];
        double delta = opt.deltas[cell % nd];
        std::vector<ConvergenceRecord> out;
        for (std::string geo : {"flat", "corner"}) {
            BeurlingFit f;
            try {
                f = exp_beurling(lat, delta, geo);
            } catch (const InsufficientSpread& e) {
                out.push_back({"beurling", lat.name(), geo, delta, "skipped", 0, e.what()});
                continue;
            }
            out.push_back({"beurling", lat.name(), geo, delta, "beta", f.beta, "least-squares exponent"});
            out.push_back({"beurling", lat.name(), geo, delta, "C", f.C, "smallest constant over samples"});
        }
        return out;
    });
}

double quarter_arc_min(const LatticeSpec& lat, double delta)
{
    const Region disc = Region::disc(0, 1);
    auto g = lat.fit(delta, disc);
    DiscreteDomain d = discretize(g, disc);
    DirichletSystem sys(d);
    double lo = 1;
    for (int q = 0; q < 4; ++q) {
        std::vector<double> f(d.num_pairs(), 0.0);
        for (int p : arc_pairs(d, q * pi / 2, (q + 1) * pi / 2)) f[p] = 1;
        auto H = sys.solve(f);
        for (int i = 0; i < d.num_interior(); ++i)
            if (std::abs(g->pos(d.interior()[i])) < 0.5) lo = std::min(lo, H.interior[i]);
    }
    return lo;
}

double disc_exit_ratio(const LatticeSpec& lat, double R)
{
    auto g = lat.fit(1.0, Region::disc(0, R + 2));
    int u0 = g->nearest_vertex(0, Color::Gamma);
    DiscreteDomain d = discretize(g, Region::disc(g->pos(u0), R));
    auto w = harmonic_measure_all(DirichletSystem(d), u0);
    auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    if (*lo <= 0) throw IllConditioned("zero exit probability");
    return *hi / *lo;
}

RectConstants rect_constants(const LatticeSpec& lat, double delta, double s, double t)
{
    Region rect = Region::rect(s, t);
    auto g = lat.fit(delta, rect);
    DiscreteDomain d = discretize(g, rect);
    DirichletSystem sys(d);
    auto split = boundary_split_rect(d);
    int o = -1;
    double best = INFINITY;
    for (int p : split.L)
        if (std::abs(g->pos(d.boundary()[p].a)) < best) {
            best = std::abs(g->pos(d.boundary()[p].a));
            o = p;
        }
    int o_int = d.boundary()[o].a_int;
    RectConstants c;
    c.cU = harmonic_measure(sys, o_int, split.U) * t / delta;
    c.cV = harmonic_measure(sys, o_int, split.V) * s * s / (delta * t);
    return c;
}

RegularityConstants regularity_constants(const LatticeSpec& lat, double delta)
{
    auto g = lat.fit(delta, Region::disc(0, 1 + 2 * delta));
    const Region disc = Region::disc(g->pos(g->nearest_vertex(0, Color::Gamma)), 1);
    DiscreteDomain d = discretize(g, disc);
    std::vector<double> f(d.num_pairs(), 0.0);
    for (int p : arc_pairs(d, 0, pi / 2)) f[p] = 1;
    auto H = solve_dirichlet(d, f);
    auto hc = harnack_check(H);
    return {hc.C1, hc.C2, mean_value_check(H)};
}

// ---------------------------------------------------------------- rates and reports

RateFit fit_rate(const std::vector<ConvergenceRecord>& family)
{
    std::vector<double> ds;
    for (const auto& r : family) ds.push_back(r.delta);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    if (ds.size() < 3) throw DegenerateFit("fewer than three distinct deltas");
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : family) {
        if (!(r.error > 0) || !(r.delta > 0)) throw DegenerateFit("errors and deltas must be positive");
        double x = std::log(r.delta), y = std::log(r.error);
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RateFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

std::string family_key(const ConvergenceRecord& r) { return r.experiment + "|" + r.lattice + "|" + r.domain + "|" + r.metric; }

std::map<std::string, std::vector<ConvergenceRecord>> families(const std::vector<ConvergenceRecord>& records)
{
    std::map<std::string, std::vector<ConvergenceRecord>> out;
    for (const auto& r : records) out[family_key(r)].push_back(r);
    for (auto& [k, v] : out)
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.delta > b.delta; });
    return out;
}

void assign_rates(std::vector<ConvergenceRecord>& records)
{
    std::map<std::string, double> rate;
    for (const auto& [k, fam] : families(records)) {
        try {
            rate[k] = fit_rate(fam).slope;
        } catch (const DegenerateFit&) {
            rate[k] = NAN;
        }
    }
    for (auto& r : records) r.fitted_rate = rate[family_key(r)];
}

namespace {

double final_threshold(const ConvergenceRecord& r)
{
    if (r.metric.rfind("value", 0) != 0) return 0;
    return r.experiment.rfind("poisson", 0) == 0 ? 0.05 : 0.02;
}

} // namespace

std::vector<FamilySummary> summarize(const std::vector<ConvergenceRecord>& records)
{
    std::vector<FamilySummary> out;
    for (const auto& [k, fam] : families(records)) {
        FamilySummary s;
        s.key = k;
        try {
            s.rate = fit_rate(fam).slope;
        } catch (const DegenerateFit&) {
            s.rate = NAN;
        }
        s.final_error = fam.back().error;
        const auto& m = fam.front().metric;
        s.decreasing = true;
        for (std::size_t i = 1; i < fam.size(); ++i) s.decreasing = s.decreasing && fam[i].error <= 1.2 * fam[i - 1].error;
        if (m == "skipped") {
            s.pass = true;
        } else if (m == "beta") {
            s.pass = std::all_of(fam.begin(), fam.end(), [](const auto& r) { return r.error > 0; });
        } else if (m == "C") {
            s.pass = std::all_of(fam.begin(), fam.end(), [](const auto& r) { return std::isfinite(r.error); });
        } else if (m == "gim_box_gap") {
            s.threshold = 0.1;
            s.pass = std::all_of(fam.begin(), fam.end(), [](const auto& r) { return r.error < 0.1; });
        } else {
            s.threshold = final_threshold(fam.front());
            s.pass = s.decreasing && (s.threshold == 0 || s.final_error < s.threshold);
        }
        out.push_back(s);
    }
    return out;
}

bool emit_report(const std::vector<ConvergenceRecord>& records, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto recs = records;
    assign_rates(recs);
    std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
        auto ka = family_key(a), kb = family_key(b);
        return ka != kb ? ka < kb : a.delta > b.delta;
    });
    std::ofstream csv(dir / "records.csv");
    csv << "experiment,lattice,domain,delta,metric,error,reference,fitted_rate\n";
    auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
    for (const auto& r : recs)
        csv << r.experiment << "," << r.lattice << "," << quoted(r.domain) << "," << fmt_double(r.delta) << "," << r.metric
            << "," << fmt_double(r.error) << "," << quoted(r.reference) << ","
            << (std::isfinite(r.fitted_rate) ? fmt_double(r.fitted_rate) : "") << "\n";

    auto sum = summarize(recs);
    bool all = true;
    nlohmann::ordered_json j;
    j["families"] = nlohmann::ordered_json::array();
    for (const auto& s : sum) {
        all = all && s.pass;
        nlohmann::ordered_json f;
        f["key"] = s.key;
        f["rate"] = std::isfinite(s.rate) ? nlohmann::ordered_json(s.rate) : nlohmann::ordered_json();
        f["final_error"] = s.final_error;
        f["threshold"] = s.threshold;
        f["decreasing"] = s.decreasing;
        f["pass"] = s.pass;
        j["families"].push_back(f);
    }
    j["pass"] = all;
    std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
    return all;
}

} // namespace isoradial
