#include "isoradial/kernels.hpp"

#include "isoradial/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <queue>
#include <unordered_map>

namespace isoradial {

using boost::math::quadrature::gauss_kronrod;
using std::numbers::pi;

namespace {

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double along(cplx s, cplx dir) { return (s * std::conj(dir)).real(); }

template <class F>
cplx integrate(F f, double a, double b, const ContourSpec& spec, const char* what)
{
    double err = 0, l1 = 0;
    cplx r = gauss_kronrod<double, 31>::integrate(f, a, b, spec.max_depth, spec.tol, &err, &l1);
    if (!(err <= std::max(1e-10 * l1, 1e-14)) || !std::isfinite(r.real()) || !std::isfinite(r.imag()))
        throw QuadratureNotConverged(std::string(what) + ": error estimate " + std::to_string(err) +
                                     " against L1 norm " + std::to_string(l1));
    return r;
}

std::uint64_t key(int a, int b) { return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b); }

} // namespace

ContourSpec ContourSpec::for_delta(double)
{
    // everything is evaluated in units where delta = 1, so the radii do not move
    return ContourSpec{};
}

std::vector<cplx> ExponentialPath::steps(const QuadGraph& g) const
{
    std::vector<cplx> s;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) s.push_back(g.pos(vertices[i + 1]) - g.pos(vertices[i]));
    return s;
}

ExponentialPath choose_path(const QuadGraph& g, int from, int to, cplx direction, std::uint64_t variant)
{
    ExponentialPath out{{from}, direction};
    if (from == to) return out;
    if (std::abs(direction) == 0) throw NoAdmissiblePath("zero direction");
    const cplx target = g.pos(to);
    const double eps = 1e-12 * g.delta() * std::abs(direction);

    struct Prev
    {
        int from = -1;
        int mid = -1;
    };
    std::unordered_map<int, Prev> prev;
    prev[from] = {from, -1};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    auto priority = [&](int v) {
        double p = std::abs(g.pos(v) - target);
        if (variant) p += 0.45 * g.delta() * static_cast<double>(mix(variant ^ mix(static_cast<std::uint64_t>(v))) >> 11) * 0x1.0p-53;
        return p;
    };
    open.push({priority(from), from});
    std::vector<char> closed(g.num_vertices(), 0);
    bool found = false;
    while (!open.empty()) {
        int v = open.top().second;
        open.pop();
        if (closed[v]) continue;
        closed[v] = 1;
        if (v == to) {
            found = true;
            break;
        }
        auto push = [&](int w, int mid) {
            if (closed[w] || prev.count(w)) return;
            prev[w] = {v, mid};
            open.push({priority(w), w});
        };
        for (int w : g.lambda_neighbors(v))
            if (along(g.pos(w) - g.pos(v), direction) > eps) push(w, -1);
        for (const auto& e : g.star(v)) {
            const auto& r = g.rhombus(e.rhombus);
            int o = r.v[(e.slot + 2) % 4];
            if (along(g.pos(o) - g.pos(v), direction) <= eps) continue;
            int m1 = r.v[(e.slot + 1) % 4], m2 = r.v[(e.slot + 3) % 4];
            bool first = along(g.pos(m1) - g.pos(v), direction) >= along(g.pos(m2) - g.pos(v), direction);
            if (variant && (mix(variant + static_cast<std::uint64_t>(e.rhombus)) & 1)) first = !first;
            push(o, first ? m1 : m2);
        }
    }
    if (!found)
        throw NoAdmissiblePath("no admissible path from " + std::to_string(from) + " to " + std::to_string(to) +
                               " (explored " + std::to_string(prev.size()) + " vertices)");
    std::vector<int> rev;
    for (int v = to; v != from;) {
        rev.push_back(v);
        const Prev& p = prev.at(v);
        if (p.mid >= 0) rev.push_back(p.mid);
        v = p.from;
    }
    out.vertices.assign(rev.rbegin(), rev.rend());
    out.vertices.insert(out.vertices.begin(), from);
    if (!certify_path(g, out)) throw NoAdmissiblePath("constructed path failed certification");
    return out;
}

ExponentialPath choose_path(const QuadGraph& g, int from, int to)
{
    return choose_path(g, from, to, g.pos(to) - g.pos(from));
}

bool certify_path(const QuadGraph& g, const ExponentialPath& p)
{
    const auto& v = p.vertices;
    const int n = static_cast<int>(v.size()) - 1;
    auto pair_ok = [&](int j) { // steps j and j+1 across one rhombus
        if (j < 0 || j + 1 >= n) return false;
        return g.rhombus_between(v[j], v[j + 2]) >= 0 && along(g.pos(v[j + 2]) - g.pos(v[j]), p.direction) > 0;
    };
    for (int j = 0; j < n; ++j) {
        cplx s = g.pos(v[j + 1]) - g.pos(v[j]);
        if (std::abs(std::abs(s) - g.delta()) > 1e-9 * g.delta()) return false;
        if (along(s, p.direction) > 0) continue;
        if (pair_ok(j) || pair_ok(j - 1)) continue;
        return false;
    }
    return true;
}

ExpFactors ExpFactors::from_steps(const std::vector<cplx>& steps)
{
    return ExpFactors{steps, steps};
}

void ExpFactors::cancel(double tol)
{
    // (1 + l n/2) equals (1 - l d/2) when n = -d
    std::vector<char> used(den.size(), 0);
    std::vector<cplx> keep_num;
    for (const cplx& n : num) {
        bool gone = false;
        for (std::size_t k = 0; k < den.size(); ++k)
            if (!used[k] && std::abs(n + den[k]) < tol) {
                used[k] = 1;
                gone = true;
                break;
            }
        if (!gone) keep_num.push_back(n);
    }
    std::vector<cplx> keep_den;
    for (std::size_t k = 0; k < den.size(); ++k)
        if (!used[k]) keep_den.push_back(den[k]);
    num = std::move(keep_num);
    den = std::move(keep_den);
}

cplx ExpFactors::eval(cplx lambda) const
{
    cplx p = 1.0;
    for (const cplx& d : den) {
        cplx f = 1.0 - 0.5 * lambda * d;
        if (std::abs(f) < 1e-12) throw PoleHit("lambda is within 1e-12 of a pole");
        p /= f;
    }
    for (const cplx& n : num) p *= 1.0 + 0.5 * lambda * n;
    return p;
}

cplx discrete_exponential(const QuadGraph& g, cplx lambda, const ExponentialPath& path)
{
    auto f = ExpFactors::from_steps(path.steps(g));
    f.cancel(1e-12 * g.delta());
    return f.eval(lambda);
}

cplx discrete_exponential(const QuadGraph& g, cplx lambda, int u, int u0)
{
    if (!g.is_gamma(u0)) throw PreconditionViolated("u0 must be a Gamma vertex");
    return discrete_exponential(g, lambda, choose_path(g, u0, u));
}

double green_normalization(double delta)
{
    return (std::log(delta) - std::numbers::egamma - std::log(2.0)) / (2 * pi);
}

double free_green_tilde(const QuadGraph& g, int u, int u0, const ContourSpec& spec)
{
    if (u == u0) return 0.0;
    if (!g.is_gamma(u) || !g.is_gamma(u0)) throw PreconditionViolated("free Green's function lives on Gamma");
    const double delta = g.delta();
    auto path = choose_path(g, u0, u);
    std::vector<cplx> steps = path.steps(g);
    for (auto& s : steps) s /= delta;
    auto E = ExpFactors::from_steps(steps);
    E.cancel(1e-12);

    const double b = -std::arg(g.pos(u) - g.pos(u0));
    const double R = spec.R_outer, r = spec.r_inner;
    const double lR = std::log(R), lr = std::log(r);
    const cplx I(0, 1);
    // outer circle counter-clockwise, log branch arg in [b - pi, b + pi]
    auto big = [&](double phi) { return (lR + I * phi) * E.eval(std::polar(R, phi)) * I; };
    // inner circle clockwise
    auto small = [&](double phi) { return -(lr + I * phi) * E.eval(std::polar(r, phi)) * I; };
    // both passes along the cut; the log values differ by 2 pi i
    const cplx ray = -std::polar(1.0, b);
    auto seg = [&](double t) { return -2 * pi * I * E.eval(std::exp(t) * ray); };

    cplx total = integrate(big, b - pi, b + pi, spec, "outer arc") + integrate(small, b - pi, b + pi, spec, "inner arc") +
                 integrate(seg, lr, lR, spec, "cut");
    return (total / (8 * pi * pi * I)).real();
}

double free_green(const QuadGraph& g, int u, int u0, const ContourSpec& spec)
{
    return free_green_tilde(g, u, u0, spec) + green_normalization(g.delta());
}

cplx cauchy_kernel(const QuadGraph& g, int v, int z0, const ContourSpec& spec)
{
    const double delta = g.delta();
    const auto& r = g.rhombus(z0);
    const cplx d = g.pos(v) - r.center;
    // seed at the corner furthest along d: both of its sides point forward, so the
    // seed poles stay away from the integration ray
    int j = 0;
    for (int k = 1; k < 4; ++k)
        if (along(g.pos(r.v[k]), d) > along(g.pos(r.v[j]), d)) j = k;
    const cplx vj = g.pos(r.v[j]);
    const cplx a = (vj - g.pos(r.v[(j + 3) % 4])) / delta;
    const cplx b = (vj - g.pos(r.v[(j + 1) % 4])) / delta;

    auto path = choose_path(g, r.v[j], v, d);
    std::vector<cplx> steps = path.steps(g);
    for (auto& s : steps) s /= delta;
    ExpFactors E{steps, steps};
    E.den.push_back(a);
    E.den.push_back(b);
    E.cancel(1e-12);

    const cplx w = -std::conj(d) / std::abs(d);
    constexpr double T1 = 2.0;
    auto head = [&](double t) { return E.eval(t * w); };
    // tail t > T1 with x = 1/t: e(w/x)/x^2 is a ratio of polynomials in x, regular at 0
    auto tail = [&](double x) {
        cplx p = 1.0;
        for (const cplx& dd : E.den) p /= x - 0.5 * w * dd;
        for (const cplx& n : E.num) p *= x + 0.5 * w * n;
        return p;
    };
    cplx I = integrate(head, 0.0, T1, spec, "kernel ray") + integrate(tail, 0.0, 1.0 / T1, spec, "kernel tail");
    return -(w / pi) * I / delta;
}

cplx cauchy_far_field_tau(const QuadGraph& g, int v, int z0)
{
    const auto& r = g.rhombus(z0);
    cplx diag = g.is_gamma(v) ? g.pos(r.v[0]) - g.pos(r.v[2]) : g.pos(r.v[1]) - g.pos(r.v[3]);
    return diag / std::abs(diag);
}

double continuous_green_ref(cplx u, cplx u0)
{
    return std::log(std::abs(u - u0)) / (2 * pi);
}

cplx continuous_cauchy_ref(cplx v, cplx z0, cplx tau)
{
    cplx f = 1.0 / (v - z0);
    cplx xi = std::conj(tau);
    return (2 / pi) * (f * std::conj(xi)).real() * xi / std::norm(xi);
}

KernelCache::KernelCache(const QuadGraph& g, ContourSpec spec) : g_(g), spec_(spec) {}

double KernelCache::green(int u, int u0) const
{
    const auto k = key(u, u0);
    {
        std::shared_lock lock(mu_);
        auto it = green_.find(k);
        if (it != green_.end()) return it->second;
    }
    double val = free_green(g_, u, u0, spec_);
    std::unique_lock lock(mu_);
    green_[k] = val;
    return val;
}

cplx KernelCache::cauchy(int v, int z0) const
{
    const auto k = key(v, z0);
    {
        std::shared_lock lock(mu_);
        auto it = cauchy_.find(k);
        if (it != cauchy_.end()) return it->second;
    }
    cplx val = cauchy_kernel(g_, v, z0, spec_);
    std::unique_lock lock(mu_);
    cauchy_[k] = val;
    return val;
}

} // namespace isoradial
