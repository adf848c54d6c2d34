#include "isoradial/solvers.hpp"

#include "isoradial/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace isoradial {

double DomainFunction::at_interior(int v) const
{
    int i = domain->interior_index(v);
    if (i < 0) throw MissingValues("vertex is not interior");
    return interior[i];
}

double DomainFunction::across(int u, int k) const
{
    int p = domain->pair_at(u, k);
    if (p >= 0) return boundary[p];
    return at_interior(domain->graph().opposite(u, k));
}

LatticeFunction DomainFunction::to_lattice() const
{
    LatticeFunction out(domain->graph(), Support::Gamma);
    for (int i = 0; i < domain->num_interior(); ++i) out.set(domain->interior()[i], interior[i]);
    for (int p = domain->num_pairs() - 1; p >= 0; --p) out.set(domain->boundary()[p].a, boundary[p]);
    return out;
}

double DomainFunction::max_abs() const
{
    double m = 0;
    for (double x : interior) m = std::max(m, std::abs(x));
    for (double x : boundary) m = std::max(m, std::abs(x));
    return m;
}

DirichletSystem::DirichletSystem(const DiscreteDomain& d, SolverConfig cfg) : d_(&d), cfg_(cfg)
{
    const QuadGraph& g = d.graph();
    const int n = d.num_interior();
    if (n == 0) throw EmptyDomain("no interior vertices");
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) {
        int u = d.interior()[i];
        double diag = 0;
        for (int k = 0; k < static_cast<int>(g.star(u).size()); ++k) {
            double t = g.diag_weight(u, k);
            diag += t;
            int j = d.interior_index(g.opposite(u, k));
            if (j >= 0 && d.pair_at(u, k) < 0) trip.emplace_back(i, j, -t);
        }
        trip.emplace_back(i, i, diag);
    }
    A_.resize(n, n);
    A_.setFromTriplets(trip.begin(), trip.end());
    for (const auto& p : d.boundary()) t_.push_back(g.diag_weight(p.a_int, p.slot));

    direct_ = cfg.method == SolverConfig::Method::Direct ||
              (cfg.method == SolverConfig::Method::Auto && n < cfg.direct_limit);
    if (direct_) {
        ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(A_);
        if (ldlt_->info() != Eigen::Success) throw SolverDiverged("sparse factorization failed");
    }
}

Eigen::VectorXd DirichletSystem::linear_solve(const Eigen::VectorXd& b) const
{
    Eigen::VectorXd x;
    if (direct_) {
        x = ldlt_->solve(b);
        if (ldlt_->info() != Eigen::Success) throw SolverDiverged("sparse solve failed");
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A_);
        cg.setTolerance(cfg_.tolerance);
        cg.setMaxIterations(cfg_.max_iterations > 0 ? cfg_.max_iterations : 10 * static_cast<int>(A_.rows()));
        x = cg.solve(b);
        if (cg.info() != Eigen::Success)
            throw SolverDiverged("conjugate gradient stopped at relative residual " + std::to_string(cg.error()));
    }
    if (!x.allFinite()) throw SolverDiverged("non-finite solution");
    return x;
}

DomainFunction DirichletSystem::solve(const std::vector<double>& f) const
{
    const DiscreteDomain& d = *d_;
    if (static_cast<int>(f.size()) != d.num_pairs()) throw PreconditionViolated("one boundary value per pair expected");
    double fmax = 0;
    for (double x : f) {
        if (!std::isfinite(x)) throw PreconditionViolated("boundary data must be finite");
        fmax = std::max(fmax, std::abs(x));
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d.num_interior());
    for (int p = 0; p < d.num_pairs(); ++p) b[d.interior_index(d.boundary()[p].a_int)] += t_[p] * f[p];
    Eigen::VectorXd x = linear_solve(b);

    DomainFunction H{&d, std::vector<double>(x.data(), x.data() + x.size()), f};
    double res = harmonic_residual(H);
    if (res > 1e-10 * std::max(fmax, 1e-300) && fmax > 0)
        throw SolverDiverged("harmonic residual " + std::to_string(res) + " above tolerance");
    return H;
}

Eigen::VectorXd DirichletSystem::adjoint(int u) const
{
    int i = d_->interior_index(u);
    if (i < 0) throw PreconditionViolated("point is not interior");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d_->num_interior());
    e[i] = 1;
    return linear_solve(e);
}

DomainFunction solve_dirichlet(const DiscreteDomain& d, const std::vector<double>& f, SolverConfig cfg)
{
    return DirichletSystem(d, cfg).solve(f);
}

double harmonic_residual(const DomainFunction& H)
{
    const DiscreteDomain& d = *H.domain;
    const QuadGraph& g = d.graph();
    double worst = 0;
    for (int i = 0; i < d.num_interior(); ++i) {
        int u = d.interior()[i];
        double s = 0, tsum = 0;
        for (int k = 0; k < static_cast<int>(g.star(u).size()); ++k) {
            double t = g.diag_weight(u, k);
            s += t * (H.across(u, k) - H.interior[i]);
            tsum += t;
        }
        worst = std::max(worst, std::abs(s) / tsum);
    }
    return worst;
}

double harmonic_measure(const DirichletSystem& sys, int u, const std::vector<int>& pairs)
{
    const DiscreteDomain& d = sys.domain();
    if (!d.is_interior(u)) throw PreconditionViolated("point is not interior");
    std::vector<double> f(d.num_pairs(), 0.0);
    for (int p : pairs) {
        if (p < 0 || p >= d.num_pairs()) throw NotOnBoundary("pair id out of range");
        f[p] = 1.0;
    }
    return sys.solve(f).at_interior(u);
}

double harmonic_measure(const DiscreteDomain& d, int u, const std::vector<int>& pairs)
{
    return harmonic_measure(DirichletSystem(d), u, pairs);
}

std::vector<double> harmonic_measure_all(const DirichletSystem& sys, int u)
{
    const DiscreteDomain& d = sys.domain();
    Eigen::VectorXd x = sys.adjoint(u);
    std::vector<double> w(d.num_pairs());
    for (int p = 0; p < d.num_pairs(); ++p) w[p] = sys.pair_weights()[p] * x[d.interior_index(d.boundary()[p].a_int)];
    return w;
}

DomainFunction green_domain(const DirichletSystem& sys, int v0)
{
    Eigen::VectorXd x = sys.adjoint(v0);
    DomainFunction G{&sys.domain(), {}, std::vector<double>(sys.domain().num_pairs(), 0.0)};
    G.interior.resize(x.size());
    for (int i = 0; i < x.size(); ++i) G.interior[i] = -x[i];
    return G;
}

DomainFunction green_domain(const DiscreteDomain& d, int v0) { return green_domain(DirichletSystem(d), v0); }

DomainFunction green_star(const DirichletSystem& sys, int v0, const KernelCache& kernels)
{
    const DiscreteDomain& d = sys.domain();
    if (&kernels.graph() != &d.graph()) throw PreconditionViolated("kernel cache belongs to another graph");
    std::vector<double> f(d.num_pairs());
    for (int p = 0; p < d.num_pairs(); ++p) f[p] = kernels.green(d.boundary()[p].a, v0);
    return sys.solve(f);
}

DomainFunction poisson_interior(const DirichletSystem& sys, int v, int a_pair)
{
    const DiscreteDomain& d = sys.domain();
    if (a_pair < 0 || a_pair >= d.num_pairs()) throw NotOnBoundary("pair id out of range");
    std::vector<double> f(d.num_pairs(), 0.0);
    f[a_pair] = 1.0;
    DomainFunction P = sys.solve(f);
    double wv = P.at_interior(v);
    if (wv < 1e-14) throw IllConditioned("harmonic measure at the normalization point is below 1e-14");
    for (double& x : P.interior) x /= wv;
    for (double& x : P.boundary) x /= wv;
    return P;
}

double HalfPlaneIm::value(int u) const { return f.at_interior(u); }

HalfPlaneIm gIm_approx(std::shared_ptr<const QuadGraph> g, double S, double T)
{
    HalfPlaneIm out;
    out.box = std::make_shared<DiscreteDomain>(discretize(std::move(g), Region::rect(S, T)));
    const DiscreteDomain& box = *out.box;
    std::vector<double> f(box.num_pairs());
    for (int p = 0; p < box.num_pairs(); ++p) {
        double y = box.graph().pos(box.boundary()[p].a).imag();
        f[p] = y <= 0 ? 0.0 : y;
    }
    out.f = solve_dirichlet(box, f);
    return out;
}

std::vector<int> lower_boundary(const DiscreteDomain& d, double S)
{
    std::vector<int> L;
    for (int p = 0; p < d.num_pairs(); ++p) {
        cplx a = d.graph().pos(d.boundary()[p].a);
        if (std::abs(a.real()) < S && a.imag() <= 0) L.push_back(p);
    }
    return L;
}

void check_layout(const DiscreteDomain& d, double S, double T, int a_pair, int o_pair)
{
    const QuadGraph& g = d.graph();
    const double delta = g.delta();
    if (a_pair < 0 || a_pair >= d.num_pairs() || o_pair < 0 || o_pair >= d.num_pairs())
        throw NotOnBoundary("pair id out of range");
    Region rect = Region::rect(S, T);
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.is_gamma(v) && rect.contains(g.pos(v)) && !d.is_interior(v))
            throw LayoutViolation("domain does not contain the rectangle");
    for (int u : d.interior()) {
        cplx p = g.pos(u);
        if (std::abs(p.real()) < S && p.imag() <= 0) throw LayoutViolation("interior vertex below the lower boundary");
    }
    auto L = lower_boundary(d, S);
    if (L.empty()) throw LayoutViolation("no lower boundary");
    for (int p : L)
        if (g.pos(d.boundary()[p].a).imag() < -2 * delta) throw LayoutViolation("lower boundary is not straight");
    if (std::find(L.begin(), L.end(), a_pair) != L.end()) throw LayoutViolation("a lies on the lower boundary");
    if (std::find(L.begin(), L.end(), o_pair) == L.end()) throw LayoutViolation("o is not on the lower boundary");
}

DomainFunction poisson_boundary(const DirichletSystem& sys, int a_pair, int o_pair, double S, double T)
{
    const DiscreteDomain& d = sys.domain();
    check_layout(d, S, T, a_pair, o_pair);
    int o_int = d.boundary()[o_pair].a_int;
    auto gim = gIm_approx(d.graph_ptr(), 3 * S, 3 * T);
    double scale = gim.value(o_int);

    std::vector<double> f(d.num_pairs(), 0.0);
    f[a_pair] = 1.0;
    DomainFunction P = sys.solve(f);
    double w = P.at_interior(o_int);
    if (w < 1e-14) throw IllConditioned("harmonic measure at o_int is below 1e-14");
    for (double& x : P.interior) x *= scale / w;
    for (double& x : P.boundary) x *= scale / w;
    return P;
}

namespace {

struct DiscFrame
{
    cplx c;
    double R;
    int u0;
};

DiscFrame disc_frame(const DomainFunction& H)
{
    const DiscreteDomain& d = *H.domain;
    if (!d.region() || d.region()->kind != Region::Kind::Disc)
        throw PreconditionViolated("disc domain expected");
    for (double x : H.interior)
        if (x < 0) throw PreconditionViolated("function must be nonnegative");
    for (double x : H.boundary)
        if (x < 0) throw PreconditionViolated("function must be nonnegative");
    DiscFrame fr{d.region()->center, d.region()->radius, d.graph().nearest_vertex(d.region()->center, Color::Gamma)};
    if (!d.is_interior(fr.u0)) throw PreconditionViolated("centre vertex is not interior");
    if (H.at_interior(fr.u0) <= 0) throw PreconditionViolated("function vanishes at the centre");
    return fr;
}

} // namespace

HarnackConstants harnack_check(const DomainFunction& H, double r)
{
    DiscFrame fr = disc_frame(H);
    const DiscreteDomain& d = *H.domain;
    const QuadGraph& g = d.graph();
    if (r <= 0) r = fr.R / 2;
    HarnackConstants c;
    double h0 = H.at_interior(fr.u0);
    for (int k = 0; k < static_cast<int>(g.star(fr.u0).size()); ++k)
        c.C1 = std::max(c.C1, std::abs(H.across(fr.u0, k) - h0) * fr.R / (g.delta() * h0));
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < d.num_interior(); ++i)
        if (std::abs(g.pos(d.interior()[i]) - g.pos(fr.u0)) < r) {
            if (H.interior[i] <= 0) throw PreconditionViolated("function vanishes inside the inner disc");
            lo = std::min(lo, std::log(H.interior[i]));
            hi = std::max(hi, std::log(H.interior[i]));
        }
    c.C2 = (hi - lo) * (fr.R - r) / r;
    return c;
}

double mean_value_check(const DomainFunction& H)
{
    DiscFrame fr = disc_frame(H);
    const DiscreteDomain& d = *H.domain;
    const QuadGraph& g = d.graph();
    double s = 0;
    for (int i = 0; i < d.num_interior(); ++i) s += H.interior[i] * g.weights().mu_gamma[d.interior()[i]];
    double h0 = H.at_interior(fr.u0);
    return std::abs(h0 - s / (std::numbers::pi * fr.R * fr.R)) * fr.R / (g.delta() * h0);
}

} // namespace isoradial
