#include "isoradial/operators.hpp"

#include "isoradial/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace isoradial {

namespace {

// H on Lambda; a function declared on one colour reads as zero on the other.
cplx lambda_value(const QuadGraph& g, const LatticeFunction& H, int v)
{
    if (H.support() == Support::Gamma && !g.is_gamma(v)) return 0.0;
    if (H.support() == Support::GammaStar && g.is_gamma(v)) return 0.0;
    return H.at(v);
}

bool lambda_known(const QuadGraph& g, const LatticeFunction& H, int v)
{
    if (H.support() == Support::Gamma && !g.is_gamma(v)) return true;
    if (H.support() == Support::GammaStar && g.is_gamma(v)) return true;
    return H.has(v);
}

void require_full_star(const QuadGraph& g, int v)
{
    if (!g.full_star(v)) throw MissingValues("vertex " + std::to_string(v) + " has no full star");
}

template <bool Conj>
cplx diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v)
{
    require_full_star(g, v);
    const auto& W = g.weights();
    cplx s = 0;
    for (const auto& e : g.star(v)) {
        cplx mu = W.edge_mu[e.rhombus][e.slot];
        s += (Conj ? std::conj(mu) : mu) * F.at(e.rhombus);
    }
    return s / (4 * W.mu_lambda[v]);
}

template <bool Conj>
cplx lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z)
{
    const auto& r = g.rhombus(z);
    cplx h[4], p[4];
    for (int j = 0; j < 4; ++j) {
        h[j] = lambda_value(g, H, r.v[j]);
        p[j] = Conj ? std::conj(g.pos(r.v[j])) : g.pos(r.v[j]);
    }
    return 0.5 * ((h[0] - h[2]) / (p[0] - p[2]) + (h[1] - h[3]) / (p[1] - p[3]));
}

template <bool Conj>
LatticeFunction lambda_whole(const QuadGraph& g, const LatticeFunction& H)
{
    LatticeFunction out(g, Support::Diamond);
    for (int z = 0; z < g.num_rhombi(); ++z) {
        const auto& r = g.rhombus(z);
        bool ok = true;
        for (int v : r.v) ok = ok && lambda_known(g, H, v);
        if (ok) out.set(z, lambda_to_diamond<Conj>(g, H, z));
    }
    return out;
}

template <bool Conj>
LatticeFunction diamond_whole(const QuadGraph& g, const LatticeFunction& F)
{
    LatticeFunction out(g, Support::Lambda);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!g.full_star(v)) continue;
        bool ok = true;
        for (const auto& e : g.star(v)) ok = ok && F.has(e.rhombus);
        if (ok) out.set(v, diamond_to_lambda<Conj>(g, F, v));
    }
    return out;
}

} // namespace

Eigen::SparseMatrix<double> SparseOperator::real_matrix() const
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(entries.size());
    for (const auto& e : entries) t.emplace_back(e.row, e.col, e.value.real());
    Eigen::SparseMatrix<double> m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseOperator assemble_laplacian(const DiscreteDomain& d)
{
    const QuadGraph& g = d.graph();
    SparseOperator op;
    op.rows = d.interior();
    op.cols = d.interior();
    std::unordered_map<int, int> col_of;
    for (int i = 0; i < d.num_interior(); ++i) col_of[op.cols[i]] = i;
    for (const auto& p : d.boundary())
        if (!col_of.count(p.a)) {
            col_of[p.a] = static_cast<int>(op.cols.size());
            op.cols.push_back(p.a);
        }
    for (int i = 0; i < d.num_interior(); ++i) {
        int u = op.rows[i];
        double mu = g.weights().mu_gamma[u];
        op.row_scaling.push_back(mu);
        double diag = 0;
        for (int k = 0; k < static_cast<int>(g.star(u).size()); ++k) {
            double t = g.diag_weight(u, k);
            op.entries.push_back({i, col_of.at(g.opposite(u, k)), t / mu});
            diag += t;
        }
        op.entries.push_back({i, i, -diag / mu});
    }
    return op;
}

LatticeFunction laplacian_apply(const QuadGraph& g, const SparseOperator& op, const LatticeFunction& H)
{
    std::vector<cplx> acc(op.rows.size(), 0.0);
    for (const auto& e : op.entries) acc[e.row] += e.value * H.at(op.cols[e.col]);
    LatticeFunction out(g, g.is_gamma(op.rows.front()) ? Support::Gamma : Support::GammaStar);
    for (std::size_t i = 0; i < op.rows.size(); ++i) out.set(op.rows[i], acc[i]);
    return out;
}

cplx laplacian_at(const QuadGraph& g, const std::function<cplx(int)>& H, int v)
{
    require_full_star(g, v);
    cplx h0 = H(v), s = 0;
    for (int k = 0; k < static_cast<int>(g.star(v).size()); ++k) s += g.diag_weight(v, k) * (H(g.opposite(v, k)) - h0);
    return s / g.weights().mu_gamma[v];
}

double greens_formula_residual(const DiscreteDomain& d, const LatticeFunction& G, const LatticeFunction& H)
{
    const QuadGraph& g = d.graph();
    auto Gf = [&](int v) { return G.at(v); };
    auto Hf = [&](int v) { return H.at(v); };
    cplx lhs = 0, rhs = 0;
    for (int u : d.interior())
        lhs += (G.at(u) * laplacian_at(g, Hf, u) - H.at(u) * laplacian_at(g, Gf, u)) * g.weights().mu_gamma[u];
    for (const auto& p : d.boundary()) {
        double t = g.diag_weight(p.a_int, p.slot);
        rhs += t * (H.at(p.a) * G.at(p.a_int) - H.at(p.a_int) * G.at(p.a));
    }
    return std::abs(lhs - rhs);
}

cplx dbar_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v)
{
    return diamond_to_lambda<false>(g, F, v);
}
cplx d_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v)
{
    return diamond_to_lambda<true>(g, F, v);
}
cplx dbar_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z)
{
    return lambda_to_diamond<true>(g, H, z);
}
cplx d_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z)
{
    return lambda_to_diamond<false>(g, H, z);
}

LatticeFunction dbar_lambda(const QuadGraph& g, const LatticeFunction& H) { return lambda_whole<true>(g, H); }
LatticeFunction d_lambda(const QuadGraph& g, const LatticeFunction& H) { return lambda_whole<false>(g, H); }
LatticeFunction dbar_diamond(const QuadGraph& g, const LatticeFunction& F) { return diamond_whole<false>(g, F); }
LatticeFunction d_diamond(const QuadGraph& g, const LatticeFunction& F) { return diamond_whole<true>(g, F); }

double factorization_check(const DiscreteDomain& d, const LatticeFunction& H)
{
    const QuadGraph& g = d.graph();
    auto dbarH = dbar_lambda(g, H);
    auto dH = d_lambda(g, H);
    auto Hf = [&](int v) { return lambda_value(g, H, v); };
    double worst = 0;
    std::vector<char> seen(g.num_vertices(), 0);
    for (int z : domain_rhombi(d))
        for (int v : g.rhombus(z).v) {
            if (seen[v] || !g.full_star(v)) continue;
            seen[v] = 1;
            bool ok = true;
            for (const auto& e : g.star(v)) ok = ok && dbarH.has(e.rhombus);
            if (!ok) continue;
            cplx lap = laplacian_at(g, Hf, v);
            cplx a = 4.0 * d_diamond_to_lambda(g, dbarH, v);
            cplx b = 4.0 * dbar_diamond_to_lambda(g, dH, v);
            worst = std::max({worst, std::abs(lap - a), std::abs(lap - b)});
        }
    return worst;
}

cplx average_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z)
{
    cplx s = 0;
    for (int v : g.rhombus(z).v) s += lambda_value(g, H, v);
    return 0.25 * s;
}

cplx average_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v)
{
    require_full_star(g, v);
    const auto& W = g.weights();
    cplx s = 0;
    for (const auto& e : g.star(v)) s += W.mu_diamond[e.rhombus] * F.at(e.rhombus);
    return s / (4 * W.mu_lambda[v]);
}

LatticeFunction average_lambda(const QuadGraph& g, const LatticeFunction& H)
{
    LatticeFunction out(g, Support::Diamond);
    for (int z = 0; z < g.num_rhombi(); ++z) {
        bool ok = true;
        for (int v : g.rhombus(z).v) ok = ok && lambda_known(g, H, v);
        if (ok) out.set(z, average_lambda_to_diamond(g, H, z));
    }
    return out;
}

LatticeFunction average_diamond(const QuadGraph& g, const LatticeFunction& F)
{
    LatticeFunction out(g, Support::Lambda);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!g.full_star(v)) continue;
        bool ok = true;
        for (const auto& e : g.star(v)) ok = ok && F.has(e.rhombus);
        if (ok) out.set(v, average_diamond_to_lambda(g, F, v));
    }
    return out;
}

cplx project(cplx f, cplx xi)
{
    return (f * std::conj(xi)).real() * xi / std::norm(xi);
}

LatticeFunction project_black(const QuadGraph& g, const LatticeFunction& F)
{
    LatticeFunction out(g, Support::Diamond);
    for (int z : F.ids()) {
        const auto& r = g.rhombus(z);
        out.set(z, project(F.at(z), std::conj(g.pos(r.v[0]) - g.pos(r.v[2]))));
    }
    return out;
}

LatticeFunction project_white(const QuadGraph& g, const LatticeFunction& F)
{
    LatticeFunction out(g, Support::Diamond);
    for (int z : F.ids()) {
        const auto& r = g.rhombus(z);
        out.set(z, project(F.at(z), std::conj(g.pos(r.v[1]) - g.pos(r.v[3]))));
    }
    return out;
}

cplx contour_integral(const QuadGraph& g, const std::vector<int>& path, const LatticeFunction& G)
{
    cplx s = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        int p = path[i], q = path[i + 1];
        if (g.color(p) != g.color(q)) throw NotAPath("path mixes Gamma and Gamma* vertices");
        int z = g.rhombus_between(p, q);
        if (z < 0) throw NotAPath("vertices " + std::to_string(p) + " and " + std::to_string(q) + " are not adjacent");
        s += G.at(z) * (g.pos(q) - g.pos(p));
    }
    return s;
}

std::vector<int> domain_rhombi(const DiscreteDomain& d)
{
    const QuadGraph& g = d.graph();
    std::vector<char> in(g.num_rhombi(), 0);
    for (int u : d.interior())
        for (const auto& e : g.star(u)) in[e.rhombus] = 1;
    std::vector<int> out;
    for (int z = 0; z < g.num_rhombi(); ++z)
        if (in[z]) out.push_back(z);
    return out;
}

std::vector<int> domain_lambda_interior(const DiscreteDomain& d)
{
    const QuadGraph& g = d.graph();
    std::vector<char> in(g.num_rhombi(), 0), seen(g.num_vertices(), 0);
    auto Z = domain_rhombi(d);
    for (int z : Z) in[z] = 1;
    std::vector<int> out;
    for (int z : Z)
        for (int v : g.rhombus(z).v) {
            if (seen[v]) continue;
            seen[v] = 1;
            if (!g.full_star(v)) continue;
            bool all = true;
            for (const auto& e : g.star(v)) all = all && in[e.rhombus];
            if (all) out.push_back(v);
        }
    std::sort(out.begin(), out.end());
    return out;
}

Primitive primitive(const DiscreteDomain& d, const LatticeFunction& F, int base_gamma, int base_gammastar)
{
    const QuadGraph& g = d.graph();
    boundary_cycle(d); // throws NotSimplyConnected
    auto Z = domain_rhombi(d);

    double fmax = 0;
    for (int z : Z) fmax = std::max(fmax, std::abs(F.at(z)));
    double res = 0;
    for (int v : domain_lambda_interior(d)) res = std::max(res, std::abs(dbar_diamond_to_lambda(g, F, v)));
    if (res > 1e-8 * fmax)
        throw NotHolomorphic("max |dbar F| = " + std::to_string(res) + " exceeds 1e-8 * max |F| = " +
                             std::to_string(1e-8 * fmax));

    // adjacency along both diagonals of the domain rhombi
    std::unordered_map<int, std::vector<std::pair<int, int>>> adj; // v -> (neighbour, rhombus)
    for (int z : Z) {
        const auto& r = g.rhombus(z);
        for (int j = 0; j < 4; ++j) adj[r.v[j]].push_back({r.v[(j + 2) % 4], z});
    }
    Primitive out{LatticeFunction(g, Support::Lambda), 0.0};
    for (int base : {base_gamma, base_gammastar}) {
        if (!adj.count(base))
            throw PreconditionViolated("base vertex " + std::to_string(base) + " is not in the domain closure");
        out.H.set(base, 0.0);
        std::queue<int> q;
        q.push(base);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (auto [w, z] : adj[v]) {
                cplx inc = F.at(z) * (g.pos(w) - g.pos(v));
                if (!out.H.has(w)) {
                    out.H.set(w, out.H.at(v) + inc);
                    q.push(w);
                } else {
                    out.closure_defect = std::max(out.closure_defect, std::abs(out.H.at(w) - out.H.at(v) - inc));
                }
            }
        }
    }
    if (g.is_gamma(base_gamma) == g.is_gamma(base_gammastar))
        throw PreconditionViolated("base vertices must be one Gamma and one Gamma* vertex");
    return out;
}

cplx cauchy_reconstruct(const DiscreteDomain& d, const LatticeFunction& F, int z0,
                        const std::function<cplx(int)>& kernel)
{
    if (!kernel) throw KernelUnavailable("no kernel supplied");
    const QuadGraph& g = d.graph();
    auto Z = domain_rhombi(d);
    std::vector<char> inner(g.num_vertices(), 0);
    for (int v : domain_lambda_interior(d)) inner[v] = 1;
    if (!std::binary_search(Z.begin(), Z.end(), z0)) throw ContourNotFound("z0 is outside the domain");
    for (int v : g.rhombus(z0).v)
        if (!inner[v]) throw ContourNotFound("z0 touches the contour");

    // Summation by parts against the kernel leaves only the corners outside the
    // Lambda interior: F(z0) = -1/4 sum mu_{v z} K(v) F(z).
    const auto& W = g.weights();
    cplx s = 0;
    for (int z : Z) {
        const auto& r = g.rhombus(z);
        for (int j = 0; j < 4; ++j) {
            if (inner[r.v[j]]) continue;
            cplx k = kernel(r.v[j]);
            if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
                throw KernelUnavailable("kernel is not finite at vertex " + std::to_string(r.v[j]));
            s += W.edge_mu[z][j] * k * F.at(z);
        }
    }
    return -0.25 * s;
}

} // namespace isoradial
