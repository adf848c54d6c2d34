#include "isoradial/quadgraph.hpp"

#include "isoradial/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace isoradial {

namespace {

constexpr double kGeomTol = 1e-10;

double interior_angle(const cplx& at, const cplx& from, const cplx& to)
{
    // counter-clockwise angle from (from - at) to (to - at), in (0, 2pi)
    double a = std::arg((to - at) / (from - at));
    if (a <= 0) a += 2 * std::numbers::pi;
    return a;
}

// e^{i phi} with exact zeros/ones for axis-aligned directions.
cplx unit(double phi)
{
    double c = std::cos(phi), s = std::sin(phi);
    auto snap = [](double x) {
        if (std::abs(x) < 1e-15) return 0.0;
        if (std::abs(x - 1) < 1e-15) return 1.0;
        if (std::abs(x + 1) < 1e-15) return -1.0;
        return x;
    };
    return {snap(c), snap(s)};
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double hash_uniform(std::uint64_t seed, std::uint64_t stream, std::int64_t index)
{
    std::uint64_t h = splitmix64(seed ^ splitmix64(stream ^ splitmix64(static_cast<std::uint64_t>(index))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace

QuadGraph::QuadGraph(double delta, std::vector<cplx> pos, std::vector<Color> color, std::vector<Rhombus> rhombi)
    : delta_(delta), pos_(std::move(pos)), color_(std::move(color)), rhombi_(std::move(rhombi))
{
    if (!(delta_ > 0)) throw InvalidGraph("delta must be positive");
    if (pos_.size() != color_.size()) throw InvalidGraph("color list does not match vertex list");
    if (pos_.empty() || rhombi_.empty()) throw EmptyInput("graph has no vertices or rhombi");

    for (auto& r : rhombi_) {
        for (int id : r.v)
            if (id < 0 || id >= num_vertices()) throw InvalidGraph("rhombus references unknown vertex");
        const cplx& a = pos_[r.v[0]];
        r.center = 0.5 * (a + pos_[r.v[2]]);
        r.theta = 0.5 * interior_angle(a, pos_[r.v[1]], pos_[r.v[3]]);
    }
    validate_geometry();
    build_stars();
    weights_ = compute_weights(*this);

    eta_ = std::numeric_limits<double>::infinity();
    for (const auto& r : rhombi_)
        eta_ = std::min(eta_, std::min(2 * r.theta, std::numbers::pi - 2 * r.theta));
}

void QuadGraph::validate_geometry() const
{
    for (int z = 0; z < num_rhombi(); ++z) {
        const auto& r = rhombi_[z];
        const std::string where = " (rhombus " + std::to_string(z) + ")";
        for (int j = 0; j < 4; ++j) {
            bool want_gamma = (j % 2 == 0);
            if ((color_[r.v[j]] == Color::Gamma) != want_gamma)
                throw InvalidGraph("corners must alternate Gamma/Gamma* starting with Gamma" + where);
            double side = std::abs(pos_[r.v[(j + 1) % 4]] - pos_[r.v[j]]);
            if (std::abs(side - delta_) > kGeomTol * delta_) throw InvalidGraph("side length differs from delta" + where);
        }
        cplx d1 = pos_[r.v[2]] - pos_[r.v[0]];
        cplx d2 = pos_[r.v[3]] - pos_[r.v[1]];
        if (std::abs((d1 * std::conj(d2)).real()) > kGeomTol * delta_ * delta_)
            throw InvalidGraph("diagonals are not perpendicular" + where);
        cplx mid2 = 0.5 * (pos_[r.v[1]] + pos_[r.v[3]]);
        if (std::abs(mid2 - r.center) > kGeomTol * delta_) throw InvalidGraph("diagonal midpoints differ" + where);
        // counter-clockwise: d2 is d1 rotated by +pi/2 up to a positive factor
        if ((d2 / d1).imag() <= 0) throw InvalidGraph("corners are not counter-clockwise" + where);
    }
}

void QuadGraph::build_stars()
{
    const int n = num_vertices();
    star_.assign(n, {});
    full_star_.assign(n, 0);
    lambda_nbrs_.assign(n, {});

    for (int z = 0; z < num_rhombi(); ++z)
        for (int j = 0; j < 4; ++j) {
            int v = rhombi_[z].v[j];
            star_[v].push_back({z, j});
            int nb = rhombi_[z].v[(j + 1) % 4];
            lambda_nbrs_[v].push_back(nb);
            lambda_nbrs_[nb].push_back(v);
        }

    for (int v = 0; v < n; ++v) {
        auto& nb = lambda_nbrs_[v];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());

        auto& st = star_[v];
        if (st.empty()) continue;
        std::sort(st.begin(), st.end(), [&](const StarEntry& a, const StarEntry& b) {
            return std::arg(rhombi_[a.rhombus].center - pos_[v]) < std::arg(rhombi_[b.rhombus].center - pos_[v]);
        });

        const int k = static_cast<int>(st.size());
        // entry i links to i+1 when they share the side towards v_{j-1} of entry i
        auto linked = [&](int i) {
            const auto& a = st[i];
            const auto& b = st[(i + 1) % k];
            return rhombi_[a.rhombus].v[(a.slot + 3) % 4] == rhombi_[b.rhombus].v[(b.slot + 1) % 4];
        };
        double angle_sum = 0;
        for (const auto& e : st) angle_sum += corner_angle(e.rhombus, e.slot);

        int gap = -1;
        for (int i = 0; i < k; ++i)
            if (!linked(i)) {
                gap = i;
                break;
            }
        if (gap < 0 && k >= 3 && std::abs(angle_sum - 2 * std::numbers::pi) < 1e-9) {
            full_star_[v] = 1;
        } else if (gap >= 0) {
            std::rotate(st.begin(), st.begin() + (gap + 1) % k, st.end());
        }
    }
}

int QuadGraph::opposite(int v, int k) const
{
    const auto& e = star_[v][k];
    return rhombi_[e.rhombus].v[(e.slot + 2) % 4];
}

double QuadGraph::diag_weight(int v, int k) const
{
    double t = weights_.tan_weights[star_[v][k].rhombus];
    return color_[v] == Color::Gamma ? t : 1.0 / t;
}

double QuadGraph::corner_angle(int z, int j) const
{
    const auto& r = rhombi_[z];
    return (j % 2 == 0) ? 2 * r.theta : std::numbers::pi - 2 * r.theta;
}

int QuadGraph::rhombus_between(int u, int u2) const
{
    for (int k = 0; k < static_cast<int>(star_[u].size()); ++k)
        if (opposite(u, k) == u2) return star_[u][k].rhombus;
    return -1;
}

int QuadGraph::rhombus_with_side(int v, int v2) const
{
    for (const auto& e : star_[v]) {
        const auto& r = rhombi_[e.rhombus];
        if (r.v[(e.slot + 1) % 4] == v2 || r.v[(e.slot + 3) % 4] == v2) return e.rhombus;
    }
    return -1;
}

int QuadGraph::nearest_vertex(cplx p, Color c) const
{
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int v = 0; v < num_vertices(); ++v) {
        if (color_[v] != c) continue;
        double d = std::norm(pos_[v] - p);
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

int QuadGraph::nearest_rhombus(cplx p) const
{
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int z = 0; z < num_rhombi(); ++z) {
        double d = std::norm(rhombi_[z].center - p);
        if (d < bd) {
            bd = d;
            best = z;
        }
    }
    return best;
}

Weights compute_weights(const QuadGraph& g)
{
    Weights w;
    const int nz = g.num_rhombi(), nv = g.num_vertices();
    const double d2 = g.delta() * g.delta();
    w.mu_diamond.resize(nz);
    w.tan_weights.resize(nz);
    w.edge_mu.resize(nz);
    for (int z = 0; z < nz; ++z) {
        const auto& r = g.rhombus(z);
        w.mu_diamond[z] = d2 * std::sin(2 * r.theta);
        w.tan_weights[z] = std::tan(r.theta);
        for (int j = 0; j < 4; ++j)
            w.edge_mu[z][j] = cplx(0, 1) * (g.pos(r.v[(j + 1) % 4]) - g.pos(r.v[(j + 3) % 4]));
    }
    w.mu_gamma.assign(nv, 0.0);
    w.mu_lambda.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        double s = 0;
        for (const auto& e : g.star(v)) s += w.mu_diamond[e.rhombus];
        w.mu_lambda[v] = 0.25 * s;
        w.mu_gamma[v] = 0.5 * s;
    }
    return w;
}

double validate_spades(const QuadGraph& g, double eta_min)
{
    double achieved = std::numeric_limits<double>::infinity();
    for (int z = 0; z < g.num_rhombi(); ++z) {
        double t2 = 2 * g.rhombus(z).theta;
        double e = std::min(t2, std::numbers::pi - t2);
        if (e < eta_min)
            throw DegenerateRhombus("rhombus " + std::to_string(z) + " has min(2theta, pi-2theta) = " +
                                    std::to_string(e) + " < " + std::to_string(eta_min));
        achieved = std::min(achieved, e);
    }
    return achieved;
}

QuadGraph build_quadgraph_centered(const std::vector<double>& alpha, const std::vector<double>& beta, double delta,
                                   int m0, int n0, double eta_min)
{
    if (alpha.empty() || beta.empty()) throw EmptyInput("angle sequences must be non-empty");
    if (!(delta > 0)) throw InvalidGraph("delta must be positive");
    const int M = static_cast<int>(alpha.size()), N = static_cast<int>(beta.size());

    // face (k,l) has angle beta_l - alpha_k at x_{k,l}; it must lie in [eta, pi - eta]
    for (int k = 0; k < M; ++k)
        for (int l = 0; l < N; ++l) {
            double phi = std::remainder(beta[l] - alpha[k], 2 * std::numbers::pi);
            if (phi < eta_min || phi > std::numbers::pi - eta_min)
                throw DegenerateRhombus("face (" + std::to_string(k) + "," + std::to_string(l) +
                                        ") has angle " + std::to_string(phi) + " outside [eta, pi-eta]");
        }

    // partial sums measured from index m0 / n0
    std::vector<cplx> ax(M + 1), by(N + 1);
    for (int m = m0 + 1; m <= M; ++m) ax[m] = ax[m - 1] + unit(alpha[m - 1]);
    for (int m = m0 - 1; m >= 0; --m) ax[m] = ax[m + 1] - unit(alpha[m]);
    for (int n = n0 + 1; n <= N; ++n) by[n] = by[n - 1] + unit(beta[n - 1]);
    for (int n = n0 - 1; n >= 0; --n) by[n] = by[n + 1] - unit(beta[n]);

    auto id = [N](int m, int n) { return m * (N + 1) + n; };
    std::vector<cplx> pos((M + 1) * (N + 1));
    std::vector<Color> color(pos.size());
    for (int m = 0; m <= M; ++m)
        for (int n = 0; n <= N; ++n) {
            pos[id(m, n)] = delta * (ax[m] + by[n]);
            color[id(m, n)] = ((m + n) % 2 == 0) ? Color::Gamma : Color::GammaStar;
        }

    std::vector<Rhombus> rh;
    rh.reserve(static_cast<std::size_t>(M) * N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            Rhombus r;
            int p00 = id(m, n), p10 = id(m + 1, n), p11 = id(m + 1, n + 1), p01 = id(m, n + 1);
            if ((m + n) % 2 == 0)
                r.v = {p00, p10, p11, p01};
            else
                r.v = {p10, p11, p01, p00};
            rh.push_back(r);
        }

    QuadGraph g(delta, std::move(pos), std::move(color), std::move(rh));
    validate_spades(g, eta_min);
    return g;
}

QuadGraph build_quadgraph(const std::vector<double>& alpha, const std::vector<double>& beta, double delta,
                          double eta_min)
{
    return build_quadgraph_centered(alpha, beta, delta, 0, 0, eta_min);
}

QuadGraph square_lattice(double delta, int extent)
{
    if (extent < 2) throw EmptyInput("square_lattice needs extent >= 2");
    std::vector<double> alpha(2 * extent, 0.0), beta(2 * extent, std::numbers::pi / 2);
    return build_quadgraph_centered(alpha, beta, delta, extent, extent, 0.2);
}

QuadGraph random_isoradial(std::uint64_t seed, int extent, double eta, double delta)
{
    if (!(eta > 0 && eta < std::numbers::pi / 2)) throw PreconditionViolated("eta must lie in (0, pi/2)");
    if (extent < 2) throw EmptyInput("random_isoradial needs extent >= 2");
    // beta - alpha stays within pi/2 +- 2s = [eta, pi - eta]
    const double s = 0.5 * (std::numbers::pi / 2 - eta);
    std::vector<double> alpha(2 * extent), beta(2 * extent);
    for (int k = 0; k < 2 * extent; ++k) {
        alpha[k] = s * (2 * hash_uniform(seed, 1, k - extent) - 1);
        beta[k] = std::numbers::pi / 2 + s * (2 * hash_uniform(seed, 2, k - extent) - 1);
    }
    return build_quadgraph_centered(alpha, beta, delta, extent, extent, eta * (1 - 1e-12));
}

} // namespace isoradial
