#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace isoradial {

using cplx = std::complex<double>;

enum class Color : std::uint8_t { Gamma, GammaStar };

// Corners are counter-clockwise with v[0], v[2] in Gamma.
struct Rhombus
{
    std::array<int, 4> v{};
    double theta = 0.0; // half of the angle at the Gamma corners
    cplx center;
};

// Position of a vertex inside one rhombus of its star.
struct StarEntry
{
    int rhombus;
    int slot;
};

struct Weights
{
    // (delta^2/2) sum sin 2theta over the star; mu_Gamma on Gamma, mu_Gamma* on Gamma*.
    std::vector<double> mu_gamma;
    std::vector<double> mu_lambda;
    std::vector<double> mu_diamond;
    // edge_mu[z][j] = mu_{v_j z} = i (v_{j+1} - v_{j-1}); mu_{z v_j} is its negative.
    std::vector<std::array<cplx, 4>> edge_mu;
    // tan(theta) per rhombus: the weight of its Gamma diagonal. The Gamma* diagonal carries cot(theta).
    std::vector<double> tan_weights;
};

class QuadGraph
{
public:
    // Validates geometry; throws InvalidGraph on malformed input.
    QuadGraph(double delta, std::vector<cplx> pos, std::vector<Color> color, std::vector<Rhombus> rhombi);

    double delta() const { return delta_; }
    int num_vertices() const { return static_cast<int>(pos_.size()); }
    int num_rhombi() const { return static_cast<int>(rhombi_.size()); }

    const cplx& pos(int v) const { return pos_[v]; }
    const std::vector<cplx>& positions() const { return pos_; }
    Color color(int v) const { return color_[v]; }
    bool is_gamma(int v) const { return color_[v] == Color::Gamma; }
    const Rhombus& rhombus(int z) const { return rhombi_[z]; }
    const std::vector<Rhombus>& rhombi() const { return rhombi_; }

    // Rhombi around v in counter-clockwise order. For an incomplete star the
    // sequence starts right after the gap.
    const std::vector<StarEntry>& star(int v) const { return star_[v]; }
    bool full_star(int v) const { return full_star_[v]; }

    // Same-color neighbour across the k-th rhombus of star(v).
    int opposite(int v, int k) const;
    // Rhombus side neighbours of v (Lambda edges), unordered.
    const std::vector<int>& lambda_neighbors(int v) const { return lambda_nbrs_[v]; }

    // tan(theta) for a Gamma vertex, cot(theta) for a Gamma* vertex.
    double diag_weight(int v, int k) const;
    // Interior angle of rhombus z at slot j.
    double corner_angle(int z, int j) const;

    // Rhombus whose diagonal joins u and u2, or -1.
    int rhombus_between(int u, int u2) const;
    // Rhombus having the side (v, v2), or -1 (first one found).
    int rhombus_with_side(int v, int v2) const;

    const Weights& weights() const { return weights_; }
    double eta() const { return eta_; }

    int nearest_vertex(cplx p, Color c) const;
    int nearest_rhombus(cplx p) const;

private:
    void validate_geometry() const;
    void build_stars();

    double delta_;
    std::vector<cplx> pos_;
    std::vector<Color> color_;
    std::vector<Rhombus> rhombi_;
    std::vector<std::vector<StarEntry>> star_;
    std::vector<std::uint8_t> full_star_;
    std::vector<std::vector<int>> lambda_nbrs_;
    Weights weights_;
    double eta_ = 0.0;
};

// x_{m,n} = delta (sum_{k<=m} e^{i alpha_k} + sum_{l<=n} e^{i beta_l}); Gamma = even m+n.
QuadGraph build_quadgraph(const std::vector<double>& alpha, const std::vector<double>& beta, double delta,
                          double eta_min = 0.2);

// Same construction with x_{m0,n0} placed at the origin.
QuadGraph build_quadgraph_centered(const std::vector<double>& alpha, const std::vector<double>& beta,
                                   double delta, int m0, int n0, double eta_min = 0.2);

// Square quad-graph on [-extent, extent]^2 in Lambda units; the origin is a Gamma vertex.
QuadGraph square_lattice(double delta, int extent);

// Two-sequence lattice with random directions. Angles depend only on (seed, index),
// so growing the extent keeps the central part unchanged.
QuadGraph random_isoradial(std::uint64_t seed, int extent, double eta, double delta);

Weights compute_weights(const QuadGraph& g);

// min over rhombi of min(2theta, pi - 2theta); throws DegenerateRhombus below eta_min.
double validate_spades(const QuadGraph& g, double eta_min);

} // namespace isoradial
