#pragma once

#include "isoradial/quadgraph.hpp"

#include <cstdint>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

namespace isoradial {

// Radii are in units of 1/delta; quadrature is adaptive Gauss-Kronrod.
struct ContourSpec
{
    double R_outer = 40.0;
    double r_inner = 0.04;
    int max_depth = 18;
    double tol = 1e-13; // relative to the L1 norm of each piece

    static ContourSpec for_delta(double delta);
};

// Lambda path v_0 ... v_n with the direction used for admissibility.
struct ExponentialPath
{
    std::vector<int> vertices;
    cplx direction;

    std::vector<cplx> steps(const QuadGraph& g) const;
};

// Admissible path from `from` to `to`; steps point within pi/2 of `direction`
// either singly or in pairs across a rhombus. variant != 0 perturbs tie-breaks to
// produce a different admissible path.
ExponentialPath choose_path(const QuadGraph& g, int from, int to, cplx direction, std::uint64_t variant = 0);
ExponentialPath choose_path(const QuadGraph& g, int from, int to);
bool certify_path(const QuadGraph& g, const ExponentialPath& p);

// prod (1 + lambda n/2) / prod (1 - lambda d/2) after cancelling coincident factors.
struct ExpFactors
{
    std::vector<cplx> num;
    std::vector<cplx> den;

    static ExpFactors from_steps(const std::vector<cplx>& steps);
    void cancel(double tol);
    cplx eval(cplx lambda) const;
};

cplx discrete_exponential(const QuadGraph& g, cplx lambda, int u, int u0);
cplx discrete_exponential(const QuadGraph& g, cplx lambda, const ExponentialPath& path);

// Contour integral without the normalizing constant; zero at u = u0.
double free_green_tilde(const QuadGraph& g, int u, int u0, const ContourSpec& spec);
double free_green(const QuadGraph& g, int u, int u0, const ContourSpec& spec);
double green_normalization(double delta);

// K(v; z0) by integration along the ray arg lambda = arg conj(v - z0) + pi.
cplx cauchy_kernel(const QuadGraph& g, int v, int z0, const ContourSpec& spec);
// Unit tau with conj(tau) giving the far-field projection line for v.
cplx cauchy_far_field_tau(const QuadGraph& g, int v, int z0);

double continuous_green_ref(cplx u, cplx u0);
cplx continuous_cauchy_ref(cplx v, cplx z0, cplx tau);

// Memoized kernel values. Safe for concurrent use; repeated inserts store the same value.
class KernelCache
{
public:
    explicit KernelCache(const QuadGraph& g, ContourSpec spec);

    double green(int u, int u0) const;
    cplx cauchy(int v, int z0) const;
    const QuadGraph& graph() const { return g_; }

private:
    const QuadGraph& g_;
    ContourSpec spec_;
    mutable std::shared_mutex mu_;
    mutable std::unordered_map<std::uint64_t, double> green_;
    mutable std::unordered_map<std::uint64_t, cplx> cauchy_;
};

} // namespace isoradial
