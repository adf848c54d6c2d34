#pragma once

#include "isoradial/domain.hpp"
#include "isoradial/kernels.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

namespace isoradial {

// Real function on a discrete domain: interior values by interior index, boundary values by pair id.
struct DomainFunction
{
    const DiscreteDomain* domain = nullptr;
    std::vector<double> interior;
    std::vector<double> boundary;

    double at_interior(int v) const;
    // Value of the neighbour across the k-th rhombus of star(u), u interior.
    double across(int u, int k) const;
    // Interior vertices and, for boundary vertices, the value of their first pair.
    LatticeFunction to_lattice() const;
    double max_abs() const;
};

struct SolverConfig
{
    enum class Method : std::uint8_t { Auto, Direct, ConjugateGradient };
    Method method = Method::Auto;
    double tolerance = 1e-12;
    int max_iterations = 0; // 0 means 10 * unknowns
    int direct_limit = 20000;
};

// Edge-symmetric form mu * (-Laplacian) restricted to interior rows; reusable across right-hand sides.
class DirichletSystem
{
public:
    explicit DirichletSystem(const DiscreteDomain& d, SolverConfig cfg = {});

    const DiscreteDomain& domain() const { return *d_; }
    const Eigen::SparseMatrix<double>& matrix() const { return A_; }
    bool direct() const { return direct_; }

    // Harmonic extension of per-pair data; throws SolverDiverged.
    DomainFunction solve(const std::vector<double>& f) const;
    // x with A x = e_u; then omega(u; {p}) = tan(theta_p) x(p.a_int).
    Eigen::VectorXd adjoint(int u) const;
    // Boundary weight tan(theta) of every pair.
    const std::vector<double>& pair_weights() const { return t_; }

private:
    Eigen::VectorXd linear_solve(const Eigen::VectorXd& b) const;

    const DiscreteDomain* d_;
    SolverConfig cfg_;
    Eigen::SparseMatrix<double> A_;
    std::vector<double> t_;
    bool direct_ = true;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

DomainFunction solve_dirichlet(const DiscreteDomain& d, const std::vector<double>& f, SolverConfig cfg = {});

// Largest |mu Laplacian H| / sum tan(theta) over interior vertices.
double harmonic_residual(const DomainFunction& H);

double harmonic_measure(const DirichletSystem& sys, int u, const std::vector<int>& pairs);
double harmonic_measure(const DiscreteDomain& d, int u, const std::vector<int>& pairs);
// omega(u; {p}) for every pair p, by one adjoint solve.
std::vector<double> harmonic_measure_all(const DirichletSystem& sys, int u);

// Zero on the boundary, mu(v0) Laplacian = 1 at v0, harmonic elsewhere; computed by a point-source solve.
DomainFunction green_domain(const DirichletSystem& sys, int v0);
DomainFunction green_domain(const DiscreteDomain& d, int v0);
// Harmonic extension of the free Green's function G(.; v0) from the boundary.
DomainFunction green_star(const DirichletSystem& sys, int v0, const KernelCache& kernels);

// omega(.; {a}) / omega(v; {a}); throws IllConditioned when omega(v; {a}) < 1e-14.
DomainFunction poisson_interior(const DirichletSystem& sys, int v, int a_pair);

// Discrete analogue of Im u on the half-plane, truncated to the box (-S, S) x (0, T).
// Pairs with Im a <= 0 carry 0, all others Im a.
struct HalfPlaneIm
{
    std::shared_ptr<const DiscreteDomain> box;
    DomainFunction f;
    double value(int u) const; // u interior to the box
};
HalfPlaneIm gIm_approx(std::shared_ptr<const QuadGraph> g, double S, double T);

// Pairs of the lower boundary: |Re a| < S and Im a <= 0.
std::vector<int> lower_boundary(const DiscreteDomain& d, double S);
// Layout check for the boundary-normalized kernel; throws LayoutViolation with a reason.
void check_layout(const DiscreteDomain& d, double S, double T, int a_pair, int o_pair);
// omega(.; {a}) gIm(o_int) / omega(o_int; {a}); gIm from a box three times the layout rectangle.
DomainFunction poisson_boundary(const DirichletSystem& sys, int a_pair, int o_pair, double S, double T);

struct HarnackConstants
{
    double C1 = 0;
    double C2 = 0;
};
// Disc domains only; u0 is the Gamma vertex nearest the centre, r defaults to R/2.
HarnackConstants harnack_check(const DomainFunction& H, double r = -1);
double mean_value_check(const DomainFunction& H);

} // namespace isoradial
