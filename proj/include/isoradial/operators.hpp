#pragma once

#include "isoradial/domain.hpp"
#include "isoradial/lattice_function.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <vector>

namespace isoradial {

struct SparseEntry
{
    int row;
    int col;
    cplx value;
};

// Rows and cols map matrix indices to vertex ids.
struct SparseOperator
{
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<SparseEntry> entries;
    std::vector<double> row_scaling;

    Eigen::SparseMatrix<double> real_matrix() const;
};

// Rows are interior vertices, columns interior then boundary vertices.
SparseOperator assemble_laplacian(const DiscreteDomain& d);
// Values at the row vertices.
LatticeFunction laplacian_apply(const QuadGraph& g, const SparseOperator& op, const LatticeFunction& H);
// Pointwise Laplacian at a Gamma or Gamma* vertex with a full star.
cplx laplacian_at(const QuadGraph& g, const std::function<cplx(int)>& H, int v);

double greens_formula_residual(const DiscreteDomain& d, const LatticeFunction& G, const LatticeFunction& H);

// Diamond -> Lambda
cplx dbar_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v);
cplx d_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v);
// Lambda -> Diamond. Functions on Gamma or Gamma* alone are extended by zero.
cplx dbar_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z);
cplx d_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z);

// Whole-function versions; entries are produced wherever the inputs suffice.
LatticeFunction dbar_lambda(const QuadGraph& g, const LatticeFunction& H);
LatticeFunction d_lambda(const QuadGraph& g, const LatticeFunction& H);
LatticeFunction dbar_diamond(const QuadGraph& g, const LatticeFunction& F);
LatticeFunction d_diamond(const QuadGraph& g, const LatticeFunction& F);

// max |Delta H - 4 d dbar H|, |Delta H - 4 dbar d H| over Lambda vertices of the domain closure.
double factorization_check(const DiscreteDomain& d, const LatticeFunction& H);

cplx average_lambda_to_diamond(const QuadGraph& g, const LatticeFunction& H, int z);
cplx average_diamond_to_lambda(const QuadGraph& g, const LatticeFunction& F, int v);
LatticeFunction average_lambda(const QuadGraph& g, const LatticeFunction& H);
LatticeFunction average_diamond(const QuadGraph& g, const LatticeFunction& F);

// Projections onto conj(u1 - u2) R and conj(w1 - w2) R.
LatticeFunction project_black(const QuadGraph& g, const LatticeFunction& F);
LatticeFunction project_white(const QuadGraph& g, const LatticeFunction& F);
// Orthogonal projection of f onto the line xi R.
cplx project(cplx f, cplx xi);

// Sum of G(midpoint) (u_{s+1} - u_s) along a same-colour path.
cplx contour_integral(const QuadGraph& g, const std::vector<int>& path, const LatticeFunction& G);

// Rhombi with an interior endpoint of their Gamma diagonal.
std::vector<int> domain_rhombi(const DiscreteDomain& d);
// Lambda vertices whose whole star lies in domain_rhombi(d).
std::vector<int> domain_lambda_interior(const DiscreteDomain& d);

struct Primitive
{
    LatticeFunction H;
    double closure_defect = 0; // largest mismatch on non-tree edges
};
Primitive primitive(const DiscreteDomain& d, const LatticeFunction& F, int base_gamma, int base_gammastar);

// F(z0) recovered from the values of F on the rhombi touching the contour and the
// kernel K(.; z0) at the contour vertices.
cplx cauchy_reconstruct(const DiscreteDomain& d, const LatticeFunction& F, int z0,
                        const std::function<cplx(int)>& kernel);

} // namespace isoradial
