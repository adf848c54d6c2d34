#pragma once

#include "isoradial/lattice_function.hpp"
#include "isoradial/quadgraph.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace isoradial {

// Continuous region; points on the region boundary count as outside.
struct Region
{
    enum class Kind : std::uint8_t { Disc, Rect, Polygon };

    Kind kind = Kind::Disc;
    cplx center;            // disc
    double radius = 0;      // disc
    double S = 0, T = 0;    // rect (-S, S) x (0, T)
    std::vector<cplx> poly; // polygon, simple

    static Region disc(cplx c, double r);
    static Region rect(double S, double T);
    static Region polygon(std::vector<cplx> pts);

    bool contains(cplx p) const;
    std::string tag() const;
};

// (a; a_int): a outside, a_int interior, joined by the Gamma diagonal of `rhombus`.
struct BoundaryPair
{
    int a = -1;
    int a_int = -1;
    int rhombus = -1;
    int slot = -1; // index of the rhombus in star(a_int)
    double mu = 0; // share of the area of W(a) inside the polygonal domain
};

class DiscreteDomain
{
public:
    DiscreteDomain(std::shared_ptr<const QuadGraph> g, std::vector<int> interior, std::optional<Region> region = {});

    const QuadGraph& graph() const { return *graph_; }
    std::shared_ptr<const QuadGraph> graph_ptr() const { return graph_; }
    const std::vector<int>& interior() const { return interior_; }
    int num_interior() const { return static_cast<int>(interior_.size()); }
    bool is_interior(int v) const { return index_[v] >= 0; }
    // Position of v in interior(), or -1.
    int interior_index(int v) const { return index_[v]; }

    const std::vector<BoundaryPair>& boundary() const { return boundary_; }
    int num_pairs() const { return static_cast<int>(boundary_.size()); }
    // Pair id for the k-th rhombus of star(a_int), or -1 when that neighbour is interior.
    int pair_at(int a_int, int k) const;

    const std::optional<Region>& region() const { return region_; }

private:
    std::shared_ptr<const QuadGraph> graph_;
    std::vector<int> interior_;
    std::vector<int> index_;
    std::vector<BoundaryPair> boundary_;
    std::vector<std::vector<int>> pair_of_slot_; // per interior index
    std::optional<Region> region_;
};

// Largest connected component of Gamma vertices strictly inside the region.
DiscreteDomain discretize(std::shared_ptr<const QuadGraph> g, const Region& region);

// Grows the lattice produced by make(extent) until the region fits.
std::shared_ptr<const QuadGraph> fit_lattice(const std::function<QuadGraph(int)>& make, const Region& region,
                                             int start_extent);

struct RectSplit
{
    std::vector<int> L, U, V;
};
RectSplit boundary_split_rect(const DiscreteDomain& d);

// Pair ids around the boundary, counter-clockwise, starting at pair 0.
std::vector<int> boundary_cycle(const DiscreteDomain& d);
// Counter-clockwise pairs from a to b inclusive.
std::vector<int> boundary_arc(const DiscreteDomain& d, int a, int b);

// Sum over interior of phi mu_Gamma plus boundary phi(a) mu(a).
cplx discrete_integral(const DiscreteDomain& d, const LatticeFunction& phi);
// Exact area of the polygonal domain (union of faces touching the interior).
double polygon_domain_area(const DiscreteDomain& d);

} // namespace isoradial
