#pragma once

#include "isoradial/domain.hpp"
#include "isoradial/lattice_function.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace testing_helpers {

using namespace isoradial;

inline LatticeFunction sample(const QuadGraph& g, Support s, const std::function<cplx(cplx)>& f)
{
    LatticeFunction out(g, s);
    if (s == Support::Diamond) {
        for (int z = 0; z < g.num_rhombi(); ++z) out.set(z, f(g.rhombus(z).center));
        return out;
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (s == Support::Gamma && !g.is_gamma(v)) continue;
        if (s == Support::GammaStar && g.is_gamma(v)) continue;
        out.set(v, f(g.pos(v)));
    }
    return out;
}

// least-squares slope of log y against log x
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::shared_ptr<const QuadGraph> shared(QuadGraph g) { return std::make_shared<const QuadGraph>(std::move(g)); }

// seed 0 is the square lattice; the lattice is grown until the region fits
inline std::shared_ptr<const QuadGraph> lattice_for(std::uint64_t seed, double delta, const Region& region, double eta = 0.3)
{
    auto make = [&](int extent) { return seed ? random_isoradial(seed, extent, eta, delta) : square_lattice(delta, extent); };
    double reach = 0;
    if (region.kind == Region::Kind::Disc) reach = std::abs(region.center) + region.radius;
    if (region.kind == Region::Kind::Rect) reach = std::max(region.S, region.T);
    for (cplx p : region.poly) reach = std::max(reach, std::abs(p));
    return fit_lattice(make, region, static_cast<int>(reach / delta) + 2);
}

} // namespace testing_helpers
