#include <doctest.h>

#include "isoradial/domain.hpp"
#include "isoradial/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace isoradial;

namespace {

std::shared_ptr<const QuadGraph> square(double delta, int extent)
{
    return std::make_shared<const QuadGraph>(square_lattice(delta, extent));
}

// first moment of the face polygon F(w) (corners are the Gamma neighbours of w)
cplx face_moment_x(const QuadGraph& g, int w, double& area)
{
    std::vector<cplx> poly;
    for (const auto& e : g.star(w)) poly.push_back(g.pos(g.rhombus(e.rhombus).v[(e.slot + 1) % 4]));
    double a = 0, mx = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        cplx p = poly[i], q = poly[(i + 1) % poly.size()];
        double cr = p.real() * q.imag() - q.real() * p.imag();
        a += cr;
        mx += (p.real() + q.real()) * cr;
    }
    area = 0.5 * a;
    return mx / 6.0;
}

} // namespace

TEST_CASE("single vertex disc")
{
    auto g = square(1.0, 4);
    int u0 = g->nearest_vertex(0, Color::Gamma);
    auto d = discretize(g, Region::disc(g->pos(u0), 0.9 * std::sqrt(2.0)));
    REQUIRE(d.num_interior() == 1);
    CHECK(d.interior()[0] == u0);
    REQUIRE(d.num_pairs() == 4);
    std::set<int> nb;
    for (const auto& p : d.boundary()) {
        nb.insert(p.a);
        CHECK(std::abs(g->pos(p.a) - g->pos(u0)) == doctest::Approx(std::sqrt(2.0)));
        // by hand: two quarter triangles of the shared rhombus plus one from each side rhombus
        CHECK(p.mu == doctest::Approx(1.0));
    }
    CHECK(nb.size() == 4);
    CHECK(polygon_domain_area(d) == doctest::Approx(8.0));
}

TEST_CASE("disc interior and boundary positions")
{
    auto g = square(1.0, 14);
    auto d = discretize(g, Region::disc(0, 10.0));
    for (int u : d.interior()) CHECK(std::abs(g->pos(u)) < 10.0);
    for (const auto& p : d.boundary()) {
        CHECK(std::abs(g->pos(p.a)) >= 10.0);
        CHECK(d.is_interior(p.a_int));
        CHECK(g->rhombus_between(p.a_int, p.a) == p.rhombus);
    }
    CHECK(d.num_pairs() >= 3);
}

TEST_CASE("region exceeding the lattice")
{
    auto g = square(1.0, 4);
    CHECK_THROWS_AS(discretize(g, Region::disc(0, 20.0)), RegionExceedsLattice);
    CHECK_THROWS_AS(discretize(g, Region::disc(100.0, 1.0)), EmptyDomain);
}

TEST_CASE("rectangle split")
{
    auto g = fit_lattice([](int e) { return square_lattice(0.1, e); }, Region::rect(2, 1), 10);
    auto d = discretize(g, Region::rect(2, 1));
    auto sp = boundary_split_rect(d);
    std::set<int> all(sp.L.begin(), sp.L.end());
    all.insert(sp.U.begin(), sp.U.end());
    all.insert(sp.V.begin(), sp.V.end());
    CHECK(static_cast<int>(all.size()) == d.num_pairs());
    // corners: pairs lying in both a horizontal and the vertical part
    std::set<int> Vs(sp.V.begin(), sp.V.end());
    int corners = 0;
    for (int p : sp.L) corners += Vs.count(p);
    for (int p : sp.U) corners += Vs.count(p);
    CHECK(std::abs(static_cast<int>(sp.L.size()) - static_cast<int>(sp.U.size())) <= corners);
    for (int p : sp.L) CHECK(g->pos(d.boundary()[p].a).imag() <= 1e-12);

    auto disc = discretize(g, Region::disc(cplx(0, 0.5), 0.3));
    CHECK_THROWS_AS(boundary_split_rect(disc), NotARectangle);
    CHECK_THROWS_AS(discretize(g, Region::rect(2, 0.05)), EmptyDomain);
}

TEST_CASE("boundary cycle and arcs")
{
    auto g = std::make_shared<const QuadGraph>(random_isoradial(3, 16, 0.3, 1.0));
    auto d = discretize(g, Region::disc(0, 8.0));
    auto cyc = boundary_cycle(d);
    CHECK(static_cast<int>(cyc.size()) == d.num_pairs());
    // counter-clockwise: positive signed area of the a-polyline
    double area = 0;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        cplx p = g->pos(d.boundary()[cyc[i]].a), q = g->pos(d.boundary()[cyc[(i + 1) % cyc.size()]].a);
        area += p.real() * q.imag() - q.real() * p.imag();
    }
    CHECK(area > 0);

    CHECK(boundary_arc(d, 5, 5).size() == 1);
    int pred = cyc[(std::find(cyc.begin(), cyc.end(), 5) - cyc.begin() + cyc.size() - 1) % cyc.size()];
    auto full = boundary_arc(d, 5, pred);
    CHECK(std::set<int>(full.begin(), full.end()).size() == cyc.size());

    // opposite points
    int a = 0, b = 0;
    cplx pa = g->pos(d.boundary()[0].a);
    double far = 0;
    for (int p = 0; p < d.num_pairs(); ++p)
        if (std::abs(g->pos(d.boundary()[p].a) - pa) > far) {
            far = std::abs(g->pos(d.boundary()[p].a) - pa);
            b = p;
        }
    auto ab = boundary_arc(d, a, b), ba = boundary_arc(d, b, a);
    CHECK(ab.size() + ba.size() == cyc.size() + 2);
    CHECK_THROWS_AS(boundary_arc(d, 0, d.num_pairs()), NotOnBoundary);
}

TEST_CASE("annulus is not simply connected")
{
    auto g = square(1.0, 10);
    std::vector<int> ring;
    for (int v = 0; v < g->num_vertices(); ++v) {
        double r = std::abs(g->pos(v));
        if (g->is_gamma(v) && r > 2.5 && r < 5.5) ring.push_back(v);
    }
    DiscreteDomain d(g, ring);
    CHECK_THROWS_AS(boundary_cycle(d), NotSimplyConnected);
}

TEST_CASE("discrete integral")
{
    for (double delta : {0.1, 0.05}) {
        auto g = fit_lattice([delta](int e) { return random_isoradial(11, e, 0.3, delta); }, Region::disc(0.1, 1.0),
                             static_cast<int>(1.3 / delta));
        auto d = discretize(g, Region::disc(0.1, 1.0));
        LatticeFunction one(*g, Support::Gamma), zero(*g, Support::Gamma), re(*g, Support::Gamma);
        for (int v = 0; v < g->num_vertices(); ++v)
            if (g->is_gamma(v)) {
                one.set(v, 1.0);
                zero.set(v, 0.0);
                re.set(v, g->pos(v).real());
            }
        // exact integrals over the polygonal domain from its faces
        std::vector<char> face(g->num_vertices(), 0);
        for (int u : d.interior())
            for (int k = 0; k < static_cast<int>(g->star(u).size()); ++k) {
                const auto& e = g->star(u)[k];
                face[g->rhombus(e.rhombus).v[(e.slot + 1) % 4]] = 1;
            }
        double area = 0, mx = 0;
        for (int w = 0; w < g->num_vertices(); ++w)
            if (face[w]) {
                double a;
                mx += face_moment_x(*g, w, a).real();
                area += a;
            }
        CHECK(polygon_domain_area(d) == doctest::Approx(area).epsilon(1e-12));
        double I1 = discrete_integral(d, one).real();
        CHECK(I1 <= area * (1 + 1e-12));
        CHECK(area - I1 <= 5 * delta * area);
        CHECK(std::abs(discrete_integral(d, re).real() - mx) <= 5 * delta * area);
        CHECK(discrete_integral(d, zero) == cplx(0, 0));
    }
    auto g = square(1.0, 4);
    auto d = discretize(g, Region::disc(0, 2.0));
    CHECK_THROWS_AS(discrete_integral(d, LatticeFunction(*g, Support::Gamma)), MissingValues);
}

TEST_CASE("discretize is monotone")
{
    auto g = std::make_shared<const QuadGraph>(random_isoradial(4, 14, 0.3, 1.0));
    std::vector<int> prev;
    for (double R : {3.0, 5.0, 7.0, 9.0}) {
        auto d = discretize(g, Region::disc(0.2, R));
        CHECK(std::includes(d.interior().begin(), d.interior().end(), prev.begin(), prev.end()));
        prev = d.interior();
    }
}
