#include "isoradial/domain.hpp"

#include "isoradial/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace isoradial {

namespace {

double seg_dist(cplx p, cplx a, cplx b)
{
    cplx ab = b - a;
    double t = std::norm(ab) > 0 ? std::clamp(((p - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0) : 0.0;
    return std::abs(p - (a + t * ab));
}

} // namespace

Region Region::disc(cplx c, double r)
{
    if (!(r > 0)) throw PreconditionViolated("disc radius must be positive");
    Region g;
    g.kind = Kind::Disc;
    g.center = c;
    g.radius = r;
    return g;
}

Region Region::rect(double S, double T)
{
    if (!(S > 0 && T > 0)) throw PreconditionViolated("rectangle sides must be positive");
    Region g;
    g.kind = Kind::Rect;
    g.S = S;
    g.T = T;
    return g;
}

Region Region::polygon(std::vector<cplx> pts)
{
    if (pts.size() < 3) throw PreconditionViolated("polygon needs at least 3 vertices");
    Region g;
    g.kind = Kind::Polygon;
    g.poly = std::move(pts);
    return g;
}

bool Region::contains(cplx p) const
{
    switch (kind) {
    case Kind::Disc: return std::abs(p - center) < radius;
    case Kind::Rect: return std::abs(p.real()) < S && p.imag() > 0 && p.imag() < T;
    case Kind::Polygon: {
        double scale = 0;
        for (const auto& q : poly) scale = std::max(scale, std::abs(q));
        bool inside = false;
        const std::size_t n = poly.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const cplx &a = poly[i], &b = poly[j];
            if (seg_dist(p, a, b) <= 1e-12 * std::max(scale, 1.0)) return false;
            if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
                double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
                if (p.real() < x) inside = !inside;
            }
        }
        return inside;
    }
    }
    return false;
}

std::string Region::tag() const
{
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::Disc: os << "disc:" << center.real() << "," << center.imag() << "," << radius; break;
    case Kind::Rect: os << "rect:" << S << "," << T; break;
    case Kind::Polygon: os << "poly:" << poly.size(); break;
    }
    return os.str();
}

DiscreteDomain::DiscreteDomain(std::shared_ptr<const QuadGraph> g, std::vector<int> interior,
                               std::optional<Region> region)
    : graph_(std::move(g)), interior_(std::move(interior)), region_(std::move(region))
{
    const QuadGraph& G = *graph_;
    if (interior_.empty()) throw EmptyDomain("no interior vertices");
    std::sort(interior_.begin(), interior_.end());
    interior_.erase(std::unique(interior_.begin(), interior_.end()), interior_.end());
    index_.assign(G.num_vertices(), -1);
    for (int i = 0; i < num_interior(); ++i) {
        int u = interior_[i];
        if (u < 0 || u >= G.num_vertices() || !G.is_gamma(u))
            throw PreconditionViolated("interior id " + std::to_string(u) + " is not a Gamma vertex");
        if (!G.full_star(u))
            throw RegionExceedsLattice("interior vertex " + std::to_string(u) + " lacks a full star");
        index_[u] = i;
    }

    // connectivity through Gamma edges between interior vertices
    std::vector<char> seen(num_interior(), 0);
    std::queue<int> q;
    q.push(interior_[0]);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int k = 0; k < static_cast<int>(G.star(u).size()); ++k) {
            int w = index_[G.opposite(u, k)];
            if (w >= 0 && !seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(interior_[w]);
            }
        }
    }
    if (reached != num_interior()) throw PreconditionViolated("interior vertices are not connected");

    pair_of_slot_.resize(num_interior());
    for (int i = 0; i < num_interior(); ++i) {
        int u = interior_[i];
        const int deg = static_cast<int>(G.star(u).size());
        pair_of_slot_[i].assign(deg, -1);
        for (int k = 0; k < deg; ++k) {
            int a = G.opposite(u, k);
            if (index_[a] >= 0) continue;
            pair_of_slot_[i][k] = num_pairs();
            boundary_.push_back({a, u, G.star(u)[k].rhombus, k, 0.0});
        }
    }

    // Area of W(a) inside the polygonal domain, via the quarter triangles (a, w, z)
    // of the rhombi around a. A triangle belongs to the domain when the face F(w) touches
    // the interior. Neighbouring triangles are joined across a-w always and across a-z
    // only when the Gamma edge through z ends at an interior vertex.
    auto face_in = [&](int w) {
        for (const auto& e : G.star(w)) {
            const auto& r = G.rhombus(e.rhombus);
            if (index_[r.v[(e.slot + 1) % 4]] >= 0 || index_[r.v[(e.slot + 3) % 4]] >= 0) return true;
        }
        return false;
    };
    const auto& W = G.weights();
    std::vector<int> pairs_seen(G.num_vertices(), 0);
    for (const auto& p : boundary_) {
        if (pairs_seen[p.a]++) continue;
        const auto& st = G.star(p.a);
        const int k = static_cast<int>(st.size());
        const int nt = 2 * k;
        // triangle 2i: side towards v_{j+1}; 2i+1: side towards v_{j-1}
        std::vector<char> in(nt);
        std::vector<double> area(nt);
        std::vector<int> rh(nt);
        for (int i = 0; i < k; ++i) {
            const auto& r = G.rhombus(st[i].rhombus);
            int j = st[i].slot;
            in[2 * i] = face_in(r.v[(j + 1) % 4]);
            in[2 * i + 1] = face_in(r.v[(j + 3) % 4]);
            area[2 * i] = area[2 * i + 1] = 0.25 * W.mu_diamond[st[i].rhombus];
            rh[2 * i] = rh[2 * i + 1] = st[i].rhombus;
        }
        auto joined = [&](int t) { // t and t+1 (cyclic)
            int t1 = (t + 1) % nt;
            if (!in[t] || !in[t1]) return false;
            if (t % 2 == 0) return index_[G.opposite(p.a, t / 2)] >= 0;
            return G.full_star(p.a) || t1 != 0;
        };
        // label runs of joined triangles
        std::vector<int> comp(nt, -1);
        int ncomp = 0;
        for (int t = 0; t < nt; ++t) {
            if (!in[t] || comp[t] >= 0) continue;
            int c = ncomp++;
            std::queue<int> tq;
            tq.push(t);
            comp[t] = c;
            while (!tq.empty()) {
                int x = tq.front();
                tq.pop();
                int nx[2] = {(x + 1) % nt, (x + nt - 1) % nt};
                bool link[2] = {joined(x), joined((x + nt - 1) % nt)};
                for (int s = 0; s < 2; ++s)
                    if (link[s] && comp[nx[s]] < 0) {
                        comp[nx[s]] = c;
                        tq.push(nx[s]);
                    }
            }
        }
        std::vector<double> comp_area(ncomp, 0.0);
        for (int t = 0; t < nt; ++t)
            if (comp[t] >= 0) comp_area[comp[t]] += area[t];
        // pairs of this a share their component's area equally
        std::vector<int> comp_pairs(ncomp, 0);
        std::vector<int> mine;
        for (int pid = 0; pid < num_pairs(); ++pid)
            if (boundary_[pid].a == p.a) mine.push_back(pid);
        auto comp_of_pair = [&](int pid) {
            for (int i = 0; i < k; ++i)
                if (st[i].rhombus == boundary_[pid].rhombus) return comp[2 * i];
            return -1;
        };
        for (int pid : mine) ++comp_pairs[comp_of_pair(pid)];
        for (int pid : mine) {
            int c = comp_of_pair(pid);
            boundary_[pid].mu = comp_area[c] / comp_pairs[c];
        }
    }
}

int DiscreteDomain::pair_at(int a_int, int k) const
{
    int i = index_[a_int];
    if (i < 0) return -1;
    return pair_of_slot_[i][k];
}

DiscreteDomain discretize(std::shared_ptr<const QuadGraph> g, const Region& region)
{
    const QuadGraph& G = *g;
    std::vector<int> inside_id(G.num_vertices(), -1);
    std::vector<int> inside;
    for (int v = 0; v < G.num_vertices(); ++v)
        if (G.is_gamma(v) && region.contains(G.pos(v))) {
            inside_id[v] = static_cast<int>(inside.size());
            inside.push_back(v);
        }
    if (inside.empty()) throw EmptyDomain("no Gamma vertex lies inside " + region.tag());

    // components; ids ascend so the first vertex of each component is its lowest id
    std::vector<int> comp(inside.size(), -1);
    std::vector<int> best;
    for (std::size_t s = 0; s < inside.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> members;
        std::queue<int> q;
        q.push(inside[s]);
        comp[s] = static_cast<int>(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            members.push_back(u);
            for (int k = 0; k < static_cast<int>(G.star(u).size()); ++k) {
                int w = G.opposite(u, k);
                int wi = inside_id[w];
                if (wi >= 0 && comp[wi] < 0) {
                    comp[wi] = static_cast<int>(s);
                    q.push(w);
                }
            }
        }
        if (members.size() > best.size()) best = std::move(members);
    }
    return DiscreteDomain(std::move(g), std::move(best), region);
}

std::shared_ptr<const QuadGraph> fit_lattice(const std::function<QuadGraph(int)>& make, const Region& region,
                                             int start_extent)
{
    int extent = std::max(start_extent, 2);
    for (int attempt = 0; attempt < 12; ++attempt) {
        auto g = std::make_shared<const QuadGraph>(make(extent));
        try {
            auto d = discretize(g, region);
            // the boundary vertices need complete stars as well
            bool ok = true;
            for (const auto& p : d.boundary()) ok = ok && g->full_star(p.a);
            if (ok) return g;
        } catch (const RegionExceedsLattice&) {
        }
        extent = extent + extent / 2 + 2;
    }
    throw RegionExceedsLattice("could not fit " + region.tag() + " into the lattice");
}

RectSplit boundary_split_rect(const DiscreteDomain& d)
{
    if (!d.region() || d.region()->kind != Region::Kind::Rect) throw NotARectangle("domain was not built from a rectangle");
    const double S = d.region()->S, T = d.region()->T;
    const double tol = 1e-12 * std::max(S, T);
    RectSplit out;
    for (int p = 0; p < d.num_pairs(); ++p) {
        cplx a = d.graph().pos(d.boundary()[p].a);
        if (a.imag() <= tol) out.L.push_back(p);
        if (a.imag() >= T - tol) out.U.push_back(p);
        if (std::abs(a.real()) >= S - tol) out.V.push_back(p);
    }
    return out;
}

namespace {

int next_pair(const DiscreteDomain& d, int pid)
{
    const QuadGraph& G = d.graph();
    int u = d.boundary()[pid].a_int;
    int k = d.boundary()[pid].slot;
    for (int guard = 0; guard < 4 * G.num_vertices() + 16; ++guard) {
        const int deg = static_cast<int>(G.star(u).size());
        k = (k + 1) % deg;
        int p = d.pair_at(u, k);
        if (p >= 0) return p;
        int u2 = G.opposite(u, k);
        int z = G.star(u)[k].rhombus;
        int t = -1;
        for (int s = 0; s < static_cast<int>(G.star(u2).size()); ++s)
            if (G.star(u2)[s].rhombus == z) t = s;
        u = u2;
        k = t;
    }
    throw InvalidGraph("boundary walk did not close");
}

} // namespace

std::vector<int> boundary_cycle(const DiscreteDomain& d)
{
    std::vector<int> cyc{0};
    for (int p = next_pair(d, 0); p != 0; p = next_pair(d, p)) {
        cyc.push_back(p);
        if (static_cast<int>(cyc.size()) > d.num_pairs()) throw InvalidGraph("boundary walk revisits a pair");
    }
    if (static_cast<int>(cyc.size()) != d.num_pairs())
        throw NotSimplyConnected("boundary has more than one cycle (" + std::to_string(cyc.size()) + " of " +
                                 std::to_string(d.num_pairs()) + " pairs on the outer one)");
    return cyc;
}

std::vector<int> boundary_arc(const DiscreteDomain& d, int a, int b)
{
    if (a < 0 || a >= d.num_pairs() || b < 0 || b >= d.num_pairs()) throw NotOnBoundary("pair id out of range");
    auto cyc = boundary_cycle(d);
    std::vector<int> pos(d.num_pairs());
    for (int i = 0; i < static_cast<int>(cyc.size()); ++i) pos[cyc[i]] = i;
    std::vector<int> out;
    const int n = static_cast<int>(cyc.size());
    for (int i = pos[a];; i = (i + 1) % n) {
        out.push_back(cyc[i]);
        if (cyc[i] == b) break;
    }
    return out;
}

cplx discrete_integral(const DiscreteDomain& d, const LatticeFunction& phi)
{
    const auto& W = d.graph().weights();
    cplx s = 0;
    for (int u : d.interior()) s += phi.at(u) * W.mu_gamma[u];
    for (const auto& p : d.boundary()) s += phi.at(p.a) * p.mu;
    return s;
}

double polygon_domain_area(const DiscreteDomain& d)
{
    const QuadGraph& G = d.graph();
    std::vector<char> face(G.num_vertices(), 0);
    for (int u : d.interior())
        for (const auto& e : G.star(u)) {
            const auto& r = G.rhombus(e.rhombus);
            face[r.v[(e.slot + 1) % 4]] = 1;
            face[r.v[(e.slot + 3) % 4]] = 1;
        }
    double area = 0;
    for (int w = 0; w < G.num_vertices(); ++w)
        if (face[w]) {
            if (!G.full_star(w)) throw RegionExceedsLattice("face of Gamma* vertex " + std::to_string(w) + " is cut off");
            area += G.weights().mu_gamma[w];
        }
    return area;
}

} // namespace isoradial
