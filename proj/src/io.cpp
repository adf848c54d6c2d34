#include "isoradial/io.hpp"

#include "isoradial/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isoradial::io {

namespace {

std::vector<double> split_numbers(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size()) throw FormatError("bad number '" + item + "' in " + what);
        out.push_back(v);
    }
    return out;
}

template <class T>
T field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

json graph_to_json(const QuadGraph& g)
{
    json j;
    j["delta"] = g.delta();
    json vs = json::array();
    for (int v = 0; v < g.num_vertices(); ++v)
        vs.push_back({{"id", v}, {"x", g.pos(v).real()}, {"y", g.pos(v).imag()},
                      {"color", g.is_gamma(v) ? "gamma" : "gammastar"}});
    j["vertices"] = std::move(vs);
    json rs = json::array();
    for (const auto& r : g.rhombi())
        rs.push_back({{"v1", r.v[0]}, {"v2", r.v[1]}, {"v3", r.v[2]}, {"v4", r.v[3]}, {"theta", r.theta}});
    j["rhombi"] = std::move(rs);
    return j;
}

QuadGraph graph_from_json(const json& j)
{
    double delta = field<double>(j, "delta");
    auto vs = field<json>(j, "vertices");
    auto rs = field<json>(j, "rhombi");
    if (!vs.is_array() || !rs.is_array()) throw FormatError("vertices and rhombi must be arrays");
    const std::size_t n = vs.size();
    std::vector<cplx> pos(n);
    std::vector<Color> color(n);
    std::vector<std::uint8_t> seen(n, 0);
    for (const auto& v : vs) {
        auto id = field<long long>(v, "id");
        if (id < 0 || static_cast<std::size_t>(id) >= n || seen[id]) throw FormatError("vertex ids must be 0..n-1, each once");
        seen[id] = 1;
        pos[id] = {field<double>(v, "x"), field<double>(v, "y")};
        auto c = field<std::string>(v, "color");
        if (c == "gamma") color[id] = Color::Gamma;
        else if (c == "gammastar") color[id] = Color::GammaStar;
        else throw FormatError("unknown color '" + c + "'");
    }
    std::vector<Rhombus> rhombi;
    rhombi.reserve(rs.size());
    for (const auto& r : rs) {
        Rhombus rh;
        rh.v = {field<int>(r, "v1"), field<int>(r, "v2"), field<int>(r, "v3"), field<int>(r, "v4")};
        for (int v : rh.v)
            if (v < 0 || static_cast<std::size_t>(v) >= n) throw FormatError("rhombus references unknown vertex");
        rh.theta = field<double>(r, "theta");
        rhombi.push_back(rh);
    }
    return QuadGraph(delta, std::move(pos), std::move(color), std::move(rhombi));
}

Region parse_region(const std::string& spec)
{
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw FormatError("region must look like kind:params, got '" + spec + "'");
    std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
    if (kind == "disc") {
        auto p = split_numbers(rest, "disc");
        if (p.size() != 3) throw FormatError("disc needs cx,cy,R");
        return Region::disc({p[0], p[1]}, p[2]);
    }
    if (kind == "rect") {
        auto p = split_numbers(rest, "rect");
        if (p.size() != 2) throw FormatError("rect needs S,T");
        return Region::rect(p[0], p[1]);
    }
    if (kind == "poly") {
        auto pts = read_json(rest);
        if (!pts.is_array()) throw FormatError("polygon file must hold [[x,y], ...]");
        std::vector<cplx> poly;
        for (const auto& q : pts) {
            if (!q.is_array() || q.size() != 2) throw FormatError("polygon point must be [x,y]");
            poly.emplace_back(q[0].get<double>(), q[1].get<double>());
        }
        return Region::polygon(std::move(poly));
    }
    throw FormatError("unknown region kind '" + kind + "'");
}

json region_to_json(const Region& r)
{
    switch (r.kind) {
    case Region::Kind::Disc:
        return {{"kind", "disc"}, {"center", {r.center.real(), r.center.imag()}}, {"radius", r.radius}};
    case Region::Kind::Rect: return {{"kind", "rect"}, {"S", r.S}, {"T", r.T}};
    case Region::Kind::Polygon: {
        json pts = json::array();
        for (const auto& q : r.poly) pts.push_back({q.real(), q.imag()});
        return {{"kind", "poly"}, {"points", pts}};
    }
    }
    return {};
}

Region region_from_json(const json& j)
{
    auto kind = field<std::string>(j, "kind");
    if (kind == "disc") {
        auto c = field<std::vector<double>>(j, "center");
        if (c.size() != 2) throw FormatError("disc center must be [x,y]");
        return Region::disc({c[0], c[1]}, field<double>(j, "radius"));
    }
    if (kind == "rect") return Region::rect(field<double>(j, "S"), field<double>(j, "T"));
    if (kind == "poly") {
        std::vector<cplx> poly;
        for (const auto& q : field<std::vector<std::vector<double>>>(j, "points")) {
            if (q.size() != 2) throw FormatError("polygon point must be [x,y]");
            poly.emplace_back(q[0], q[1]);
        }
        return Region::polygon(std::move(poly));
    }
    throw FormatError("unknown region kind '" + kind + "'");
}

json domain_to_json(const DiscreteDomain& d)
{
    json j;
    j["graph"] = graph_to_json(d.graph());
    j["region"] = d.region() ? region_to_json(*d.region()) : json();
    j["interior"] = d.interior();
    json pairs = json::array();
    for (const auto& p : d.boundary()) pairs.push_back({{"a", p.a}, {"a_int", p.a_int}, {"mu", p.mu}});
    j["boundary"] = std::move(pairs);
    return j;
}

DiscreteDomain domain_from_json(const json& j)
{
    auto g = std::make_shared<const QuadGraph>(graph_from_json(field<json>(j, "graph")));
    std::optional<Region> region;
    if (j.contains("region") && !j["region"].is_null()) region = region_from_json(j["region"]);
    auto interior = field<std::vector<int>>(j, "interior");
    for (int v : interior)
        if (v < 0 || v >= g->num_vertices()) throw FormatError("interior id out of range");
    DiscreteDomain d(g, std::move(interior), region);
    auto pairs = field<json>(j, "boundary");
    if (!pairs.is_array() || pairs.size() != d.boundary().size())
        throw FormatError("boundary pairs do not match the interior set");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = d.boundary()[i];
        if (field<int>(pairs[i], "a") != p.a || field<int>(pairs[i], "a_int") != p.a_int)
            throw FormatError("boundary pair " + std::to_string(i) + " does not match the interior set");
        if (std::abs(field<double>(pairs[i], "mu") - p.mu) > 1e-12 * std::max(1.0, std::abs(p.mu)))
            throw FormatError("boundary weight of pair " + std::to_string(i) + " does not match");
    }
    return d;
}

json function_to_json(const LatticeFunction& f)
{
    json j;
    j["support"] = support_name(f.support());
    json values = json::object();
    for (int id : f.ids()) values[std::to_string(id)] = {f.at(id).real(), f.at(id).imag()};
    j["values"] = std::move(values);
    return j;
}

LatticeFunction function_from_json(const QuadGraph& g, const json& j)
{
    LatticeFunction f(g, support_from_name(field<std::string>(j, "support")));
    auto values = field<json>(j, "values");
    if (!values.is_object()) throw FormatError("values must be an object keyed by id");
    for (const auto& [key, v] : values.items()) {
        int id = -1;
        auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
        if (ec != std::errc() || p != key.data() + key.size() || id < 0 || id >= f.capacity())
            throw FormatError("bad id '" + key + "'");
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw FormatError("value for id " + key + " must be [re, im]");
        f.set(id, {v[0].get<double>(), v[1].get<double>()});
    }
    return f;
}

std::vector<double> boundary_values_from_json(const DiscreteDomain& d, const json& j)
{
    auto values = field<std::vector<double>>(j, "values");
    if (static_cast<int>(values.size()) != d.num_pairs())
        throw FormatError("expected " + std::to_string(d.num_pairs()) + " boundary values, got " +
                          std::to_string(values.size()));
    return values;
}

json read_json(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in) throw FormatError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(p.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& p, const json& j)
{
    std::ofstream out(p);
    if (!out) throw FormatError("cannot write " + p.string());
    out << j.dump(1) << "\n";
}

} // namespace isoradial::io
