#pragma once

#include "isoradial/domain.hpp"
#include "isoradial/lattice_function.hpp"
#include "isoradial/quadgraph.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace isoradial::io {

using json = nlohmann::ordered_json;

// {delta, vertices:[{id,x,y,color}], rhombi:[{v1,v2,v3,v4,theta}]}
json graph_to_json(const QuadGraph& g);
// Ids must be 0..n-1 in any order. Throws FormatError, or InvalidGraph from validation.
QuadGraph graph_from_json(const json& j);

// disc:cx,cy,R | rect:S,T | poly:FILE, where FILE holds [[x,y], ...].
Region parse_region(const std::string& spec);
json region_to_json(const Region& r);
Region region_from_json(const json& j);

// The graph is embedded so that the file is self-contained. Loading rebuilds the
// domain from the interior ids and rejects files whose stored pairs or mu differ.
json domain_to_json(const DiscreteDomain& d);
DiscreteDomain domain_from_json(const json& j);

// {support, values:{id:[re,im]}}
json function_to_json(const LatticeFunction& f);
LatticeFunction function_from_json(const QuadGraph& g, const json& j);

// {values:[...]} with one real value per boundary pair, in domain order.
std::vector<double> boundary_values_from_json(const DiscreteDomain& d, const json& j);

json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const json& j);

} // namespace isoradial::io
