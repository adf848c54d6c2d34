#include "isoradial/lattice_function.hpp"

namespace isoradial {

const char* support_name(Support s)
{
    switch (s) {
    case Support::Gamma: return "gamma";
    case Support::GammaStar: return "gammastar";
    case Support::Lambda: return "lambda";
    case Support::Diamond: return "diamond";
    }
    return "lambda";
}

Support support_from_name(const std::string& s)
{
    if (s == "gamma") return Support::Gamma;
    if (s == "gammastar") return Support::GammaStar;
    if (s == "lambda") return Support::Lambda;
    if (s == "diamond") return Support::Diamond;
    throw FormatError("unknown support '" + s + "'");
}

LatticeFunction::LatticeFunction(const QuadGraph& g, Support s) : support_(s), graph_(&g)
{
    int n = s == Support::Diamond ? g.num_rhombi() : g.num_vertices();
    values_.assign(n, 0.0);
    mask_.assign(n, 0);
}

void LatticeFunction::set(int id, cplx value)
{
    if (id < 0 || id >= capacity()) throw InvalidGraph("id " + std::to_string(id) + " out of range");
    if (support_ == Support::Gamma && !graph_->is_gamma(id))
        throw InvalidGraph("id " + std::to_string(id) + " is not a Gamma vertex");
    if (support_ == Support::GammaStar && graph_->is_gamma(id))
        throw InvalidGraph("id " + std::to_string(id) + " is not a Gamma* vertex");
    values_[id] = value;
    mask_[id] = 1;
}

std::vector<int> LatticeFunction::ids() const
{
    std::vector<int> out;
    for (int i = 0; i < capacity(); ++i)
        if (mask_[i]) out.push_back(i);
    return out;
}

} // namespace isoradial
