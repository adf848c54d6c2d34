#pragma once

#include "isoradial/errors.hpp"
#include "isoradial/quadgraph.hpp"

#include <string>
#include <vector>

namespace isoradial {

enum class Support : std::uint8_t { Gamma, GammaStar, Lambda, Diamond };

const char* support_name(Support s);
Support support_from_name(const std::string& s);

// Complex values on a subset of vertices (or rhombi for Diamond). Storage is dense
// over the whole graph with a presence mask.
class LatticeFunction
{
public:
    LatticeFunction() = default;
    LatticeFunction(const QuadGraph& g, Support s);

    Support support() const { return support_; }
    int capacity() const { return static_cast<int>(values_.size()); }

    bool has(int id) const { return id >= 0 && id < capacity() && mask_[id]; }
    cplx at(int id) const
    {
        if (!has(id)) throw MissingValues("no value at id " + std::to_string(id));
        return values_[id];
    }
    void set(int id, cplx value);
    std::vector<int> ids() const;

private:
    Support support_ = Support::Lambda;
    const QuadGraph* graph_ = nullptr;
    std::vector<cplx> values_;
    std::vector<std::uint8_t> mask_;
};

} // namespace isoradial
