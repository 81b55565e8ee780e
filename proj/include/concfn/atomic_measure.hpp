#pragma once

#include <span>
#include <vector>

#include "concfn/rational.hpp"
#include "concfn/weight_vector.hpp"

namespace concfn {

// Nonnegative weighted atom collection in d-space; total mass arbitrary.
// Atoms are kept in lexicographic order with exact-equality coalescing.
class AtomicMeasure {
public:
    static AtomicMeasure make(int d, std::vector<std::vector<double>> positions,
                              std::vector<Rational> masses);

    int dim() const { return d_; }
    std::size_t size() const { return masses_.size(); }
    std::span<const double> position(std::size_t i) const {
        return {positions_.data() + i * d_, static_cast<std::size_t>(d_)};
    }
    double position1(std::size_t i) const { return positions_[i * d_]; }
    const Rational& mass(std::size_t i) const { return masses_[i]; }

    Rational total_mass() const;

    // mass(A) == mass(-A) for every atom.
    bool is_symmetric() const;

    AtomicMeasure scaled_mass(const Rational& factor) const;

private:
    AtomicMeasure() = default;
    int d_ = 1;
    std::vector<double> positions_;  // size * d, row-major, lexicographic
    std::vector<Rational> masses_;   // positive
};

// M* = sum_k (point mass at a_k + point mass at -a_k); total mass 2n,
// coincident atoms coalesced.
AtomicMeasure levy_base_measure(const WeightVector& a);

}  // namespace concfn
