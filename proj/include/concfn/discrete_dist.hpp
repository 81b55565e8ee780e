#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "concfn/rational.hpp"
#include "concfn/rng.hpp"
#include "concfn/weight_vector.hpp"

namespace concfn {

// Thrown when an exact law would exceed the configured atom budget. The
// caller is expected to fall back to Monte Carlo.
class AtomBudgetExceeded : public std::runtime_error {
public:
    explicit AtomBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct SumLawConfig {
    std::uint64_t atom_budget = 1u << 20;
    // Two-atom summand laws with more than this many terms go through the
    // meet-in-the-middle split instead of one long convolution chain.
    int mitm_threshold = 20;
};

// Finitely supported probability law on the reals. Atoms are strictly
// increasing exact rationals, weights are positive rationals summing to 1
// exactly. Immutable after construction.
class DiscreteDist {
public:
    // Coalesces equal atoms, sorts, and validates. Weights that do not sum
    // to 1 are rejected, never renormalized.
    static DiscreteDist make(std::vector<Rational> atoms, std::vector<Rational> weights);
    static DiscreteDist make_from_doubles(const std::vector<double>& atoms,
                                          const std::vector<Rational>& weights);
    static DiscreteDist point_mass(const Rational& position);
    static DiscreteDist rademacher();
    // Equal weights on the given atoms.
    static DiscreteDist uniform(std::vector<Rational> atoms);

    std::size_t size() const { return atoms_.size(); }
    const Rational& position(std::size_t i) const { return atoms_[i]; }
    const Rational& weight(std::size_t i) const { return weights_[i]; }
    double position_d(std::size_t i) const { return positions_d_[i]; }

    // Exact mass of the single point x (0 if x is not an atom).
    Rational mass_at(const Rational& x) const;

    // weight(x) == weight(-x) for every atom.
    bool is_symmetric() const;

    // Law of X1 - X2 for independent copies; symmetric about 0.
    DiscreteDist symmetrize() const;

    // p(delta): exact mass of { z : |z| > delta }. delta >= 0.
    Rational tail_mass(const Rational& delta) const;

    // Mass of the open annulus { c1 < |x| < c2 } is at least c3.
    // c2 == nullopt means +infinity. Requires 0 <= c1 < c2.
    bool check_spread(const Rational& c1, const std::optional<Rational>& c2,
                      const Rational& c3) const;
    Rational annulus_mass(const Rational& c1, const std::optional<Rational>& c2) const;

    // One draw by inverse CDF over cached double weights. Deterministic
    // given the generator state.
    double sample(Xoshiro256& rng) const;
    std::size_t sample_index(Xoshiro256& rng) const;

    // Support diameter (max atom - min atom).
    Rational diameter() const;

private:
    DiscreteDist() = default;
    void build_cdf();
    std::vector<Rational> atoms_;    // strictly increasing
    std::vector<Rational> weights_;  // positive, sum exactly 1
    std::vector<double> positions_d_;
    std::vector<double> cdf_;  // for sampling only
};

// Exact convolution of two laws (law of the sum of independents), with atom
// coalescing by exact equality. Throws AtomBudgetExceeded.
DiscreteDist convolve(const DiscreteDist& f, const DiscreteDist& g, std::uint64_t atom_budget);

// Exact law of S_a = sum_k X_k a_k for d = 1 weights and i.i.d. X ~ dist.
// Iterated convolution with coalescing; a meet-in-the-middle split is used
// for two-atom laws with many terms. Throws AtomBudgetExceeded when the
// support cannot be held within cfg.atom_budget.
DiscreteDist weighted_sum_law(const WeightVector& a, const DiscreteDist& dist,
                              const SumLawConfig& cfg = {});

}  // namespace concfn
