#include "concfn/discrete_dist.hpp"

#include <algorithm>
#include <map>

namespace concfn {

namespace {

// Sorted, coalesced (atom, weight) list from an arbitrary one.
std::pair<std::vector<Rational>, std::vector<Rational>> coalesce(
    std::vector<std::pair<Rational, Rational>> pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Rational> atoms, weights;
    atoms.reserve(pairs.size());
    weights.reserve(pairs.size());
    for (auto& [pos, w] : pairs) {
        if (!atoms.empty() && atoms.back() == pos) {
            weights.back() += w;
        } else {
            atoms.push_back(std::move(pos));
            weights.push_back(std::move(w));
        }
    }
    return {std::move(atoms), std::move(weights)};
}

}  // namespace

DiscreteDist DiscreteDist::make(std::vector<Rational> atoms, std::vector<Rational> weights) {
    if (atoms.empty()) throw std::invalid_argument("distribution needs at least one atom");
    if (atoms.size() != weights.size())
        throw std::invalid_argument("atoms and weights must have the same length");
    Rational total = 0;
    for (const Rational& w : weights) {
        if (w <= 0) throw std::invalid_argument("weights must be positive");
        total += w;
    }
    if (total != 1)
        throw std::invalid_argument("weights must sum to 1 exactly, got " + total.get_str());

    std::vector<std::pair<Rational, Rational>> pairs;
    pairs.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
        pairs.emplace_back(std::move(atoms[i]), std::move(weights[i]));
    auto [as, ws] = coalesce(std::move(pairs));

    DiscreteDist d;
    d.atoms_ = std::move(as);
    d.weights_ = std::move(ws);
    d.build_cdf();
    return d;
}

DiscreteDist DiscreteDist::make_from_doubles(const std::vector<double>& atoms,
                                             const std::vector<Rational>& weights) {
    std::vector<Rational> as;
    as.reserve(atoms.size());
    for (double x : atoms) as.push_back(rational_from_double(x));
    return make(std::move(as), weights);
}

DiscreteDist DiscreteDist::point_mass(const Rational& position) {
    return make({position}, {Rational(1)});
}

DiscreteDist DiscreteDist::rademacher() {
    return make({Rational(-1), Rational(1)}, {Rational(1, 2), Rational(1, 2)});
}

DiscreteDist DiscreteDist::uniform(std::vector<Rational> atoms) {
    if (atoms.empty()) throw std::invalid_argument("distribution needs at least one atom");
    const Rational w(1, static_cast<unsigned long>(atoms.size()));
    std::vector<Rational> ws(atoms.size(), w);
    return make(std::move(atoms), std::move(ws));
}

void DiscreteDist::build_cdf() {
    positions_d_.resize(atoms_.size());
    cdf_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        positions_d_[i] = atoms_[i].get_d();
        acc += weights_[i].get_d();
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
}

Rational DiscreteDist::mass_at(const Rational& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
    if (it != atoms_.end() && *it == x)
        return weights_[static_cast<std::size_t>(it - atoms_.begin())];
    return Rational(0);
}

bool DiscreteDist::is_symmetric() const {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (weight(i) != mass_at(-position(i))) return false;
    return true;
}

DiscreteDist DiscreteDist::symmetrize() const {
    // Exact law of X1 - X2: convolve with the reflection.
    std::vector<Rational> refl_atoms;
    refl_atoms.reserve(size());
    for (std::size_t i = size(); i-- > 0;) refl_atoms.push_back(-atoms_[i]);
    std::vector<Rational> refl_weights(weights_.rbegin(), weights_.rend());
    DiscreteDist reflected = make(std::move(refl_atoms), std::move(refl_weights));
    // n^2 products, never a real budget concern for symmetrizations.
    return convolve(*this, reflected, static_cast<std::uint64_t>(size()) * size() + 1);
}

Rational DiscreteDist::tail_mass(const Rational& delta) const {
    if (delta < 0) throw std::invalid_argument("tail mass needs delta >= 0");
    Rational out(0);
    for (std::size_t i = 0; i < size(); ++i)
        if (abs(atoms_[i]) > delta) out += weights_[i];
    return out;
}

Rational DiscreteDist::annulus_mass(const Rational& c1,
                                    const std::optional<Rational>& c2) const {
    Rational out(0);
    for (std::size_t i = 0; i < size(); ++i) {
        const Rational m = abs(atoms_[i]);
        if (m > c1 && (!c2 || m < *c2)) out += weights_[i];
    }
    return out;
}

bool DiscreteDist::check_spread(const Rational& c1, const std::optional<Rational>& c2,
                                const Rational& c3) const {
    if (c1 < 0) throw std::invalid_argument("spread condition needs c1 >= 0");
    if (c2 && *c2 <= c1) throw std::invalid_argument("spread condition needs c1 < c2");
    return annulus_mass(c1, c2) >= c3;
}

std::size_t DiscreteDist::sample_index(Xoshiro256& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
}

double DiscreteDist::sample(Xoshiro256& rng) const {
    return positions_d_[sample_index(rng)];
}

Rational DiscreteDist::diameter() const {
    return atoms_.back() - atoms_.front();
}

DiscreteDist convolve(const DiscreteDist& f, const DiscreteDist& g, std::uint64_t atom_budget) {
    std::map<Rational, Rational> acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            acc[f.position(i) + g.position(j)] += f.weight(i) * g.weight(j);
        }
        if (acc.size() > atom_budget)
            throw AtomBudgetExceeded("convolution support exceeds atom budget");
    }
    std::vector<Rational> atoms, weights;
    atoms.reserve(acc.size());
    weights.reserve(acc.size());
    for (auto& [pos, w] : acc) {
        atoms.push_back(pos);
        weights.push_back(w);
    }
    return DiscreteDist::make(std::move(atoms), std::move(weights));
}

namespace {

// Law of X*c for a single coefficient.
DiscreteDist scaled_law(const DiscreteDist& dist, const Rational& c) {
    std::vector<Rational> atoms;
    std::vector<Rational> weights;
    atoms.reserve(dist.size());
    weights.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        atoms.push_back(dist.position(i) * c);
        weights.push_back(dist.weight(i));
    }
    return DiscreteDist::make(std::move(atoms), std::move(weights));
}

DiscreteDist sum_law_range(const std::vector<Rational>& coeffs, std::size_t lo, std::size_t hi,
                           const DiscreteDist& dist, const SumLawConfig& cfg) {
    const std::size_t count = hi - lo;
    if (count == 1) return scaled_law(dist, coeffs[lo]);
    // Meet in the middle: both halves stay small whenever the final
    // coalesced support does, and intermediates never blow past it.
    if (dist.size() == 2 && count > static_cast<std::size_t>(cfg.mitm_threshold)) {
        const std::size_t mid = lo + count / 2;
        DiscreteDist left = sum_law_range(coeffs, lo, mid, dist, cfg);
        DiscreteDist right = sum_law_range(coeffs, mid, hi, dist, cfg);
        return convolve(left, right, cfg.atom_budget);
    }
    DiscreteDist acc = scaled_law(dist, coeffs[lo]);
    for (std::size_t k = lo + 1; k < hi; ++k)
        acc = convolve(acc, scaled_law(dist, coeffs[k]), cfg.atom_budget);
    return acc;
}

}  // namespace

DiscreteDist weighted_sum_law(const WeightVector& a, const DiscreteDist& dist,
                              const SumLawConfig& cfg) {
    if (a.d() != 1) throw std::invalid_argument("weighted_sum_law needs d = 1 weights");
    std::vector<Rational> coeffs;
    coeffs.reserve(static_cast<std::size_t>(a.n()));
    for (int k = 0; k < a.n(); ++k) coeffs.push_back(rational_from_double(a.coord(k, 0)));
    return sum_law_range(coeffs, 0, coeffs.size(), dist, cfg);
}

}  // namespace concfn
