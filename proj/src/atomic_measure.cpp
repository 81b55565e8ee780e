#include "concfn/atomic_measure.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace concfn {

AtomicMeasure AtomicMeasure::make(int d, std::vector<std::vector<double>> positions,
                                  std::vector<Rational> masses) {
    if (d < 1) throw std::invalid_argument("measure dimension must be >= 1");
    if (positions.size() != masses.size())
        throw std::invalid_argument("positions and masses must have the same length");
    std::map<std::vector<double>, Rational> acc;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (static_cast<int>(positions[i].size()) != d)
            throw std::invalid_argument("measure atom has wrong dimension");
        if (masses[i] <= 0) throw std::invalid_argument("measure masses must be positive");
        acc[positions[i]] += masses[i];
    }
    AtomicMeasure m;
    m.d_ = d;
    m.positions_.reserve(acc.size() * static_cast<std::size_t>(d));
    m.masses_.reserve(acc.size());
    for (auto& [pos, mass] : acc) {
        m.positions_.insert(m.positions_.end(), pos.begin(), pos.end());
        m.masses_.push_back(mass);
    }
    return m;
}

Rational AtomicMeasure::total_mass() const {
    Rational total(0);
    for (const Rational& m : masses_) total += m;
    return total;
}

bool AtomicMeasure::is_symmetric() const {
    // Binary search the negated position; exact equality.
    for (std::size_t i = 0; i < size(); ++i) {
        std::vector<double> neg(d_);
        for (int j = 0; j < d_; ++j) neg[static_cast<std::size_t>(j)] = -position(i)[j];
        bool found = false;
        for (std::size_t k = 0; k < size(); ++k) {
            bool eq = true;
            for (int j = 0; j < d_; ++j)
                if (position(k)[j] != neg[static_cast<std::size_t>(j)]) { eq = false; break; }
            if (eq) {
                found = (mass(k) == mass(i));
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

AtomicMeasure AtomicMeasure::scaled_mass(const Rational& factor) const {
    if (factor <= 0) throw std::invalid_argument("mass scale factor must be positive");
    AtomicMeasure m(*this);
    for (Rational& w : m.masses_) w *= factor;
    return m;
}

AtomicMeasure levy_base_measure(const WeightVector& a) {
    std::vector<std::vector<double>> positions;
    std::vector<Rational> masses;
    positions.reserve(2 * static_cast<std::size_t>(a.n()));
    for (int k = 0; k < a.n(); ++k) {
        auto e = a.entry(k);
        std::vector<double> plus(e.begin(), e.end());
        std::vector<double> minus(e.size());
        for (std::size_t j = 0; j < e.size(); ++j) minus[j] = -e[j];
        positions.push_back(std::move(plus));
        positions.push_back(std::move(minus));
        masses.emplace_back(1);
        masses.emplace_back(1);
    }
    return AtomicMeasure::make(a.d(), std::move(positions), std::move(masses));
}

}  // namespace concfn
