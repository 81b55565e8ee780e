#include "concfn/weight_vector.hpp"

#include <stdexcept>

namespace concfn {

WeightVector WeightVector::make(int d, std::vector<std::vector<double>> entries) {
    if (d < 1) throw std::invalid_argument("weight vector dimension must be >= 1");
    if (entries.empty()) throw std::invalid_argument("weight vector must have n >= 1 entries");
    std::vector<double> flat;
    flat.reserve(entries.size() * static_cast<std::size_t>(d));
    for (const auto& e : entries) {
        if (static_cast<int>(e.size()) != d)
            throw std::invalid_argument("weight vector entry has wrong dimension");
        flat.insert(flat.end(), e.begin(), e.end());
    }
    WeightVector a(d, std::move(flat));
    if (a.all_zero()) throw std::invalid_argument("weight vector must have a nonzero entry");
    return a;
}

WeightVector WeightVector::make1(std::vector<double> entries) {
    if (entries.empty()) throw std::invalid_argument("weight vector must have n >= 1 entries");
    WeightVector a(1, std::move(entries));
    if (a.all_zero()) throw std::invalid_argument("weight vector must have a nonzero entry");
    return a;
}

WeightVector WeightVector::ones(int n) {
    return make1(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

WeightVector WeightVector::project(int j) const {
    if (j < 0 || j >= d_) throw std::out_of_range("coordinate index out of range");
    std::vector<double> flat(static_cast<std::size_t>(n()));
    for (int k = 0; k < n(); ++k) flat[static_cast<std::size_t>(k)] = coord(k, j);
    return WeightVector(1, std::move(flat));
}

bool WeightVector::single_nonzero_coordinates() const {
    for (int k = 0; k < n(); ++k) {
        int nonzero = 0;
        for (int j = 0; j < d_; ++j)
            if (coord(k, j) != 0.0) ++nonzero;
        if (nonzero > 1) return false;
    }
    return true;
}

bool WeightVector::all_zero() const {
    for (double v : data_)
        if (v != 0.0) return false;
    return true;
}

WeightVector WeightVector::scaled(double s) const {
    std::vector<double> flat(data_);
    for (double& v : flat) v *= s;
    return WeightVector(d_, std::move(flat));
}

}  // namespace concfn
