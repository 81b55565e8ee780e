#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace concfn {

// Coefficient multiset a = (a_1,...,a_n), each entry a point in d-space.
// Duplicates are allowed. At least one entry must be nonzero.
class WeightVector {
public:
    static WeightVector make(int d, std::vector<std::vector<double>> entries);
    // d = 1 convenience.
    static WeightVector make1(std::vector<double> entries);
    // (1,...,1) with n entries, d = 1.
    static WeightVector ones(int n);

    int n() const { return static_cast<int>(data_.size() / d_); }
    int d() const { return d_; }

    std::span<const double> entry(int k) const {
        return {data_.data() + static_cast<std::size_t>(k) * d_, static_cast<std::size_t>(d_)};
    }
    double coord(int k, int j) const { return data_[static_cast<std::size_t>(k) * d_ + j]; }

    // j-th coordinates as a d=1 vector (may be all zeros; callers handle).
    WeightVector project(int j) const;

    // True when every entry has at most one nonzero coordinate; in that case
    // the coordinates of the weighted sum are independent.
    bool single_nonzero_coordinates() const;

    bool all_zero() const;

    WeightVector scaled(double s) const;

    const std::vector<double>& raw() const { return data_; }

private:
    WeightVector(int d, std::vector<double> flat) : d_(d), data_(std::move(flat)) {}
    int d_ = 1;
    std::vector<double> data_;  // n*d, row-major
};

}  // namespace concfn
