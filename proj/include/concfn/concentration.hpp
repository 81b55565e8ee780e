#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "concfn/bound_report.hpp"
#include "concfn/discrete_dist.hpp"
#include "concfn/exec.hpp"
#include "concfn/rational.hpp"
#include "concfn/weight_vector.hpp"

namespace concfn {

// Q(F, lambda) = sup_x P(Y in x + lambda*B), B the centered Euclidean ball
// of radius 1/2. In one dimension x + lambda*B is the closed interval
// [x - lambda/2, x + lambda/2], so Q at lambda = 0 is the largest atom mass.

enum class QMethod { exact, monte_carlo };

struct ConcentrationResult {
    double value = 0.0;
    std::optional<Rational> exact;  // set iff method == exact
    QMethod method = QMethod::exact;
    double stderr_value = 0.0;  // 0 for exact
    std::vector<double> center;  // center achieving (or estimating) the sup
};

// Exact supremum of window mass for a one-dimensional discrete law, by a
// two-pointer sweep over sorted atoms. The sup over all real centers is
// attained with the window's left edge at an atom: sliding the window left
// from such a position can only drop atoms at the right edge, and sliding
// right gains none before the next atom enters. lambda >= 0.
ConcentrationResult q_exact(const DiscreteDist& f, const Rational& lambda);
inline ConcentrationResult q_exact(const DiscreteDist& f, double lambda) {
    return q_exact(f, rational_from_double(lambda));
}

// Deterministic seeded sample stream of points in d-space.
struct PointSampler {
    int dim = 1;
    std::function<void(Xoshiro256&, double*)> draw;
};

PointSampler dist_sampler(const DiscreteDist& dist);

struct MCConfig {
    std::uint64_t sample_count = 100000;
    std::uint64_t seed = 1;
    int center_grid_resolution = 8;  // refinement grid per axis around anchors
    ExecMode exec = default_exec_mode();
    std::uint64_t chunk = 4096;  // samples per substream; fixed for determinism
};

// Monte Carlo estimate of Q. Samples are drawn in fixed-size chunks with
// derived substream seeds, so the result is bit-identical for a given seed
// regardless of thread count. d = 1 scans all sample-edge windows exactly;
// d >= 2 scans ball centers anchored at samples plus a refinement grid
// around the best anchor. Reports binomial standard error.
ConcentrationResult q_monte_carlo(const PointSampler& sampler, double lambda,
                                  const MCConfig& cfg);

// Self-test of the covering property Q(F, m*lambda) <= m * Q(F, lambda);
// both sides exact.
BoundReport q_window_regularity(const DiscreteDist& f, const Rational& lambda, int m);

struct CoordinateBounds {
    std::vector<ConcentrationResult> q;  // q_j = Q(F_a^{(j)}, tau)
    std::vector<int> zero_coordinates;   // projections that are all zero (q_j = 1)
    double min_q = 1.0;
    double product_q = 1.0;
    // True when every entry of a has at most one nonzero coordinate, a
    // sufficient condition for the coordinates of S_a to be independent;
    // only then is product_q an upper bound for Q(F_a, tau).
    bool independent_coordinates = false;
};

// Per-coordinate concentration of the weighted sum: exact when the
// projected law fits the atom budget, Monte Carlo otherwise.
CoordinateBounds q_coordinate_bounds(const WeightVector& a, const DiscreteDist& dist,
                                     double tau, const MCConfig& mc_cfg = {},
                                     const SumLawConfig& sum_cfg = {});

}  // namespace concfn
