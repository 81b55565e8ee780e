#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "concfn/bound_report.hpp"
#include "concfn/concentration.hpp"
#include "concfn/discrete_dist.hpp"
#include "concfn/exec.hpp"
#include "concfn/weight_vector.hpp"

namespace concfn {

// Symmetric infinitely divisible smoothing law with characteristic function
//
//   cf(t) = exp( -(intensity/2) * sum_k (1 - cos<t, a_k>) )
//
// i.e. the compound Poisson law whose Levy measure puts mass intensity/4 on
// each of +-a_k. A draw is sum_k (N_k+ - N_k-) a_k with independent
// Poisson(intensity/4) counts.
struct SmoothingLaw {
    WeightVector weights;
    double intensity = 0.0;  // >= 0
};

SmoothingLaw make_smoothing_law(WeightVector a, double intensity);

// Exact characteristic function value; real, in (0, 1], equal to 1 at t=0.
double h_cf(const SmoothingLaw& law, std::span<const double> t);

// Largest integer k with k < x (differs from std::floor at integers).
long strict_floor(double x);

struct EsseenConfig {
    double tolerance = 1e-9;     // absolute quadrature tolerance for I
    std::uint64_t max_intervals = 1u << 22;
    double constant = 2.0;       // C_E; conservative default
};

struct EsseenResult {
    double integral = 0.0;  // I = delta * integral of cf over |t| <= 1/delta
    double bound = 0.0;     // min(1, C_E * I)
    bool converged = true;
    std::uint64_t intervals = 0;
};

// Adaptive Simpson quadrature of the (smooth, positive, even) cf. d = 1.
EsseenResult esseen_upper_bound(const SmoothingLaw& law, double delta,
                                const EsseenConfig& cfg = {});

// One compound Poisson draw; out has law.weights.d() slots.
void sample_h(const SmoothingLaw& law, Xoshiro256& rng, std::span<double> out);

// count draws with chunked derived seeds; bit-identical across thread
// counts. Row-major count x d.
std::vector<double> sample_h_batch(const SmoothingLaw& law, std::uint64_t seed,
                                   std::uint64_t count, ExecMode exec = default_exec_mode());

PointSampler smoothing_sampler(const SmoothingLaw& law);

struct MassAtZeroConfig {
    double tolerance = 1e-10;        // certified enumeration truncation error
    std::uint64_t state_budget = 1u << 22;
    bool allow_monte_carlo = true;   // fall back to sampling when enumeration blows up
    std::uint64_t mc_samples = 200000;
    std::uint64_t seed = 1;
    ExecMode exec = default_exec_mode();
};

struct MassAtZeroResult {
    double value = 0.0;
    bool enumerated = true;     // false = Monte Carlo fallback
    double certified_radius = 0.0;  // enumeration: truncation error bound
    double stderr_value = 0.0;      // Monte Carlo only
};

// P(H = 0): enumerate signed jump-count combinations per coefficient
// (Skellam-distributed multiplicities truncated to total tail mass below
// tolerance) and convolve supports with exact-position coalescing.
MassAtZeroResult mass_at_zero(const SmoothingLaw& law, const MassAtZeroConfig& cfg = {});

struct Lemma1Config {
    SumLawConfig sum;
    EsseenConfig esseen;
    MCConfig mc;
};

// Window-splitting bound: Q(F_a, tau) against
// (1 + strict_floor(kappa/delta))^d * Q(H^{p(tau/kappa)}, delta), with the
// smoothing-law concentration estimated two ways (Esseen integral and Monte
// Carlo); the recorded right side uses the smaller of the two upper values.
BoundReport lemma1_report(const WeightVector& a, const DiscreteDist& dist, double tau,
                          double kappa, double delta, const Lemma1Config& cfg = {});

// delta -> 0 limit of the same bound: Q(F_a, 0) against H^{p(0)}({0}).
BoundReport q_at_zero_limit_report(const WeightVector& a, const DiscreteDist& dist,
                                   const SumLawConfig& sum_cfg = {},
                                   const MassAtZeroConfig& mz_cfg = {});

}  // namespace concfn
