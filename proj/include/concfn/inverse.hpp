#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "concfn/concentration.hpp"
#include "concfn/gap.hpp"

namespace concfn {

// ---------------------------------------------------------------------------
// Planted instances
// ---------------------------------------------------------------------------

struct PlantSpec {
    int rank = 1;
    // Per-generator points in d-space; empty = random generators with
    // well-separated scales.
    std::vector<std::vector<double>> generators;
    std::vector<double> limits;  // empty = all 2
    int n = 20;
    int d = 1;
    double noise = 0.0;              // uniform in [-noise, noise] per coordinate
    double outlier_fraction = 0.0;   // in [0, 1)
};

struct PlantedInstance {
    WeightVector a;
    SymmetricGAP truth;
    double noise = 0.0;
    double outlier_fraction = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> outlier_indices;  // sorted
};

// Deterministic instance: structure entries cycle through the enumerated
// points of the truth GAP (so every point gets multiplicity) plus noise;
// outliers sit at least 10 gap-diameters away in every coordinate.
PlantedInstance plant(const PlantSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// GAP fitting and the structure-recovery reports
// ---------------------------------------------------------------------------

struct FitConfig {
    int rank_cap = 4;                 // total rank across coordinates
    std::uint64_t volume_cap = 512;   // enumerated cardinality cap
    int subdivision_depth = 6;
    std::uint64_t exhaustive_budget = 2000000;  // rank-2 (pair, split) evaluations
    double pass_ratio_threshold = 10.0;         // cardinality ratio counted as "small"
    ExecMode exec = default_exec_mode();
};

struct InversePrincipleReport {
    std::optional<SymmetricGAP> fitted;
    CoverageReport coverage;
    int rank = 0;
    mpz_class cardinality{0};
    std::vector<double> q_values;               // per coordinate (when computed)
    std::vector<double> cardinality_components;  // per coordinate max{...}
    std::map<std::string, std::string> params;
    std::map<std::string, bool> flags;
    std::map<std::string, double> ratios;
};

// Searches for a symmetric GAP of rank <= rank_cap and enumerated
// cardinality <= volume_cap covering at least n - d*n' entries within tol
// in the max norm. Coordinates are fitted independently (rank-1 candidate
// scan from the beta machinery, peel, extend; exhaustive rank <= 2 within
// budget) and assembled as a product GAP whose generators have a single
// nonzero coordinate each. Failure to meet the coverage clause is reported
// in flags, not thrown.
InversePrincipleReport fit_gap(const WeightVector& a, double tol, int nprime,
                               const FitConfig& cfg = {});

struct Thm2Params {
    double tau = 0.0;
    double epsilon = 1.0;   // (0, 1]
    double theta = 1.0;     // (0, 1]
    double A = 1.0;
    double B = 1.0;
    double rho = 1.0;       // n^-B <= rho <= 1
    std::optional<int> nprime;  // default: geometric midpoint of [eps*n^theta, n]
};

// Full structure-recovery harness: per-coordinate concentration values,
// hypothesis gates, fit at tolerance tau*rho, and the constant-free
// cardinality ratios (per-coordinate product form and the single-q
// comparison form).
InversePrincipleReport verify_thm2(const WeightVector& a, const DiscreteDist& dist,
                                   const Thm2Params& params, const FitConfig& fit_cfg = {},
                                   const MCConfig& mc_cfg = {},
                                   const SumLawConfig& sum_cfg = {});

// ---------------------------------------------------------------------------
// Product-K1 region reports
// ---------------------------------------------------------------------------

struct RegionSearchConfig {
    int block_rank_cap = 6;       // per-coordinate generator budget
    int subdivision_depth = 6;
    std::uint64_t exhaustive_budget = 1000000;
    // Entry-count conversion: each coefficient contributes this much mass
    // to the base measure (an entry and its negation).
    double mass_per_entry = 2.0;
    ExecMode exec = default_exec_mode();
    MCConfig mc;
    SumLawConfig sum;
};

struct RegionWitnessReport {
    BoundReport rank_bound;   // achieved total rank vs constant-free rank form
    BoundReport mass_bound;   // p * (mass outside region) vs constant-free cube form
    std::vector<std::vector<double>> blocks;  // fitted u^{(j)}
    std::vector<double> deltas;
    std::vector<int> block_ranks;
    Rational mass_outside{0};
    double consequence_covered = 0.0;  // n - (mass outside) / mass_per_entry
    std::vector<double> q_values;
    std::map<std::string, bool> flags;
};

// Searches per coordinate for K_1 generator blocks (limits all 1)
// minimizing the base-measure mass escaping the product region
// x_j within delta_j of K_1(u^{(j)}), then reports achieved rank and mass
// against the constant-free log forms. When every tau_j = delta_j = 0 the
// tail mass at 0 replaces the tail mass at 1 and the log-ratio terms are 0.
RegionWitnessReport verify_thm3(const WeightVector& a, const DiscreteDist& dist,
                                const std::vector<double>& tau, const std::vector<double>& delta,
                                const RegionSearchConfig& cfg = {});

// Same search; hypothesis gates tau_j/delta_j <= n^B and q_j >= n^-A, and
// the right-hand sides rewritten in the d*((A+B) log n + 1) form.
RegionWitnessReport verify_thm4(const WeightVector& a, const DiscreteDist& dist,
                                const std::vector<double>& tau, const std::vector<double>& delta,
                                double A, double B, const RegionSearchConfig& cfg = {});

}  // namespace concfn
