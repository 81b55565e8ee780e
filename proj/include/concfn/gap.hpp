#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "concfn/atomic_measure.hpp"
#include "concfn/bound_report.hpp"
#include "concfn/discrete_dist.hpp"
#include "concfn/exec.hpp"
#include "concfn/rational.hpp"
#include "concfn/weight_vector.hpp"

namespace concfn {

class EnumerationCapExceeded : public std::runtime_error {
public:
    explicit EnumerationCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Symmetric generalized arithmetic progression
//   K = { m_1 g_1 + ... + m_r g_r : -L_j <= m_j <= L_j, m_j integer }
// with generators g_j in d-space and positive real limits L_j. The volume
// Vol(K) = prod(2*floor(L_j)+1) counts coefficient tuples, so the
// enumerated point set has |K| <= Vol(K), with equality exactly when no two
// coefficient tuples collide.
class SymmetricGAP {
public:
    static SymmetricGAP make(int d, std::vector<std::vector<double>> generators,
                             std::vector<double> limits);

    int dim() const { return d_; }
    int rank() const { return static_cast<int>(limits_.size()); }
    std::span<const double> generator(int j) const {
        return {generators_.data() + static_cast<std::size_t>(j) * d_,
                static_cast<std::size_t>(d_)};
    }
    double generator1(int j) const { return generators_[static_cast<std::size_t>(j) * d_]; }
    double limit(int j) const { return limits_[static_cast<std::size_t>(j)]; }
    long coeff_bound(int j) const;  // floor(L_j)

    mpz_class volume() const;

    // Deduplicated enumeration of all integer combinations (exact-equality
    // coalescing); row-major points. Throws EnumerationCapExceeded when
    // Vol(K) > cap.
    std::vector<std::vector<double>> points(std::uint64_t cap) const;

    // Sorted scalar point list for d = 1.
    std::vector<double> points1(std::uint64_t cap) const;

    SymmetricGAP scaled(double s) const;

private:
    SymmetricGAP() = default;
    int d_ = 1;
    std::vector<double> generators_;  // rank * d, row-major
    std::vector<double> limits_;
};

// K_1(u): all limits equal to 1, so coefficients range over {-1, 0, 1} and
// Vol = 3^rank.
SymmetricGAP k1_construct(const std::vector<std::vector<double>>& u, int d);
SymmetricGAP k1_construct1(const std::vector<double>& u);  // d = 1

// Product of per-coordinate K_1 neighborhoods: x belongs iff every
// coordinate x_j lies within delta_j of some point of K_1(u^{(j)}).
class ProductK1Region {
public:
    static ProductK1Region make(std::vector<std::vector<double>> blocks,
                                std::vector<double> deltas);

    int dim() const { return static_cast<int>(deltas_.size()); }
    const std::vector<double>& block(int j) const { return blocks_[static_cast<std::size_t>(j)]; }
    double delta(int j) const { return deltas_[static_cast<std::size_t>(j)]; }
    int block_rank(int j) const { return static_cast<int>(blocks_[static_cast<std::size_t>(j)].size()); }
    int total_rank() const;

    double coordinate_distance(int j, double x) const;
    bool contains(std::span<const double> x, double extra_tol = 0.0) const;

    // The combined GAP of rank sum(r_j): generators u_s each nonzero in a
    // single coordinate, limits all 1.
    SymmetricGAP combined() const;

private:
    ProductK1Region() = default;
    std::vector<std::vector<double>> blocks_;        // per-coordinate generators
    std::vector<std::vector<double>> block_points_;  // sorted K_1(u^{(j)}) point sets
    std::vector<double> deltas_;
};

enum class Norm { euclidean, max };

struct CoverageReport {
    int covered_count = 0;
    std::vector<int> uncovered_indices;
    double tolerance = 0.0;
    Norm norm = Norm::max;
};

// Distance of every entry of a to the enumerated point set of K; entries
// within tol (closed inequality) count as covered.
CoverageReport coverage(const WeightVector& a, const SymmetricGAP& K, double tol, Norm norm,
                        std::uint64_t cap = 1u << 22);

// Total mass of atoms of W farther than tol from the region (exact
// rational arithmetic on masses).
Rational measure_outside(const AtomicMeasure& W, const SymmetricGAP& K, double tol,
                         std::uint64_t cap = 1u << 22);
Rational measure_outside(const AtomicMeasure& W, const ProductK1Region& region,
                         double tol = 0.0);

// Candidate generators for the GAP searches: absolute atom positions,
// absolute pairwise differences, and their divisions by 1..depth.
// Deduplicated, ascending, zero excluded.
std::vector<double> candidate_generators(const std::vector<double>& xs, int depth);

struct BetaConfig {
    int subdivision_depth = 6;     // candidate generators: differences / t, t <= depth
    int max_rank = 4;
    std::uint64_t pair_budget = 4000000;  // rank-2 exhaustive (pair, split) evaluations
    ExecMode exec = default_exec_mode();
};

struct BetaResult {
    Rational value;
    SymmetricGAP witness;
    // True when the exhaustive rank <= 2 pass ran (pair budget not hit).
    bool exhaustive = true;
};

// beta_{r,m}(W, tau): least W-mass escaping the closed tau-neighborhood of
// a symmetric GAP of rank <= r and volume <= m, searched over candidate
// generators drawn from atom positions, pairwise differences, and their
// integer subdivisions. Rank 1 and 2 are exhaustive over candidates within
// budget; higher ranks extend greedily (peel covered mass, refit). The
// search only ever evaluates genuine family members, so its value never
// undershoots the true infimum over the candidate-generated family.
// Ties break by smallest rank, then volume, then generator list.
BetaResult beta(const AtomicMeasure& W, int r, int m, double tau, const BetaConfig& cfg = {});

struct Thm1Config {
    BetaConfig beta;
    SumLawConfig sum;
};

// Rank/volume-structured concentration bound: Q(F_a, tau) against
// (1 + strict_floor(kappa/delta)) * (1/(m sqrt(beta)) + beta^{-(r+1)/2})
// with beta = beta_{r,m}(M, delta), M = (p(tau/kappa)/4) M*.
BoundReport thm1_report(const WeightVector& a, const DiscreteDist& dist, double tau,
                        double kappa, double delta, int r, int m,
                        const Thm1Config& cfg = {});

}  // namespace concfn
