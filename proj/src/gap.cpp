#include "concfn/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "concfn/concentration.hpp"

namespace concfn {

// ---------------------------------------------------------------------------
// SymmetricGAP
// ---------------------------------------------------------------------------

SymmetricGAP SymmetricGAP::make(int d, std::vector<std::vector<double>> generators,
                                std::vector<double> limits) {
    if (d < 1) throw std::invalid_argument("gap dimension must be >= 1");
    if (generators.empty() || generators.size() != limits.size())
        throw std::invalid_argument("gap needs matching, nonempty generators and limits");
    for (double L : limits)
        if (!(L > 0)) throw std::invalid_argument("gap limits must be positive");
    SymmetricGAP k;
    k.d_ = d;
    k.limits_ = std::move(limits);
    k.generators_.reserve(generators.size() * static_cast<std::size_t>(d));
    for (const auto& g : generators) {
        if (static_cast<int>(g.size()) != d)
            throw std::invalid_argument("gap generator has wrong dimension");
        k.generators_.insert(k.generators_.end(), g.begin(), g.end());
    }
    return k;
}

long SymmetricGAP::coeff_bound(int j) const {
    return static_cast<long>(std::floor(limit(j)));
}

mpz_class SymmetricGAP::volume() const {
    mpz_class v(1);
    for (int j = 0; j < rank(); ++j) v *= 2 * coeff_bound(j) + 1;
    return v;
}

std::vector<std::vector<double>> SymmetricGAP::points(std::uint64_t cap) const {
    if (volume() > cap) throw EnumerationCapExceeded("gap volume exceeds enumeration cap");
    std::vector<long> bounds(static_cast<std::size_t>(rank()));
    std::vector<long> m(static_cast<std::size_t>(rank()));
    for (int j = 0; j < rank(); ++j) {
        bounds[static_cast<std::size_t>(j)] = coeff_bound(j);
        m[static_cast<std::size_t>(j)] = -bounds[static_cast<std::size_t>(j)];
    }
    std::map<std::vector<double>, bool> seen;
    bool done = false;
    while (!done) {
        std::vector<double> p(static_cast<std::size_t>(d_), 0.0);
        for (int j = 0; j < rank(); ++j) {
            const long c = m[static_cast<std::size_t>(j)];
            if (c == 0) continue;
            for (int i = 0; i < d_; ++i)
                p[static_cast<std::size_t>(i)] +=
                    static_cast<double>(c) * generators_[static_cast<std::size_t>(j) * d_ + i];
        }
        seen.emplace(std::move(p), true);
        int axis = 0;
        for (;; ++axis) {
            if (axis == rank()) {
                done = true;
                break;
            }
            if (++m[static_cast<std::size_t>(axis)] <= bounds[static_cast<std::size_t>(axis)])
                break;
            m[static_cast<std::size_t>(axis)] = -bounds[static_cast<std::size_t>(axis)];
        }
    }
    std::vector<std::vector<double>> out;
    out.reserve(seen.size());
    for (auto& [p, _] : seen) out.push_back(p);
    return out;
}

std::vector<double> SymmetricGAP::points1(std::uint64_t cap) const {
    if (d_ != 1) throw std::invalid_argument("points1 needs a one-dimensional gap");
    auto pts = points(cap);
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p[0]);
    std::sort(out.begin(), out.end());
    return out;
}

SymmetricGAP SymmetricGAP::scaled(double s) const {
    SymmetricGAP k(*this);
    for (double& g : k.generators_) g *= s;
    return k;
}

SymmetricGAP k1_construct(const std::vector<std::vector<double>>& u, int d) {
    std::vector<double> limits(u.size(), 1.0);
    return SymmetricGAP::make(d, u, std::move(limits));
}

SymmetricGAP k1_construct1(const std::vector<double>& u) {
    std::vector<std::vector<double>> gens;
    gens.reserve(u.size());
    for (double g : u) gens.push_back({g});
    return k1_construct(gens, 1);
}

// ---------------------------------------------------------------------------
// ProductK1Region
// ---------------------------------------------------------------------------

ProductK1Region ProductK1Region::make(std::vector<std::vector<double>> blocks,
                                      std::vector<double> deltas) {
    if (blocks.empty() || blocks.size() != deltas.size())
        throw std::invalid_argument("product region needs matching blocks and tolerances");
    for (double dl : deltas)
        if (dl < 0) throw std::invalid_argument("region tolerances must be >= 0");
    ProductK1Region r;
    r.deltas_ = std::move(deltas);
    r.block_points_.reserve(blocks.size());
    for (const auto& block : blocks) {
        if (block.empty()) throw std::invalid_argument("region blocks need rank >= 1");
        if (block.size() > 16)
            throw EnumerationCapExceeded("region block rank too large to enumerate");
        r.block_points_.push_back(k1_construct1(block).points1(1u << 26));
    }
    r.blocks_ = std::move(blocks);
    return r;
}

int ProductK1Region::total_rank() const {
    int total = 0;
    for (const auto& b : blocks_) total += static_cast<int>(b.size());
    return total;
}

double ProductK1Region::coordinate_distance(int j, double x) const {
    const auto& pts = block_points_[static_cast<std::size_t>(j)];
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != pts.end()) best = std::min(best, std::abs(*it - x));
    if (it != pts.begin()) best = std::min(best, std::abs(*(it - 1) - x));
    return best;
}

bool ProductK1Region::contains(std::span<const double> x, double extra_tol) const {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("point has wrong dimension for region");
    for (int j = 0; j < dim(); ++j)
        if (coordinate_distance(j, x[static_cast<std::size_t>(j)]) >
            deltas_[static_cast<std::size_t>(j)] + extra_tol)
            return false;
    return true;
}

SymmetricGAP ProductK1Region::combined() const {
    const int d = dim();
    std::vector<std::vector<double>> gens;
    for (int j = 0; j < d; ++j)
        for (double g : blocks_[static_cast<std::size_t>(j)]) {
            std::vector<double> v(static_cast<std::size_t>(d), 0.0);
            v[static_cast<std::size_t>(j)] = g;
            gens.push_back(std::move(v));
        }
    return k1_construct(gens, d);
}

// ---------------------------------------------------------------------------
// coverage / measure_outside
// ---------------------------------------------------------------------------

namespace {

double point_distance(std::span<const double> x, const std::vector<double>& p, Norm norm) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = std::abs(x[j] - p[j]);
        if (norm == Norm::max)
            acc = std::max(acc, diff);
        else
            acc += diff * diff;
    }
    return norm == Norm::max ? acc : std::sqrt(acc);
}

// Distance from x to the nearest in-range multiple of a rank-1 generator.
double rank1_distance(std::span<const double> x, std::span<const double> g, long bound,
                      Norm norm) {
    double gg = 0.0, xg = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        gg += g[j] * g[j];
        xg += x[j] * g[j];
    }
    long center = 0;
    if (gg > 0.0) {
        double proj = xg / gg;
        proj = std::min(proj, static_cast<double>(bound));
        proj = std::max(proj, -static_cast<double>(bound));
        center = std::lround(proj);
    }
    double best = std::numeric_limits<double>::infinity();
    for (long c = std::max(-bound, center - 2); c <= std::min(bound, center + 2); ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = std::abs(x[j] - static_cast<double>(c) * g[j]);
            if (norm == Norm::max)
                acc = std::max(acc, diff);
            else
                acc += diff * diff;
        }
        best = std::min(best, norm == Norm::max ? acc : std::sqrt(acc));
    }
    return best;
}

double gap_distance(std::span<const double> x, const SymmetricGAP& K,
                    const std::vector<std::vector<double>>* pts,
                    const std::vector<double>* pts1, Norm norm) {
    if (pts1) {
        auto it = std::lower_bound(pts1->begin(), pts1->end(), x[0]);
        double best = std::numeric_limits<double>::infinity();
        if (it != pts1->end()) best = std::min(best, std::abs(*it - x[0]));
        if (it != pts1->begin()) best = std::min(best, std::abs(*(it - 1) - x[0]));
        return best;
    }
    if (pts) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : *pts) best = std::min(best, point_distance(x, p, norm));
        return best;
    }
    return rank1_distance(x, K.generator(0), K.coeff_bound(0), norm);
}

}  // namespace

CoverageReport coverage(const WeightVector& a, const SymmetricGAP& K, double tol, Norm norm,
                        std::uint64_t cap) {
    if (a.d() != K.dim()) throw std::invalid_argument("weight vector / gap dimension mismatch");
    if (tol < 0) throw std::invalid_argument("coverage tolerance must be >= 0");

    std::vector<std::vector<double>> pts;
    std::vector<double> pts1;
    bool enumerated = true;
    try {
        if (K.dim() == 1)
            pts1 = K.points1(cap);
        else
            pts = K.points(cap);
    } catch (const EnumerationCapExceeded&) {
        if (K.rank() != 1) throw;
        enumerated = false;  // rank-1 closed form instead
    }

    CoverageReport rep;
    rep.tolerance = tol;
    rep.norm = norm;
    for (int k = 0; k < a.n(); ++k) {
        const double dist = gap_distance(a.entry(k), K,
                                         (enumerated && K.dim() > 1) ? &pts : nullptr,
                                         (enumerated && K.dim() == 1) ? &pts1 : nullptr, norm);
        if (dist <= tol)
            ++rep.covered_count;
        else
            rep.uncovered_indices.push_back(k);
    }
    return rep;
}

Rational measure_outside(const AtomicMeasure& W, const SymmetricGAP& K, double tol,
                         std::uint64_t cap) {
    if (W.dim() != K.dim()) throw std::invalid_argument("measure / gap dimension mismatch");
    std::vector<std::vector<double>> pts;
    std::vector<double> pts1;
    bool enumerated = true;
    try {
        if (K.dim() == 1)
            pts1 = K.points1(cap);
        else
            pts = K.points(cap);
    } catch (const EnumerationCapExceeded&) {
        if (K.rank() != 1) throw;
        enumerated = false;
    }
    Rational outside(0);
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double dist = gap_distance(W.position(i), K,
                                         (enumerated && K.dim() > 1) ? &pts : nullptr,
                                         (enumerated && K.dim() == 1) ? &pts1 : nullptr,
                                         Norm::euclidean);
        if (dist > tol) outside += W.mass(i);
    }
    return outside;
}

Rational measure_outside(const AtomicMeasure& W, const ProductK1Region& region, double tol) {
    if (W.dim() != region.dim())
        throw std::invalid_argument("measure / region dimension mismatch");
    Rational outside(0);
    for (std::size_t i = 0; i < W.size(); ++i)
        if (!region.contains(W.position(i), tol)) outside += W.mass(i);
    return outside;
}

// ---------------------------------------------------------------------------
// beta search
// ---------------------------------------------------------------------------

std::vector<double> candidate_generators(const std::vector<double>& xs, int depth) {
    std::vector<double> base;
    base.reserve(xs.size() * (xs.size() + 1) / 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        base.push_back(std::abs(xs[i]));
        for (std::size_t j = i + 1; j < xs.size(); ++j) base.push_back(std::abs(xs[i] - xs[j]));
    }
    std::vector<double> out;
    out.reserve(base.size() * static_cast<std::size_t>(depth));
    for (double b : base) {
        if (b == 0.0) continue;
        for (int t = 1; t <= depth; ++t) out.push_back(b / t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

long half_count(long volume_cap) { return volume_cap >= 1 ? (volume_cap - 1) / 2 : 0; }

double limit_for(long k) { return k >= 1 ? static_cast<double>(k) : 0.5; }

// Outside mass for the rank-1 progression {j*g : |j| <= bound}.
Rational rank1_outside(const AtomicMeasure& W, double g, long bound, double tau) {
    Rational outside(0);
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double x = W.position1(i);
        long j = 0;
        if (g != 0.0) {
            double t = x / g;
            t = std::min(t, static_cast<double>(bound));
            t = std::max(t, -static_cast<double>(bound));
            j = std::lround(t);
        }
        if (std::abs(x - static_cast<double>(j) * g) > tau) outside += W.mass(i);
    }
    return outside;
}

// Outside mass against a sorted point list.
Rational points_outside(const AtomicMeasure& W, const std::vector<double>& pts, double tau) {
    Rational outside(0);
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double x = W.position1(i);
        auto it = std::lower_bound(pts.begin(), pts.end(), x);
        double best = std::numeric_limits<double>::infinity();
        if (it != pts.end()) best = std::min(best, std::abs(*it - x));
        if (it != pts.begin()) best = std::min(best, std::abs(*(it - 1) - x));
        if (best > tau) outside += W.mass(i);
    }
    return outside;
}

std::vector<double> lattice_points(const std::vector<double>& gens,
                                   const std::vector<long>& bounds) {
    std::vector<long> m(gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j) m[j] = -bounds[j];
    std::vector<double> pts;
    bool done = false;
    while (!done) {
        double v = 0.0;
        for (std::size_t j = 0; j < gens.size(); ++j)
            v += static_cast<double>(m[j]) * gens[j];
        pts.push_back(v);
        std::size_t axis = 0;
        for (;; ++axis) {
            if (axis == gens.size()) {
                done = true;
                break;
            }
            if (++m[axis] <= bounds[axis]) break;
            m[axis] = -bounds[axis];
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

struct SearchEntry {
    Rational value;
    std::vector<double> gens;
    std::vector<long> bounds;

    mpz_class volume() const {
        mpz_class v(1);
        for (long b : bounds) v *= 2 * b + 1;
        return v;
    }
    // Total order: value, then rank, then volume, then generators.
    bool better_than(const SearchEntry& other) const {
        if (value != other.value) return value < other.value;
        if (gens.size() != other.gens.size()) return gens.size() < other.gens.size();
        const mpz_class va = volume(), vb = other.volume();
        if (va != vb) return va < vb;
        return gens < other.gens;
    }
};

SymmetricGAP entry_to_gap(const SearchEntry& e) {
    std::vector<std::vector<double>> gens;
    std::vector<double> limits;
    for (std::size_t j = 0; j < e.gens.size(); ++j) {
        gens.push_back({e.gens[j]});
        limits.push_back(limit_for(e.bounds[j]));
    }
    return SymmetricGAP::make(1, gens, limits);
}

}  // namespace

BetaResult beta(const AtomicMeasure& W, int r, int m, double tau, const BetaConfig& cfg) {
    if (W.dim() != 1) throw std::invalid_argument("beta search needs a one-dimensional measure");
    if (r < 1 || m < 1) throw std::invalid_argument("beta needs r >= 1 and m >= 1");
    if (r > cfg.max_rank)
        throw std::invalid_argument("beta rank above configured maximum (" +
                                    std::to_string(cfg.max_rank) + ")");
    if (tau < 0) throw std::invalid_argument("beta needs tau >= 0");

    std::vector<double> xs(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) xs[i] = W.position1(i);

    const std::vector<double> cands = candidate_generators(xs, cfg.subdivision_depth);
    const long k1cap = half_count(m);

    // Degenerate progression {0}; also the fallback when no candidates exist.
    SearchEntry best{rank1_outside(W, 0.0, 0, tau), {0.0}, {0}};

    // Rank 1: exhaustive over candidates (parallel, serial reduction).
    if (!cands.empty()) {
        std::vector<Rational> values(cands.size());
        parallel_for(cands.size(), cfg.exec, [&](std::size_t i) {
            values[i] = rank1_outside(W, cands[i], k1cap, tau);
        });
        for (std::size_t i = 0; i < cands.size(); ++i) {
            SearchEntry e{values[i], {cands[i]}, {k1cap}};
            if (e.better_than(best)) best = e;
        }
    }

    bool exhaustive = true;
    if (r >= 2 && m >= 3 && !cands.empty()) {
        // Rank 2: exhaustive over (pair, volume split) within budget. For a
        // fixed first limit the second is taken maximal, which dominates
        // every smaller choice.
        const std::uint64_t pair_count = cands.size() * (cands.size() + 1) / 2;
        const std::uint64_t evals = pair_count * static_cast<std::uint64_t>(k1cap + 1);
        if (evals <= cfg.pair_budget) {
            std::vector<SearchEntry> chunk_best;
            const std::uint64_t chunk = 1024;
            const std::uint64_t chunks = (pair_count + chunk - 1) / chunk;
            chunk_best.resize(chunks, best);
            parallel_for(chunks, cfg.exec, [&](std::size_t c) {
                SearchEntry local = best;
                const std::uint64_t begin = c * chunk;
                const std::uint64_t end = std::min(pair_count, begin + chunk);
                for (std::uint64_t flat = begin; flat < end; ++flat) {
                    // Unrank the (i <= j) pair.
                    std::size_t i = 0;
                    std::uint64_t rem = flat;
                    std::uint64_t row = cands.size();
                    while (rem >= row) {
                        rem -= row;
                        --row;
                        ++i;
                    }
                    const std::size_t j = i + static_cast<std::size_t>(rem);
                    for (long ka = 0; ka <= k1cap; ++ka) {
                        const long vol1 = 2 * ka + 1;
                        if (vol1 > m) break;
                        const long kb = half_count(m / vol1);
                        const std::vector<double> gens{cands[i], cands[j]};
                        const std::vector<long> bounds{ka, kb};
                        const auto pts = lattice_points(gens, bounds);
                        SearchEntry e{points_outside(W, pts, tau), gens, bounds};
                        if (e.better_than(local)) local = e;
                    }
                }
                chunk_best[c] = local;
            });
            for (const auto& e : chunk_best)
                if (e.better_than(best)) best = e;
        } else {
            exhaustive = false;
        }
    }

    // Greedy extension up to rank r: refit on the atoms still outside and
    // append the generator that helps most, within the leftover volume.
    while (static_cast<int>(best.gens.size()) < r && best.value > 0) {
        const auto current_pts = lattice_points(best.gens, best.bounds);
        std::vector<double> remaining;
        for (std::size_t i = 0; i < W.size(); ++i) {
            const double x = W.position1(i);
            auto it = std::lower_bound(current_pts.begin(), current_pts.end(), x);
            double bestd = std::numeric_limits<double>::infinity();
            if (it != current_pts.end()) bestd = std::min(bestd, std::abs(*it - x));
            if (it != current_pts.begin()) bestd = std::min(bestd, std::abs(*(it - 1) - x));
            if (bestd > tau) remaining.push_back(x);
        }
        if (remaining.empty()) break;
        mpz_class used = best.volume();
        mpz_class leftover = used > 0 ? mpz_class(m / used) : mpz_class(0);
        if (leftover < 3) break;
        const long kc = half_count(leftover.get_si());
        const std::vector<double> extra = candidate_generators(remaining, cfg.subdivision_depth);
        if (extra.empty()) break;
        std::vector<SearchEntry> scored(extra.size());
        parallel_for(extra.size(), cfg.exec, [&](std::size_t i) {
            std::vector<double> gens(best.gens);
            std::vector<long> bounds(best.bounds);
            gens.push_back(extra[i]);
            bounds.push_back(kc);
            const auto pts = lattice_points(gens, bounds);
            scored[i] = SearchEntry{points_outside(W, pts, tau), gens, bounds};
        });
        SearchEntry step = best;
        for (const auto& e : scored)
            if (e.better_than(step)) step = e;
        if (!step.better_than(best)) break;
        best = step;
    }

    return BetaResult{best.value, entry_to_gap(best), exhaustive};
}

BoundReport thm1_report(const WeightVector& a, const DiscreteDist& dist, double tau,
                        double kappa, double delta, int r, int m, const Thm1Config& cfg) {
    if (a.d() != 1) throw std::invalid_argument("rank/volume bound implemented for d = 1");
    if (kappa <= 0 || delta <= 0)
        throw std::invalid_argument("needs kappa > 0 and delta > 0");

    BoundReport rep;
    rep.id = InequalityId::thm1;
    rep.params["tau"] = format_double(tau);
    rep.params["kappa"] = format_double(kappa);
    rep.params["delta"] = format_double(delta);
    rep.params["r"] = std::to_string(r);
    rep.params["m"] = std::to_string(m);
    rep.params["n"] = std::to_string(a.n());

    const DiscreteDist sym = dist.symmetrize();
    const Rational p = sym.tail_mass(rational_from_double(tau) / rational_from_double(kappa));
    rep.params["p"] = rational_to_string(p);
    if (p == 0) {
        rep.flags.push_back("vacuous:p_zero");
        rep.set_sides(0.0, std::numeric_limits<double>::infinity());
        return rep;
    }

    const AtomicMeasure M = levy_base_measure(a).scaled_mass(p / 4);
    const BetaResult b = beta(M, r, m, delta, cfg.beta);
    rep.params["beta"] = rational_to_string(b.value);
    {
        std::string gens;
        for (int j = 0; j < b.witness.rank(); ++j) {
            if (j) gens += ",";
            gens += format_double(b.witness.generator1(j));
        }
        rep.params["beta_witness_generators"] = gens;
    }

    const auto q = q_exact(weighted_sum_law(a, dist, cfg.sum), rational_from_double(tau));
    rep.params["lhs_exact"] = rational_to_string(*q.exact);

    if (b.value == 0) {
        rep.flags.push_back("vacuous:beta_zero");
        rep.set_sides(q.value, std::numeric_limits<double>::infinity());
        return rep;
    }

    const long fl = strict_floor_rational(rational_from_double(kappa) /
                                          rational_from_double(delta));
    const double bd = b.value.get_d();
    const double rhs = static_cast<double>(1 + fl) *
                       (1.0 / (m * std::sqrt(bd)) + std::pow(bd, -(r + 1) / 2.0));
    rep.set_sides(q.value, rhs);
    return rep;
}

}  // namespace concfn
