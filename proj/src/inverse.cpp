#include "concfn/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

#include "concfn/smoothing.hpp"

namespace concfn {

// ---------------------------------------------------------------------------
// plant
// ---------------------------------------------------------------------------

PlantedInstance plant(const PlantSpec& spec, std::uint64_t seed) {
    if (spec.n < 1) throw std::invalid_argument("plant needs n >= 1");
    if (spec.d < 1) throw std::invalid_argument("plant needs d >= 1");
    if (spec.rank < 1) throw std::invalid_argument("plant needs rank >= 1");
    if (spec.outlier_fraction < 0 || spec.outlier_fraction >= 1)
        throw std::invalid_argument("outlier fraction must be in [0, 1)");
    if (spec.noise < 0) throw std::invalid_argument("noise must be >= 0");

    Xoshiro256 rng(derive_seed(seed, 0));

    std::vector<std::vector<double>> gens = spec.generators;
    if (gens.empty()) {
        // Random generators at well-separated scales.
        double scale = 1.0;
        for (int j = 0; j < spec.rank; ++j) {
            std::vector<double> g(static_cast<std::size_t>(spec.d), 0.0);
            const int axis = spec.d == 1 ? 0 : static_cast<int>(rng.uniform_index(
                                                   static_cast<std::uint64_t>(spec.d)));
            g[static_cast<std::size_t>(axis)] = rng.uniform(1.0, 2.0) * scale;
            gens.push_back(std::move(g));
            scale *= 64.0;
        }
    } else if (static_cast<int>(gens.size()) != spec.rank) {
        throw std::invalid_argument("plant generator count must match rank");
    }
    bool any_nonzero = false;
    for (const auto& g : gens)
        for (double v : g)
            if (v != 0.0) any_nonzero = true;
    if (!any_nonzero) throw std::invalid_argument("plant needs a nonzero generator");

    std::vector<double> limits = spec.limits;
    if (limits.empty()) limits.assign(gens.size(), 2.0);
    const SymmetricGAP truth = SymmetricGAP::make(spec.d, gens, limits);
    const auto pts = truth.points(1u << 20);

    double diameter = 0.0;
    for (const auto& p : pts)
        for (double v : p) diameter = std::max(diameter, std::abs(v));
    if (diameter == 0.0) diameter = 1.0;

    const int out_count = static_cast<int>(
        std::ceil(spec.outlier_fraction * static_cast<double>(spec.n) - 1e-12));
    const int struct_count = spec.n - out_count;

    std::vector<std::vector<double>> entries;
    entries.reserve(static_cast<std::size_t>(spec.n));
    // Structure entries cycle through the point list so every point gets
    // roughly equal multiplicity; exact points when noise is 0.
    for (int i = 0; i < struct_count; ++i) {
        std::vector<double> e = pts[static_cast<std::size_t>(i) % pts.size()];
        if (spec.noise > 0)
            for (double& v : e) v += spec.noise * (2.0 * rng.uniform01() - 1.0);
        entries.push_back(std::move(e));
    }
    for (int i = 0; i < out_count; ++i) {
        std::vector<double> e(static_cast<std::size_t>(spec.d));
        for (double& v : e) {
            const double mag = rng.uniform(10.0 * diameter, 20.0 * diameter);
            v = rng.uniform01() < 0.5 ? -mag : mag;
        }
        entries.push_back(std::move(e));
    }

    // Fisher-Yates; track where the outliers land.
    std::vector<int> tags(entries.size(), 0);
    for (std::size_t i = static_cast<std::size_t>(struct_count); i < entries.size(); ++i)
        tags[i] = 1;
    for (std::size_t i = entries.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(entries[i - 1], entries[j]);
        std::swap(tags[i - 1], tags[j]);
    }

    std::vector<int> outliers;
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (tags[i]) outliers.push_back(static_cast<int>(i));
    return PlantedInstance{WeightVector::make(spec.d, std::move(entries)), truth,
                           spec.noise, spec.outlier_fraction, seed, std::move(outliers)};
}

// ---------------------------------------------------------------------------
// Per-coordinate GAP fitting
// ---------------------------------------------------------------------------

namespace {

long half_count(long volume_cap) { return volume_cap >= 1 ? (volume_cap - 1) / 2 : 0; }

// Cluster representatives at resolution tol: walking the sorted distinct
// values, a new cluster starts when the gap to the cluster head exceeds
// tol. Representatives are actual entry values, never rounded midpoints.
std::vector<double> representatives(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (tol <= 0) return values;
    std::vector<double> reps;
    double head = 0.0;
    for (double v : values) {
        if (reps.empty() || v - head > tol) {
            reps.push_back(v);
            head = v;
        }
    }
    return reps;
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

double nearest_distance(const std::vector<double>& sorted_pts, double x) {
    auto it = std::lower_bound(sorted_pts.begin(), sorted_pts.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted_pts.end()) best = std::min(best, std::abs(*it - x));
    if (it != sorted_pts.begin()) best = std::min(best, std::abs(*(it - 1) - x));
    return best;
}

struct CoordFit {
    std::vector<double> gens;
    std::vector<long> bounds;
    int covered = 0;
    mpz_class volume{1};
    std::vector<double> pts;  // enumerated sorted point set

    // Order: coverage desc, rank asc, volume asc, generators lex asc.
    bool better_than(const CoordFit& other) const {
        if (covered != other.covered) return covered > other.covered;
        if (gens.size() != other.gens.size()) return gens.size() < other.gens.size();
        if (volume != other.volume) return volume < other.volume;
        return gens < other.gens;
    }
};

CoordFit evaluate_fit(const std::vector<double>& values, const std::vector<double>& gens,
                      const std::vector<long>& bounds, double tol) {
    CoordFit f;
    f.gens = gens;
    f.bounds = bounds;
    f.pts = lattice_points(gens, bounds);
    for (double v : values)
        if (nearest_distance(f.pts, v) <= tol) ++f.covered;
    for (long b : bounds) f.volume *= 2 * b + 1;
    return f;
}

// Trim limits to the coefficients actually used by covered values, for
// rank-1 fits: |j| <= kcap, nearest multiple.
CoordFit rank1_fit(const std::vector<double>& values, double g, long kcap, double tol) {
    long needed = 0;
    int covered = 0;
    for (double v : values) {
        long j = 0;
        if (g != 0.0) {
            double t = v / g;
            t = std::min(t, static_cast<double>(kcap));
            t = std::max(t, -static_cast<double>(kcap));
            j = std::lround(t);
        }
        if (std::abs(v - static_cast<double>(j) * g) <= tol) {
            ++covered;
            needed = std::max(needed, std::labs(j));
        }
    }
    CoordFit f;
    f.gens = {g};
    f.bounds = {needed};
    f.covered = covered;
    f.volume = 2 * needed + 1;
    return f;
}

// Best GAP for one coordinate: exhaustive rank-1 candidate scan, exhaustive
// rank <= 2 (pair, split) within budget, then greedy extension up to the
// rank budget. Coverage is maximized, not merely pushed past the target.
CoordFit fit_coordinate(const std::vector<double>& values, double tol, int rank_budget,
                        long volume_budget, const FitConfig& cfg) {
    const std::vector<double> reps = representatives(values, tol);
    const std::vector<double> cands = candidate_generators(reps, cfg.subdivision_depth);
    const long kcap = half_count(volume_budget);

    CoordFit best = rank1_fit(values, 0.0, 0, tol);  // degenerate {0}

    if (!cands.empty()) {
        std::vector<CoordFit> scored(cands.size());
        parallel_for(cands.size(), cfg.exec, [&](std::size_t i) {
            scored[i] = rank1_fit(values, cands[i], kcap, tol);
        });
        for (auto& f : scored)
            if (f.better_than(best)) best = f;
    }

    if (rank_budget >= 2 && volume_budget >= 3 && !cands.empty()) {
        const std::uint64_t pair_count = cands.size() * (cands.size() + 1) / 2;
        const std::uint64_t evals =
            pair_count * static_cast<std::uint64_t>(half_count(volume_budget) + 1);
        if (evals <= cfg.exhaustive_budget) {
            const std::uint64_t chunk = 512;
            const std::uint64_t chunks = (pair_count + chunk - 1) / chunk;
            std::vector<CoordFit> chunk_best(chunks, best);
            parallel_for(chunks, cfg.exec, [&](std::size_t c) {
                CoordFit local = best;
                const std::uint64_t begin = c * chunk;
                const std::uint64_t end = std::min(pair_count, begin + chunk);
                for (std::uint64_t flat = begin; flat < end; ++flat) {
                    std::size_t i = 0;
                    std::uint64_t rem = flat;
                    std::uint64_t row = cands.size();
                    while (rem >= row) {
                        rem -= row;
                        --row;
                        ++i;
                    }
                    const std::size_t j = i + static_cast<std::size_t>(rem);
                    for (long ka = 0;; ++ka) {
                        const long vol1 = 2 * ka + 1;
                        if (vol1 > volume_budget) break;
                        const long kb = half_count(volume_budget / vol1);
                        CoordFit f = evaluate_fit(values, {cands[i], cands[j]}, {ka, kb}, tol);
                        // Trim to the used coefficient range.
                        if (f.better_than(local)) {
                            local = f;
                        }
                    }
                }
                chunk_best[c] = local;
            });
            for (auto& f : chunk_best)
                if (f.better_than(best)) best = f;
        }
    }

    // Greedy extension on the still-uncovered values.
    while (static_cast<int>(best.gens.size()) < rank_budget &&
           best.covered < static_cast<int>(values.size())) {
        if (best.pts.empty()) best.pts = lattice_points(best.gens, best.bounds);
        std::vector<double> remaining;
        for (double v : values)
            if (nearest_distance(best.pts, v) > tol) remaining.push_back(v);
        if (remaining.empty()) break;
        const mpz_class used = best.volume;
        if (used * 3 > volume_budget) break;
        const long kc = half_count(mpz_class(volume_budget / used).get_si());
        const std::vector<double> extra =
            candidate_generators(representatives(remaining, tol), cfg.subdivision_depth);
        if (extra.empty()) break;
        // Bound the appended coefficient range by the data span.
        double span = 0.0;
        for (double v : values) span = std::max(span, std::abs(v));
        std::vector<CoordFit> scored(extra.size());
        parallel_for(extra.size(), cfg.exec, [&](std::size_t i) {
            const double g = extra[i];
            long kg = kc;
            if (g > 0) kg = std::min(kg, static_cast<long>(span / g) + 1);
            std::vector<double> gens = best.gens;
            std::vector<long> bounds = best.bounds;
            gens.push_back(g);
            bounds.push_back(kg);
            scored[i] = evaluate_fit(values, gens, bounds, tol);
        });
        CoordFit step = best;
        for (auto& f : scored)
            if (f.better_than(step)) step = f;
        if (!step.better_than(best)) break;
        best = step;
    }

    if (best.pts.empty()) best.pts = lattice_points(best.gens, best.bounds);
    return best;
}

SymmetricGAP assemble_product(const std::vector<CoordFit>& fits, int d) {
    std::vector<std::vector<double>> gens;
    std::vector<double> limits;
    for (int j = 0; j < d; ++j) {
        const CoordFit& f = fits[static_cast<std::size_t>(j)];
        for (std::size_t s = 0; s < f.gens.size(); ++s) {
            std::vector<double> g(static_cast<std::size_t>(d), 0.0);
            g[static_cast<std::size_t>(j)] = f.gens[s];
            gens.push_back(std::move(g));
            limits.push_back(f.bounds[s] >= 1 ? static_cast<double>(f.bounds[s]) : 0.5);
        }
    }
    return SymmetricGAP::make(d, gens, limits);
}

}  // namespace

InversePrincipleReport fit_gap(const WeightVector& a, double tol, int nprime,
                               const FitConfig& cfg) {
    if (tol < 0) throw std::invalid_argument("fit tolerance must be >= 0");
    if (nprime < 1 || nprime > a.n())
        throw std::invalid_argument("fit needs 1 <= n' <= n");

    const int d = a.d();
    const int rank_budget = std::max(1, cfg.rank_cap / d);
    long volume_budget = static_cast<long>(cfg.volume_cap);
    if (d > 1) {
        volume_budget = static_cast<long>(
            std::floor(std::pow(static_cast<double>(cfg.volume_cap), 1.0 / d)));
        while (std::pow(static_cast<double>(volume_budget + 1), d) <=
               static_cast<double>(cfg.volume_cap))
            ++volume_budget;
        volume_budget = std::max<long>(volume_budget, 1);
    }

    std::vector<CoordFit> fits;
    fits.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        std::vector<double> values(static_cast<std::size_t>(a.n()));
        for (int k = 0; k < a.n(); ++k) values[static_cast<std::size_t>(k)] = a.coord(k, j);
        fits.push_back(fit_coordinate(values, tol, rank_budget, volume_budget, cfg));
    }

    InversePrincipleReport rep;
    rep.fitted = assemble_product(fits, d);
    rep.rank = rep.fitted->rank();
    rep.cardinality = 1;
    for (const auto& f : fits) rep.cardinality *= static_cast<unsigned long>(f.pts.size());
    // Independent recount through the generic coverage path.
    rep.coverage = coverage(a, *rep.fitted, tol, Norm::max, 1u << 24);
    rep.params["tol"] = format_double(tol);
    rep.params["nprime"] = std::to_string(nprime);
    rep.params["rank_cap"] = std::to_string(cfg.rank_cap);
    rep.params["volume_cap"] = std::to_string(cfg.volume_cap);
    rep.params["n"] = std::to_string(a.n());
    rep.params["d"] = std::to_string(d);
    rep.flags["coverage_pass"] = rep.coverage.covered_count >= a.n() - d * nprime;
    rep.flags["caps_ok"] = rep.rank <= cfg.rank_cap &&
                           rep.cardinality <= static_cast<long>(cfg.volume_cap);
    return rep;
}

InversePrincipleReport verify_thm2(const WeightVector& a, const DiscreteDist& dist,
                                   const Thm2Params& p, const FitConfig& fit_cfg,
                                   const MCConfig& mc_cfg, const SumLawConfig& sum_cfg) {
    if (p.epsilon <= 0 || p.epsilon > 1) throw std::invalid_argument("epsilon in (0, 1]");
    if (p.theta <= 0 || p.theta > 1) throw std::invalid_argument("theta in (0, 1]");
    if (p.A <= 0 || p.B <= 0) throw std::invalid_argument("A, B must be positive");

    const int n = a.n();
    const int d = a.d();
    const double nd = static_cast<double>(n);

    const double lower = p.epsilon * std::pow(nd, p.theta);
    int nprime = p.nprime.value_or(
        static_cast<int>(std::lround(std::sqrt(lower * nd))));
    nprime = std::max(1, std::min(nprime, n));

    const CoordinateBounds cb = q_coordinate_bounds(a, dist, p.tau, mc_cfg, sum_cfg);

    InversePrincipleReport rep =
        fit_gap(a, p.tau * p.rho, nprime, fit_cfg);
    for (const auto& q : cb.q) rep.q_values.push_back(q.value);

    // Hypothesis gates; violations are flagged, the harness still reports.
    bool hyp_q = true;
    for (const auto& q : cb.q) hyp_q = hyp_q && q.value >= std::pow(nd, -p.A);
    rep.flags["hypothesis_q"] = hyp_q;
    rep.flags["hypothesis_rho"] = p.rho >= std::pow(nd, -p.B) && p.rho <= 1.0;
    rep.flags["hypothesis_nprime"] =
        static_cast<double>(nprime) >= lower && nprime <= n;
    const DiscreteDist sym = dist.symmetrize();
    rep.flags["hypothesis_spread"] = sym.tail_mass(Rational(1)) > 0;

    // Constant-free cardinality forms.
    double product_component = 1.0;
    for (const auto& q : cb.q) {
        const double comp = std::max(
            1.0 / (q.value * p.rho * std::sqrt(static_cast<double>(nprime))), 1.0);
        rep.cardinality_components.push_back(comp);
        product_component *= comp;
    }
    const double card = rep.cardinality.get_d();
    rep.ratios["thm2_cardinality_ratio"] = card / product_component;

    double q_joint;
    if (d == 1) {
        q_joint = cb.q[0].value;
        rep.params["q_joint_method"] = "exact";
    } else {
        MCConfig mc = mc_cfg;
        mc.seed = derive_seed(mc_cfg.seed, 211);
        PointSampler s;
        s.dim = d;
        s.draw = [&a, &dist](Xoshiro256& rng, double* out) {
            for (int j = 0; j < a.d(); ++j) out[j] = 0.0;
            for (int k = 0; k < a.n(); ++k) {
                const double x = dist.sample(rng);
                for (int j = 0; j < a.d(); ++j) out[j] += x * a.coord(k, j);
            }
        };
        q_joint = q_monte_carlo(s, p.tau, mc).value;
        rep.params["q_joint_method"] = "monte_carlo";
    }
    rep.ratios["eq12sp_cardinality_ratio"] =
        card / std::max(1.0 / (q_joint * std::sqrt(static_cast<double>(nprime))), 1.0);
    rep.params["q_joint"] = format_double(q_joint);

    rep.flags["cardinality_pass"] =
        rep.ratios["thm2_cardinality_ratio"] <= fit_cfg.pass_ratio_threshold;
    rep.params["tau"] = format_double(p.tau);
    rep.params["rho"] = format_double(p.rho);
    rep.params["epsilon"] = format_double(p.epsilon);
    rep.params["theta"] = format_double(p.theta);
    rep.params["A"] = format_double(p.A);
    rep.params["B"] = format_double(p.B);
    rep.params["nprime"] = std::to_string(nprime);
    return rep;
}

// ---------------------------------------------------------------------------
// Product-K1 region search
// ---------------------------------------------------------------------------

namespace {

struct WeightedValue {
    double value;
    Rational mass;
};

// Distinct coordinate values of a measure with aggregated masses.
std::vector<WeightedValue> aggregate_coordinate(const AtomicMeasure& W, int j) {
    std::map<double, Rational> acc;
    for (std::size_t i = 0; i < W.size(); ++i) acc[W.position(i)[j]] += W.mass(i);
    std::vector<WeightedValue> out;
    out.reserve(acc.size());
    for (auto& [v, m] : acc) out.push_back({v, m});
    return out;
}

// Candidates for K_1 blocks: coefficients are restricted to {-1,0,1}, so
// integer subdivisions of the data never help; values and their pairwise
// differences do.
std::vector<double> block_candidates(const std::vector<WeightedValue>& values) {
    std::vector<double> xs;
    xs.reserve(values.size());
    for (const auto& wv : values) xs.push_back(wv.value);
    return candidate_generators(xs, 1);
}

struct BlockFit {
    std::vector<double> gens;
    std::vector<double> pts{0.0};
    Rational covered{0};

    bool better_than(const BlockFit& other) const {
        if (covered != other.covered) return covered > other.covered;
        if (gens.size() != other.gens.size()) return gens.size() < other.gens.size();
        return gens < other.gens;
    }
};

std::vector<double> extend_points(const std::vector<double>& pts, double g) {
    std::vector<double> out;
    out.reserve(pts.size() * 3);
    for (double p : pts) {
        out.push_back(p - g);
        out.push_back(p);
        out.push_back(p + g);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Rational covered_mass(const std::vector<WeightedValue>& values, const std::vector<double>& pts,
                      double delta) {
    Rational covered(0);
    for (const auto& wv : values)
        if (nearest_distance(pts, wv.value) <= delta) covered += wv.mass;
    return covered;
}

// K_1 block for one coordinate: singles and pairs exhaustively (within
// budget), then greedy extension to the rank cap.
BlockFit fit_block(const std::vector<WeightedValue>& values, double delta,
                   const RegionSearchConfig& cfg) {
    const std::vector<double> cands = block_candidates(values);
    BlockFit best;
    best.covered = covered_mass(values, best.pts, delta);
    if (cands.empty()) {
        best.gens = {0.0};
        return best;
    }

    std::vector<BlockFit> singles(cands.size());
    parallel_for(cands.size(), cfg.exec, [&](std::size_t i) {
        BlockFit f;
        f.gens = {cands[i]};
        f.pts = extend_points({0.0}, cands[i]);
        f.covered = covered_mass(values, f.pts, delta);
        singles[i] = f;
    });
    for (auto& f : singles)
        if (f.better_than(best)) best = f;

    const std::uint64_t pair_count = cands.size() * (cands.size() + 1) / 2;
    if (cfg.block_rank_cap >= 2 && pair_count <= cfg.exhaustive_budget) {
        const std::uint64_t chunk = 512;
        const std::uint64_t chunks = (pair_count + chunk - 1) / chunk;
        std::vector<BlockFit> chunk_best(chunks, best);
        parallel_for(chunks, cfg.exec, [&](std::size_t c) {
            BlockFit local = best;
            const std::uint64_t begin = c * chunk;
            const std::uint64_t end = std::min(pair_count, begin + chunk);
            for (std::uint64_t flat = begin; flat < end; ++flat) {
                std::size_t i = 0;
                std::uint64_t rem = flat;
                std::uint64_t row = cands.size();
                while (rem >= row) {
                    rem -= row;
                    --row;
                    ++i;
                }
                const std::size_t j = i + static_cast<std::size_t>(rem);
                BlockFit f;
                f.gens = {cands[i], cands[j]};
                f.pts = extend_points(extend_points({0.0}, cands[i]), cands[j]);
                f.covered = covered_mass(values, f.pts, delta);
                if (f.better_than(local)) local = f;
            }
            chunk_best[c] = local;
        });
        for (auto& f : chunk_best)
            if (f.better_than(best)) best = f;
    }

    // Greedy extension.
    Rational total(0);
    for (const auto& wv : values) total += wv.mass;
    while (static_cast<int>(best.gens.size()) < cfg.block_rank_cap && best.covered < total) {
        std::vector<WeightedValue> remaining;
        for (const auto& wv : values)
            if (nearest_distance(best.pts, wv.value) > delta) remaining.push_back(wv);
        if (remaining.empty()) break;
        const std::vector<double> extra = block_candidates(remaining);
        if (extra.empty()) break;
        std::vector<BlockFit> scored(extra.size());
        parallel_for(extra.size(), cfg.exec, [&](std::size_t i) {
            BlockFit f;
            f.gens = best.gens;
            f.gens.push_back(extra[i]);
            f.pts = extend_points(best.pts, extra[i]);
            f.covered = covered_mass(values, f.pts, delta);
            scored[i] = f;
        });
        BlockFit step = best;
        for (auto& f : scored)
            if (f.better_than(step)) step = f;
        if (!step.better_than(best)) break;
        best = step;
    }
    return best;
}

double coordinate_q(const WeightVector& a, const DiscreteDist& dist, int j, double tau,
                    const RegionSearchConfig& cfg) {
    WeightVector proj = a.project(j);
    if (proj.all_zero()) return 1.0;
    try {
        return q_exact(weighted_sum_law(proj, dist, cfg.sum), rational_from_double(tau)).value;
    } catch (const AtomBudgetExceeded&) {
        MCConfig mc = cfg.mc;
        mc.seed = derive_seed(cfg.mc.seed, 307 + static_cast<std::uint64_t>(j));
        PointSampler s;
        s.dim = 1;
        s.draw = [&proj, &dist](Xoshiro256& rng, double* out) {
            double acc = 0.0;
            for (int k = 0; k < proj.n(); ++k) acc += proj.coord(k, 0) * dist.sample(rng);
            out[0] = acc;
        };
        return q_monte_carlo(s, tau, mc).value;
    }
}

RegionWitnessReport region_report(const WeightVector& a, const DiscreteDist& dist,
                                  const std::vector<double>& tau,
                                  const std::vector<double>& delta,
                                  const RegionSearchConfig& cfg, bool logn_form, double A,
                                  double B, InequalityId id) {
    const int d = a.d();
    if (static_cast<int>(tau.size()) != d || static_cast<int>(delta.size()) != d)
        throw std::invalid_argument("tau and delta need one entry per coordinate");
    for (int j = 0; j < d; ++j) {
        if (delta[static_cast<std::size_t>(j)] < 0 ||
            tau[static_cast<std::size_t>(j)] < delta[static_cast<std::size_t>(j)])
            throw std::invalid_argument("needs tau_j >= delta_j >= 0");
    }

    RegionWitnessReport rep;
    const bool zero_branch = [&] {
        for (int j = 0; j < d; ++j)
            if (tau[static_cast<std::size_t>(j)] != 0 || delta[static_cast<std::size_t>(j)] != 0)
                return false;
        return true;
    }();
    rep.flags["zero_branch"] = zero_branch;

    const DiscreteDist sym = dist.symmetrize();
    const Rational p = zero_branch ? sym.tail_mass(Rational(0)) : sym.tail_mass(Rational(1));
    rep.flags["hypothesis_spread"] = p > 0;

    const AtomicMeasure base = levy_base_measure(a);

    // Fit one block per coordinate.
    for (int j = 0; j < d; ++j) {
        const auto values = aggregate_coordinate(base, j);
        BlockFit f = fit_block(values, delta[static_cast<std::size_t>(j)], cfg);
        if (f.gens.empty()) f.gens = {0.0};
        rep.block_ranks.push_back(static_cast<int>(f.gens.size()));
        rep.blocks.push_back(std::move(f.gens));
    }
    rep.deltas = delta;
    const ProductK1Region region = ProductK1Region::make(rep.blocks, rep.deltas);
    rep.mass_outside = measure_outside(base, region);

    // Per-coordinate concentration values and log terms.
    double rank_rhs = 0.0, mass_rhs = 0.0;
    bool vacuous_delta = false;
    for (int j = 0; j < d; ++j) {
        const double qj = coordinate_q(a, dist, j, tau[static_cast<std::size_t>(j)], cfg);
        rep.q_values.push_back(qj);
        double log_ratio = 0.0;
        if (!zero_branch) {
            const double tj = tau[static_cast<std::size_t>(j)];
            const double dj = delta[static_cast<std::size_t>(j)];
            if (dj == 0.0 && tj == 0.0)
                log_ratio = 0.0;
            else if (dj == 0.0)
                vacuous_delta = true;
            else
                log_ratio = std::log(tj / dj);
        }
        const double term = std::abs(std::log(qj)) + log_ratio + 1.0;
        rank_rhs += term;
        mass_rhs += term * term * term;
    }
    if (logn_form) {
        const double nd = static_cast<double>(a.n());
        const double term = (A + B) * std::log(nd) + 1.0;
        rank_rhs = d * term;
        mass_rhs = d * term * term * term;
        bool hyp_ratio = true;
        for (int j = 0; j < d; ++j) {
            const double tj = tau[static_cast<std::size_t>(j)];
            const double dj = delta[static_cast<std::size_t>(j)];
            if (tj == 0.0 && dj == 0.0) continue;
            if (dj == 0.0 || tj / dj > std::pow(nd, B)) hyp_ratio = false;
        }
        rep.flags["hypothesis_ratio"] = hyp_ratio;
        bool hyp_q = true;
        for (double qj : rep.q_values) hyp_q = hyp_q && qj >= std::pow(nd, -A);
        rep.flags["hypothesis_q"] = hyp_q;
    }
    if (vacuous_delta) rep.flags["vacuous_delta_zero"] = true;

    int total_rank = 0;
    for (int r : rep.block_ranks) total_rank += r;

    rep.rank_bound.id = id;
    rep.rank_bound.params["clause"] = "rank";
    rep.rank_bound.set_sides(static_cast<double>(total_rank), rank_rhs);

    rep.mass_bound.id = id;
    rep.mass_bound.params["clause"] = "mass";
    rep.mass_bound.params["p"] = rational_to_string(p);
    rep.mass_bound.params["mass_outside"] = rational_to_string(rep.mass_outside);
    rep.mass_bound.set_sides(p.get_d() * rep.mass_outside.get_d(), mass_rhs);
    if (p == 0) {
        rep.rank_bound.flags.push_back("vacuous:p_zero");
        rep.mass_bound.flags.push_back("vacuous:p_zero");
    }
    if (vacuous_delta) {
        rep.rank_bound.flags.push_back("vacuous:delta_zero");
        rep.mass_bound.flags.push_back("vacuous:delta_zero");
    }

    rep.consequence_covered =
        static_cast<double>(a.n()) - rep.mass_outside.get_d() / cfg.mass_per_entry;
    return rep;
}

}  // namespace

RegionWitnessReport verify_thm3(const WeightVector& a, const DiscreteDist& dist,
                                const std::vector<double>& tau, const std::vector<double>& delta,
                                const RegionSearchConfig& cfg) {
    return region_report(a, dist, tau, delta, cfg, false, 0.0, 0.0, InequalityId::thm3);
}

RegionWitnessReport verify_thm4(const WeightVector& a, const DiscreteDist& dist,
                                const std::vector<double>& tau, const std::vector<double>& delta,
                                double A, double B, const RegionSearchConfig& cfg) {
    if (A <= 0 || B <= 0) throw std::invalid_argument("A, B must be positive");
    return region_report(a, dist, tau, delta, cfg, true, A, B, InequalityId::thm4);
}

}  // namespace concfn
