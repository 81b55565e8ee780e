#include "concfn/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace concfn {

ConcentrationResult q_exact(const DiscreteDist& f, const Rational& lambda) {
    if (lambda < 0) throw std::invalid_argument("q_exact needs lambda >= 0");
    const std::size_t n = f.size();
    std::vector<Rational> prefix(n + 1, Rational(0));
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + f.weight(i);

    Rational best(0);
    std::size_t best_left = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < i) j = i;
        const Rational right_edge = f.position(i) + lambda;
        while (j + 1 < n && f.position(j + 1) <= right_edge) ++j;
        const Rational mass = prefix[j + 1] - prefix[i];
        if (mass > best) {
            best = mass;
            best_left = i;
        }
    }

    ConcentrationResult r;
    r.exact = best;
    r.value = best.get_d();
    r.method = QMethod::exact;
    r.stderr_value = 0.0;
    const Rational center = f.position(best_left) + lambda / 2;
    r.center = {center.get_d()};
    return r;
}

PointSampler dist_sampler(const DiscreteDist& dist) {
    PointSampler s;
    s.dim = 1;
    s.draw = [&dist](Xoshiro256& rng, double* out) { out[0] = dist.sample(rng); };
    return s;
}

namespace {

// Grid index of points bucketed by cells of side `cell`; ball queries visit
// only the 3^d neighborhood of the center's cell.
class CellGrid {
public:
    CellGrid(const std::vector<double>& pts, int d, double cell)
        : pts_(pts), d_(d), cell_(cell) {
        const std::size_t n = pts.size() / static_cast<std::size_t>(d);
        for (std::size_t i = 0; i < n; ++i)
            buckets_[key(pts.data() + i * static_cast<std::size_t>(d))].push_back(i);
    }

    std::uint64_t ball_count(const double* center, double radius) const {
        const double r2 = radius * radius;
        std::uint64_t count = 0;
        std::vector<long> base = key(center);
        std::vector<long> probe(base);
        std::vector<int> off(static_cast<std::size_t>(d_), -1);
        bool done = false;
        while (!done) {
            for (int j = 0; j < d_; ++j)
                probe[static_cast<std::size_t>(j)] =
                    base[static_cast<std::size_t>(j)] + off[static_cast<std::size_t>(j)];
            auto it = buckets_.find(probe);
            if (it != buckets_.end()) {
                for (std::size_t i : it->second) {
                    double dist2 = 0.0;
                    const double* p = pts_.data() + i * static_cast<std::size_t>(d_);
                    for (int j = 0; j < d_; ++j) {
                        const double diff = p[j] - center[j];
                        dist2 += diff * diff;
                    }
                    if (dist2 <= r2) ++count;
                }
            }
            int axis = 0;
            for (;; ++axis) {
                if (axis == d_) {
                    done = true;
                    break;
                }
                if (++off[static_cast<std::size_t>(axis)] <= 1) break;
                off[static_cast<std::size_t>(axis)] = -1;
            }
        }
        return count;
    }

private:
    std::vector<long> key(const double* p) const {
        std::vector<long> k(static_cast<std::size_t>(d_));
        for (int j = 0; j < d_; ++j)
            k[static_cast<std::size_t>(j)] = static_cast<long>(std::floor(p[j] / cell_));
        return k;
    }
    const std::vector<double>& pts_;
    int d_;
    double cell_;
    std::map<std::vector<long>, std::vector<std::size_t>> buckets_;
};

constexpr std::uint64_t kMaxAnchors = 2048;

}  // namespace

ConcentrationResult q_monte_carlo(const PointSampler& sampler, double lambda,
                                  const MCConfig& cfg) {
    if (lambda < 0) throw std::invalid_argument("q_monte_carlo needs lambda >= 0");
    if (cfg.sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    const int d = sampler.dim;
    const std::uint64_t n = cfg.sample_count;

    // Chunked deterministic sampling: chunk c uses seed derive_seed(seed, c).
    std::vector<double> pts(n * static_cast<std::size_t>(d));
    const std::uint64_t chunks = (n + cfg.chunk - 1) / cfg.chunk;
    parallel_for(chunks, cfg.exec, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(cfg.seed, c));
        const std::uint64_t begin = c * cfg.chunk;
        const std::uint64_t end = std::min(n, begin + cfg.chunk);
        for (std::uint64_t i = begin; i < end; ++i)
            sampler.draw(rng, pts.data() + i * static_cast<std::size_t>(d));
    });

    std::uint64_t best_count = 0;
    std::vector<double> best_center(static_cast<std::size_t>(d), 0.0);

    if (d == 1) {
        std::vector<double> sorted(pts);
        std::sort(sorted.begin(), sorted.end());
        if (lambda == 0.0) {
            // Exact-match counting; degenerate for continuous streams.
            std::uint64_t run = 1, best_run = 1;
            double best_val = sorted[0];
            for (std::size_t i = 1; i < sorted.size(); ++i) {
                run = (sorted[i] == sorted[i - 1]) ? run + 1 : 1;
                if (run > best_run) {
                    best_run = run;
                    best_val = sorted[i];
                }
            }
            if (best_run == 1 && n > 1)
                throw std::runtime_error(
                    "q_monte_carlo at lambda = 0: no repeated samples, estimate degenerates");
            best_count = best_run;
            best_center[0] = best_val;
        } else {
            // Left window edge at each sample: exact sup over centers for
            // the empirical measure.
            std::size_t j = 0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (j < i) j = i;
                while (j + 1 < sorted.size() && sorted[j + 1] <= sorted[i] + lambda) ++j;
                const std::uint64_t cnt = j - i + 1;
                if (cnt > best_count) {
                    best_count = cnt;
                    best_center[0] = sorted[i] + lambda / 2;
                }
            }
        }
    } else if (lambda == 0.0) {
        // Exact-match counting; degenerate for continuous streams.
        std::map<std::vector<double>, std::uint64_t> counts;
        std::vector<double> key(static_cast<std::size_t>(d));
        for (std::uint64_t i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j)
                key[static_cast<std::size_t>(j)] =
                    pts[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
            ++counts[key];
        }
        for (const auto& [point, count] : counts)
            if (count > best_count) {
                best_count = count;
                best_center = point;
            }
        if (best_count == 1 && n > 1)
            throw std::runtime_error(
                "q_monte_carlo at lambda = 0: no repeated samples, estimate degenerates");
    } else {
        const double radius = lambda / 2;
        const CellGrid grid(pts, d, radius);
        // Stage 1: sample-anchored candidate centers, thinned to a cap.
        const std::uint64_t stride = (n + kMaxAnchors - 1) / kMaxAnchors;
        const std::uint64_t anchors = (n + stride - 1) / stride;
        std::vector<std::uint64_t> counts(anchors);
        parallel_for(anchors, cfg.exec, [&](std::size_t ai) {
            const std::uint64_t i = ai * stride;
            counts[ai] = grid.ball_count(pts.data() + i * static_cast<std::size_t>(d), radius);
        });
        std::uint64_t best_anchor = 0;
        for (std::uint64_t ai = 0; ai < anchors; ++ai)
            if (counts[ai] > best_count) {
                best_count = counts[ai];
                best_anchor = ai * stride;
            }
        for (int j = 0; j < d; ++j)
            best_center[static_cast<std::size_t>(j)] =
                pts[best_anchor * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        // Stage 2: refinement grid around the best anchor.
        const int g = cfg.center_grid_resolution;
        if (g > 0 && d <= 3) {
            std::vector<int> idx(static_cast<std::size_t>(d), -g);
            const double step = radius / g;
            std::vector<double> cand(static_cast<std::size_t>(d));
            bool done = false;
            while (!done) {
                for (int j = 0; j < d; ++j)
                    cand[static_cast<std::size_t>(j)] =
                        pts[best_anchor * static_cast<std::size_t>(d) +
                            static_cast<std::size_t>(j)] +
                        idx[static_cast<std::size_t>(j)] * step;
                const std::uint64_t cnt = grid.ball_count(cand.data(), radius);
                if (cnt > best_count) {
                    best_count = cnt;
                    best_center = cand;
                }
                int axis = 0;
                for (;; ++axis) {
                    if (axis == d) {
                        done = true;
                        break;
                    }
                    if (++idx[static_cast<std::size_t>(axis)] <= g) break;
                    idx[static_cast<std::size_t>(axis)] = -g;
                }
            }
        }
    }

    ConcentrationResult r;
    r.method = QMethod::monte_carlo;
    r.value = static_cast<double>(best_count) / static_cast<double>(n);
    r.stderr_value = std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(n));
    r.center = best_center;
    return r;
}

BoundReport q_window_regularity(const DiscreteDist& f, const Rational& lambda, int m) {
    if (m < 1) throw std::invalid_argument("window regularity needs m >= 1");
    const Rational lhs = *q_exact(f, lambda * m).exact;
    const Rational rhs = Rational(m) * *q_exact(f, lambda).exact;
    BoundReport rep;
    rep.id = InequalityId::window_regularity;
    rep.set_sides(lhs.get_d(), rhs.get_d());
    rep.params["lambda"] = rational_to_string(lambda);
    rep.params["m"] = std::to_string(m);
    rep.params["lhs_exact"] = rational_to_string(lhs);
    rep.params["rhs_exact"] = rational_to_string(rhs);
    if (lhs > rhs) rep.flags.push_back("violated");  // should never happen
    return rep;
}

CoordinateBounds q_coordinate_bounds(const WeightVector& a, const DiscreteDist& dist,
                                     double tau, const MCConfig& mc_cfg,
                                     const SumLawConfig& sum_cfg) {
    CoordinateBounds out;
    out.independent_coordinates = a.single_nonzero_coordinates();
    for (int j = 0; j < a.d(); ++j) {
        WeightVector proj = a.project(j);
        ConcentrationResult qj;
        if (proj.all_zero()) {
            // Degenerate projection: the coordinate is the point mass at 0.
            qj.exact = Rational(1);
            qj.value = 1.0;
            qj.method = QMethod::exact;
            qj.center = {0.0};
            out.zero_coordinates.push_back(j);
        } else {
            try {
                DiscreteDist law = weighted_sum_law(proj, dist, sum_cfg);
                qj = q_exact(law, rational_from_double(tau));
            } catch (const AtomBudgetExceeded&) {
                MCConfig cfg = mc_cfg;
                cfg.seed = derive_seed(mc_cfg.seed, static_cast<std::uint64_t>(j) + 101);
                PointSampler s;
                s.dim = 1;
                s.draw = [&proj, &dist](Xoshiro256& rng, double* outp) {
                    double acc = 0.0;
                    for (int k = 0; k < proj.n(); ++k) acc += proj.coord(k, 0) * dist.sample(rng);
                    outp[0] = acc;
                };
                qj = q_monte_carlo(s, tau, cfg);
            }
        }
        out.min_q = std::min(out.min_q, qj.value);
        out.product_q *= qj.value;
        out.q.push_back(std::move(qj));
    }
    return out;
}

}  // namespace concfn
