#include "concfn/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace concfn {

SmoothingLaw make_smoothing_law(WeightVector a, double intensity) {
    if (intensity < 0) throw std::invalid_argument("smoothing intensity must be >= 0");
    return SmoothingLaw{std::move(a), intensity};
}

double h_cf(const SmoothingLaw& law, std::span<const double> t) {
    if (static_cast<int>(t.size()) != law.weights.d())
        throw std::invalid_argument("cf argument has wrong dimension");
    double sum = 0.0;
    for (int k = 0; k < law.weights.n(); ++k) {
        double dot = 0.0;
        for (int j = 0; j < law.weights.d(); ++j)
            dot += t[static_cast<std::size_t>(j)] * law.weights.coord(k, j);
        sum += 1.0 - std::cos(dot);
    }
    return std::exp(-(law.intensity / 2.0) * sum);
}

long strict_floor(double x) {
    // ceil(x) - 1 in both cases: at integers the largest k < x is x - 1,
    // elsewhere it is the ordinary floor.
    return static_cast<long>(std::ceil(x)) - 1;
}

namespace {

// Adaptive Simpson with an interval budget.
struct Quad {
    const SmoothingLaw& law;
    std::uint64_t intervals = 0;
    std::uint64_t max_intervals;

    double f(double t) const {
        const double arr[1] = {t};
        return h_cf(law, std::span<const double>(arr, 1));
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
        ++intervals;
        if (intervals > max_intervals)
            throw std::runtime_error("esseen quadrature interval budget exceeded");
        const double m = (a + b) / 2;
        const double lm = (a + m) / 2, rm = (m + b) / 2;
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6 * (fa + 4 * flm + fm);
        const double right = (b - m) / 6 * (fm + 4 * frm + fb);
        const double err = left + right - whole;
        if (depth > 0 && std::abs(err) <= 15 * tol) return left + right + err / 15;
        if (depth > 60) return left + right;  // interval at rounding scale
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1) +
               recurse(m, b, fm, frm, fb, right, tol / 2, depth + 1);
    }

    double integrate(double a, double b, double tol) {
        const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
        const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, tol, 0);
    }
};

}  // namespace

EsseenResult esseen_upper_bound(const SmoothingLaw& law, double delta,
                                const EsseenConfig& cfg) {
    if (law.weights.d() != 1)
        throw std::invalid_argument("esseen bound implemented for d = 1 only");
    if (delta <= 0) throw std::invalid_argument("esseen bound needs delta > 0");
    Quad quad{law, 0, cfg.max_intervals};
    // cf is even: integrate the right half and double.
    const double half = quad.integrate(0.0, 1.0 / delta, cfg.tolerance / (4 * delta));
    EsseenResult r;
    r.integral = 2.0 * delta * half;
    r.bound = std::min(1.0, cfg.constant * r.integral);
    r.intervals = quad.intervals;
    return r;
}

void sample_h(const SmoothingLaw& law, Xoshiro256& rng, std::span<double> out) {
    const int d = law.weights.d();
    if (static_cast<int>(out.size()) != d)
        throw std::invalid_argument("sample output has wrong dimension");
    for (double& v : out) v = 0.0;
    const double mean = law.intensity / 4.0;
    if (mean == 0.0) return;
    for (int k = 0; k < law.weights.n(); ++k) {
        const auto up = static_cast<long>(sample_poisson(rng, mean));
        const auto down = static_cast<long>(sample_poisson(rng, mean));
        const long jumps = up - down;
        if (jumps == 0) continue;
        for (int j = 0; j < d; ++j)
            out[static_cast<std::size_t>(j)] += static_cast<double>(jumps) * law.weights.coord(k, j);
    }
}

std::vector<double> sample_h_batch(const SmoothingLaw& law, std::uint64_t seed,
                                   std::uint64_t count, ExecMode exec) {
    const int d = law.weights.d();
    std::vector<double> out(count * static_cast<std::size_t>(d));
    constexpr std::uint64_t kChunk = 1024;
    const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
    parallel_for(chunks, exec, [&](std::size_t c) {
        Xoshiro256 rng(derive_seed(seed, c));
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(count, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i)
            sample_h(law, rng,
                     std::span<double>(out.data() + i * static_cast<std::size_t>(d),
                                       static_cast<std::size_t>(d)));
    });
    return out;
}

PointSampler smoothing_sampler(const SmoothingLaw& law) {
    PointSampler s;
    s.dim = law.weights.d();
    s.draw = [&law](Xoshiro256& rng, double* out) {
        sample_h(law, rng, std::span<double>(out, static_cast<std::size_t>(law.weights.d())));
    };
    return s;
}

namespace {

// Truncated pmf of the difference of two independent Poisson(mu) counts:
// p(j) = e^{-2mu} sum_m mu^{2m+|j|} / (m! (m+|j|)!). Returns values for
// j = 0..jmax (symmetric in j) with jmax chosen so the left-out tail mass
// is below tail_tol.
std::vector<double> skellam_pmf_half(double mu, double tail_tol, int& jmax) {
    const double log_norm = -2.0 * mu;
    if (log_norm < -700.0)
        throw std::runtime_error("skellam enumeration underflows; intensity too large");
    const double norm = std::exp(log_norm);
    std::vector<double> half;
    double covered = 0.0;
    double muj_over_jfact = 1.0;  // mu^j / j!
    for (int j = 0;; ++j) {
        if (j > 0) muj_over_jfact *= mu / j;
        // sum_m mu^{2m} * mu^j / (m! (m+j)!)
        double term = muj_over_jfact;
        double series = term;
        for (int m = 1; m < 100000; ++m) {
            term *= mu * mu / (static_cast<double>(m) * (m + j));
            series += term;
            if (term < series * 1e-18) break;
        }
        const double pj = norm * series;
        half.push_back(pj);
        covered += (j == 0) ? pj : 2 * pj;
        if (1.0 - covered <= tail_tol) {
            jmax = j;
            return half;
        }
        if (j > 100000) throw std::runtime_error("skellam truncation did not converge");
    }
}

}  // namespace

MassAtZeroResult mass_at_zero(const SmoothingLaw& law, const MassAtZeroConfig& cfg) {
    if (cfg.tolerance <= 0) throw std::invalid_argument("mass_at_zero needs tolerance > 0");
    const int d = law.weights.d();
    const int n = law.weights.n();
    MassAtZeroResult res;
    if (law.intensity == 0.0) {
        res.value = 1.0;
        res.enumerated = true;
        res.certified_radius = 0.0;
        return res;
    }

    const double mu = law.intensity / 4.0;
    bool enumeration_failed = false;
    try {
        const double per_coeff_tol = cfg.tolerance / n;
        // Support map keyed by exact positions; accumulation order is fixed.
        std::map<std::vector<double>, double> acc;
        acc[std::vector<double>(static_cast<std::size_t>(d), 0.0)] = 1.0;
        double dropped = 0.0;
        for (int k = 0; k < n; ++k) {
            int jmax = 0;
            const std::vector<double> half = skellam_pmf_half(mu, per_coeff_tol, jmax);
            double kept = half[0];
            for (int j = 1; j <= jmax; ++j) kept += 2 * half[static_cast<std::size_t>(j)];
            dropped += std::max(0.0, 1.0 - kept);

            std::map<std::vector<double>, double> next;
            for (const auto& [pos, pr] : acc) {
                for (int j = -jmax; j <= jmax; ++j) {
                    std::vector<double> moved(pos);
                    if (j != 0)
                        for (int c = 0; c < d; ++c)
                            moved[static_cast<std::size_t>(c)] +=
                                static_cast<double>(j) * law.weights.coord(k, c);
                    next[std::move(moved)] += pr * half[static_cast<std::size_t>(std::abs(j))];
                }
                if (next.size() > cfg.state_budget)
                    throw AtomBudgetExceeded("mass_at_zero enumeration exceeds state budget");
            }
            acc.swap(next);
        }
        const std::vector<double> zero(static_cast<std::size_t>(d), 0.0);
        auto it = acc.find(zero);
        res.value = (it == acc.end()) ? 0.0 : it->second;
        res.enumerated = true;
        res.certified_radius = dropped;
        return res;
    } catch (const AtomBudgetExceeded&) {
        enumeration_failed = true;
    } catch (const std::runtime_error&) {
        enumeration_failed = true;
    }

    if (enumeration_failed && !cfg.allow_monte_carlo)
        throw std::runtime_error("mass_at_zero enumeration exceeded budget and Monte Carlo disabled");

    const std::vector<double> pts = sample_h_batch(law, cfg.seed, cfg.mc_samples, cfg.exec);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < cfg.mc_samples; ++i) {
        bool zero = true;
        for (int c = 0; c < d; ++c)
            if (pts[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] != 0.0) {
                zero = false;
                break;
            }
        if (zero) ++hits;
    }
    res.value = static_cast<double>(hits) / static_cast<double>(cfg.mc_samples);
    res.enumerated = false;
    res.certified_radius = 0.0;
    res.stderr_value =
        std::sqrt(res.value * (1.0 - res.value) / static_cast<double>(cfg.mc_samples));
    return res;
}

BoundReport lemma1_report(const WeightVector& a, const DiscreteDist& dist, double tau,
                          double kappa, double delta, const Lemma1Config& cfg) {
    if (kappa <= 0 || delta <= 0)
        throw std::invalid_argument("lemma1 needs kappa > 0 and delta > 0");
    if (tau < 0) throw std::invalid_argument("lemma1 needs tau >= 0");

    BoundReport rep;
    rep.id = InequalityId::lemma1;
    rep.params["tau"] = format_double(tau);
    rep.params["kappa"] = format_double(kappa);
    rep.params["delta"] = format_double(delta);
    rep.params["n"] = std::to_string(a.n());
    rep.params["d"] = std::to_string(a.d());

    const DiscreteDist sym = dist.symmetrize();
    const Rational ratio = rational_from_double(tau) / rational_from_double(kappa);
    const Rational p = sym.tail_mass(ratio);
    rep.params["p"] = rational_to_string(p);
    if (p == 0) rep.flags.push_back("vacuous:p_zero");

    // LHS: exact for d = 1 laws within budget, Monte Carlo otherwise.
    double lhs;
    if (a.d() == 1) {
        try {
            const DiscreteDist law = weighted_sum_law(a, dist, cfg.sum);
            const auto q = q_exact(law, rational_from_double(tau));
            lhs = q.value;
            rep.params["lhs_exact"] = rational_to_string(*q.exact);
        } catch (const AtomBudgetExceeded&) {
            MCConfig mc = cfg.mc;
            mc.seed = derive_seed(cfg.mc.seed, 7);
            PointSampler s;
            s.dim = 1;
            s.draw = [&a, &dist](Xoshiro256& rng, double* out) {
                double accum = 0.0;
                for (int k = 0; k < a.n(); ++k) accum += a.coord(k, 0) * dist.sample(rng);
                out[0] = accum;
            };
            lhs = q_monte_carlo(s, tau, mc).value;
            rep.flags.push_back("lhs:monte_carlo");
        }
    } else {
        MCConfig mc = cfg.mc;
        mc.seed = derive_seed(cfg.mc.seed, 7);
        PointSampler s;
        s.dim = a.d();
        s.draw = [&a, &dist](Xoshiro256& rng, double* out) {
            for (int j = 0; j < a.d(); ++j) out[j] = 0.0;
            for (int k = 0; k < a.n(); ++k) {
                const double x = dist.sample(rng);
                for (int j = 0; j < a.d(); ++j) out[j] += x * a.coord(k, j);
            }
        };
        lhs = q_monte_carlo(s, tau, mc).value;
        rep.flags.push_back("lhs:monte_carlo");
    }

    // Window-count factor, with the strict floor (largest integer < x).
    const long fl = strict_floor_rational(rational_from_double(kappa) /
                                          rational_from_double(delta));
    rep.params["floor_kappa_over_delta"] = std::to_string(fl);
    double factor = 1.0;
    for (int j = 0; j < a.d(); ++j) factor *= static_cast<double>(1 + fl);

    // Q(H^p, delta), estimated from above two ways (Esseen is d = 1 only).
    const SmoothingLaw law = make_smoothing_law(a, p.get_d());
    double esseen_bound = 1.0;
    if (a.d() == 1) esseen_bound = esseen_upper_bound(law, delta, cfg.esseen).bound;
    MCConfig mc = cfg.mc;
    mc.seed = derive_seed(cfg.mc.seed, 11);
    const ConcentrationResult mcq = q_monte_carlo(smoothing_sampler(law), delta, mc);
    const double mc_upper = std::min(1.0, mcq.value + 3.0 * mcq.stderr_value);
    const double q_h = std::min(esseen_bound, mc_upper);
    rep.params["q_h_esseen"] = format_double(esseen_bound);
    rep.params["q_h_mc"] = format_double(mcq.value);
    rep.params["q_h_mc_stderr"] = format_double(mcq.stderr_value);
    rep.params["q_h_used"] = format_double(q_h);

    rep.set_sides(lhs, factor * q_h);
    return rep;
}

BoundReport q_at_zero_limit_report(const WeightVector& a, const DiscreteDist& dist,
                                   const SumLawConfig& sum_cfg,
                                   const MassAtZeroConfig& mz_cfg) {
    if (a.d() != 1)
        throw std::invalid_argument("zero-window limit report implemented for d = 1");
    BoundReport rep;
    rep.id = InequalityId::eq11366;
    const DiscreteDist sym = dist.symmetrize();
    const Rational p0 = sym.tail_mass(Rational(0));
    rep.params["p0"] = rational_to_string(p0);
    rep.params["n"] = std::to_string(a.n());

    const DiscreteDist law = weighted_sum_law(a, dist, sum_cfg);
    const auto q = q_exact(law, Rational(0));
    rep.params["lhs_exact"] = rational_to_string(*q.exact);

    const SmoothingLaw h = make_smoothing_law(a, p0.get_d());
    const MassAtZeroResult mz = mass_at_zero(h, mz_cfg);
    rep.params["rhs_enumerated"] = mz.enumerated ? "true" : "false";
    if (!mz.enumerated) rep.params["rhs_stderr"] = format_double(mz.stderr_value);

    rep.set_sides(q.value, mz.value);
    return rep;
}

}  // namespace concfn
