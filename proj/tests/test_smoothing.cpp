#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "concfn/smoothing.hpp"
#include "oracles.hpp"

using namespace concfn;

TEST_CASE("h_cf: closed-form values") {
    auto law = make_smoothing_law(WeightVector::make1({1}), 2.0);
    const double t0[1] = {0.0};
    CHECK(h_cf(law, t0) == 1.0);
    const double tpi[1] = {M_PI};
    CHECK(h_cf(law, tpi) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

    auto flat = make_smoothing_law(WeightVector::make1({1, 2, 3}), 0.0);
    const double t[1] = {0.7};
    CHECK(h_cf(flat, t) == 1.0);
}

TEST_CASE("h_cf: even, bounded, multiplicative in intensity") {
    Xoshiro256 rng(17);
    auto a = WeightVector::make1({1.0, std::sqrt(2.0), 0.5, 3.25});
    for (int trial = 0; trial < 100; ++trial) {
        const double t[1] = {rng.uniform(-20, 20)};
        const double tneg[1] = {-t[0]};
        const double l1 = rng.uniform(0, 4);
        const double l2 = rng.uniform(0, 4);
        auto law1 = make_smoothing_law(a, l1);
        auto law2 = make_smoothing_law(a, l2);
        auto law12 = make_smoothing_law(a, l1 + l2);
        const double v = h_cf(law1, t);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        CHECK(v == h_cf(law1, tneg));
        CHECK(std::abs(h_cf(law12, t) - v * h_cf(law2, t)) <= 1e-12);
    }
}

TEST_CASE("strict_floor: largest integer strictly below") {
    CHECK(strict_floor(2.0) == 1);
    CHECK(strict_floor(2.5) == 2);
    CHECK(strict_floor(0.3) == 0);
    CHECK(strict_floor(1.0) == 0);
    CHECK(strict_floor(-0.5) == -1);
    CHECK(strict_floor(-2.0) == -3);
    CHECK(strict_floor_rational(Rational(2)) == 1);
    CHECK(strict_floor_rational(Rational(5, 2)) == 2);
}

TEST_CASE("esseen: flat cf integrates to 2 and clips at 1") {
    auto law = make_smoothing_law(WeightVector::make1({1, 1}), 0.0);
    auto r = esseen_upper_bound(law, 0.25);
    CHECK(r.integral == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.bound == 1.0);
}

TEST_CASE("esseen: adaptive quadrature matches a fine fixed grid") {
    auto law = make_smoothing_law(WeightVector::ones(20), 1.0);
    EsseenConfig cfg;
    cfg.tolerance = 1e-10;
    auto r = esseen_upper_bound(law, 0.1, cfg);
    const double ref = oracles::esseen_integral_fixed(law, 0.1, 200000);
    CHECK(std::abs(r.integral - ref) <= 1e-8);
}

TEST_CASE("esseen bound dominates sampled concentration") {
    Xoshiro256 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(6));
        std::vector<double> coeffs;
        for (int k = 0; k < n; ++k) coeffs.push_back(std::round(rng.uniform(1, 5)));
        auto law = make_smoothing_law(WeightVector::make1(coeffs), rng.uniform(0.2, 3.0));
        const double delta = rng.uniform(0.2, 1.5);
        auto bound = esseen_upper_bound(law, delta);
        MCConfig cfg;
        cfg.sample_count = 20000;
        cfg.seed = 900 + trial;
        auto mc = q_monte_carlo(smoothing_sampler(law), delta, cfg);
        CHECK(bound.bound >= mc.value - 3 * mc.stderr_value);
    }
}

TEST_CASE("sample_h: zero intensity sticks at zero") {
    auto law = make_smoothing_law(WeightVector::make1({1, 2}), 0.0);
    Xoshiro256 rng(1);
    double out[1];
    for (int i = 0; i < 100; ++i) {
        sample_h(law, rng, std::span<double>(out, 1));
        CHECK(out[0] == 0.0);
    }
}

TEST_CASE("sample_h: empirical cf matches h_cf") {
    auto law = make_smoothing_law(WeightVector::make1({1.0, 2.0, 0.5}), 2.0);
    const std::uint64_t n = 100000;
    auto pts = sample_h_batch(law, 321, n);
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    for (int i = 1; i <= 10; ++i) {
        const double t = -2.0 + 0.4 * i;
        double ecf = 0.0;
        for (std::uint64_t s = 0; s < n; ++s) ecf += std::cos(t * pts[s]);
        ecf /= static_cast<double>(n);
        const double tv[1] = {t};
        CHECK(std::abs(ecf - h_cf(law, tv)) <= tol);
    }
}

TEST_CASE("sample_h: mean and second moment identities") {
    auto a = WeightVector::make1({1.0, -2.0, 3.0});
    const double intensity = 1.5;
    auto law = make_smoothing_law(a, intensity);
    const std::uint64_t n = 100000;
    auto pts = sample_h_batch(law, 99, n);
    double mean = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::uint64_t s = 0; s < n; ++s) {
        mean += pts[s];
        m2 += pts[s] * pts[s];
        m4 += pts[s] * pts[s] * pts[s] * pts[s];
    }
    mean /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    double sum_sq = 0.0;
    for (int k = 0; k < a.n(); ++k) sum_sq += a.coord(k, 0) * a.coord(k, 0);
    const double expected_m2 = intensity / 2.0 * sum_sq;
    const double se_mean = std::sqrt(m2 / static_cast<double>(n));
    const double se_m2 = std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(n));
    CHECK(std::abs(mean) <= 3 * se_mean);
    CHECK(std::abs(m2 - expected_m2) <= 3 * se_m2);
}

TEST_CASE("sample_h_batch: serial and openmp agree bit for bit") {
    auto law = make_smoothing_law(WeightVector::make1({1.0, 0.25}), 3.0);
    auto p1 = sample_h_batch(law, 512, 20000, ExecMode::openmp);
    auto p2 = sample_h_batch(law, 512, 20000, ExecMode::serial);
    CHECK(p1 == p2);
}

TEST_CASE("mass_at_zero: zero intensity") {
    auto law = make_smoothing_law(WeightVector::make1({5}), 0.0);
    auto r = mass_at_zero(law);
    CHECK(r.value == 1.0);
    CHECK(r.enumerated);
}

TEST_CASE("mass_at_zero: single unit coefficient at intensity 4") {
    auto law = make_smoothing_law(WeightVector::make1({1}), 4.0);
    MassAtZeroConfig cfg;
    cfg.tolerance = 1e-12;
    auto r = mass_at_zero(law, cfg);
    REQUIRE(r.enumerated);
    // Difference of two unit Poisson counts hits zero with probability
    // e^{-2} * sum 1/(j!)^2 = 0.30850832...
    CHECK(std::abs(r.value - oracles::skellam_zero(1.0)) <= 1e-10);
    CHECK(std::abs(r.value - 0.30850832) <= 1e-7);
}

TEST_CASE("mass_at_zero: two coefficients match the pairwise oracle and sampling") {
    auto law = make_smoothing_law(WeightVector::make1({1, 1}), 4.0);
    MassAtZeroConfig cfg;
    cfg.tolerance = 1e-12;
    auto r = mass_at_zero(law, cfg);
    REQUIRE(r.enumerated);
    CHECK(std::abs(r.value - oracles::skellam_pair_zero(1.0, 1.0, 1.0, 14)) <= 1e-9);

    MassAtZeroConfig mc_cfg;
    mc_cfg.state_budget = 1;  // force the sampling fallback
    mc_cfg.mc_samples = 100000;
    mc_cfg.seed = 4242;
    auto mc = mass_at_zero(law, mc_cfg);
    REQUIRE_FALSE(mc.enumerated);
    CHECK(std::abs(mc.value - r.value) <= 3 * mc.stderr_value);
}

TEST_CASE("mass_at_zero: nonincreasing in intensity") {
    auto a = WeightVector::make1({1, 2});
    double prev = 1.0;
    for (double lam : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        auto r = mass_at_zero(make_smoothing_law(a, lam));
        CHECK(r.value <= prev + 1e-9);
        prev = r.value;
    }
}

TEST_CASE("lemma1_report: strict floor factor and exact left side") {
    auto a = WeightVector::ones(16);
    auto rad = DiscreteDist::rademacher();
    Lemma1Config cfg;
    cfg.mc.sample_count = 20000;
    cfg.mc.seed = 31;
    auto rep = lemma1_report(a, rad, 0.0, 1.0, 0.5, cfg);
    // kappa/delta = 2: the strict floor gives 1, so the window factor is 2.
    CHECK(rep.params.at("floor_kappa_over_delta") == "1");
    CHECK(rep.params.at("lhs_exact") == oracles::central_binomial_mass(16).get_str());
    CHECK(rep.params.at("p") == "1/2");
    CHECK(std::isfinite(rep.implied_constant));
    CHECK(rep.implied_constant > 0.0);
    CHECK_FALSE(rep.vacuous());
}

TEST_CASE("lemma1_report: degenerate symmetrization flagged vacuous") {
    auto a = WeightVector::ones(4);
    auto pm = DiscreteDist::point_mass(Rational(3));
    Lemma1Config cfg;
    cfg.mc.sample_count = 4000;
    auto rep = lemma1_report(a, pm, 0.5, 1.0, 0.5, cfg);
    CHECK(rep.vacuous());
    CHECK(rep.params.at("p") == "0");
}

TEST_CASE("q_at_zero_limit_report: exact rational sides") {
    auto a = WeightVector::ones(6);
    auto rad = DiscreteDist::rademacher();
    auto rep = q_at_zero_limit_report(a, rad);
    CHECK(rep.id == InequalityId::eq11366);
    CHECK(rep.lhs == doctest::Approx(oracles::central_binomial_mass(6).get_d()));
    CHECK(rep.rhs_unconstanted > 0.0);
    CHECK(std::isfinite(rep.implied_constant));
}
