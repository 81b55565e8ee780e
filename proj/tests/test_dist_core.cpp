#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "concfn/atomic_measure.hpp"
#include "concfn/discrete_dist.hpp"
#include "oracles.hpp"

using namespace concfn;

namespace {

DiscreteDist random_law(Xoshiro256& rng, int max_atoms) {
    const int n = 1 + static_cast<int>(rng.uniform_index(max_atoms));
    std::vector<Rational> atoms;
    std::vector<Rational> weights;
    Rational total(0);
    for (int i = 0; i < n; ++i) {
        atoms.push_back(rational_from_double(std::round(rng.uniform(-50, 50))) / 4);
        const Rational w(1 + static_cast<long>(rng.uniform_index(9)), 1);
        weights.push_back(w);
        total += w;
    }
    // Distinct atoms only; duplicates coalesce in make(), which breaks the
    // weight normalization below, so regenerate instead.
    std::sort(atoms.begin(), atoms.end());
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i] == atoms[i - 1]) return random_law(rng, max_atoms);
    for (auto& w : weights) w /= total;
    return DiscreteDist::make(std::move(atoms), std::move(weights));
}

}  // namespace

TEST_CASE("make: canonical two-point law") {
    auto d = DiscreteDist::rademacher();
    REQUIRE(d.size() == 2);
    CHECK(d.position(0) == Rational(-1));
    CHECK(d.position(1) == Rational(1));
    CHECK(d.weight(0) == Rational(1, 2));
}

TEST_CASE("make: equal atoms coalesce") {
    auto d = DiscreteDist::make({Rational(0), Rational(0)}, {Rational(1, 2), Rational(1, 2)});
    REQUIRE(d.size() == 1);
    CHECK(d.position(0) == 0);
    CHECK(d.weight(0) == 1);
}

TEST_CASE("make: sorted identity case") {
    auto d = DiscreteDist::make({Rational(0), Rational(1), Rational(2)},
                                {Rational(1, 4), Rational(1, 2), Rational(1, 4)});
    REQUIRE(d.size() == 3);
    CHECK(d.position(2) == 2);
    CHECK(d.weight(1) == Rational(1, 2));
}

TEST_CASE("make: rejects bad input") {
    CHECK_THROWS_AS(DiscreteDist::make({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDist::make({Rational(1)}, {Rational(0)}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDist::make({Rational(1)}, {Rational(-1)}), std::invalid_argument);
    // No silent renormalization.
    CHECK_THROWS_AS(DiscreteDist::make({Rational(0), Rational(1)},
                                       {Rational(1, 2), Rational(1, 3)}),
                    std::invalid_argument);
}

TEST_CASE("symmetrize: two-point law") {
    auto g = DiscreteDist::rademacher().symmetrize();
    REQUIRE(g.size() == 3);
    CHECK(g.position(0) == -2);
    CHECK(g.weight(0) == Rational(1, 4));
    CHECK(g.weight(1) == Rational(1, 2));
    CHECK(g.weight(2) == Rational(1, 4));
}

TEST_CASE("symmetrize: point mass collapses to zero") {
    auto g = DiscreteDist::point_mass(Rational(7)).symmetrize();
    REQUIRE(g.size() == 1);
    CHECK(g.position(0) == 0);
}

TEST_CASE("symmetrize: three-point uniform, 3x3 enumeration") {
    auto g = DiscreteDist::uniform({Rational(0), Rational(1), Rational(2)}).symmetrize();
    REQUIRE(g.size() == 5);
    CHECK(g.weight(0) == Rational(1, 9));
    CHECK(g.weight(1) == Rational(2, 9));
    CHECK(g.weight(2) == Rational(1, 3));
    CHECK(g.weight(3) == Rational(2, 9));
    CHECK(g.weight(4) == Rational(1, 9));
}

TEST_CASE("symmetrize output is exactly symmetric and G{0} = sum p_i^2") {
    Xoshiro256 rng(20240811);
    for (int trial = 0; trial < 30; ++trial) {
        auto d = random_law(rng, 8);
        auto g = d.symmetrize();
        CHECK(g.is_symmetric());
        Rational sum_sq(0);
        for (std::size_t i = 0; i < d.size(); ++i) sum_sq += d.weight(i) * d.weight(i);
        CHECK(g.mass_at(Rational(0)) == sum_sq);
        CHECK(g.tail_mass(Rational(0)) == 1 - sum_sq);
    }
}

TEST_CASE("tail_mass examples") {
    auto g = DiscreteDist::rademacher().symmetrize();
    CHECK(g.tail_mass(Rational(1)) == Rational(1, 2));
    CHECK(DiscreteDist::point_mass(Rational(0)).tail_mass(Rational(3)) == 0);
    CHECK_THROWS_AS(g.tail_mass(Rational(-1)), std::invalid_argument);
}

TEST_CASE("tail_mass is nonincreasing in delta") {
    Xoshiro256 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_law(rng, 8).symmetrize();
        Rational prev = g.tail_mass(Rational(0));
        for (int step = 1; step <= 8; ++step) {
            Rational next = g.tail_mass(Rational(step, 2));
            CHECK(next <= prev);
            prev = next;
        }
    }
}

TEST_CASE("check_spread") {
    auto g = DiscreteDist::rademacher().symmetrize();
    CHECK(g.check_spread(Rational(1), std::nullopt, Rational(1, 2)));
    CHECK_FALSE(g.check_spread(Rational(1), std::nullopt, Rational(3, 5)));
    auto pm = DiscreteDist::point_mass(Rational(0));
    CHECK_FALSE(pm.check_spread(Rational(1), std::nullopt, Rational(1, 100)));
    CHECK_THROWS_AS(g.check_spread(Rational(2), Rational(1), Rational(0)),
                    std::invalid_argument);
}

TEST_CASE("weighted_sum_law: small examples") {
    auto rad = DiscreteDist::rademacher();
    auto law = weighted_sum_law(WeightVector::make1({1, 1}), rad);
    REQUIRE(law.size() == 3);
    CHECK(law.weight(1) == Rational(1, 2));

    auto one = weighted_sum_law(WeightVector::make1({1}), rad);
    CHECK(one.size() == 2);
    CHECK(one.position(0) == -1);

    auto law12 = weighted_sum_law(WeightVector::make1({1, 2}), rad);
    REQUIRE(law12.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(law12.weight(i) == Rational(1, 4));
    CHECK(law12.position(0) == -3);
    CHECK(law12.position(3) == 3);
}

TEST_CASE("weighted_sum_law matches full enumeration for n <= 8") {
    Xoshiro256 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        auto dist = random_law(rng, 3);
        const int n = 2 + static_cast<int>(rng.uniform_index(7));
        std::vector<double> coeffs;
        std::vector<Rational> coeffs_q;
        for (int k = 0; k < n; ++k) {
            const double c = std::round(rng.uniform(-6, 6)) / 2;
            coeffs.push_back(c);
            coeffs_q.push_back(rational_from_double(c));
        }
        if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0; }))
            coeffs[0] = 1, coeffs_q[0] = 1;
        auto law = weighted_sum_law(WeightVector::make1(coeffs), dist);
        auto expected = oracles::sum_law_enumeration(coeffs_q, dist);
        REQUIRE(law.size() == expected.size());
        Rational total(0);
        for (std::size_t i = 0; i < law.size(); ++i) {
            auto it = expected.find(law.position(i));
            REQUIRE(it != expected.end());
            CHECK(it->second == law.weight(i));
            total += law.weight(i);
        }
        CHECK(total == 1);
    }
}

TEST_CASE("weighted_sum_law: meet-in-the-middle path agrees with the chain") {
    auto rad = DiscreteDist::rademacher();
    std::vector<double> coeffs;
    for (int k = 0; k < 26; ++k) coeffs.push_back(1 + k % 3);
    auto a = WeightVector::make1(coeffs);
    SumLawConfig direct;
    direct.mitm_threshold = 1000;  // force the plain chain
    SumLawConfig split;
    split.mitm_threshold = 8;  // force the split
    auto law_a = weighted_sum_law(a, rad, direct);
    auto law_b = weighted_sum_law(a, rad, split);
    REQUIRE(law_a.size() == law_b.size());
    for (std::size_t i = 0; i < law_a.size(); ++i) {
        CHECK(law_a.position(i) == law_b.position(i));
        CHECK(law_a.weight(i) == law_b.weight(i));
    }
}

TEST_CASE("weighted_sum_law: budget overflow signals") {
    // Generic coefficients, no coalescing: support 2^n.
    Xoshiro256 rng(5);
    std::vector<double> coeffs;
    for (int k = 0; k < 24; ++k) coeffs.push_back(rng.uniform(0.5, 2.0));
    SumLawConfig cfg;
    cfg.atom_budget = 1u << 12;
    CHECK_THROWS_AS(weighted_sum_law(WeightVector::make1(coeffs), DiscreteDist::rademacher(), cfg),
                    AtomBudgetExceeded);
}

TEST_CASE("project") {
    auto a = WeightVector::make(2, {{1, 0}, {0, 1}});
    auto p1 = a.project(0);
    CHECK(p1.d() == 1);
    CHECK(p1.coord(0, 0) == 1);
    CHECK(p1.coord(1, 0) == 0);

    auto b = WeightVector::make(2, {{3, 4}, {5, 6}});
    auto p2 = b.project(1);
    CHECK(p2.coord(0, 0) == 4);
    CHECK(p2.coord(1, 0) == 6);

    auto c = WeightVector::make1({2, 3});
    auto p3 = c.project(0);
    CHECK(p3.coord(1, 0) == 3);
    CHECK_THROWS_AS(c.project(1), std::out_of_range);
}

TEST_CASE("levy_base_measure") {
    auto m = levy_base_measure(WeightVector::make1({1, 1}));
    REQUIRE(m.size() == 2);
    CHECK(m.mass(0) == 2);
    CHECK(m.mass(1) == 2);
    CHECK(m.total_mass() == 4);
    CHECK(m.is_symmetric());

    auto m2 = levy_base_measure(WeightVector::make(1, {{0.0}, {1.0}}));
    CHECK(m2.total_mass() == 4);

    auto m3 = levy_base_measure(WeightVector::make1({1, -1}));
    REQUIRE(m3.size() == 2);
    CHECK(m3.mass(0) == 2);
    CHECK(m3.total_mass() == 4);
}

TEST_CASE("levy_base_measure: total mass 2n, invariant under entry negation") {
    Xoshiro256 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(10));
        std::vector<double> coeffs, negated;
        for (int k = 0; k < n; ++k) {
            const double c = std::round(rng.uniform(-9, 9));
            coeffs.push_back(c);
            negated.push_back(-c);
        }
        if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0; })) {
            coeffs[0] = 1;
            negated[0] = -1;
        }
        auto m1 = levy_base_measure(WeightVector::make1(coeffs));
        auto m2 = levy_base_measure(WeightVector::make1(negated));
        CHECK(m1.total_mass() == 2 * n);
        REQUIRE(m1.size() == m2.size());
        for (std::size_t i = 0; i < m1.size(); ++i) {
            CHECK(m1.position1(i) == m2.position1(i));
            CHECK(m1.mass(i) == m2.mass(i));
        }
        CHECK(m1.is_symmetric());
    }
}
