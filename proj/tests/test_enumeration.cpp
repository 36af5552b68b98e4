#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfl/enumeration.hpp"
#include "mfl/errors.hpp"
#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/phi.hpp"

using namespace mfl;

namespace {

IndexTriple make_triple(int m, std::vector<int> i, std::vector<int> j, std::vector<int> k) {
    IndexTriple t;
    t.m = m;
    t.i = std::move(i);
    t.j = std::move(j);
    t.k = std::move(k);
    return t;
}

PhiField oracle_field() {
    return PhiField(make_kernel("zero_drift", {}, "trig_sigma", {1.0, 0.25, 1.0, 0.5}, 1),
                    cosine_density(1, 64, {0.2}));
}

} // namespace

TEST_CASE("the screen matches hand-checked vanishing conditions") {
    // i[0] = 0 occurs once in I and never in J or K: condition (1) fires.
    CHECK_FALSE(survives(make_triple(1, {0, 1}, {1, 1}, {1, 1})));
    // Everything equal: no isolated first-slot label, no fresh pair.
    CHECK(survives(make_triple(1, {1, 1}, {1, 1}, {1, 1})));
    // j[0] = 1 != k[0] = 2, both absent elsewhere: condition (2) fires.
    CHECK_FALSE(survives(make_triple(1, {0, 0}, {1, 0}, {2, 0})));
    // Tying the pair labels back into I defuses condition (2).
    CHECK(survives(make_triple(1, {1, 1}, {1, 0}, {2, 0})));
    // Malformed triples are rejected outright.
    CHECK_THROWS_AS(survives(make_triple(1, {0}, {0, 0}, {0, 0})), ConfigError);
    CHECK_THROWS_AS(survives(make_triple(0, {}, {}, {})), ConfigError);
}

TEST_CASE("first-slot multiplicities sort descending") {
    const auto counts = make_triple(2, {0, 0, 1, 2}, {0, 0, 0, 0}, {0, 0, 0, 0}).multiplicities();
    REQUIRE(counts.size() == 3);
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
}

TEST_CASE("survivor counts over small label sets are frozen") {
    struct Case {
        int n, m;
        long long total, survivors;
    };
    const Case cases[] = {
        {2, 1, 64, 60},         {3, 1, 729, 531},      {4, 1, 4096, 2056},
        {2, 2, 4096, 4088},     {3, 2, 531441, 506877},
    };
    for (const auto& c : cases) {
        const auto rep = enumerate_survivors(c.n, c.m);
        CHECK(rep.total == c.total);
        CHECK(rep.survivors == c.survivors);
        CHECK(static_cast<double>(rep.survivors) <= rep.cap);
        CHECK(rep.identities_ok);
    }

    const auto rep = enumerate_survivors(2, 1);
    CHECK(rep.stars_and_bars_direct == 3);  // (2,0) (1,1) (0,2)
    CHECK(rep.stars_and_bars_formula == doctest::Approx(3.0).epsilon(1e-12));
    REQUIRE(rep.restricted_direct.size() == 1);
    CHECK(rep.restricted_direct[0] == 1);   // 2 = one part of size 2
    CHECK(rep.restricted_formula[0] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(enumerate_survivors(10, 2), BudgetError);  // 10^12 candidates
    CHECK_THROWS_AS(enumerate_survivors(0, 1), ConfigError);
    CHECK_THROWS_AS(enumerate_survivors(2, 0), ConfigError);
}

TEST_CASE("oracle construction guards") {
    const PhiField field = oracle_field();
    CHECK_THROWS_AS(TripleOracle(field, 16), ConfigError);  // quad_n too coarse
    const PhiField plane(make_kernel("zero_drift", {}, "trig_sigma", {1.0, 0.25, 1.0, 0.5}, 2),
                         cosine_density(2, 32, {0.2}));
    CHECK_THROWS_AS(TripleOracle(plane, 32), ConfigError);  // tabulation is 1-d only
}

TEST_CASE("oracle integrals vanish exactly where the screen says they must") {
    const PhiField field = oracle_field();
    TripleOracle oracle(field, 32);
    CHECK(oracle.quad_n() == 32);
    CHECK(oracle.scale(1) > 0.0);
    CHECK(oracle.scale(2) == doctest::Approx(oracle.scale(1) * oracle.scale(1)).epsilon(1e-12));

    // Condition (1) on the first slot: integrating out the isolated x_0.
    CHECK(oracle.vanishes(make_triple(1, {0, 1}, {1, 1}, {1, 1})));
    // Condition (2) on a fresh pair: the double integral over (z, z') dies.
    CHECK(oracle.vanishes(make_triple(1, {0, 0}, {1, 0}, {2, 0})));
    // The all-diagonal triple integrates phi2(x,x,x)^2 rho(x) > 0.
    CHECK_FALSE(oracle.vanishes(make_triple(1, {0, 0}, {0, 0}, {0, 0})));
    const double diag = oracle.integral(make_triple(1, {0, 0}, {0, 0}, {0, 0}));
    CHECK(diag > 0.0);
}

TEST_CASE("oracle memoization folds relabelings and the j/k swap") {
    const PhiField field = oracle_field();
    TripleOracle oracle(field, 32);
    const auto base = make_triple(1, {0, 0}, {1, 2}, {2, 1});
    const double v0 = oracle.integral(base);
    CHECK(oracle.memo_size() == 1);
    // Swapping j and k inside each factor hits the same canonical key.
    const double v1 = oracle.integral(make_triple(1, {0, 0}, {2, 1}, {1, 2}));
    CHECK(v1 == v0);
    CHECK(oracle.memo_size() == 1);
    // Renaming the particle labels does too.
    const double v2 = oracle.integral(make_triple(1, {5, 5}, {7, 9}, {9, 7}));
    CHECK(v2 == v0);
    CHECK(oracle.memo_size() == 1);
    // A structurally different triple gets its own entry.
    oracle.integral(make_triple(1, {0, 0}, {0, 0}, {0, 0}));
    CHECK(oracle.memo_size() == 2);
}

TEST_CASE("oracle refuses integrals beyond its node budget") {
    const PhiField field = oracle_field();
    TripleOracle oracle(field, 32);
    // Six distinct labels need 32^6 > 5e7 quadrature nodes.
    CHECK_THROWS_AS(oracle.integral(make_triple(1, {0, 1}, {2, 3}, {4, 5})), BudgetError);
}
