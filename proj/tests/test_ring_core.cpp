#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "starklab/oracle.hpp"
#include "starklab/ring_core.hpp"

using namespace starklab;

namespace {

Vec random_elem(const Ring& R, std::mt19937_64& rng) {
    Vec v(R.n());
    for (auto& c : v) c = static_cast<i64>(rng() % static_cast<std::uint64_t>(R.z().q));
    return v;
}

}  // namespace

TEST_CASE("build_ring sizes") {
    auto R = Ring::build(3, 2, 1, {});
    CHECK(R->log_card() == 2);
    CHECK(R->n() == 1);
    auto F = Ring::build(3, 1, 1, {3});
    CHECK(F->local());
    CHECK(F->residue_field()->log_card() == 1);
    auto S = Ring::build(3, 2, 2, {3});
    CHECK(S->log_card() == 12);
    CHECK(Ring::build(5, 1, 3, {})->modulus_poly().size() == 4);
}

TEST_CASE("build_ring rejects bad parameters") {
    CHECK_THROWS_AS(Ring::build(4, 1, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(Ring::build(2, 1, 1, {2}), std::invalid_argument);
    CHECK_THROWS_AS(Ring::build(3, 1, 1, {6}), std::invalid_argument);
    CHECK_THROWS_AS(Ring::build(3, 1, 1, {9, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Ring::build(3, 1, 1, {}, {3}), std::invalid_argument);
}

TEST_CASE("ring axioms on random triples") {
    std::mt19937_64 rng(11);
    for (auto spec : {RingSpec{3, 2, 1, {3}}, RingSpec{3, 2, 2, {3}}, RingSpec{5, 2, 1, {5}}, RingSpec{3, 1, 1, {3, 3}},
                      RingSpec{3, 2, 2, {}, {2}}, RingSpec{5, 1, 2, {}, {3}}}) {
        auto R = Ring::build(spec);
        for (int t = 0; t < 40; ++t) {
            Vec a = random_elem(*R, rng), b = random_elem(*R, rng), c = random_elem(*R, rng);
            CHECK(R->mul(R->mul(a, b), c) == R->mul(a, R->mul(b, c)));
            CHECK(R->mul(a, R->add(b, c)) == R->add(R->mul(a, b), R->mul(a, c)));
            CHECK(R->mul(a, b) == R->mul(b, a));
            CHECK(R->mul(a, R->one()) == a);
            CHECK(R->involution(R->mul(a, b)) == R->mul(R->involution(a), R->involution(b)));
        }
    }
}

TEST_CASE("ideal membership examples") {
    auto R = Ring::build(3, 2, 1, {3});
    Vec g = R->gen(0), one = R->one();
    Vec gm1 = R->sub(g, one);
    Ideal I(R, {gm1});
    CHECK(I.contains(R->mul(gm1, gm1)));
    Ideal three(R, {R->scalar(3)});
    Vec c = R->pow(gm1, 3);
    CHECK(three.contains(c));
    CHECK(c == R->mul(R->scalar(3), R->mul(g, R->sub(one, g))));
    CHECK_FALSE(three.contains(gm1));
}

TEST_CASE("ideal normal form is canonical and idempotent") {
    std::mt19937_64 rng(5);
    auto R = Ring::build(3, 2, 1, {3});
    for (int t = 0; t < 100; ++t) {
        std::vector<Vec> gens;
        const int k = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < k; ++i) gens.push_back(R->mul(random_elem(*R, rng), R->scalar(rng() % 2 ? 3 : 1)));
        Ideal I(R, gens);
        Ideal again(R, I.generators());
        CHECK(I == again);
        auto shuffled = gens;
        std::reverse(shuffled.begin(), shuffled.end());
        shuffled.push_back(R->add(gens[0], gens.back()));
        CHECK(Ideal(R, shuffled) == I);
        // agrees with enumeration of R * gens
        auto codes = oracle::ideal_set(*R, gens);
        CHECK(static_cast<i64>(codes.size()) == ipow(3, I.log_card()));
        for (const auto& x : I.generators()) CHECK(oracle::member(oracle::Codec{R->z().q, R->n()}, codes, x));
    }
}

TEST_CASE("mixed rings are rejected") {
    auto R = Ring::build(3, 2, 1, {3});
    auto S = Ring::build(3, 2, 1, {9});
    Ideal I(R, {R->one()});
    Ideal J(S, {S->one()});
    CHECK_THROWS(I + J);
}

TEST_CASE("units agree with exhaustive inverse search") {
    // cardinality <= 3^6
    for (auto spec : {RingSpec{3, 2, 1, {3}}, RingSpec{3, 1, 2, {3}}, RingSpec{3, 3, 2, {}}, RingSpec{3, 2, 1, {}, {2}},
                      RingSpec{3, 1, 1, {}, {2, 2}}, RingSpec{3, 6, 1, {}}}) {
        auto R = Ring::build(spec);
        auto all = oracle::all_vectors(R->z().q, R->n());
        int units = 0;
        for (const auto& a : all) {
            bool found = false;
            for (const auto& b : all)
                if (R->mul(a, b) == R->one()) {
                    found = true;
                    break;
                }
            CHECK(found == R->is_unit(a));
            if (found) {
                ++units;
                CHECK(R->mul(a, R->inverse(a)) == R->one());
            }
        }
        CHECK(units > 0);
    }
}

TEST_CASE("unit examples") {
    auto R = Ring::build(3, 2, 1, {3});
    Vec g = R->gen(0);
    CHECK(R->is_unit(g));
    CHECK_FALSE(R->is_unit(R->sub(g, R->one())));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) CHECK(R->is_unit(R->add(R->one(), R->smul(3, random_elem(*R, rng)))));
}

TEST_CASE("norm element") {
    auto T = Ring::build(3, 2, 1, {});
    CHECK(norm_element(*T, {}) == T->one());
    auto R = Ring::build(3, 2, 1, {3});
    Vec g = R->gen(0);
    Vec N = R->add(R->one(), R->add(g, R->mul(g, g)));
    CHECK(norm_element(*R, {{1}}) == N);
    auto S = Ring::build(5, 2, 1, {5, 5});
    CHECK(S->augmentation(norm_element(*S, {{1, 0}, {0, 1}})) == Vec{25 % 25});
    CHECK(R->augmentation(N) == Vec{3});
}

TEST_CASE("chi idempotents") {
    auto R = Ring::build(3, 2, 1, {}, {2});
    Vec e = chi_idempotent(*R, {0});
    CHECK(e == Vec{5, 5});
    CHECK(R->mul(e, e) == e);

    for (auto spec : {RingSpec{3, 2, 2, {3}, {4}}, RingSpec{5, 2, 1, {}, {2, 4}}, RingSpec{3, 2, 2, {}, {8}}}) {
        auto S = Ring::build(spec);
        const auto& aux = S->spec().aux;
        std::vector<std::vector<int>> chars{{}};
        for (int d : aux) {
            std::vector<std::vector<int>> next;
            for (const auto& c : chars)
                for (int a = 0; a < d; ++a) {
                    auto cc = c;
                    cc.push_back(a);
                    next.push_back(cc);
                }
            chars = next;
        }
        std::vector<Vec> es;
        Vec sum = S->zero();
        for (const auto& c : chars) {
            es.push_back(chi_idempotent(*S, c));
            sum = S->add(sum, es.back());
            CHECK(S->mul(es.back(), es.back()) == es.back());
        }
        CHECK(sum == S->one());
        for (size_t i = 0; i < es.size(); ++i)
            for (size_t j = i + 1; j < es.size(); ++j) CHECK(S->is_zero(S->mul(es[i], es[j])));
    }
    auto bad = Ring::build(3, 2, 1, {}, {4});
    CHECK_THROWS_WITH_AS(chi_idempotent(*bad, {1}), "character values need a larger residue degree f", std::invalid_argument);
}

TEST_CASE("ring maps") {
    auto R = Ring::build(3, 2, 1, {9});
    auto S = Ring::build(3, 1, 1, {3});
    auto pi = group_quotient_map(R, S, {{1}});
    CHECK(pi.surjective());
    std::mt19937_64 rng(9);
    for (int t = 0; t < 30; ++t) {
        Vec a = random_elem(*R, rng), b = random_elem(*R, rng);
        CHECK(pi.apply(R->mul(a, b)) == S->mul(pi.apply(a), pi.apply(b)));
        CHECK(pi.apply(R->add(a, b)) == S->add(pi.apply(a), pi.apply(b)));
    }
    auto rho = precision_map(R, 1);
    CHECK(rho.apply(R->scalar(3)) == rho.dst->zero());
}
