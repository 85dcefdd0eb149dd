#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "starklab/etnc_lattice.hpp"
#include "starklab/generate.hpp"
#include "starklab/oracle.hpp"

using namespace starklab;

namespace {

EtncInstance trivial_instance(std::vector<int> group, int m = 1, int h = 2) {
    EtncInstance inst;
    inst.p = 3;
    inst.m = m;
    inst.h = h;
    inst.group = group;
    inst.eps = eps_all(group);
    auto R = Ring::build(3, inst.working_precision(), 1, group);
    inst.basic = R->one();
    inst.lambda = {R->one(), 0, inst.working_precision()};
    inst.lstar = {R->one(), 0, inst.working_precision()};
    return inst;
}

EtncInstance gen(std::uint64_t seed, int m, std::vector<int> group, int p = 3) {
    GeneratorParams gp;
    gp.seed = seed;
    gp.recipe = "etnc-basic";
    gp.p = p;
    gp.m = m;
    gp.group = std::move(group);
    return generate_etnc(gp);
}

EpsRing ring_of(const EtncInstance& inst) {
    return EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
}

std::vector<i64> convolve(const std::vector<int>& group, const std::vector<i64>& a, const std::vector<i64>& b) {
    auto R = Ring::build(group.empty() || group[0] % 3 == 0 ? 3 : group[0] % 5 == 0 ? 5 : 2, 1, 1, group);
    std::vector<i64> c(a.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[R->gmul(static_cast<int>(i), static_cast<int>(j))] += a[i] * b[j];
    return c;
}

}  // namespace

TEST_CASE("scaled idempotents are idempotent up to |G|") {
    for (const auto& group : std::vector<std::vector<int>>{{3}, {9}, {3, 3}, {5}, {27}, {3, 9}}) {
        int G = 1;
        for (int d : group) G *= d;
        auto reps = eps_all(group);
        for (unsigned mask = 1; mask < (1u << reps.size()); ++mask) {
            EpsDescriptor eps;
            for (size_t i = 0; i < reps.size(); ++i)
                if (mask >> i & 1) eps.push_back(reps[i]);
            auto e = scaled_idempotent(group, eps);
            auto e2 = convolve(group, e, e);
            for (size_t g = 0; g < e.size(); ++g) CHECK(e2[g] == G * e[g]);
            CHECK(e[0] == eps_character_count(group, eps));
            if (mask > 64) break;
        }
    }
}

TEST_CASE("eps quotient ranks") {
    auto C = EpsRing::make(3, 1, {3}, eps_all({3}), 3, 2);
    CHECK(C.rank == 3);
    CHECK(C.kernel.is_zero());
    auto D = EpsRing::make(3, 1, {3}, {{1}}, 3, 2);
    CHECK(D.rank == 2);
    CHECK(D.kernel.log_card() == 3);
    auto E = EpsRing::make(3, 2, {3, 3}, {{0, 1}, {1, 1}}, 2, 2);
    CHECK(E.rank == 2 * 4);
    CHECK_THROWS_AS(EpsRing::make(3, 1, {2}, {{1}}, 2, 2), std::invalid_argument);
}

TEST_CASE("euler polynomial examples") {
    RatPoly one_minus_x = euler_poly_matrix({{Rational(1)}});
    CHECK(one_minus_x == RatPoly{Rational(1), Rational(-1)});
    auto e = euler_poly_elliptic(0, 5, 3);
    CHECK(e.poly == RatPoly{Rational(1), Rational(0), Rational(1, 5)});
    CHECK(e.weil);
    CHECK_FALSE(euler_poly_elliptic(3, 2, 5).weil);
    CHECK(euler_poly_elliptic(2, 2, 5).weil);
    CHECK_THROWS_AS(euler_poly_elliptic(1, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(euler_poly_matrix({{Rational(1), Rational(0)}}), std::invalid_argument);
}

TEST_CASE("companion matrix reproduces the elliptic form") {
    for (long long ell : {2, 5, 7, 11, 13}) {
        for (long long a = -6; a <= 6; ++a) {
            // x^2 - a x + ell
            std::vector<std::vector<Rational>> A{{Rational(0), Rational(-ell)}, {Rational(1), Rational(a)}};
            CHECK(euler_poly_matrix(A) == euler_poly_elliptic(a, ell, 3).poly);
        }
    }
}

TEST_CASE("ring-valued euler polynomial and products") {
    auto R = Ring::build(3, 2, 1, {3});
    const Ring& r = *R;
    // 2 x 2 scalar matrices agree with the rational form
    std::vector<std::vector<Rational>> A{{Rational(2), Rational(1)}, {Rational(1), Rational(1)}};
    auto rat = euler_poly_matrix(A);
    auto ring = euler_poly_ring(r, {{r.scalar(2), r.scalar(1)}, {r.scalar(1), r.scalar(1)}});
    REQUIRE(ring.size() == rat.size());
    for (size_t k = 0; k < rat.size(); ++k) CHECK(ring[k] == rational_to_ring(r, rat[k]));

    auto P1 = euler_poly_elliptic(1, 7, 3).poly, P2 = euler_poly_elliptic(-2, 5, 3).poly, P3 = euler_poly_elliptic(4, 11, 3).poly;
    Vec a = euler_product(r, {{P1, 1}, {P2, 2}});
    Vec b = euler_product(r, {{P3, 1}});
    CHECK(r.mul(a, b) == euler_product(r, {{P1, 1}, {P2, 2}, {P3, 1}}));
    CHECK(euler_product(r, {}) == r.one());
    // P(g^-1) for P = 1 - x at g = sigma is 1 - sigma^2
    CHECK(euler_product(r, {{RatPoly{Rational(1), Rational(-1)}, 1}}) == r.sub(r.one(), r.group_elem(2)));
    CHECK_THROWS_AS(rational_to_ring(r, Rational(1, 3)), std::invalid_argument);
}

TEST_CASE("bk image check examples") {
    auto inst = trivial_instance({3});
    auto rep = bk_image_check(inst);
    REQUIRE(rep.verdict == Verdict::pass);
    auto C = ring_of(inst);
    auto R = FractionalLattice::integral(C);
    CHECK(rep.im_eta.equals(C, R));
    CHECK(rep.xi.equals(C, R));
    CHECK(rep.eta.y == C.R->one());
    CHECK(tnc_check(C, rep.xi));

    // H^2 = R / <3> with the basic element 3
    auto I3 = inst;
    I3.h2_gens = 1;
    I3.h2_relations = {C.R->scalar(3)};
    I3.basic = C.R->scalar(3);
    auto r3 = bk_image_check(I3);
    REQUIRE(r3.verdict == Verdict::pass);
    auto three = FractionalLattice::from_gens(C, {scaled(C, C.R->scalar(3))});
    CHECK(r3.product.equals(C, three));
    CHECK(r3.fitt.equals(C, three));
    CHECK(r3.im_eta.equals(C, R));
    CHECK(r3.xi.equals(C, three));

    // a basic element not generating Fitt^0 breaks the identity
    auto bad = I3;
    bad.basic = C.R->one();
    CHECK(bk_image_check(bad).verdict == Verdict::fail);
}

TEST_CASE("tnc examples") {
    auto inst = trivial_instance({3});
    auto C = ring_of(inst);
    auto R = FractionalLattice::integral(C);
    CHECK(tnc_check(C, R));
    auto pinv = FractionalLattice::from_gens(C, {scaled(C, C.R->one(), 1)});
    CHECK(pinv.offset() == 1);
    CHECK_FALSE(tnc_check(C, pinv));
    CHECK(pinv.contains(C, R));
    CHECK_FALSE(R.contains(C, pinv));

    auto flipped = inst;
    flipped.lstar.y = C.R->scalar(3);
    auto rep = bk_image_check(flipped);
    REQUIRE(rep.verdict == Verdict::pass);
    CHECK_FALSE(tnc_check(C, rep.xi));
}

TEST_CASE("generated instances: identity, unit invariance, p flip, headroom") {
    int passed = 0;
    const std::vector<std::vector<int>> groups{{3}, {9}, {3, 3}, {}};
    for (std::uint64_t seed = 1; seed <= 16; ++seed) {
        const auto& group = groups[seed % groups.size()];
        auto inst = gen(seed, 1 + static_cast<int>(seed % 2), group);
        auto rep = bk_image_check(inst);
        INFO("seed " << seed << " " << rep.detail);
        REQUIRE(rep.verdict == Verdict::pass);
        ++passed;
        auto C = ring_of(inst);
        CHECK(tnc_check(C, rep.xi));

        Rng rng(seed);
        auto u = inst;
        u.lstar.y = C.R->mul(u.lstar.y, rng.unit(*C.R));
        auto ru = bk_image_check(u);
        REQUIRE(ru.verdict == Verdict::pass);
        CHECK(ru.xi.equals(C, rep.xi));
        CHECK(tnc_check(C, ru.xi));

        // p L* needs one more unit of headroom
        auto pf = inst;
        pf.h += 1;
        pf.lstar.y = C.R->smul(3, pf.lstar.y);
        auto rp = bk_image_check(pf);
        REQUIRE(rp.verdict == Verdict::pass);
        CHECK_FALSE(tnc_check(ring_of(pf), rp.xi));

        CHECK(headroom_stable(inst));
    }
    CHECK(passed == 16);
}

TEST_CASE("p = 5 instances") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto inst = gen(seed, 1, {5}, 5);
        CHECK(bk_image_check(inst).verdict == Verdict::pass);
    }
}

TEST_CASE("insufficient headroom is reported") {
    auto inst = trivial_instance({3}, 1, 1);
    auto R = Ring::build(3, inst.working_precision(), 1, {3});
    inst.h2_gens = 1;
    inst.h2_relations = {R->scalar(9)};
    inst.basic = R->scalar(9);
    auto rep = bk_image_check(inst);
    CHECK(rep.verdict == Verdict::insufficient_precision);
    CHECK(rep.required_h > inst.h);
    CHECK(verdict_keyword(rep.verdict) == "INSUFFICIENT_PRECISION");
}

TEST_CASE("associated order examples") {
    auto C = EpsRing::make(3, 1, {3}, eps_all({3}), 3, 2);
    const Ring& r = *C.R;
    auto R = FractionalLattice::integral(C);
    auto a = associated_order(C, R);
    CHECK(a.order.equals(C, R));
    CHECK(a.principal);
    CHECK(a.order_is_integral);

    // a unit of the rational algebra: 3 + sigma - 1
    auto C5 = EpsRing::make(3, 1, {3}, eps_all({3}), 5, 2);
    Vec x = C5.R->add(C5.R->scalar(2), C5.R->group_elem(1));
    auto xR = FractionalLattice::from_gens(C5, {scaled(C5, x, 1)});
    auto b = associated_order(C5, xR);
    CHECK(b.order.equals(C5, FractionalLattice::integral(C5)));
    CHECK(b.principal);

    // maximal ideal (3, sigma - 1): its order is the maximal order
    auto m = FractionalLattice::from_gens(C, {scaled(C, r.scalar(3)), scaled(C, r.sub(r.group_elem(1), r.one()))});
    auto c = associated_order(C, m);
    CHECK_FALSE(c.order_is_integral);
    CHECK_FALSE(c.principal);
    CHECK(c.order.contains(C, R));
    CHECK(c.order.times(C, m).equals(C, m));
    auto oracle_set = oracle::stabilizer_set(r, m.span().rows(), C.kernel.rows(), m.exponent(), m.precision());
    CHECK(oracle_set == oracle::lattice_set(r, c.stabilizer.rows(), {}, r.m()));
    CHECK_FALSE(oracle::principal_by_search(r, m.span().rows(), C.kernel.rows(), m.precision()));
}

TEST_CASE("associated orders agree with the stabilizer and principality oracles") {
    Rng rng(7);
    int compared = 0;
    const std::vector<std::pair<std::vector<int>, EpsDescriptor>> cases{
        {{3}, {{0}, {1}}}, {{3}, {{1}}}, {{3}, {{0}}}, {{}, {{}}}};
    for (int trial = 0; trial < 24; ++trial) {
        const auto& [group, eps] = cases[trial % cases.size()];
        const int N = group.empty() ? 5 : 3;
        auto C = EpsRing::make(3, 1, group, eps, N, 2);
        const Ring& r = *C.R;
        std::vector<ScaledElem> gens;
        const int k = 1 + rng.below(2);
        for (int i = 0; i < k; ++i) gens.push_back(scaled(C, rng.elem(r)));
        gens.push_back(scaled(C, r.scalar(3)));
        FractionalLattice I;
        try {
            I = FractionalLattice::from_gens(C, gens);
        } catch (const InsufficientPrecision&) {
            continue;
        }
        if (2 * I.exponent() >= I.precision()) continue;
        auto a = associated_order(C, I);
        auto want = oracle::stabilizer_set(r, I.span().rows(), C.kernel.rows(), I.exponent(), I.precision());
        CHECK(want == oracle::lattice_set(r, a.stabilizer.rows(), {}, r.m()));
        CHECK(a.principal == oracle::principal_by_search(r, I.span().rows(), C.kernel.rows(), I.precision()));
        CHECK(a.order.times(C, I).equals(C, I));
        CHECK(a.order.contains(C, FractionalLattice::integral(C)));
        // scaling invariance
        Vec u = rng.unit(r);
        CHECK(associated_order(C, I.scale(C, {u, 0, N})).order.equals(C, a.order));
        if (2 * I.exponent() < I.precision() - 1)
            CHECK(associated_order(C, I.scale(C, {r.smul(3, u), 1, N})).order.equals(C, a.order));
        ++compared;
    }
    CHECK(compared >= 12);
}

TEST_CASE("codescent examples") {
    TowerInstance T;
    T.source = {3, 2, 1, {9}, {}};
    T.target_group = {3};
    T.images = {{1}};
    T.h2_gens = 1;
    T.d = 1;
    T.r = 1;
    auto src = Ring::build(T.source);
    auto dst = Ring::build(3, 2, 1, {3});
    T.element = src->one();
    auto rep = codescent_check(T);
    CHECK(rep.ok());
    CHECK(rep.target_fitt.is_zero());

    T.h2_gens = 0;
    rep = codescent_check(T);
    CHECK(rep.target_fitt.is_whole());

    Vec x = src->add(src->scalar(3), src->sub(src->group_elem(1), src->one()));
    T.h2_gens = 1;
    T.h2_relations = {x};
    rep = codescent_check(T);
    CHECK(rep.ok());
    CHECK(rep.target_fitt == Ideal(dst, {project(*src, *dst, T.images, x)}));

    auto bad = T;
    bad.images = {{0}};
    CHECK_THROWS_AS(codescent_check(bad), std::invalid_argument);
}

TEST_CASE("generated towers satisfy codescent") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneratorParams gp;
        gp.seed = seed;
        gp.recipe = "tower";
        gp.m = 1 + static_cast<int>(seed % 2);
        gp.group = seed % 3 ? std::vector<int>{9} : std::vector<int>{3, 3};
        auto T = generate_tower(gp);
        CHECK(codescent_check(T).ok());
    }
}

TEST_CASE("projection agrees with the ring quotient map") {
    auto src = Ring::build(3, 2, 2, {3, 3});
    auto dst = Ring::build(3, 2, 2, {3});
    std::vector<std::vector<int>> images{{1}, {2}};
    auto f = group_quotient_map(src, dst, images);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        Vec x = rng.elem(*src), y = rng.elem(*src);
        CHECK(project(*src, *dst, images, x) == f.apply(x));
        CHECK(project(*src, *dst, images, src->mul(x, y)) == dst->mul(f.apply(x), f.apply(y)));
    }
}

TEST_CASE("artin examples") {
    auto triv = artin_decompose({3}, {{{0}, 1}});
    REQUIRE(triv.coeffs.size() == 1);
    CHECK(triv.m == 1);
    CHECK(triv.coeffs[0].first.order == 3);
    CHECK(triv.coeffs[0].second == 1);

    auto d = artin_decompose({3}, {{{1}, 1}, {{2}, 1}});
    REQUIRE(d.coeffs.size() == 2);
    CHECK(d.coeffs[0].first.order == 1);
    CHECK(d.coeffs[0].second == 1);
    CHECK(d.coeffs[1].first.order == 3);
    CHECK(d.coeffs[1].second == -1);

    CHECK_THROWS_AS(artin_decompose({3}, {{{1}, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(artin_decompose({9}, {{{1}, 1}, {{2}, 1}}), std::invalid_argument);
}

TEST_CASE("subgroup counts") {
    CHECK(all_subgroups({}).size() == 1);
    CHECK(all_subgroups({9}).size() == 3);
    CHECK(all_subgroups({3, 3}).size() == 6);
    CHECK(all_subgroups({2, 2}).size() == 5);
    CHECK(all_subgroups({3, 3, 3}).size() == 28);
    CHECK(all_subgroups({9, 3}).size() == 10);
}

TEST_CASE("artin decompose then assemble is the identity") {
    for (const auto& group : std::vector<std::vector<int>>{{9}, {3, 3}, {2, 2, 2}, {4, 2}, {27}}) {
        auto reps = eps_all(group);
        Rng rng(11);
        for (int trial = 0; trial < 40; ++trial) {
            std::map<std::vector<int>, long long> phi;
            for (const auto& rep : reps) {
                long long c = static_cast<long long>(rng.below(5)) - 2;
                for (const auto& chi : orbit_members(group, rep)) phi[chi] = c;
            }
            auto want = orbit_multiplicities(group, phi);
            auto dec = artin_decompose(group, phi);
            CHECK(artin_assemble(group, dec.coeffs) == want);
        }
    }
}
