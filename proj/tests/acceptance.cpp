// One line per acceptance criterion; exit status is nonzero if any line fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "starklab/cli.hpp"
#include "starklab/generate.hpp"
#include "starklab/io.hpp"
#include "starklab/oracle.hpp"
#include "starklab/stark_systems.hpp"

using namespace starklab;
namespace fs = std::filesystem;

namespace {

// time limits in seconds, per criterion
constexpr double kLimit[12] = {0, 60, 60, 120, 120, 120, 60, 60, 10, 30, 30, 300};
constexpr double kSuiteLimit = 300;

struct Result {
    bool ok = true;
    std::string detail;
    std::vector<std::string> failures;
    void require(bool c, const std::string& what) {
        if (!c) {
            ok = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

std::string S(long long x) { return std::to_string(x); }

Vec skewed_elem(const Ring& R, Rng& rng) {
    Vec x = rng.elem(R);
    switch (rng.below(3)) {
        case 0: return R.smul(R.p(), x);
        case 1: return R.factors() ? R.mul(x, R.sub(R.gen(0), R.one())) : R.smul(R.p(), x);
        default: return x;
    }
}

FPModule random_module(const RingHandle& R, int b, int c, Rng& rng) {
    std::vector<std::vector<Vec>> A(b, std::vector<Vec>(c));
    for (auto& row : A)
        for (auto& e : row) e = skewed_elem(*R, rng);
    return FPModule::from_matrix(R, A);
}

bool same_codes(const Ideal& I, const oracle::CodeSet& s) { return oracle::ideal_codes(I) == s; }

// 1: Fitting ideals
Result fitting_suite() {
    Result res;
    Rng rng(101);
    const std::vector<RingSpec> specs{{3, 1, 1, {3}, {}}, {3, 2, 1, {3}, {}}, {3, 1, 1, {9}, {}}, {3, 1, 1, {3, 3}, {}},
                                      {3, 2, 1, {}, {}},  {5, 1, 1, {5}, {}},  {5, 2, 1, {}, {}}};
    int pairs = 0, minors = 0;
    for (int t = 0; t < 140; ++t) {
        const RingSpec& spec = specs[t % specs.size()];
        auto R = Ring::build(spec);
        auto M = random_module(R, 1 + rng.below(2), 1 + rng.below(2), rng);
        auto N = random_module(R, 1 + rng.below(2), rng.below(3), rng);
        const std::string tag = R->describe() + " pair " + S(t);
        res.require(annihilator(M).contains(fitting_ideal(M, 0)), tag + ": Fitt^0 not in Ann");
        auto MN = M.direct_sum(N);
        for (int n = 0; n <= MN.gens(); ++n) {
            Ideal sum = Ideal::zero(R);
            for (int i = 0; i <= n; ++i) sum = sum + fitting_ideal(M, i) * fitting_ideal(N, n - i);
            res.require(fitting_ideal(MN, n) == sum, tag + ": convolution fails at n=" + S(n));
        }
        std::vector<RingMap> maps;
        if (!spec.group.empty()) maps.push_back(group_quotient_map(R, Ring::build(spec.p, spec.m, spec.f, {}), std::vector<std::vector<int>>(spec.group.size())));
        if (spec.m > 1) maps.push_back(precision_map(R, 1));
        for (const auto& pi : maps)
            for (int j = 0; j <= M.gens(); ++j)
                res.require(fitting_ideal(base_change(M, pi), j) == map_ideal(pi, fitting_ideal(M, j)), tag + ": base change fails at j=" + S(j));
        if (R->log_card() <= 9)
            for (int j = 0; j <= M.gens(); ++j, ++minors)
                res.require(same_codes(fitting_ideal(M, j), oracle::fitting_set(M, j)), tag + ": minors oracle disagrees at j=" + S(j));
        ++pairs;
    }
    res.require(pairs >= 100, "fewer than 100 pairs");
    res.detail = S(pairs) + " module pairs over " + S(specs.size()) + " rings, " + S(minors) + " minors-oracle comparisons";
    return res;
}

// 2: biduals
Result bidual_suite() {
    Result res;
    int freecases = 0, compared = 0;
    const std::vector<RingSpec> free_specs{{3, 2, 1, {3}, {}}, {3, 1, 2, {}, {}}, {5, 1, 1, {5}, {}}, {3, 1, 1, {3, 3}, {}}};
    for (const auto& spec : free_specs) {
        auto R = Ring::build(spec);
        for (int b = 1; b <= 3; ++b)
            for (int r = 1; r <= b; ++r) {
                auto F = FPModule::free(R, b);
                res.require(canonical_map_bijective(make_bidual(F, r)), R->describe() + ": bidual map not bijective b=" + S(b) + " r=" + S(r));
                const int cnt = static_cast<int>(subsets(b, r).size());
                for (int i = 0; i < cnt; ++i) {
                    Vec x(static_cast<size_t>(cnt) * R->n(), 0);
                    x[static_cast<size_t>(i) * R->n()] = 1;
                    res.require(bidual_and_image(F, r, x).image.is_whole(), R->describe() + ": basis image ideal is not R");
                }
                ++freecases;
            }
    }
    Rng rng(202);
    const std::vector<RingSpec> specs{{3, 2, 1, {}, {}}, {3, 1, 1, {3}, {}}, {3, 3, 1, {}, {}}, {3, 2, 1, {3}, {}}, {3, 1, 2, {}, {}}, {5, 2, 1, {}, {}}};
    for (int t = 0; t < 400 && compared < 120; ++t) {
        auto R = Ring::build(specs[t % specs.size()]);
        const int b = 1 + rng.below(2);
        auto M = random_module(R, b, rng.below(3), rng);
        if (M.log_card() > 6) continue;
        for (int r = 1; r <= b; ++r) {
            const int cnt = static_cast<int>(subsets(b, r).size());
            Vec x;
            for (int i = 0; i < cnt; ++i) {
                Vec e = skewed_elem(*R, rng);
                x.insert(x.end(), e.begin(), e.end());
            }
            res.require(same_codes(bidual_and_image(M, r, x).image, oracle::bidual_image_set(M, r, x)),
                        R->describe() + ": image ideal disagrees with enumeration, trial " + S(t));
            ++compared;
        }
    }
    res.require(compared >= 100, "fewer than 100 oracle comparisons");
    res.detail = S(freecases) + " free (b, r) cases, " + S(compared) + " image ideals vs enumeration on modules of order <= 3^6";
    return res;
}

GeneratorParams selmer_params(const std::string& recipe, std::uint64_t seed, int m) {
    GeneratorParams gp;
    gp.seed = seed;
    gp.m = m;
    gp.recipe = recipe;
    gp.aux_primes = gp.depth = 2;
    gp.vertex_depth = static_cast<int>(seed % 3);
    const std::vector<std::vector<int>> groups{{3}, {9}, {3, 3}};
    gp.group = groups[seed % groups.size()];
    return gp;
}

const std::vector<std::string> kRecipes{"cartesian", "non-cartesian", "core-vertex-at-depth-k"};
constexpr int kPerRecipe = 50;

// 3: cartesian <-> core vertex within depth 2
Result free_suite() {
    Result res;
    int instances = 0, with_vertex = 0, without = 0;
    for (const auto& recipe : kRecipes)
        for (int m = 1; m <= 2; ++m)
            for (std::uint64_t seed = 1; seed <= kPerRecipe; ++seed) {
                auto inst = generate_selmer(selmer_params(recipe, seed, m));
                const std::string tag = recipe + " m=" + S(m) + " seed " + S(seed);
                res.require(validate_instance(inst).ok(), tag + ": instance does not validate");
                auto fr = theorem_free_report(inst, inst.tags()[0]);
                res.require(fr.equivalence, tag + ": cartesian and vertex existence disagree");
                res.require(fr.ranks_ok, tag + ": vertex rank differs from chi + nu");
                res.require(fr.shortcut_ok, tag + ": vanishing criterion disagrees");
                if (recipe != "core-vertex-at-depth-k") res.require(fr.cartesian == (recipe == "cartesian"), tag + ": recipe produced the wrong kind");
                (fr.exists_at_level.back() ? with_vertex : without)++;
                ++instances;
            }
    res.require(with_vertex > 0 && without > 0, "only one direction exercised");
    res.detail = S(instances) + " instances (" + S(kPerRecipe) + " per recipe and level), " + S(with_vertex) + " with core vertices, " + S(without) + " without";
    return res;
}

// 4: level one <-> level two
Result propagation_suite() {
    Result res;
    int instances = 0, agree_yes = 0, agree_no = 0;
    for (const auto& recipe : kRecipes)
        for (std::uint64_t seed = 1; seed <= kPerRecipe; ++seed) {
            auto inst = generate_selmer(selmer_params(recipe, seed, 2));
            const std::string tag = inst.tags()[0];
            bool lvl[2];
            for (int level = 0; level < 2; ++level) {
                lvl[level] = false;
                for (const auto& c : core_vertex_search(inst, tag, inst.depth, level)) lvl[level] = lvl[level] || c.vertex;
            }
            auto fr = theorem_free_report(inst, tag);
            res.require(lvl[0] == lvl[1], recipe + " seed " + S(seed) + ": level 1 and level 2 disagree");
            res.require(fr.propagation, recipe + " seed " + S(seed) + ": propagation flag fails");
            (lvl[1] ? agree_yes : agree_no)++;
            ++instances;
        }
    res.detail = S(instances) + " level-2 instances, " + S(agree_yes) + " with vertices at both levels, " + S(agree_no) + " at neither";
    return res;
}

Vec scale_by(const Ring& R, const Vec& x, const Vec& v) {
    Vec out(v.size());
    for (size_t i = 0; i * R.n() < v.size(); ++i) {
        Vec b(v.begin() + static_cast<long>(i * R.n()), v.begin() + static_cast<long>((i + 1) * R.n()));
        Vec y = R.mul(x, b);
        std::copy(y.begin(), y.end(), out.begin() + static_cast<long>(i * R.n()));
    }
    return out;
}

// 5: Stark systems
Result stark_suite() {
    Result res;
    int fitting_cases = 0, strict = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed)
        for (int m = 1; m <= 2; ++m) {
            GeneratorParams gp;
            gp.seed = seed;
            gp.recipe = "stark";
            gp.m = m;
            gp.aux_primes = gp.depth = 3;
            gp.vertex_depth = static_cast<int>(seed % 2);
            auto inst = generate_selmer(gp);
            const auto tag = inst.tags()[0];
            const std::string where = "stark seed " + S(seed) + " m=" + S(m);
            auto S_ = stark_solve(inst, tag, core_rank(inst, tag).chi, inst.depth);
            res.require(S_.free_rank_one && S_.generators.size() == 1, where + ": module of systems not free of rank one");
            if (S_.generators.size() != 1) continue;
            auto rep = stark_fitting_report(inst, S_, S_.generators[0], 3);
            res.require(rep.generator && rep.all_equal, where + ": I_j differs from Fitt^j for the generator");
            ++fitting_cases;
            const Ring& R = *S_.ring;
            for (const Vec& x : {R.scalar(R.p()), R.sub(R.group_elem(1), R.one())}) {
                auto r2 = stark_fitting_report(inst, S_, scale_by(R, x, S_.generators[0]), 3);
                for (bool c : r2.contained) res.require(c, where + ": scaled I_j escapes the Fitting ideal");
                if (!r2.fitt[0].is_zero()) {
                    res.require(!r2.equal[0], where + ": non-unit multiple keeps I_0");
                    ++strict;
                }
            }
        }
    res.require(fitting_cases >= 20, "fewer than 20 Fitting comparisons");
    res.require(strict > 0, "strict inclusion never exercised");

    struct Spec {
        int p, m, f;
        std::vector<int> g;
    };
    int compared = 0;
    std::vector<std::string> over;
    // every generator-supported ring with |R| <= 81
    for (const Spec& s : {Spec{3, 1, 1, {}}, Spec{3, 2, 1, {}}, Spec{5, 1, 1, {}}, Spec{5, 2, 1, {}}, Spec{3, 1, 2, {}}, Spec{3, 2, 2, {}},
                          Spec{5, 1, 2, {}}, Spec{3, 1, 1, {3}}})
        for (const char* recipe : {"cartesian", "non-cartesian", "stark"})
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                if (std::string(recipe) == "non-cartesian" && s.g.empty()) continue;
                GeneratorParams gp;
                gp.seed = seed;
                gp.recipe = recipe;
                gp.p = s.p;
                gp.m = s.m;
                gp.f = s.f;
                gp.group = s.g;
                gp.aux_primes = gp.depth = 1;
                auto inst = generate_selmer(gp);
                const auto tag = inst.tags()[0];
                const int r = core_rank(inst, tag).chi;
                const std::string where = Ring::build(inst.ring)->describe() + " " + recipe + " seed " + S(seed);
                oracle::StarkEnumeration E;
                try {
                    E = oracle::stark_enumerate(inst, tag, r);
                } catch (const std::invalid_argument&) {
                    over.push_back(where);
                    continue;
                }
                auto sol = stark_solve(inst, tag, r, 1);
                res.require(sol.structure.module.log_card() == E.log_card, where + ": solver and enumeration differ in size");
                for (int j = 0; j <= 1; ++j) {
                    std::vector<Vec> g;
                    for (const auto& row : sol.systems.rows())
                        for (const auto& x : ij_invariant(sol, row, j).generators()) g.push_back(x);
                    res.require(oracle::ideal_set(*sol.ring, g) == E.value_ideals[j], where + ": value ideals differ at j=" + S(j));
                }
                ++compared;
            }
    res.require(compared >= 30, "fewer than 30 enumeration comparisons");
    res.detail = S(fitting_cases) + " generator Fitting comparisons (j <= 3), " + S(strict) + " strict j=0 inclusions, " + S(compared) +
                 " depth-1 instances with |R| <= 81 vs enumeration";
    for (const auto& o : over) res.detail += "; beyond the enumeration budget: " + o;
    return res;
}

EpsRing ring_of(const EtncInstance& inst) { return EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h); }

// 6: determinant lattices
Result etnc_suite() {
    Result res;
    const std::vector<std::pair<int, std::vector<int>>> cases{{3, {3}}, {3, {9}}, {3, {3, 3}}, {3, {}}, {5, {5}}, {5, {}}};
    int passed = 0, nontrivial = 0;
    for (std::uint64_t seed = 1; seed <= 54; ++seed) {
        const auto& [p, group] = cases[seed % cases.size()];
        GeneratorParams gp;
        gp.seed = seed;
        gp.recipe = "etnc-basic";
        gp.p = p;
        gp.m = 1 + static_cast<int>(seed % 2);
        gp.group = group;
        auto inst = generate_etnc(gp);
        const std::string where = "etnc seed " + S(seed);
        auto rep = bk_image_check(inst);
        res.require(rep.verdict == Verdict::pass, where + ": " + verdict_keyword(rep.verdict) + " " + rep.detail);
        if (rep.verdict != Verdict::pass) continue;
        auto C = ring_of(inst);
        res.require(tnc_check(C, rep.xi), where + ": tnc fails for L*");
        if (!rep.fitt.equals(C, FractionalLattice::integral(C))) ++nontrivial;

        Rng rng(seed);
        auto u = inst;
        u.lstar.y = C.R->mul(u.lstar.y, rng.unit(*C.R));
        auto ru = bk_image_check(u);
        res.require(ru.verdict == Verdict::pass && ru.xi.equals(C, rep.xi) && tnc_check(C, ru.xi), where + ": unit multiple of L* changes the verdict");

        auto pf = inst;
        pf.h += 1;
        pf.lstar.y = C.R->smul(p, pf.lstar.y);
        auto rp = bk_image_check(pf);
        res.require(rp.verdict == Verdict::pass && !tnc_check(ring_of(pf), rp.xi), where + ": p L* still passes");

        res.require(headroom_stable(inst), where + ": h -> h+1 changes the outcome");
        ++passed;
    }
    res.require(passed >= 50, "fewer than 50 instances");
    res.detail = S(passed) + " instances (" + S(nontrivial) + " with Fitt^0 != integral), unit invariance, p-flip and headroom on each";
    return res;
}

// 7: associated orders, on eps-quotients of cardinality <= 3^6
Result assoc_suite() {
    Result res;
    struct Case {
        int p;
        std::vector<int> group;
        EpsDescriptor eps;
        int N;
    };
    // |Lambda_eps / p^N|: 3^6, 3^3, 3^6, 3^6, 5^4; all of these are principal ideal rings or too shallow for 2t < P,
    // so non-principal lattices are exercised on the extra 3^9 case Z/27[C3]
    const std::vector<Case> cases{{3, {3}, {{1}}, 3}, {3, {3}, {{0}}, 3}, {3, {}, {{}}, 6}, {3, {3}, {{0}, {1}}, 2}, {5, {}, {{}}, 4}, {3, {3}, {{0}, {1}}, 3}};
    int small = 0;
    Rng rng(707);
    int compared = 0, principal = 0, nonprincipal = 0, scaled_checks = 0;
    for (int trial = 0; trial < 96; ++trial) {
        const Case& cs = cases[trial % cases.size()];
        auto C = EpsRing::make(cs.p, 1, cs.group, cs.eps, cs.N, cs.N);
        const Ring& r = *C.R;
        std::vector<ScaledElem> gens;
        const bool big = ipow(cs.p, C.rank * cs.N) > ipow(3, 6);
        const int k = 1 + rng.below(2);
        for (int i = 0; i < k; ++i) gens.push_back(scaled(C, big ? rng.nonunit(r) : rng.elem(r)));
        if (trial % 2) gens.push_back(scaled(C, r.scalar(cs.p)));
        FractionalLattice I;
        try {
            I = FractionalLattice::from_gens(C, gens);
        } catch (const InsufficientPrecision&) {
            continue;
        }
        if (2 * I.exponent() >= I.precision()) continue;
        const std::string where = "trial " + S(trial);
        auto a = associated_order(C, I);
        auto want = oracle::stabilizer_set(r, I.span().rows(), C.kernel.rows(), I.exponent(), I.precision());
        res.require(want == oracle::lattice_set(r, a.stabilizer.rows(), {}, r.m()), where + ": stabilizer differs from exhaustive membership");
        const bool pr = oracle::principal_by_search(r, I.span().rows(), C.kernel.rows(), I.precision());
        res.require(a.principal == pr, where + ": min_order verdict differs from the principality search");
        res.require(a.order.times(C, I).equals(C, I), where + ": order does not stabilize I");
        // monogenic, hence Gorenstein: principal exactly when the order is the integral one
        if (a.cyclic) res.require(a.principal == a.order_is_integral, where + ": principality and integrality of the order disagree");
        res.require(a.order.contains(C, FractionalLattice::integral(C)), where + ": order misses the integral ring");
        Vec u = rng.unit(r);
        auto su = associated_order(C, I.scale(C, {u, 0, cs.N}));
        res.require(su.order.equals(C, a.order) && su.principal == a.principal, where + ": unit scaling changes the order");
        ++scaled_checks;
        if (2 * I.exponent() < I.precision() - 1) {
            auto sp = associated_order(C, I.scale(C, {r.smul(cs.p, u), 1, cs.N}));
            res.require(sp.order.equals(C, a.order) && sp.principal == a.principal, where + ": scaling by p u changes the order");
            ++scaled_checks;
        }
        (pr ? principal : nonprincipal)++;
        small += ipow(cs.p, C.rank * cs.N) <= ipow(3, 6);
        ++compared;
    }
    res.require(small >= 30, "fewer than 30 oracle comparisons on quotients of cardinality <= 3^6");
    res.require(principal >= 5 && nonprincipal >= 5, "principality verdict not exercised both ways");
    res.detail = S(compared) + " lattices (" + S(small) + " on quotients <= 3^6, the rest on Z/27[C3]; " + S(principal) + " principal, " + S(nonprincipal) + " not) against exhaustive stabilizer and principality search, " +
                 S(scaled_checks) + " scaling checks";
    return res;
}

// 8: Artin induction
Result artin_suite() {
    Result res;
    std::vector<std::vector<int>> groups{{}};
    for (int p : {3, 5, 7, 11, 13, 17, 19, 23}) groups.push_back({p});
    for (auto g : std::vector<std::vector<int>>{{9}, {3, 3}, {27}, {9, 3}, {3, 3, 3}, {25}, {5, 5}}) groups.push_back(g);
    for (auto g : std::vector<std::vector<int>>{{2}, {4}, {2, 2}, {8}, {4, 2}, {2, 2, 2}, {16}, {8, 2}, {4, 4}, {4, 2, 2}, {2, 2, 2, 2}}) groups.push_back(g);
    long long checked = 0;
    for (const auto& group : groups) {
        const auto reps = eps_all(group);
        const size_t k = reps.size();
        std::vector<std::vector<std::vector<int>>> members;
        for (const auto& rep : reps) members.push_back(orbit_members(group, rep));
        auto run = [&](const std::vector<long long>& coeff) {
            std::map<std::vector<int>, long long> phi;
            for (size_t i = 0; i < k; ++i)
                if (coeff[i])
                    for (const auto& chi : members[i]) phi[chi] = coeff[i];
            auto want = orbit_multiplicities(group, phi);
            auto d = artin_decompose(group, phi);
            std::map<std::vector<int>, long long> scaled;
            for (const auto& [chi, c] : want) scaled[chi] = c * d.m;
            res.require(artin_assemble(group, d.coeffs) == scaled, "assembly differs on group " + vec_str(Vec(group.begin(), group.end())));
            ++checked;
        };
        if (k <= 12) {
            // every 0/1 combination of orbit sums
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
                std::vector<long long> c(k);
                for (size_t i = 0; i < k; ++i) c[i] = (mask >> i) & 1;
                run(c);
            }
        } else {
            for (size_t i = 0; i < k; ++i) {
                std::vector<long long> c(k, 0);
                c[i] = 1;
                run(c);
            }
        }
        Rng rng(808 + group.size());
        for (int t = 0; t < 100; ++t) {
            std::vector<long long> c(k);
            for (auto& x : c) x = static_cast<long long>(rng.below(9)) - 4;
            run(c);
        }
    }
    res.detail = S(checked) + " rational characters over " + S(groups.size()) + " abelian p-groups of order <= 27";
    return res;
}

// 9: codescent and Euler polynomials
Result codescent_suite() {
    Result res;
    int towers = 0;
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        GeneratorParams gp;
        gp.seed = seed;
        gp.recipe = "tower";
        gp.m = 1 + static_cast<int>(seed % 2);
        gp.group = seed % 3 ? std::vector<int>{9} : std::vector<int>{3, 3};
        auto rep = codescent_check(generate_tower(gp));
        res.require(rep.ok(), "tower seed " + S(seed) + ": projection of Fitt^0 or image ideal differs");
        ++towers;
    }
    int polys = 0;
    for (long long ell : {2, 5, 7, 11, 13, 101})
        for (long long a = -6; a <= 6; ++a) {
            auto e = euler_poly_elliptic(a, ell, 3);
            const RatPoly want{Rational(1), Rational(-a, ell), Rational(1, ell)};
            res.require(e.poly == want, "elliptic Euler polynomial at ell=" + S(ell));
            res.require(e.weil == (a * a <= 4 * ell), "Weil bound flag at ell=" + S(ell));
            // companion matrix of x^2 - a x + ell: det(1 - Fr^{-1} x)
            res.require(euler_poly_matrix({{Rational(0), Rational(-ell)}, {Rational(1), Rational(a)}}) == want, "matrix form disagrees at ell=" + S(ell));
            ++polys;
        }
    Rng rng(909);
    int products = 0;
    for (auto spec : {RingSpec{3, 2, 1, {3}, {}}, RingSpec{3, 2, 1, {9}, {}}, RingSpec{3, 1, 2, {3, 3}, {}}}) {
        auto R = Ring::build(spec);
        std::vector<std::pair<RatPoly, int>> A, B;
        for (long long ell : {5, 7, 11}) A.push_back({euler_poly_elliptic(rng.below(5) - 2, ell, 3).poly, rng.below(R->gorder())});
        for (long long ell : {13, 17}) B.push_back({euler_poly_elliptic(rng.below(5) - 2, ell, 3).poly, rng.below(R->gorder())});
        auto AB = A;
        AB.insert(AB.end(), B.begin(), B.end());
        res.require(euler_product(*R, AB) == R->mul(euler_product(*R, A), euler_product(*R, B)), R->describe() + ": product not multiplicative");
        ++products;
    }
    res.detail = S(towers) + " towers, " + S(polys) + " Euler polynomials, " + S(products) + " multiplicativity checks";
    return res;
}

// 10: Yakovlev decomposition
Result yakovlev_suite() {
    Result res;
    Rng rng(1010);
    int modules = 0, regular = 0;
    const std::vector<std::pair<int, int>> cyclic{{3, 3}, {3, 9}, {3, 27}, {5, 5}, {5, 25}, {7, 7}, {11, 11}, {13, 13}};
    for (int t = 0; t < 48; ++t) {
        const auto [p, n] = cyclic[t % cyclic.size()];
        const int m = 1 + rng.below(2);
        auto R = Ring::build(p, m, 1, {n});
        std::map<int, int> mult;
        for (int d = 1; d <= n; d *= p)
            if (int k = rng.below(3)) mult[d] = k;
        if (mult.empty()) mult[n] = 1;
        FPModule M = permutation_module(R, mult);
        const std::string where = R->describe() + " trial " + S(t);
        auto Y = yakovlev_decompose(M);
        res.require(Y.ok, where + ": " + Y.diagnostic);
        if (!Y.ok) continue;
        FPModule P = permutation_module(R, Y.mult);
        res.require(P.log_card() == M.log_card(), where + ": cardinality differs");
        for (int d = 1; d <= n; d *= p) res.require(fixed_point_log(P, d) == fixed_point_log(M, d), where + ": fixed points differ for order " + S(d));
        const bool reg = Y.mult.count(1) && Y.mult.at(1) > 0;
        res.require(reg == (mult.count(1) > 0), where + ": regular summand not recovered");
        res.require(Y.eps.empty() == reg, where + ": eps descriptor disagrees with the regular summand");
        regular += reg;
        ++modules;
    }
    res.require(modules >= 30, "fewer than 30 modules");
    res.detail = S(modules) + " permutation modules over cyclic groups of order <= 27 (" + S(regular) + " with a regular summand)";
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "starklab");
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    out = o.str();
    return code;
}

json payload_round_trip(const std::string& kind, const json& j) {
    if (kind == "ring") return ring_to_json(ring_from_json(j));
    if (kind == "module") return module_to_json(module_from_json(j));
    if (kind == "selmer") return selmer_to_json(selmer_from_json(j));
    if (kind == "stark") return stark_to_json(stark_from_json(j));
    if (kind == "etnc") return etnc_to_json(etnc_from_json(j));
    return tower_to_json(tower_from_json(j));
}

json strip(json j) {
    j.erase("input");
    j.erase("counterexample");
    return j;
}

// 11: infrastructure
Result infra_suite(double elapsed_before) {
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    const fs::path dir = STARKLAB_FIXTURE_DIR;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::set<std::string> kinds;
    for (const auto& p : files) {
        const std::string text = slurp(p);
        try {
            auto f = parse(text);
            kinds.insert(f.kind);
            res.require(serialize(f) == text, p.filename().string() + ": serialization not byte-identical");
            res.require(payload_round_trip(f.kind, f.payload) == f.payload, p.filename().string() + ": typed round trip differs");
        } catch (const std::exception& e) {
            res.require(false, p.filename().string() + ": " + e.what());
        }
    }
    res.require(files.size() >= 30 && kinds.size() == 6, "corpus smaller than 30 files or missing a kind");

    // regenerate every fixture from its manifest line, twice
    std::ifstream man(dir / "MANIFEST");
    int regenerated = 0;
    for (std::string line; std::getline(man, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string file;
        ls >> file;
        std::vector<std::string> args{"gen"};
        for (std::string a; ls >> a;) args.push_back(a);
        std::string a, b;
        res.require(cli(args, a) == kExitPass && cli(args, b) == kExitPass, file + ": gen failed");
        res.require(a == b, file + ": two runs differ");
        res.require(a == slurp(dir / file), file + ": regenerated bytes differ from the stored fixture");
        ++regenerated;
    }

    // batch output independent of --jobs and of repetition
    std::vector<std::string> etnc, selmer;
    for (const auto& p : files) {
        const auto name = p.filename().string();
        if (name.rfind("etnc-", 0) == 0) etnc.push_back(p.string());
        if (name.rfind("selmer-", 0) == 0) selmer.push_back(p.string());
    }
    int batches = 0;
    for (const auto& [cmd, inputs] : std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>{
             {{"bk-check"}, etnc}, {{"assoc-order"}, etnc}, {{"thm-free"}, selmer}, {{"core-vertex"}, selmer}}) {
        auto args = cmd;
        args.insert(args.end(), inputs.begin(), inputs.end());
        std::string one, two, four;
        auto a1 = args, a4 = args;
        a4.insert(a4.end(), {"--jobs", "4"});
        res.require(cli(a1, one) == kExitPass && cli(a1, two) == kExitPass && cli(a4, four) == kExitPass, cmd[0] + ": batch did not pass");
        res.require(one == two && one == four, cmd[0] + ": output depends on the run or on --jobs");
        ++batches;
    }

    // a counterexample dump is a valid instance that reproduces the violation
    const fs::path tmp = fs::temp_directory_path() / "starklab-acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    int dumps = 0;
    for (const auto& src : etnc) {
        auto f = load_file(src);
        auto inst = etnc_from_json(f.payload);
        auto R = Ring::build(inst.p, inst.working_precision(), inst.f, inst.group);
        inst.basic = R->smul(inst.p, inst.basic);  // basic no longer generates the Fitting ideal
        const fs::path bad = tmp / ("bad-" + fs::path(src).filename().string());
        save_file(bad.string(), make_file("etnc", etnc_to_json(inst), "perturbed basic element"));
        std::string first, second;
        const int c1 = cli({"bk-check", bad.string(), "--dump-dir", (tmp / "cx").string()}, first);
        if (c1 == kExitPrecision) continue;
        res.require(c1 == kExitViolation, bad.filename().string() + ": perturbed instance not flagged");
        if (c1 != kExitViolation) continue;
        const std::string dump = json::parse(first)["counterexample"].get<std::string>();
        res.require(fs::exists(dump), dump + ": dump missing");
        const int c2 = cli({"bk-check", dump, "--dump-dir", (tmp / "cx2").string()}, second);
        res.require(c2 == kExitViolation && strip(json::parse(first)) == strip(json::parse(second)), dump + ": rerun does not reproduce the report");
        ++dumps;
    }
    res.require(dumps >= 3, "fewer than 3 counterexample dumps exercised");

    // tampering with a payload without refreshing its canonical form is an input error
    {
        json j = json::parse(slurp(dir / "module-s1.json"));
        j["payload"]["gens"] = j["payload"]["gens"].get<int>() + 1;
        const fs::path bad = tmp / "tampered.json";
        std::ofstream(bad) << j.dump(1) << "\n";
        std::string out;
        res.require(cli({"fitting", bad.string()}, out) == kExitInput, "tampered file accepted");
    }
    fs::remove_all(tmp);

    const double total = elapsed_before + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.require(total < kSuiteLimit, "acceptance suite exceeds " + S(static_cast<long long>(kSuiteLimit)) + " s");
    res.detail = S(files.size()) + " fixtures over " + S(kinds.size()) + " kinds round-trip, " + S(regenerated) + " regenerated byte-identically, " +
                 S(batches) + " batches stable under --jobs, " + S(dumps) + " dumps re-run; suite total " + std::to_string(total).substr(0, 5) + " s";
    return res;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result(double)>>> criteria{
        {"Fitting ideals: convolution, annihilator, base change", [](double) { return fitting_suite(); }},
        {"exterior biduals and image ideals", [](double) { return bidual_suite(); }},
        {"cartesian iff core vertex within depth 2", [](double) { return free_suite(); }},
        {"level-one to level-two propagation", [](double) { return propagation_suite(); }},
        {"Stark systems: freeness, enumeration, I_j = Fitt^j", [](double) { return stark_suite(); }},
        {"basic element identity, tnc invariance, headroom", [](double) { return etnc_suite(); }},
        {"associated orders and the min_order verdict", [](double) { return assoc_suite(); }},
        {"Artin induction round trip", [](double) { return artin_suite(); }},
        {"codescent and Euler polynomials", [](double) { return codescent_suite(); }},
        {"Yakovlev decomposition", [](double) { return yakovlev_suite(); }},
        {"serialization, determinism, counterexample dumps", [](double before) { return infra_suite(before); }},
    };
    int failed = 0;
    double total = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = criteria[i].second(total);
        } catch (const std::exception& e) {
            r.ok = false;
            r.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        total += secs;
        const bool in_time = secs < kLimit[id];
        const bool ok = r.ok && in_time;
        failed += !ok;
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        line << "criterion " << id << " " << (ok ? "PASS" : "FAIL") << " [" << secs << " s / limit " << kLimit[id] << " s] " << criteria[i].first << ": " << r.detail;
        if (!in_time) line << "; time limit exceeded";
        for (const auto& f : r.failures) line << "; " << f;
        std::cout << line.str() << std::endl;
    }
    std::cout << (failed ? "acceptance FAIL: " + S(failed) + " criteria" : std::string("acceptance PASS: 11/11 criteria")) << std::endl;
    return failed ? 1 : 0;
}
