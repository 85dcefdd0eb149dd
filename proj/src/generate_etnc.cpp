#include <algorithm>
#include <stdexcept>

#include "starklab/generate.hpp"

namespace starklab {

namespace {

void check_common(const GeneratorParams& gp) {
    if (gp.p != 3 && gp.p != 5) throw std::invalid_argument("generator supports p in {3, 5}");
    if (gp.m < 1 || gp.m > 2) throw std::invalid_argument("generator supports m <= 2");
    if (gp.f < 1 || gp.f > 2) throw std::invalid_argument("generator supports f <= 2");
}

std::vector<std::vector<Vec>> unit_matrix(const Ring& R, int k, Rng& rng) {
    while (true) {
        std::vector<std::vector<Vec>> A(k, std::vector<Vec>(k));
        for (auto& row : A)
            for (auto& e : row) e = rng.elem(R);
        if (R.is_unit(det(R, A))) return A;
    }
}

}  // namespace

EtncInstance generate_etnc(const GeneratorParams& gp) {
    check_common(gp);
    int g = 1;
    for (int d : gp.group) g *= d;
    if (g > 9) throw std::invalid_argument("generator supports |G| <= 9");
    Rng rng(gp.seed * 0xD1B54A32D192ED03ULL + 0xE7C0BA5EULL);

    EtncInstance inst;
    inst.p = gp.p;
    inst.m = gp.m;
    inst.f = gp.f;
    inst.group = gp.group;
    const int v = g == 1 ? 0 : vp(g, gp.p);
    inst.h = v + 3;
    auto R = Ring::build(gp.p, inst.working_precision(), gp.f, gp.group);
    const Ring& r = *R;

    auto reps = eps_all(gp.group);
    for (const auto& chi : reps)
        if (rng.below(2)) inst.eps.push_back(chi);
    if (inst.eps.empty()) inst.eps.push_back(reps[rng.below(static_cast<int>(reps.size()))]);

    // g - 1 is a non-zero-divisor on eps when no character in eps is trivial on g
    std::vector<int> good;
    for (int x = 1; x < r.order(); ++x) {
        bool ok = true;
        for (const auto& chi : inst.eps) {
            const i64 E = group_exponent(gp.group);
            if (char_pairing(gp.group, chi, r.exps(x), E) == 0) ok = false;
        }
        if (ok) good.push_back(x);
    }
    auto diag_entry = [&] {
        const int kind = rng.below(good.empty() ? 2 : 3);
        Vec u = rng.unit(r);
        if (kind == 0) return u;
        if (kind == 1) return r.smul(gp.p, u);
        const int x = good[rng.below(static_cast<int>(good.size()))];
        return r.mul(r.sub(r.group_elem(x), r.one()), u);
    };

    inst.r = 1 + rng.below(2);
    const int k = rng.below(3);
    inst.h2_gens = k;
    std::vector<Vec> d(k);
    for (auto& x : d) x = diag_entry();
    auto U = unit_matrix(r, k, rng);
    std::vector<std::vector<Vec>> DU(k, std::vector<Vec>(k));
    for (int i = 0; i < k; ++i) {
        Vec row;
        for (int j = 0; j < k; ++j) {
            DU[i][j] = r.mul(d[i], U[i][j]);
            row.insert(row.end(), DU[i][j].begin(), DU[i][j].end());
        }
        inst.h2_relations.push_back(row);
    }
    inst.basic = r.mul(k ? det(r, DU) : r.one(), rng.unit(r));
    Vec lam = diag_entry();
    inst.lambda = {lam, rng.below(2), inst.working_precision()};
    inst.lstar = {r.mul(r.mul(inst.basic, lam), rng.unit(r)), inst.lambda.e, inst.working_precision()};
    return inst;
}

TowerInstance generate_tower(const GeneratorParams& gp) {
    check_common(gp);
    if (gp.p != 3) throw std::invalid_argument("tower recipe uses p = 3");
    Rng rng(gp.seed * 0xA0761D6478BD642FULL + 0x70E4ULL);
    TowerInstance T;
    std::vector<int> group = gp.group;
    int g = 1;
    for (int d : group) g *= d;
    if (g != 9) group = rng.below(2) ? std::vector<int>{9} : std::vector<int>{3, 3};
    T.source = {gp.p, gp.m, gp.f, group, {}};
    T.target_group = {3};
    if (group.size() == 1) {
        T.images = {{1 + rng.below(2)}};
    } else {
        int a = 0, b = 0;
        while (a == 0 && b == 0) {
            a = rng.below(3);
            b = rng.below(3);
        }
        T.images = {{a}, {b}};
    }
    auto R = Ring::build(T.source);
    const Ring& r = *R;
    T.h2_gens = 1 + rng.below(2);
    const int nrel = T.h2_gens + rng.below(2);
    for (int i = 0; i < nrel; ++i) {
        Vec row;
        for (int j = 0; j < T.h2_gens; ++j) {
            Vec x = rng.elem(r);
            row.insert(row.end(), x.begin(), x.end());
        }
        T.h2_relations.push_back(row);
    }
    T.d = 1 + rng.below(2);
    T.r = 1 + rng.below(T.d);
    const int terms = static_cast<int>(subsets(T.d, T.r).size());
    for (int i = 0; i < terms; ++i) {
        Vec x = rng.elem(r);
        T.element.insert(T.element.end(), x.begin(), x.end());
    }
    return T;
}

}  // namespace starklab
