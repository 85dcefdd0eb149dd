#include <algorithm>
#include <stdexcept>

#include "starklab/generate.hpp"

namespace starklab {

Vec Rng::elem(const Ring& R) {
    Vec v(R.n());
    for (auto& c : v) c = below(R.z().q);
    return v;
}

Vec Rng::unit(const Ring& R) {
    while (true) {
        Vec v = elem(R);
        if (R.is_unit(v)) return v;
    }
}

Vec Rng::nonunit(const Ring& R) {
    while (true) {
        Vec v = elem(R);
        if (!R.is_unit(v)) return v;
    }
}

void check_generator_bounds(const GeneratorParams& gp) {
    if (gp.p != 3 && gp.p != 5) throw std::invalid_argument("generator supports p in {3, 5}");
    if (gp.m < 1 || gp.m > 2) throw std::invalid_argument("generator supports m <= 2");
    if (gp.f < 1 || gp.f > 2) throw std::invalid_argument("generator supports f <= 2");
    int g = 1;
    for (int d : gp.group) g *= d;
    if (g > 9) throw std::invalid_argument("generator supports |G| <= 9");
    const int max_aux = gp.recipe == "stark" ? 3 : 2;
    if (gp.depth < 0 || gp.depth > max_aux) throw std::invalid_argument("depth out of range for this recipe");
    if (gp.aux_primes < 0 || gp.aux_primes > max_aux) throw std::invalid_argument("too many aux primes for this recipe");
    if (gp.core_places < 1 || gp.core_places > 2) throw std::invalid_argument("generator supports 1 or 2 core places");
    if (gp.recipe == "non-cartesian" && g == 1) throw std::invalid_argument("non-cartesian recipe needs a non-trivial group");
    if (gp.recipe == "core-vertex-at-depth-k" && (gp.vertex_depth < 0 || gp.vertex_depth > gp.depth || gp.vertex_depth > gp.aux_primes))
        throw std::invalid_argument("core-vertex-at-depth-k needs 0 <= k <= min(depth, aux primes)");
    if (gp.recipe != "cartesian" && gp.recipe != "non-cartesian" && gp.recipe != "core-vertex-at-depth-k" && gp.recipe != "stark")
        throw std::invalid_argument("unknown Selmer recipe " + gp.recipe);
}

namespace {

std::vector<std::vector<Vec>> random_invertible(const Ring& R, int k, Rng& rng) {
    while (true) {
        std::vector<std::vector<Vec>> A(k, std::vector<Vec>(k));
        for (auto& row : A)
            for (auto& e : row) e = rng.elem(R);
        if (R.is_unit(det(R, A))) return A;
    }
}

Vec zeros(const Ring& R, int len) { return Vec(static_cast<size_t>(len) * R.n(), 0); }

void add_block(const Ring& R, Vec& v, int pos, const Vec& x) {
    const int n = R.n();
    for (int s = 0; s < n; ++s) v[static_cast<size_t>(pos) * n + s] = R.z().add(v[static_cast<size_t>(pos) * n + s], x[s]);
}

Vec scaled(const Ring& R, const Vec& r, const Vec& x) {
    const int n = R.n();
    Vec out(x.size());
    for (size_t i = 0; i * n < x.size(); ++i) {
        Vec b(x.begin() + static_cast<long>(i * n), x.begin() + static_cast<long>((i + 1) * n));
        Vec y = R.mul(r, b);
        std::copy(y.begin(), y.end(), out.begin() + static_cast<long>(i * n));
    }
    return out;
}

Vec vadd(const Ring& R, const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = R.z().add(a[i], b[i]);
    return c;
}

}  // namespace

SelmerInstance generate_selmer(const GeneratorParams& gp_in) {
    GeneratorParams gp = gp_in;
    if (gp.recipe == "stark") {
        if (gp.aux_primes == 2 && gp.depth == 2) gp.aux_primes = gp.depth = 3;
        gp.depth = gp.aux_primes;
    }
    check_generator_bounds(gp);
    Rng rng(gp.seed * 0x9E3779B97F4A7C15ULL + 0x5E1ECAFEULL);
    auto R = Ring::build(gp.p, gp.m, gp.f, gp.group);
    const Ring& r = *R;
    const int A = gp.aux_primes;
    const bool noncart = gp.recipe == "non-cartesian";

    int k = gp.vertex_depth;
    if (k < 0) k = rng.below(std::min(gp.depth, A) + 1);
    if (gp.recipe == "stark" && gp.vertex_depth < 0) k = std::min(A, 1 + rng.below(A));
    int chi = gp.chi >= 0 ? gp.chi : rng.below(3);

    SelmerInstance inst;
    inst.ring = r.spec();
    inst.depth = gp.depth;
    inst.recipe = gp.recipe;
    for (const char* h : {"H0", "H1", "H2", "H3", "H4"}) inst.flags[h] = true;

    // core places: rank, invertible basis change U, free part f_v (rows of U)
    const int C = gp.core_places;
    std::vector<int> rank(C), frank(C);
    std::vector<std::vector<std::vector<Vec>>> U(C);
    for (int v = 0; v < C; ++v) {
        rank[v] = 1 + rng.below(2);
        frank[v] = rng.below(rank[v] + 1);
    }
    const int v0 = 0;  // designated place for the non-cartesian recipe
    if (noncart) {
        rank[v0] = 1;
        frank[v0] = 0;
    }
    auto fsum = [&] {
        int s = 0;
        for (int v = 0; v < C; ++v) s += frank[v];
        return s;
    };
    while (chi + k > fsum() + A) {
        bool grown = false;
        for (int v = 0; v < C && !grown; ++v)
            if (!(noncart && v == v0) && frank[v] < rank[v]) {
                ++frank[v];
                grown = true;
            }
        if (!grown) --chi;
    }
    if (chi < 0) throw std::invalid_argument("cannot realize the requested vertex depth with these place counts");

    for (int v = 0; v < C; ++v) {
        Place P;
        P.label = "v" + std::to_string(v + 1);
        P.rank = rank[v];
        P.pairing = random_invertible(r, rank[v], rng);
        U[v] = random_invertible(r, rank[v], rng);
        std::vector<Vec> F;
        if (noncart && v == v0) {
            if (rng.below(2)) {
                for (int j = 0; j < r.factors(); ++j) F.push_back(r.sub(r.gen(j), r.one()));
                P.label += "-aug";
            } else {
                F.push_back(norm_element(r, [&] {
                    std::vector<std::vector<int>> g;
                    for (size_t i = 0; i < gp.group.size(); ++i) {
                        std::vector<int> e(gp.group.size(), 0);
                        e[i] = 1;
                        g.push_back(e);
                    }
                    return g;
                }()));
                P.label += "-norm";
            }
        } else {
            for (int i = 0; i < frank[v]; ++i) {
                Vec row;
                for (const auto& e : U[v][i]) row.insert(row.end(), e.begin(), e.end());
                F.push_back(row);
            }
        }
        P.conditions["can"] = F;
        if (gp.recipe == "cartesian" && gp.seed % 4 == 0) P.conditions["ur"] = F;
        P.h0_rank = v == 0 ? chi : 0;
        inst.places.push_back(std::move(P));
    }
    for (int a = 0; a < A; ++a) {
        Place P;
        P.label = "q" + std::to_string(a + 1);
        P.aux = true;
        P.rank = 2;
        P.pairing = {{r.zero(), r.one()}, {r.one(), r.zero()}};
        P.phi_fs = rng.unit(r);
        inst.places.push_back(std::move(P));
    }
    const int N = inst.ambient();
    std::vector<int> off;
    for (int v = 0; v < C + A; ++v) off.push_back(inst.offset(v));

    // generators of F inside V, and quotient coordinates
    std::vector<Vec> fgens, core_q, tr;
    for (int v = 0; v < C; ++v) {
        for (const auto& g : inst.places[v].conditions["can"]) {
            Vec e = zeros(r, N);
            for (int i = 0; i < rank[v]; ++i) add_block(r, e, off[v] + i, Vec(g.begin() + static_cast<long>(i) * r.n(), g.begin() + static_cast<long>(i + 1) * r.n()));
            fgens.push_back(e);
        }
        if (noncart && v == v0) {
            Vec e = zeros(r, N);
            add_block(r, e, off[v], r.one());
            core_q.push_back(e);
            continue;
        }
        for (int i = frank[v]; i < rank[v]; ++i) {
            Vec e = zeros(r, N);
            for (int j = 0; j < rank[v]; ++j) add_block(r, e, off[v] + j, U[v][i][j]);
            core_q.push_back(e);
        }
    }
    for (int a = 0; a < A; ++a) {
        Vec e = zeros(r, N);
        add_block(r, e, off[C + a], r.one());
        fgens.push_back(e);
        Vec t = zeros(r, N);
        add_block(r, t, off[C + a] + 1, r.one());
        tr.push_back(t);
    }
    auto random_f = [&] {
        Vec x = zeros(r, N);
        for (const auto& g : fgens) x = vadd(r, x, scaled(r, rng.elem(r), g));
        return x;
    };

    // the first k aux primes (after a seeded shuffle) form the smallest vertex
    std::vector<int> order(A);
    for (int a = 0; a < A; ++a) order[a] = a;
    for (int a = A - 1; a > 0; --a) std::swap(order[a], order[rng.below(a + 1)]);
    std::vector<int> n0(order.begin(), order.begin() + k), rest(order.begin() + k, order.end());

    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<Vec> L;
        for (const auto& c : core_q) {
            Vec x = c;
            for (const auto& t : tr) x = vadd(r, x, scaled(r, rng.elem(r), t));
            L.push_back(vadd(r, x, random_f()));
        }
        for (int a : rest) {
            Vec x = tr[a];
            for (int b : n0) x = vadd(r, x, scaled(r, rng.elem(r), tr[b]));
            L.push_back(vadd(r, x, random_f()));
        }
        for (int i = 0; i < chi + k; ++i) L.push_back(random_f());
        inst.global_rank = static_cast<int>(L.size());
        inst.loc = L;
        inst.dual_global.clear();
        // L must be a free direct summand: its reduction mod the maximal ideal keeps full rank
        Vec flat;
        {
            auto k1 = R->residue_field();
            std::vector<Vec> red;
            for (const auto& x : L) {
                Vec y(static_cast<size_t>(N) * r.f());
                for (int i = 0; i < N; ++i) {
                    Vec a = r.augmentation(Vec(x.begin() + static_cast<long>(i) * r.n(), x.begin() + static_cast<long>(i + 1) * r.n()));
                    for (int c = 0; c < r.f(); ++c) y[static_cast<size_t>(i) * r.f() + c] = a[c] % r.p();
                }
                red.push_back(y);
            }
            if (r_span(*k1, N, red).log_card() != static_cast<int>(L.size()) * r.f()) continue;
        }
        inst.dual_global = perp(inst, global_image(inst)).rows();
        return inst;
    }
    throw std::runtime_error("generator failed to find a free global module");
}

}  // namespace starklab
