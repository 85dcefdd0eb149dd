#include "starklab/stark_systems.hpp"

#include <algorithm>
#include <stdexcept>

namespace starklab {

namespace {

Vec blk(const Vec& v, int i, int n) { return Vec(v.begin() + static_cast<long>(i) * n, v.begin() + static_cast<long>(i + 1) * n); }

void add_into(const Ring& R, Vec& v, int i, const Vec& x) {
    const int n = R.n();
    for (int s = 0; s < n; ++s) {
        auto& c = v[static_cast<size_t>(i) * n + s];
        c = R.z().add(c, x[s]);
    }
}

int index_of(const std::vector<std::vector<int>>& subs, const std::vector<int>& I) {
    auto it = std::lower_bound(subs.begin(), subs.end(), I);
    if (it == subs.end() || *it != I) throw std::logic_error("subset not found");
    return static_cast<int>(it - subs.begin());
}

Vec reduce_to(const Ring& R, Vec x) {
    for (auto& c : x) c = R.z().red(c);
    return x;
}

// localization of a global element given by coefficients on the H_glob generators
Vec localize(const Ring& R, const SelmerInstance& inst, const Vec& x) {
    const int n = R.n(), N = inst.ambient();
    Vec out(static_cast<size_t>(N) * n, 0);
    for (int i = 0; i < inst.global_rank; ++i) {
        Vec xi = blk(x, i, n);
        if (R.is_zero(xi)) continue;
        Vec li = reduce_to(R, inst.loc[i]);
        for (int j = 0; j < N; ++j) add_into(R, out, j, R.mul(xi, blk(li, j, n)));
    }
    return out;
}

struct Edge {
    int lo = 0, hi = 0;
    bool negate = false;
    std::vector<std::vector<Vec>> c;  // psi'_l restricted = sum_i c[l][i] psi_i
    std::vector<Vec> v;               // v_q = sum_l v[l] psi'_l
};

Edge make_edge(const SelmerInstance& inst, const RingHandle& h, const StarkVertex& lo, const StarkVertex& hi, int q) {
    const Ring& R = *h;
    Edge e;
    const int n = R.n(), ell = inst.global_rank;
    const auto& Sp = hi.selmer;
    const auto& S = lo.selmer;
    const auto& Dp = hi.bidual.dual;
    const auto& D = lo.bidual.dual;
    const int bp = Sp.module.gens(), b = S.module.gens();
    ZSpan none(R.z(), ell * n);
    std::vector<Vec> a;
    for (const auto& g : S.gens) a.push_back(coordinates(h, Sp.gens, ell, none, g));
    ZSpan dzero(R.z(), b * n);
    for (const auto& psi : Dp.gens) {
        Vec w(static_cast<size_t>(b) * n, 0);
        for (int i = 0; i < b; ++i) {
            Vec acc = R.zero();
            for (int t = 0; t < bp; ++t) acc = R.add(acc, R.mul(blk(a[i], t, n), blk(psi, t, n)));
            std::copy(acc.begin(), acc.end(), w.begin() + static_cast<long>(i) * n);
        }
        std::vector<Vec> row;
        if (!D.gens.empty()) {
            Vec cl = coordinates(h, D.gens, b, dzero, w);
            for (size_t i = 0; i < D.gens.size(); ++i) row.push_back(blk(cl, static_cast<int>(i), n));
        } else if (!is_zero(w)) {
            throw std::logic_error("restricted functional outside the dual");
        }
        e.c.push_back(std::move(row));
    }
    const int pos = inst.offset(q) + 1;  // transverse coordinate
    const Vec uinv = R.inverse(reduce_to(R, inst.places[q].phi_fs));
    Vec vq(static_cast<size_t>(bp) * n, 0);
    for (int t = 0; t < bp; ++t) {
        Vec tr = blk(localize(R, inst, Sp.gens[t]), pos, n);
        Vec val = R.mul(uinv, tr);
        std::copy(val.begin(), val.end(), vq.begin() + static_cast<long>(t) * n);
    }
    if (!Dp.gens.empty()) {
        Vec cv = coordinates(h, Dp.gens, bp, ZSpan(R.z(), bp * n), vq);
        for (size_t l = 0; l < Dp.gens.size(); ++l) e.v.push_back(blk(cv, static_cast<int>(l), n));
    } else if (!is_zero(vq)) {
        throw std::logic_error("transverse functional outside the dual");
    }
    int after = 0;
    for (int w = q + 1; w < 32; ++w)
        if (hi.n >> w & 1) ++after;
    e.negate = after % 2;
    return e;
}

// iota(beta) for beta in the lower bidual coordinates; result in upper (r + nu_lo)-subset coordinates
Vec iota_map(const Ring& R, const Edge& e, int s_lo, int s_hi, int k, const Vec& beta) {
    const int n = R.n();
    auto SI = subsets(s_lo, k), SK = subsets(s_hi, k);
    Vec out(SK.size() * static_cast<size_t>(n), 0);
    for (size_t K = 0; K < SK.size(); ++K) {
        Vec acc = R.zero();
        for (size_t I = 0; I < SI.size(); ++I) {
            Vec bI = blk(beta, static_cast<int>(I), n);
            if (R.is_zero(bI)) continue;
            std::vector<std::vector<Vec>> m(k, std::vector<Vec>(k));
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y) m[x][y] = e.c[SK[K][x]][SI[I][y]];
            acc = R.add(acc, R.mul(det(R, m), bI));
        }
        std::copy(acc.begin(), acc.end(), out.begin() + static_cast<long>(K) * n);
    }
    return out;
}

// (v contracted into beta')_K = sum_{l not in K} v_l (-1)^{#K above l} beta'_{K + l}
Vec contract(const Ring& R, const Edge& e, int s_hi, int k, const Vec& beta) {
    const int n = R.n();
    auto SK = subsets(s_hi, k), SL = subsets(s_hi, k + 1);
    Vec out(SK.size() * static_cast<size_t>(n), 0);
    for (size_t K = 0; K < SK.size(); ++K) {
        Vec acc = R.zero();
        for (int l = 0; l < s_hi; ++l) {
            if (std::binary_search(SK[K].begin(), SK[K].end(), l)) continue;
            if (R.is_zero(e.v[l])) continue;
            int above = 0;
            for (int x : SK[K])
                if (x > l) ++above;
            std::vector<int> L = SK[K];
            L.insert(std::upper_bound(L.begin(), L.end(), l), l);
            Vec t = R.mul(e.v[l], blk(beta, index_of(SL, L), n));
            acc = above % 2 ? R.sub(acc, t) : R.add(acc, t);
        }
        std::copy(acc.begin(), acc.end(), out.begin() + static_cast<long>(K) * n);
    }
    return out;
}

}  // namespace

Vec StarkSolution::component(const Vec& eps, int vertex) const {
    const int n = ring->n();
    const auto& V = vertices.at(vertex);
    return Vec(eps.begin() + static_cast<long>(V.offset) * n, eps.begin() + static_cast<long>(V.offset + V.width) * n);
}

bool StarkSolution::generates(const Vec& eps) const {
    return systems.contains(eps) && r_span(*ring, total, {eps}) == systems;
}

StarkSolution stark_solve(const SelmerInstance& inst, const std::string& tag, int r, int depth, int level) {
    if (r < 0) throw std::invalid_argument("rank must be >= 0");
    const int A = static_cast<int>(inst.aux_places().size());
    if (depth < 0 || depth > A) throw std::invalid_argument("depth exceeds the number of aux primes");
    StarkSolution S;
    S.tag = tag;
    S.r = r;
    S.depth = depth;
    S.level = level ? level : inst.ring.m;
    S.ring = inst.ring_at(S.level);
    const Ring& R = *S.ring;
    const int n = R.n();
    for (PlaceMask nm : square_free_masks(inst, depth)) {
        StarkVertex V;
        V.n = nm;
        V.label = mask_label(inst, nm);
        V.nu = nu(nm);
        V.selmer = selmer_module(inst, Side::primal, tag, nm, 0, S.level);
        V.bidual = make_bidual(V.selmer.module, r + V.nu);
        V.offset = S.total;
        V.width = static_cast<int>(subsets(V.bidual.dual.module.gens(), r + V.nu).size());
        S.total += V.width;
        S.vertices.push_back(std::move(V));
    }
    // unknowns: Z/p^m-combinations of the Howell rows of each bidual
    std::vector<std::pair<int, Vec>> basis;  // (vertex, row)
    for (size_t i = 0; i < S.vertices.size(); ++i)
        for (const auto& row : S.vertices[i].bidual.values.rows()) basis.push_back({static_cast<int>(i), row});
    std::vector<Edge> edges;
    std::vector<int> edge_off;
    int ecols = 0;
    for (size_t i = 0; i < S.vertices.size(); ++i)
        for (size_t j = 0; j < S.vertices.size(); ++j) {
            const auto& lo = S.vertices[i];
            const auto& hi = S.vertices[j];
            if (hi.nu != lo.nu + 1 || (hi.n & lo.n) != lo.n) continue;
            const int q = __builtin_ctz(hi.n & ~lo.n);
            Edge e = make_edge(inst, S.ring, lo, hi, q);
            e.lo = static_cast<int>(i);
            e.hi = static_cast<int>(j);
            edges.push_back(std::move(e));
            edge_off.push_back(ecols);
            ecols += static_cast<int>(subsets(hi.bidual.dual.module.gens(), r + lo.nu).size());
        }
    Mat E(static_cast<int>(basis.size()), ecols * n);
    Mat B(static_cast<int>(basis.size()), S.total * n);
    for (size_t y = 0; y < basis.size(); ++y) {
        const int vi = basis[y].first;
        const Vec& beta = basis[y].second;
        const auto& V = S.vertices[vi];
        for (size_t t = 0; t < beta.size(); ++t) B.at(static_cast<int>(y), V.offset * n + static_cast<int>(t)) = beta[t];
        for (size_t k = 0; k < edges.size(); ++k) {
            const Edge& e = edges[k];
            const auto& lo = S.vertices[e.lo];
            const auto& hi = S.vertices[e.hi];
            const int slo = lo.bidual.dual.module.gens(), shi = hi.bidual.dual.module.gens();
            Vec img;
            if (e.lo == vi) {
                img = iota_map(R, e, slo, shi, r + lo.nu, beta);
            } else if (e.hi == vi) {
                img = contract(R, e, shi, r + lo.nu, beta);
                if (!e.negate)
                    for (auto& c : img) c = R.z().neg(c);
            } else {
                continue;
            }
            for (size_t t = 0; t < img.size(); ++t) {
                auto& cell = E.at(static_cast<int>(y), edge_off[k] * n + static_cast<int>(t));
                cell = R.z().add(cell, img[t]);
            }
        }
    }
    ZSpan ker = ecols ? left_kernel(R.z(), E) : ZSpan::whole(R.z(), static_cast<int>(basis.size()));
    std::vector<Vec> rows;
    for (const auto& k : ker.rows()) rows.push_back(vec_mul(R.z(), k, B));
    S.systems = ZSpan::from_rows(R.z(), S.total * n, std::move(rows));
    S.structure = present_subquotient(S.ring, S.total, S.systems, ZSpan(R.z(), S.total * n));
    S.min_gens = S.structure.module.min_gens();
    S.free_rank_one = S.min_gens == 1 && S.structure.module.is_free();
    S.generators = S.structure.gens;
    return S;
}

Ideal ij_invariant(const StarkSolution& S, const Vec& eps, int j) {
    if (j > S.depth) throw std::invalid_argument("j exceeds the depth of the system");
    const int n = S.ring->n();
    std::vector<Vec> g;
    for (size_t i = 0; i < S.vertices.size(); ++i) {
        if (S.vertices[i].nu != j) continue;
        Vec c = S.component(eps, static_cast<int>(i));
        for (int t = 0; t < S.vertices[i].width; ++t) g.push_back(blk(c, t, n));
    }
    return Ideal(S.ring, g);
}

StarkFittingReport stark_fitting_report(const SelmerInstance& inst, const StarkSolution& S, const Vec& eps, int jmax) {
    StarkFittingReport rep;
    auto dual = selmer_module(inst, Side::dual, S.tag, 0, 0, S.level);
    FPModule pd = pontryagin_dual(dual.module).module;
    rep.generator = S.generates(eps);
    for (int j = 0; j <= jmax; ++j) {
        Ideal I = ij_invariant(S, eps, j);
        Ideal F = fitting_ideal(pd, j);
        rep.ij.push_back(I);
        rep.fitt.push_back(F);
        rep.contained.push_back(F.contains(I));
        rep.equal.push_back(I == F);
        rep.all_equal = rep.all_equal && I == F;
    }
    rep.biconditional = rep.all_equal == rep.generator;
    return rep;
}

}  // namespace starklab
