#include "starklab/module_algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace starklab {

namespace {

Vec block(const Vec& v, int i, int n) { return Vec(v.begin() + static_cast<long>(i) * n, v.begin() + static_cast<long>(i + 1) * n); }

void put_block(Vec& v, int i, int n, const Vec& x) { std::copy(x.begin(), x.end(), v.begin() + static_cast<long>(i) * n); }

// additive generators of m K for the maximal ideal m = (p, g_j - 1)
std::vector<Vec> max_ideal_times(const Ring& R, int b, const std::vector<Vec>& K) {
    const int n = R.n();
    std::vector<Vec> out;
    std::vector<Vec> ms;
    for (int j = 0; j < R.factors(); ++j) ms.push_back(R.sub(R.gen(j), R.one()));
    for (const auto& k : K) {
        Vec pk(k.size());
        for (size_t i = 0; i < k.size(); ++i) pk[i] = R.z().mul(R.p(), k[i]);
        out.push_back(std::move(pk));
        for (const auto& s : ms) {
            Vec w(k.size());
            for (int i = 0; i < b; ++i) put_block(w, i, n, R.mul(s, block(k, i, n)));
            out.push_back(std::move(w));
        }
    }
    return out;
}

}  // namespace

FPModule::FPModule(RingHandle R, int b, std::vector<Vec> relations) : R_(std::move(R)), b_(b) {
    if (b < 0) throw std::invalid_argument("negative generator count");
    const size_t len = static_cast<size_t>(b) * R_->n();
    for (auto& r : relations) {
        if (r.size() != len) throw std::invalid_argument("relation has wrong length for " + std::to_string(b) + " generators");
        for (auto& x : r) x = R_->z().red(x);
    }
    rel_ = std::move(relations);
    span_ = r_span(*R_, b_, rel_);
}

FPModule FPModule::from_span(RingHandle R, int b, const ZSpan& N) {
    auto gens = min_generators(*R, b, N, ZSpan(R->z(), b * R->n()));
    return FPModule(std::move(R), b, std::move(gens));
}

FPModule FPModule::from_matrix(RingHandle R, const std::vector<std::vector<Vec>>& A) {
    const int b = static_cast<int>(A.size());
    const int c = b ? static_cast<int>(A[0].size()) : 0;
    const int n = R->n();
    std::vector<Vec> rel(c, Vec(static_cast<size_t>(b) * n, 0));
    for (int i = 0; i < b; ++i) {
        if (static_cast<int>(A[i].size()) != c) throw std::invalid_argument("presentation matrix is ragged");
        for (int j = 0; j < c; ++j) {
            if (static_cast<int>(A[i][j].size()) != n) throw std::invalid_argument("matrix entry has wrong length");
            put_block(rel[j], i, n, A[i][j]);
        }
    }
    return FPModule(std::move(R), b, std::move(rel));
}

std::vector<std::vector<Vec>> FPModule::matrix() const {
    const int n = R_->n();
    std::vector<std::vector<Vec>> A(b_);
    for (int i = 0; i < b_; ++i)
        for (const auto& r : rel_) A[i].push_back(block(r, i, n));
    return A;
}

int FPModule::min_gens() const {
    if (!R_->local()) throw std::invalid_argument("minimal generator count needs a local ring");
    const int n = R_->n();
    std::vector<Vec> units;
    for (int i = 0; i < b_ * n; ++i) {
        Vec e(static_cast<size_t>(b_) * n, 0);
        e[i] = 1;
        units.push_back(std::move(e));
    }
    auto rows = max_ideal_times(*R_, b_, units);
    ZSpan S = ZSpan::from_rows(R_->z(), b_ * n, std::move(rows)).plus(span_);
    return (R_->m() * n * b_ - S.log_card()) / R_->f();
}

bool FPModule::is_free() const { return log_card() == min_gens() * R_->log_card(); }

FPModule FPModule::direct_sum(const FPModule& o) const {
    if (!same_ring(R_, o.R_)) throw std::invalid_argument("direct sum over different rings");
    const int n = R_->n(), b = b_ + o.b_;
    std::vector<Vec> rel;
    for (const auto& r : rel_) {
        Vec v(static_cast<size_t>(b) * n, 0);
        std::copy(r.begin(), r.end(), v.begin());
        rel.push_back(std::move(v));
    }
    for (const auto& r : o.rel_) {
        Vec v(static_cast<size_t>(b) * n, 0);
        std::copy(r.begin(), r.end(), v.begin() + static_cast<long>(b_) * n);
        rel.push_back(std::move(v));
    }
    return FPModule(R_, b, std::move(rel));
}

FPModule base_change(const FPModule& M, const RingMap& f) {
    const int n = M.ring()->n(), n2 = f.dst->n(), b = M.gens();
    std::vector<Vec> rel;
    for (const auto& r : M.relations()) {
        Vec v(static_cast<size_t>(b) * n2, 0);
        for (int i = 0; i < b; ++i) put_block(v, i, n2, f.apply(block(r, i, n)));
        rel.push_back(std::move(v));
    }
    return FPModule(f.dst, b, std::move(rel));
}

ModuleHom::ModuleHom(FPModule s, FPModule t, std::vector<Vec> im) : source(std::move(s)), target(std::move(t)), images(std::move(im)) {
    if (!same_ring(source.ring(), target.ring())) throw std::invalid_argument("hom between modules over different rings");
    if (static_cast<int>(images.size()) != source.gens()) throw std::invalid_argument("hom needs one image per generator");
    for (const auto& r : source.relations())
        if (!target.is_zero_elem(apply(r))) throw std::invalid_argument("hom does not carry relations into relations");
}

Mat ModuleHom::additive() const { return combo_matrix(*source.ring(), images, target.gens()); }

Vec ModuleHom::apply(const Vec& x) const { return vec_mul(source.ring()->z(), x, additive()); }

Mat scalar_matrix(const Ring& R, int b, const Vec& s) {
    const int n = R.n();
    Mat S(b * n, b * n);
    Mat m = R.mul_matrix(s);
    for (int i = 0; i < b; ++i)
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u) S.at(i * n + t, i * n + u) = m.at(t, u);
    return S;
}

Mat combo_matrix(const Ring& R, const std::vector<Vec>& v, int c) {
    const int n = R.n();
    Mat M(static_cast<int>(v.size()) * n, c * n);
    for (size_t i = 0; i < v.size(); ++i) {
        if (static_cast<int>(v[i].size()) != c * n) throw std::invalid_argument("combo_matrix: length mismatch");
        for (int j = 0; j < c; ++j) {
            Vec blk = block(v[i], j, n);
            if (R.is_zero(blk)) continue;
            for (int t = 0; t < n; ++t) {
                Vec pr = R.mul(R.basis(t), blk);
                for (int s = 0; s < n; ++s) M.at(static_cast<int>(i) * n + t, j * n + s) = pr[s];
            }
        }
    }
    return M;
}

std::vector<Vec> min_generators(const Ring& R, int b, const ZSpan& K, const ZSpan& L) {
    ZSpan cur = L;
    if (R.local()) cur = cur.plus(ZSpan::from_rows(R.z(), b * R.n(), max_ideal_times(R, b, K.rows())));
    std::vector<Vec> chosen;
    for (const auto& c : K.rows()) {
        if (cur.contains(c)) continue;
        chosen.push_back(c);
        cur = cur.plus(r_span(R, b, {c}));
    }
    return chosen;
}

Subquotient present_subquotient(const RingHandle& R, int a, const ZSpan& K, const ZSpan& L) {
    Subquotient S;
    S.ambient = a;
    S.gens = min_generators(*R, a, K, L);
    const int s = static_cast<int>(S.gens.size());
    ZSpan kr = preimage(R->z(), combo_matrix(*R, S.gens, a), L);
    S.module = FPModule(R, s, min_generators(*R, s, kr, ZSpan(R->z(), s * R->n())));
    return S;
}

Vec coordinates(const RingHandle& R, const std::vector<Vec>& gens, int a, const ZSpan& L, const Vec& x) {
    Mat A = combo_matrix(*R, gens, a);
    const int rows = A.rows;
    for (const auto& l : L.rows()) A.push_row(l);
    Vec y;
    if (!solve_left(R->z(), A, x, y)) throw std::invalid_argument("element is not in the span of the given generators");
    y.resize(rows);
    return y;
}

Vec det(const Ring& R, const std::vector<std::vector<Vec>>& A) {
    const int s = static_cast<int>(A.size());
    if (s == 0) return R.one();
    if (s > 20) throw std::invalid_argument("determinant too large");
    // D[mask] = determinant of the first popcount(mask) rows on columns in mask
    std::vector<Vec> D(size_t(1) << s);
    std::vector<char> have(size_t(1) << s, 0);
    D[0] = R.one();
    have[0] = 1;
    for (unsigned mask = 1; mask < (1u << s); ++mask) {
        const int k = __builtin_popcount(mask);
        Vec acc = R.zero();
        int pos = 0;
        bool any = false;
        for (int j = 0; j < s; ++j) {
            if (!(mask >> j & 1)) continue;
            const unsigned rest = mask & ~(1u << j);
            // sign from the number of columns in rest above j
            const int above = __builtin_popcount(rest >> (j + 1));
            ++pos;
            if (!have[rest] || R.is_zero(D[rest]) || R.is_zero(A[k - 1][j])) continue;
            Vec t = R.mul(A[k - 1][j], D[rest]);
            acc = (above % 2) ? R.sub(acc, t) : R.add(acc, t);
            any = true;
        }
        (void)pos;
        D[mask] = any ? acc : R.zero();
        have[mask] = 1;
    }
    return D[(1u << s) - 1];
}

std::vector<std::vector<int>> subsets(int n, int r) {
    std::vector<std::vector<int>> out;
    if (r < 0 || r > n) return out;
    std::vector<int> cur(r);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = r - 1;
        while (i >= 0 && cur[i] == n - r + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

Ideal fitting_ideal(const FPModule& M, int j) {
    const RingHandle& R = M.ring();
    if (j < 0) throw std::invalid_argument("Fitting index must be >= 0");
    const int b = M.gens();
    const int s = b - j;
    if (s <= 0) return Ideal::whole(R);
    auto A = M.matrix();
    const int c = static_cast<int>(M.relations().size());
    if (s > c) return Ideal::zero(R);
    std::vector<Vec> minors;
    for (const auto& rows : subsets(b, s))
        for (const auto& cols : subsets(c, s)) {
            std::vector<std::vector<Vec>> sub(s, std::vector<Vec>(s));
            for (int a = 0; a < s; ++a)
                for (int e = 0; e < s; ++e) sub[a][e] = A[rows[a]][cols[e]];
            Vec d = det(*R, sub);
            if (!R->is_zero(d)) minors.push_back(std::move(d));
        }
    return Ideal(R, minors);
}

Ideal annihilator(const FPModule& M) {
    const RingHandle& R = M.ring();
    const int n = R->n(), b = M.gens();
    ZSpan ann = ZSpan::whole(R->z(), n);
    for (int i = 0; i < b; ++i) {
        Mat A(n, b * n);
        for (int t = 0; t < n; ++t) A.at(t, i * n + t) = 1;
        ann = ann.meet(preimage(R->z(), A, M.rel_span()));
    }
    return Ideal::from_span(R, ann);
}

Subquotient linear_dual(const FPModule& M) {
    const RingHandle& R = M.ring();
    const int b = M.gens(), n = R->n();
    ZSpan K = M.relations().empty() ? ZSpan::whole(R->z(), b * n)
                                    : left_kernel(R->z(), additive_matrix(*R, M.matrix(), static_cast<int>(M.relations().size())));
    return present_subquotient(R, b, K, ZSpan(R->z(), b * n));
}

i64 pontryagin_pairing(const Ring& R, const Vec& x, const Vec& y) {
    const int n = R.n(), b = static_cast<int>(x.size()) / n;
    i64 s = 0;
    for (int i = 0; i < b; ++i) s = R.z().add(s, R.trace(R.mul(block(x, i, n), R.involution(block(y, i, n)))));
    return s;
}

Subquotient pontryagin_dual(const FPModule& M) {
    const RingHandle& R = M.ring();
    const int b = M.gens(), n = R->n();
    const auto& rows = M.rel_span().rows();
    ZSpan K;
    if (rows.empty()) {
        K = ZSpan::whole(R->z(), b * n);
    } else {
        Mat B(b * n, static_cast<int>(rows.size()));
        for (int i = 0; i < b; ++i)
            for (int s = 0; s < n; ++s) {
                Vec ie = R->involution(R->basis(s));
                for (size_t j = 0; j < rows.size(); ++j) B.at(i * n + s, static_cast<int>(j)) = R->trace(R->mul(block(rows[j], i, n), ie));
            }
        K = left_kernel(R->z(), B);
    }
    return present_subquotient(R, b, K, ZSpan(R->z(), b * n));
}

bool pontryagin_evaluation_bijective(const FPModule& M) {
    const RingHandle& R = M.ring();
    const int n = R->n(), b = M.gens();
    Subquotient D = pontryagin_dual(M);
    Subquotient DD = pontryagin_dual(D.module);
    const int s = D.module.gens();
    // x -> z with z_j = sum_i x_i iota(y_{j,i})
    Mat E(b * n, s * n);
    for (int i = 0; i < b; ++i)
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < s; ++j) {
                Vec zj = R->mul(R->basis(t), R->involution(block(D.gens[j], i, n)));
                for (int u = 0; u < n; ++u) E.at(i * n + t, j * n + u) = zj[u];
            }
    // the image lies in DD's ambient; compare with DD modulo nothing (DD is a submodule of R^s)
    ZSpan ddspan = ZSpan::from_rows(R->z(), s * n, {});
    for (const auto& g : DD.gens) ddspan = ddspan.plus(r_span(*R, s, {g}));
    ZSpan img = ZSpan::from_mat(R->z(), E);
    if (!ddspan.contains(img)) return false;
    ZSpan ker = preimage(R->z(), E, ZSpan(R->z(), s * n));
    return ker == M.rel_span() && img == ddspan;
}

FPModule exterior_power(const FPModule& M, int r) {
    const RingHandle& R = M.ring();
    const int b = M.gens(), n = R->n();
    if (r < 0) throw std::invalid_argument("exterior power degree must be >= 0");
    if (r == 0) return FPModule::free(R, 1);
    if (r > b) return FPModule::free(R, 0);
    auto S = subsets(b, r);
    std::map<std::vector<int>, int> idx;
    for (size_t i = 0; i < S.size(); ++i) idx[S[i]] = static_cast<int>(i);
    const int B = static_cast<int>(S.size());
    std::vector<Vec> rel;
    for (const auto& rho : M.relations())
        for (const auto& J : subsets(b, r - 1)) {
            Vec v(static_cast<size_t>(B) * n, 0);
            bool any = false;
            for (int i = 0; i < b; ++i) {
                if (std::find(J.begin(), J.end(), i) != J.end()) continue;
                Vec c = block(rho, i, n);
                if (R->is_zero(c)) continue;
                int below = 0;
                for (int j : J)
                    if (j < i) ++below;
                std::vector<int> I = J;
                I.insert(std::upper_bound(I.begin(), I.end(), i), i);
                const int k = idx[I];
                put_block(v, k, n, below % 2 ? R->sub(block(v, k, n), c) : R->add(block(v, k, n), c));
                any = true;
            }
            if (any) rel.push_back(std::move(v));
        }
    return FPModule(R, B, std::move(rel));
}

Bidual make_bidual(const FPModule& M, int r) {
    if (r < 0) throw std::invalid_argument("bidual rank must be >= 0");
    Bidual B;
    B.M = M;
    B.r = r;
    B.dual = linear_dual(M);
    B.wedge_dual = exterior_power(B.dual.module, r);
    const RingHandle& R = M.ring();
    const int w = B.wedge_dual.gens();
    B.values = B.wedge_dual.relations().empty()
                   ? ZSpan::whole(R->z(), w * R->n())
                   : left_kernel(R->z(), additive_matrix(*R, B.wedge_dual.matrix(), static_cast<int>(B.wedge_dual.relations().size())));
    return B;
}

Vec bidual_values(const Bidual& B, const Vec& x) {
    const RingHandle& R = B.M.ring();
    const int n = R->n(), b = B.M.gens(), s = B.dual.module.gens(), r = B.r;
    auto SI = subsets(s, r), SJ = subsets(b, r);
    if (x.size() != SJ.size() * static_cast<size_t>(n)) throw std::invalid_argument("element of the exterior power has wrong length");
    Vec out(SI.size() * static_cast<size_t>(n), 0);
    for (size_t I = 0; I < SI.size(); ++I) {
        Vec acc = R->zero();
        for (size_t J = 0; J < SJ.size(); ++J) {
            Vec xj = block(x, static_cast<int>(J), n);
            if (R->is_zero(xj)) continue;
            std::vector<std::vector<Vec>> sub(r, std::vector<Vec>(r));
            for (int a = 0; a < r; ++a)
                for (int e = 0; e < r; ++e) sub[a][e] = block(B.dual.gens[SI[I][a]], SJ[J][e], n);
            acc = R->add(acc, R->mul(xj, det(*R, sub)));
        }
        put_block(out, static_cast<int>(I), n, acc);
    }
    return out;
}

Ideal value_ideal(const Ring& R, const Vec& values) {
    const int n = R.n();
    std::vector<Vec> g;
    for (size_t i = 0; i * n < values.size(); ++i) g.push_back(block(values, static_cast<int>(i), n));
    RingHandle h = Ring::build(R.spec());
    return Ideal(h, g);
}

BidualImage bidual_and_image(const FPModule& M, int r, const Vec& x) {
    if (r < 1) throw std::invalid_argument("bidual_and_image needs r >= 1");
    Bidual B = make_bidual(M, r);
    BidualImage out;
    out.values = bidual_values(B, x);
    out.image = Ideal(M.ring(), {});
    const int n = M.ring()->n();
    std::vector<Vec> g;
    for (size_t i = 0; i * n < out.values.size(); ++i) g.push_back(block(out.values, static_cast<int>(i), n));
    out.image = Ideal(M.ring(), g);
    return out;
}

bool canonical_map_bijective(const Bidual& B) {
    const RingHandle& R = B.M.ring();
    const int n = R->n(), b = B.M.gens();
    const int cb = static_cast<int>(subsets(b, B.r).size());
    const int cs = static_cast<int>(subsets(B.dual.module.gens(), B.r).size());
    std::vector<Vec> images;
    for (int J = 0; J < cb; ++J) {
        Vec e(static_cast<size_t>(cb) * n, 0);
        e[static_cast<size_t>(J) * n] = 1;
        images.push_back(bidual_values(B, e));
    }
    Mat A = combo_matrix(*R, images, cs);
    ZSpan ker = preimage(R->z(), A, ZSpan(R->z(), cs * n));
    ZSpan img = ZSpan::from_mat(R->z(), A);
    return ker == exterior_power(B.M, B.r).rel_span() && img == B.values;
}

namespace {

struct CyclicData {
    Vec tau_minus_one, norm;
};

CyclicData cyclic_data(const Ring& R, int jorder) {
    if (R.spec().group.size() != 1 || !R.spec().aux.empty()) throw std::invalid_argument("Tate cohomology needs a cyclic group");
    const int G = R.spec().group[0];
    if (jorder < 1 || G % jorder) throw std::invalid_argument("subgroup order must divide |G|");
    const int tau = R.gpow(R.index({1}), G / jorder);
    CyclicData d;
    d.tau_minus_one = R.sub(R.group_elem(tau), R.one());
    d.norm = R.zero();
    for (int i = 0, g = 0; i < jorder; ++i, g = R.gmul(g, tau)) d.norm = R.add(d.norm, R.group_elem(g));
    return d;
}

}  // namespace

TateOrders tate_cohomology_cyclic(const FPModule& M, int jorder) {
    const Ring& R = *M.ring();
    const int b = M.gens();
    auto d = cyclic_data(R, jorder);
    Mat T = scalar_matrix(R, b, d.tau_minus_one), N = scalar_matrix(R, b, d.norm);
    const ZSpan& rel = M.rel_span();
    TateOrders o;
    o.log_h0 = preimage(R.z(), T, rel).log_card() - ZSpan::from_mat(R.z(), N).plus(rel).log_card();
    o.log_hm1 = preimage(R.z(), N, rel).log_card() - ZSpan::from_mat(R.z(), T).plus(rel).log_card();
    return o;
}

int fixed_point_log(const FPModule& M, int jorder) {
    const Ring& R = *M.ring();
    auto d = cyclic_data(R, jorder);
    return preimage(R.z(), scalar_matrix(R, M.gens(), d.tau_minus_one), M.rel_span()).log_card() - M.rel_span().log_card();
}

int coinvariant_log(const FPModule& M, int jorder) {
    const Ring& R = *M.ring();
    auto d = cyclic_data(R, jorder);
    return R.log_card() * M.gens() - ZSpan::from_mat(R.z(), scalar_matrix(R, M.gens(), d.tau_minus_one)).plus(M.rel_span()).log_card();
}

int mod_p_log(const Ring& R, int b, const ZSpan& S) {
    std::vector<Vec> rows;
    const int n = R.n();
    for (int i = 0; i < b * n; ++i) {
        Vec e(static_cast<size_t>(b) * n, 0);
        e[i] = R.p() % R.z().q;
        rows.push_back(std::move(e));
    }
    return R.m() * b * n - ZSpan::from_rows(R.z(), b * n, std::move(rows)).plus(S).log_card();
}

bool zp_free_quotient(const Ring& R, int b, const ZSpan& S) {
    return R.m() * b * R.n() - S.log_card() == R.m() * mod_p_log(R, b, S);
}

FPModule permutation_module(const RingHandle& R, const std::map<int, int>& mult) {
    if (R->spec().group.size() != 1) throw std::invalid_argument("permutation modules need a cyclic group");
    const int G = R->spec().group[0];
    const int n = R->n();
    int b = 0;
    for (auto [o, c] : mult) b += c;
    std::vector<Vec> rel;
    int pos = 0;
    for (auto [o, c] : mult) {
        if (G % o) throw std::invalid_argument("subgroup order must divide |G|");
        Vec t = R->sub(R->group_elem(R->gpow(R->index({1}), G / o)), R->one());
        for (int k = 0; k < c; ++k, ++pos) {
            if (o == 1) continue;
            Vec v(static_cast<size_t>(b) * n, 0);
            put_block(v, pos, n, t);
            rel.push_back(std::move(v));
        }
    }
    return FPModule(R, b, std::move(rel));
}

YakovlevResult yakovlev_decompose(const FPModule& M) {
    const RingHandle& R = M.ring();
    const Ring& Rr = *R;
    if (Rr.spec().group.size() > 1 || !Rr.spec().aux.empty()) throw std::invalid_argument("Yakovlev decomposition needs a cyclic p-group");
    YakovlevResult out;
    const int p = Rr.p(), m = Rr.m(), f = Rr.f();
    const int G = Rr.spec().group.empty() ? 1 : Rr.spec().group[0];
    int k = 0;
    for (int g = G; g > 1; g /= p) ++k;
    const int unit = m * f;
    auto sub_order = [&](int i) { return static_cast<int>(ipow(p, i)); };

    if (G == 1) {
        if (M.log_card() % unit || M.log_card() != m * mod_p_log(Rr, M.gens(), M.rel_span())) {
            out.diagnostic = "module is not free over Z/p^m";
            return out;
        }
        out.ok = true;
        out.fixed_logs = {M.log_card()};
        if (M.log_card()) out.mult[1] = M.log_card() / unit;
        return out;
    }
    // level-m shadow of the vanishing of H^-1: M and every M_J free over Z/p^m
    if (M.log_card() != m * mod_p_log(Rr, M.gens(), M.rel_span())) {
        out.diagnostic = "module is not free over Z/p^m";
        return out;
    }
    for (int i = 1; i <= k; ++i) {
        auto d = cyclic_data(Rr, sub_order(i));
        ZSpan S = ZSpan::from_mat(Rr.z(), scalar_matrix(Rr, M.gens(), d.tau_minus_one)).plus(M.rel_span());
        const int lc = Rr.log_card() * M.gens() - S.log_card();
        if (lc != m * mod_p_log(Rr, M.gens(), S)) {
            out.diagnostic = "hypothesis fails at subgroup of order " + std::to_string(sub_order(i)) + ": coinvariants not free over Z/p^m";
            return out;
        }
    }
    std::vector<i64> F(k + 1);
    for (int i = 0; i <= k; ++i) {
        int l = fixed_point_log(M, sub_order(i));
        out.fixed_logs.push_back(l);
        if (l % unit) {
            out.diagnostic = "not a permutation module at this precision";
            return out;
        }
        F[i] = l / unit;
    }
    std::vector<i64> S(k + 1), n(k + 1);
    for (int i = 0; i < k; ++i) {
        i64 den = ipow(p, k - i - 1) * (p - 1);
        i64 num = F[i] - F[i + 1];
        if (num % den) {
            out.diagnostic = "not a permutation module at this precision";
            return out;
        }
        S[i] = num / den;
    }
    S[k] = F[k];
    for (int i = 0; i <= k; ++i) {
        n[i] = S[i] - (i ? S[i - 1] : 0);
        if (n[i] < 0) {
            out.diagnostic = "not a permutation module at this precision";
            return out;
        }
        if (n[i]) out.mult[sub_order(i)] = static_cast<int>(n[i]);
    }
    FPModule P = permutation_module(R, out.mult);
    bool same = P.log_card() == M.log_card();
    for (int i = 0; i <= k && same; ++i)
        same = fixed_point_log(P, sub_order(i)) == out.fixed_logs[i] && coinvariant_log(P, sub_order(i)) == coinvariant_log(M, sub_order(i));
    if (!same) {
        out.mult.clear();
        out.diagnostic = "not a permutation module at this precision";
        return out;
    }
    int j0 = -1;
    for (int i = 0; i <= k; ++i)
        if (n[i]) {
            j0 = i;
            break;
        }
    if (j0 > 0)
        for (int d = k - j0 + 1; d <= k; ++d) out.eps.push_back({static_cast<int>(ipow(p, k - d))});
    out.ok = true;
    return out;
}

std::string normal_form_str(const ZSpan& s) {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < s.rows().size(); ++i) os << (i ? "," : "") << vec_str(s.rows()[i]);
    os << ']';
    return os.str();
}

}  // namespace starklab
