#include "starklab/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace starklab::oracle {

Code Codec::encode(const Vec& v) const {
    Code c = 0;
    for (int i = len - 1; i >= 0; --i) c = c * static_cast<Code>(q) + static_cast<Code>(v[i]);
    return c;
}

Vec Codec::decode(Code c) const {
    Vec v(len);
    for (int i = 0; i < len; ++i) {
        v[i] = static_cast<i64>(c % static_cast<Code>(q));
        c /= static_cast<Code>(q);
    }
    return v;
}

Code Codec::size() const {
    long double s = 1;
    Code r = 1;
    for (int i = 0; i < len; ++i) {
        s *= q;
        r *= static_cast<Code>(q);
    }
    if (s > 1e18L) throw std::invalid_argument("enumeration space too large");
    return r;
}

std::vector<Vec> all_vectors(i64 q, int len, Code cap) {
    Codec C{q, len};
    Code N = C.size();
    if (N > cap) throw std::invalid_argument("oracle bound exceeded: " + std::to_string(N) + " vectors");
    std::vector<Vec> out;
    out.reserve(N);
    for (Code c = 0; c < N; ++c) out.push_back(C.decode(c));
    return out;
}

CodeSet closure(const Codec& C, const Zmod& z, const std::vector<Vec>& seeds) {
    CodeSet S{0};
    std::vector<Vec> elems{Vec(C.len, 0)};
    for (const auto& s : seeds) {
        if (S.count(C.encode(s))) continue;
        // S <- S + <s>
        std::vector<Vec> add;
        const size_t base = elems.size();
        for (size_t i = 0; i < base; ++i) {
            Vec w = elems[i];
            while (true) {
                for (int k = 0; k < C.len; ++k) w[k] = z.add(w[k], s[k]);
                Code c = C.encode(w);
                if (S.count(c)) break;
                S.insert(c);
                add.push_back(w);
            }
        }
        elems.insert(elems.end(), add.begin(), add.end());
    }
    return S;
}

CodeSet ideal_set(const Ring& R, const std::vector<Vec>& gens) {
    auto elems = all_vectors(R.z().q, R.n());
    std::vector<Vec> seeds;
    for (const auto& g : gens)
        for (const auto& r : elems) seeds.push_back(R.mul(r, g));
    return closure(Codec{R.z().q, R.n()}, R.z(), seeds);
}

bool member(const Codec& C, const CodeSet& S, const Vec& v) { return S.count(C.encode(v)) > 0; }

Vec leibniz_det(const Ring& R, const std::vector<std::vector<Vec>>& A) {
    const int s = static_cast<int>(A.size());
    std::vector<int> perm(s);
    std::iota(perm.begin(), perm.end(), 0);
    Vec acc = R.zero();
    do {
        int inv = 0;
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (perm[i] > perm[j]) ++inv;
        Vec t = R.one();
        for (int i = 0; i < s; ++i) t = R.mul(t, A[i][perm[i]]);
        acc = inv % 2 ? R.sub(acc, t) : R.add(acc, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

namespace {

std::vector<std::vector<int>> combos(int n, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> pick;
    // plain recursion, independent of the library's subset enumerator
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(pick.size()) == r) {
            out.push_back(pick);
            return;
        }
        for (int i = start; i < n; ++i) {
            pick.push_back(i);
            self(self, i + 1);
            pick.pop_back();
        }
    };
    if (r >= 0 && r <= n) rec(rec, 0);
    return out;
}

Vec blk(const Vec& v, int i, int n) { return Vec(v.begin() + static_cast<long>(i) * n, v.begin() + static_cast<long>(i + 1) * n); }

}  // namespace

CodeSet fitting_set(const FPModule& M, int j) {
    const Ring& R = *M.ring();
    const int b = M.gens(), n = R.n();
    const int c = static_cast<int>(M.relations().size());
    const int s = b - j;
    if (s <= 0) return ideal_set(R, {R.one()});
    if (s > c) return CodeSet{0};
    std::vector<Vec> minors;
    for (const auto& rows : combos(b, s))
        for (const auto& cols : combos(c, s)) {
            std::vector<std::vector<Vec>> sub(s, std::vector<Vec>(s));
            for (int a = 0; a < s; ++a)
                for (int e = 0; e < s; ++e) sub[a][e] = blk(M.relations()[cols[e]], rows[a], n);
            minors.push_back(leibniz_det(R, sub));
        }
    return ideal_set(R, minors);
}

std::vector<Vec> functionals(const FPModule& M) {
    const Ring& R = *M.ring();
    const int b = M.gens(), n = R.n();
    std::vector<Vec> out;
    for (const auto& psi : all_vectors(R.z().q, b * n)) {
        bool ok = true;
        for (const auto& rho : M.relations()) {
            Vec s = R.zero();
            for (int i = 0; i < b; ++i) s = R.add(s, R.mul(blk(psi, i, n), blk(rho, i, n)));
            if (!R.is_zero(s)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(psi);
    }
    return out;
}

CodeSet bidual_image_set(const FPModule& M, int r, const Vec& x) {
    const Ring& R = *M.ring();
    const int b = M.gens(), n = R.n();
    auto F = functionals(M);
    auto J = combos(b, r);
    double work = 1;
    for (int i = 0; i < r; ++i) work *= static_cast<double>(F.size());
    if (work > 3e6) throw std::invalid_argument("oracle bound exceeded for bidual enumeration");
    std::vector<Vec> vals;
    std::vector<size_t> idx(r, 0);
    Codec C{R.z().q, n};
    CodeSet seen;
    while (true) {
        Vec acc = R.zero();
        for (size_t t = 0; t < J.size(); ++t) {
            Vec xj = blk(x, static_cast<int>(t), n);
            if (R.is_zero(xj)) continue;
            std::vector<std::vector<Vec>> sub(r, std::vector<Vec>(r));
            for (int a = 0; a < r; ++a)
                for (int e = 0; e < r; ++e) sub[a][e] = blk(F[idx[a]], J[t][e], n);
            acc = R.add(acc, R.mul(xj, leibniz_det(R, sub)));
        }
        if (seen.insert(C.encode(acc)).second) vals.push_back(acc);
        int k = r - 1;
        while (k >= 0 && ++idx[k] == F.size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return closure(C, R.z(), vals);
}

i64 module_order(const FPModule& M) {
    const Ring& R = *M.ring();
    const int len = M.gens() * R.n();
    // |R^b| / |relation span| with the span enumerated by closure
    std::vector<Vec> seeds;
    auto elems = all_vectors(R.z().q, R.n());
    for (const auto& rho : M.relations())
        for (const auto& r : elems) {
            Vec v(len);
            for (int i = 0; i < M.gens(); ++i) {
                Vec p = R.mul(r, blk(rho, i, R.n()));
                std::copy(p.begin(), p.end(), v.begin() + static_cast<long>(i) * R.n());
            }
            seeds.push_back(std::move(v));
        }
    CodeSet S = closure(Codec{R.z().q, len}, R.z(), seeds);
    return static_cast<i64>(Codec{R.z().q, len}.size() / S.size());
}

CodeSet ideal_codes(const Ideal& I) {
    const Ring& R = *I.ring();
    return closure(Codec{R.z().q, R.n()}, R.z(), I.generators());
}

namespace {

struct Blocks {
    const Ring& R;
    std::vector<Vec> elems;
    Codec unit() const { return Codec{R.z().q, R.n()}; }
};

Vec scale_blocks(const Ring& R, const Vec& r, const Vec& x) {
    const int n = R.n();
    Vec out(x.size());
    for (size_t i = 0; i * n < x.size(); ++i) {
        Vec y = R.mul(r, blk(x, static_cast<int>(i), n));
        std::copy(y.begin(), y.end(), out.begin() + static_cast<long>(i) * n);
    }
    return out;
}

CodeSet rspan_set(const Blocks& B, const std::vector<Vec>& gens, int len) {
    std::vector<Vec> seeds;
    for (const auto& g : gens)
        for (const auto& r : B.elems) seeds.push_back(scale_blocks(B.R, r, g));
    return closure(Codec{B.R.z().q, len * B.R.n()}, B.R.z(), seeds);
}

std::vector<Vec> greedy_gens(const Blocks& B, const std::vector<Vec>& xs, int len) {
    std::vector<Vec> gens;
    Codec C{B.R.z().q, len * B.R.n()};
    CodeSet span{0};
    for (const auto& x : xs)
        if (!span.count(C.encode(x))) {
            gens.push_back(x);
            span = rspan_set(B, gens, len);
        }
    return gens;
}

// sum_i a_i g_i with a in R^s and g_i in R^len
Vec combine(const Ring& R, const Vec& a, const std::vector<Vec>& g, int len) {
    Vec out(static_cast<size_t>(len) * R.n(), 0);
    for (size_t i = 0; i < g.size(); ++i) {
        Vec t = scale_blocks(R, blk(a, static_cast<int>(i), R.n()), g[i]);
        for (size_t k = 0; k < out.size(); ++k) out[k] = R.z().add(out[k], t[k]);
    }
    return out;
}

std::vector<Vec> relation_gens(const Blocks& B, const std::vector<Vec>& g, int len, Code cap) {
    std::vector<Vec> rel;
    for (auto& a : all_vectors(B.R.z().q, static_cast<int>(g.size()) * B.R.n(), cap))
        if (is_zero(combine(B.R, a, g, len))) rel.push_back(std::move(a));
    return greedy_gens(B, rel, static_cast<int>(g.size()));
}

Vec solve_combo(const Blocks& B, const std::vector<Vec>& g, int len, const Vec& target, Code cap) {
    for (auto& a : all_vectors(B.R.z().q, static_cast<int>(g.size()) * B.R.n(), cap))
        if (combine(B.R, a, g, len) == target) return a;
    throw std::logic_error("oracle: element outside the span (" + std::to_string(g.size()) + " gens, len " + std::to_string(len) + ")");
}

int perm_sign(std::vector<int> idx) {
    int s = 1;
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) s = -s;
        }
    return s;
}

struct Level {
    std::vector<Vec> sel_gens;   // in R^ell
    std::vector<Vec> dual_gens;  // value vectors in R^s
    std::vector<Vec> dual_rel;   // in R^t
    std::vector<std::vector<int>> subs;
    std::vector<Vec> forms;      // candidate biduals, values on subs
};

// value of the alternating form on an arbitrary index tuple
Vec alt_value(const Ring& R, const Level& L, const Vec& phi, const std::vector<int>& idx) {
    int sg = perm_sign(idx);
    if (!sg) return R.zero();
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    auto it = std::lower_bound(L.subs.begin(), L.subs.end(), sorted);
    Vec v = blk(phi, static_cast<int>(it - L.subs.begin()), R.n());
    return sg > 0 ? v : R.neg(v);
}

}  // namespace

StarkEnumeration stark_enumerate(const SelmerInstance& inst, const std::string& tag, int r, Code cap) {
    auto Rh = inst.ring_at(inst.level());
    const Ring& R = *Rh;
    const int n = R.n(), ell = inst.global_rank, N = inst.ambient();
    Blocks B{R, all_vectors(R.z().q, n)};
    const auto aux = inst.aux_places();

    // localization with explicit block products
    auto loc = [&](const Vec& x) {
        Vec out(static_cast<size_t>(N) * n, 0);
        for (int i = 0; i < ell; ++i) {
            Vec t = scale_blocks(R, blk(x, i, n), inst.loc[i]);
            for (size_t k = 0; k < out.size(); ++k) out[k] = R.z().add(out[k], t[k]);
        }
        return out;
    };
    std::vector<CodeSet> cond(inst.places.size());
    for (size_t v = 0; v < inst.places.size(); ++v)
        if (!inst.places[v].aux) cond[v] = rspan_set(B, inst.places[v].conditions.at(tag), inst.places[v].rank);

    auto H = all_vectors(R.z().q, ell * n, cap);
    auto level_at = [&](PlaceMask relax, int k) {
        Level L;
        std::vector<Vec> sel;
        for (const auto& x : H) {
            Vec y = loc(x);
            bool ok = true;
            for (size_t v = 0; v < inst.places.size() && ok; ++v) {
                if (relax >> v & 1) continue;
                const auto& P = inst.places[v];
                Vec seg(y.begin() + static_cast<long>(inst.offset(static_cast<int>(v))) * n,
                        y.begin() + static_cast<long>(inst.offset(static_cast<int>(v)) + P.rank) * n);
                if (P.aux)
                    ok = R.is_zero(blk(seg, 1, n));
                else
                    ok = cond[v].count(Codec{R.z().q, P.rank * n}.encode(seg)) > 0;
            }
            if (ok) sel.push_back(x);
        }
        L.sel_gens = greedy_gens(B, sel, ell);
        const int s = static_cast<int>(L.sel_gens.size());
        auto rel = relation_gens(B, L.sel_gens, ell, cap);
        std::vector<Vec> fun;
        for (auto& phi : all_vectors(R.z().q, s * n, cap)) {
            bool ok = true;
            for (const auto& a : rel) {
                Vec acc = R.zero();
                for (int i = 0; i < s; ++i) acc = R.add(acc, R.mul(blk(a, i, n), blk(phi, i, n)));
                if (!R.is_zero(acc)) {
                    ok = false;
                    break;
                }
            }
            if (ok) fun.push_back(std::move(phi));
        }
        L.dual_gens = greedy_gens(B, fun, s);
        const int t = static_cast<int>(L.dual_gens.size());
        L.dual_rel = relation_gens(B, L.dual_gens, s, cap);
        L.subs = subsets(t, k);
        for (auto& phi : all_vectors(R.z().q, static_cast<int>(L.subs.size()) * n, cap)) {
            bool ok = true;
            for (const auto& b : L.dual_rel) {
                for (const auto& S : subsets(t, k - 1)) {
                    Vec acc = R.zero();
                    for (int j = 0; j < t; ++j) {
                        std::vector<int> idx = S;
                        idx.push_back(j);
                        acc = R.add(acc, R.mul(blk(b, j, n), alt_value(R, L, phi, idx)));
                    }
                    if (!R.is_zero(acc)) ok = false;
                }
                if (!ok) break;
            }
            if (ok) L.forms.push_back(std::move(phi));
        }
        return L;
    };

    StarkEnumeration out;
    Level base = level_at(0, r);
    out.candidates = base.forms.size();
    const Codec VC = B.unit();
    std::vector<std::vector<std::vector<Code>>> iota(aux.size());  // per q: image of each base form
    std::vector<std::map<std::vector<Code>, std::vector<int>>> fibres(aux.size());
    std::vector<Level> tops;
    for (size_t a = 0; a < aux.size(); ++a) {
        const int q = aux[a];
        Level T = level_at(PlaceMask(1) << q, r + 1);
        out.candidates += T.forms.size();
        const int s = static_cast<int>(base.sel_gens.size()), sp = static_cast<int>(T.sel_gens.size());
        const int t = static_cast<int>(base.dual_gens.size()), tp = static_cast<int>(T.dual_gens.size());
        // restriction of the dual generators at nq to the base Selmer module
        std::vector<Vec> inc;
        for (const auto& g : base.sel_gens) inc.push_back(solve_combo(B, T.sel_gens, ell, g, cap));
        std::vector<Vec> c;
        for (const auto& psi : T.dual_gens) {
            Vec w(static_cast<size_t>(s) * n, 0);
            for (int i = 0; i < s; ++i) {
                Vec acc = R.zero();
                for (int u = 0; u < sp; ++u) acc = R.add(acc, R.mul(blk(inc[i], u, n), blk(psi, u, n)));
                std::copy(acc.begin(), acc.end(), w.begin() + static_cast<long>(i) * n);
            }
            c.push_back(solve_combo(B, base.dual_gens, s, w, cap));
        }
        Vec uinv;
        for (const auto& x : B.elems)
            if (R.mul(x, inst.places[q].phi_fs) == R.one()) uinv = x;
        Vec vq(static_cast<size_t>(sp) * n, 0);
        for (int u = 0; u < sp; ++u) {
            Vec y = R.mul(uinv, blk(loc(T.sel_gens[u]), inst.offset(q) + 1, n));
            std::copy(y.begin(), y.end(), vq.begin() + static_cast<long>(u) * n);
        }
        Vec v = solve_combo(B, T.dual_gens, sp, vq, cap);
        const auto K = subsets(tp, r);
        // iota(phi)(psi'_K) = phi(res psi'_K1, ..., res psi'_Kr), expanded multilinearly
        for (const auto& phi : base.forms) {
            std::vector<Code> img;
            for (const auto& k : K) {
                Vec acc = R.zero();
                std::vector<int> idx(r, 0);
                while (true) {
                    Vec coef = R.one();
                    for (int x = 0; x < r; ++x) coef = R.mul(coef, blk(c[k[x]], idx[x], n));
                    if (!R.is_zero(coef)) acc = R.add(acc, R.mul(coef, alt_value(R, base, phi, idx)));
                    int x = r - 1;
                    while (x >= 0 && ++idx[x] == t) idx[x--] = 0;
                    if (x < 0) break;
                }
                img.push_back(VC.encode(acc));
            }
            iota[a].push_back(std::move(img));
        }
        // contraction of v into the last slot
        for (size_t f = 0; f < T.forms.size(); ++f) {
            std::vector<Code> img;
            for (const auto& k : K) {
                Vec acc = R.zero();
                for (int l = 0; l < tp; ++l) {
                    std::vector<int> idx = k;
                    idx.push_back(l);
                    acc = R.add(acc, R.mul(blk(v, l, n), alt_value(R, T, T.forms[f], idx)));
                }
                img.push_back(VC.encode(acc));
            }
            fibres[a][img].push_back(static_cast<int>(f));
        }
        tops.push_back(std::move(T));
    }

    long double total = 0;
    CodeSet v0, v1;
    std::vector<std::set<std::vector<Code>>> hit(aux.size());
    for (size_t b = 0; b < base.forms.size(); ++b) {
        long double prod = 1;
        for (size_t a = 0; a < aux.size() && prod > 0; ++a) {
            auto it = fibres[a].find(iota[a][b]);
            prod *= it == fibres[a].end() ? 0 : static_cast<long double>(it->second.size());
        }
        if (prod == 0) continue;
        total += prod;
        for (int x = 0; x < static_cast<int>(base.subs.size()); ++x) v0.insert(VC.encode(blk(base.forms[b], x, n)));
        for (size_t a = 0; a < aux.size(); ++a) hit[a].insert(iota[a][b]);
    }
    for (size_t a = 0; a < aux.size(); ++a)
        for (const auto& key : hit[a])
            for (int f : fibres[a][key])
                for (int x = 0; x < static_cast<int>(tops[a].subs.size()); ++x)
                    v1.insert(VC.encode(blk(tops[a].forms[f], x, n)));
    int lg = 0;
    while (total >= R.p() - 0.5L) {
        total /= R.p();
        ++lg;
    }
    if (total < 0.999L || total > 1.001L) throw std::logic_error("oracle: |SS| is not a power of p");
    out.log_card = lg;
    auto to_ideal = [&](const CodeSet& vals) {
        std::vector<Vec> g;
        for (Code c : vals) g.push_back(VC.decode(c));
        return ideal_set(R, g);
    };
    out.value_ideals = {to_ideal(v0), to_ideal(v1)};
    return out;
}

namespace {

// additive closure as a bitmap over all codes, for the small lattice oracles
struct Bits {
    std::vector<char> in;
    std::vector<Vec> elems;
};

Bits closure_bits(const Codec& C, const Zmod& z, const std::vector<Vec>& seeds) {
    Bits B;
    B.in.assign(C.size(), 0);
    B.in[0] = 1;
    B.elems.push_back(Vec(C.len, 0));
    for (const auto& s : seeds) {
        if (B.in[C.encode(s)]) continue;
        const size_t base = B.elems.size();
        for (size_t i = 0; i < base; ++i) {
            Vec w = B.elems[i];
            while (true) {
                for (int k = 0; k < C.len; ++k) w[k] = z.add(w[k], s[k]);
                const Code c = C.encode(w);
                if (B.in[c]) break;
                B.in[c] = 1;
                B.elems.push_back(w);
            }
        }
    }
    return B;
}

std::vector<Vec> lattice_seeds(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int prec) {
    std::vector<Vec> seeds = kernel;
    const i64 pk = prec >= R.m() ? 0 : ipow(R.p(), prec);
    for (int t = 0; t < R.n(); ++t) {
        Vec b = R.basis(t);
        for (const auto& g : gens) seeds.push_back(R.mul(b, g));
        seeds.push_back(R.smul(pk, b));
    }
    return seeds;
}

}  // namespace

CodeSet lattice_set(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int prec) {
    const Codec C{R.z().q, R.n()};
    CodeSet out;
    for (const auto& v : closure_bits(C, R.z(), lattice_seeds(R, gens, kernel, prec)).elems) out.insert(C.encode(v));
    return out;
}

CodeSet stabilizer_set(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int t, int prec, Code cap) {
    const i64 pt = t >= R.m() ? 0 : ipow(R.p(), t);
    std::vector<Vec> shifted;
    for (const auto& g : gens) shifted.push_back(R.smul(pt, g));
    const Codec C{R.z().q, R.n()};
    const Bits T = closure_bits(C, R.z(), lattice_seeds(R, shifted, kernel, prec));
    CodeSet out;
    for (const auto& y : all_vectors(R.z().q, R.n(), cap)) {
        bool ok = true;
        for (const auto& g : gens)
            if (!T.in[C.encode(R.mul(y, g))]) {
                ok = false;
                break;
            }
        if (ok) out.insert(C.encode(y));
    }
    return out;
}

bool principal_by_search(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int prec) {
    const Codec C{R.z().q, R.n()};
    const Bits I = closure_bits(C, R.z(), lattice_seeds(R, gens, kernel, prec));
    const Bits Z = closure_bits(C, R.z(), lattice_seeds(R, {}, kernel, prec));
    std::vector<char> done(I.in.size(), 0);
    for (const auto& y : I.elems) {
        if (done[C.encode(y)]) continue;
        if (closure_bits(C, R.z(), lattice_seeds(R, {y}, kernel, prec)).elems.size() == I.elems.size()) return true;
        for (const auto& z : Z.elems) done[C.encode(R.add(y, z))] = 1;
    }
    return false;
}

}  // namespace starklab::oracle
