#include "starklab/selmer_formalism.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace starklab {

int SelmerInstance::ambient() const {
    int N = 0;
    for (const auto& p : places) N += p.rank;
    return N;
}

int SelmerInstance::offset(int v) const {
    int o = 0;
    for (int i = 0; i < v; ++i) o += places[i].rank;
    return o;
}

std::vector<int> SelmerInstance::aux_places() const {
    std::vector<int> out;
    for (size_t i = 0; i < places.size(); ++i)
        if (places[i].aux) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::string> SelmerInstance::tags() const {
    std::vector<std::string> out;
    for (const auto& p : places)
        if (!p.aux) {
            for (const auto& [t, g] : p.conditions) out.push_back(t);
            break;
        }
    if (out.empty()) out.push_back("can");
    return out;
}

RingHandle SelmerInstance::ring_at(int level) const {
    if (level == 0) level = ring.m;
    if (level < 1 || level > ring.m) throw std::invalid_argument("level out of range");
    return Ring::build(ring.p, level, ring.f, ring.group, ring.aux);
}

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

PlaceMask mask_of(const SelmerInstance& inst, const std::vector<int>& aux_indices) {
    auto aux = inst.aux_places();
    PlaceMask m = 0;
    for (int a : aux_indices) {
        if (a < 0 || a >= static_cast<int>(aux.size())) throw std::invalid_argument("aux prime index out of range");
        m |= PlaceMask(1) << aux[a];
    }
    return m;
}

std::string mask_label(const SelmerInstance& inst, PlaceMask n) {
    std::string s;
    for (size_t i = 0; i < inst.places.size(); ++i)
        if (n >> i & 1) s += (s.empty() ? "" : "*") + inst.places[i].label;
    return s.empty() ? "1" : s;
}

int nu(PlaceMask n) { return __builtin_popcount(n); }

std::vector<PlaceMask> square_free_masks(const SelmerInstance& inst, int d) {
    auto aux = inst.aux_places();
    const int A = static_cast<int>(aux.size());
    std::vector<std::pair<std::vector<int>, PlaceMask>> all;
    for (unsigned s = 0; s < (1u << A); ++s) {
        if (__builtin_popcount(s) > d) continue;
        std::vector<int> key{__builtin_popcount(s)};
        PlaceMask m = 0;
        for (int a = 0; a < A; ++a)
            if (s >> a & 1) {
                key.push_back(a);
                m |= PlaceMask(1) << aux[a];
            }
        all.push_back({key, m});
    }
    std::sort(all.begin(), all.end());
    std::vector<PlaceMask> out;
    for (auto& [k, m] : all) out.push_back(m);
    return out;
}

namespace {

Vec blk(const Vec& v, int i, int n) { return Vec(v.begin() + static_cast<long>(i) * n, v.begin() + static_cast<long>(i + 1) * n); }
void put(Vec& v, int i, int n, const Vec& x) { std::copy(x.begin(), x.end(), v.begin() + static_cast<long>(i) * n); }

// Everything needed to compute Selmer modules over one coefficient ring: a level
// R_m' = GR(p^m', f)[G], or the residue field for the residual representation.
struct Frame {
    RingHandle R;
    int N = 0;
    std::vector<int> off, rank;
    std::vector<bool> aux;
    std::vector<std::vector<std::vector<Vec>>> M;                 // local pairings
    std::map<std::string, std::vector<std::vector<Vec>>> cond;    // tag -> per place generators in R^rank
    std::vector<Vec> loc;
    ZSpan dual_global;
    int ell = 0;
};

Vec reduce_to(const Ring& S, const Vec& x) {
    Vec y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = S.z().red(x[i]);
    return y;
}

// aug then mod p, blockwise
Vec residual_vec(const Ring& R, const Vec& x, int blocks) {
    const int n = R.n(), f = R.f();
    Vec y(static_cast<size_t>(blocks) * f);
    for (int i = 0; i < blocks; ++i) {
        Vec a = R.augmentation(blk(x, i, n));
        for (int c = 0; c < f; ++c) y[static_cast<size_t>(i) * f + c] = a[c] % R.p();
    }
    return y;
}

std::vector<std::vector<Vec>> full_pairing(const Frame& F) {
    const Ring& R = *F.R;
    std::vector<std::vector<Vec>> M(F.N, std::vector<Vec>(F.N, R.zero()));
    for (size_t v = 0; v < F.M.size(); ++v)
        for (int i = 0; i < F.rank[v]; ++i)
            for (int j = 0; j < F.rank[v]; ++j) M[F.off[v] + i][F.off[v] + j] = F.M[v][i][j];
    return M;
}

ZSpan perp_generic(const Ring& R, const std::vector<std::vector<Vec>>& M, const ZSpan& X) {
    const int N = static_cast<int>(M.size()), n = R.n();
    const auto& rows = X.rows();
    if (rows.empty()) return ZSpan::whole(R.z(), N * n);
    std::vector<Vec> ib(n);
    for (int s = 0; s < n; ++s) ib[s] = R.involution(R.basis(s));
    Mat P(N * n, static_cast<int>(rows.size()));
    for (size_t c = 0; c < rows.size(); ++c)
        for (int j = 0; j < N; ++j) {
            Vec w = R.zero();
            for (int i = 0; i < N; ++i) {
                Vec xi = blk(rows[c], i, n);
                if (R.is_zero(xi) || R.is_zero(M[i][j])) continue;
                w = R.add(w, R.mul(xi, M[i][j]));
            }
            if (R.is_zero(w)) continue;
            for (int s = 0; s < n; ++s) P.at(j * n + s, static_cast<int>(c)) = R.trace(R.mul(w, ib[s]));
        }
    return left_kernel(R.z(), P);
}

Vec unit_vec(const Ring& R, int N, int i) {
    Vec e(static_cast<size_t>(N) * R.n(), 0);
    put(e, i, R.n(), R.one());
    return e;
}

void check_lengths(const SelmerInstance& inst) {
    auto R = Ring::build(inst.ring);
    const int n = R->n(), N = inst.ambient();
    bool seen_aux = false;
    for (const auto& P : inst.places) {
        if (P.rank < 0) throw std::invalid_argument("place " + P.label + ": negative rank");
        if (P.aux) {
            seen_aux = true;
            if (P.rank != 2) throw std::invalid_argument("aux place " + P.label + " must have rank 2");
            if (static_cast<int>(P.phi_fs.size()) != n) throw std::invalid_argument("aux place " + P.label + ": phi_fs has wrong length");
        } else if (seen_aux) {
            throw std::invalid_argument("core places must precede aux places");
        }
        if (static_cast<int>(P.pairing.size()) != P.rank) throw std::invalid_argument("place " + P.label + ": pairing has wrong size");
        for (const auto& row : P.pairing) {
            if (static_cast<int>(row.size()) != P.rank) throw std::invalid_argument("place " + P.label + ": pairing is not square");
            for (const auto& e : row)
                if (static_cast<int>(e.size()) != n) throw std::invalid_argument("place " + P.label + ": pairing entry has wrong length");
        }
        for (const auto& [t, gens] : P.conditions)
            for (const auto& g : gens)
                if (static_cast<int>(g.size()) != P.rank * n) throw std::invalid_argument("place " + P.label + ": condition generator has wrong length");
        for (const auto& [t, gens] : P.residual_conditions)
            for (const auto& g : gens)
                if (static_cast<int>(g.size()) != P.rank * R->f())
                    throw std::invalid_argument("place " + P.label + ": residual condition has wrong length");
    }
    if (inst.places.size() > 30) throw std::invalid_argument("too many places");
    if (static_cast<int>(inst.loc.size()) != inst.global_rank) throw std::invalid_argument("need one localization row per global generator");
    for (const auto& r : inst.loc)
        if (static_cast<int>(r.size()) != N * n) throw std::invalid_argument("localization row has wrong length");
    for (const auto& r : inst.dual_global)
        if (static_cast<int>(r.size()) != N * n) throw std::invalid_argument("dual global generator has wrong length");
    auto tags = inst.tags();
    for (const auto& P : inst.places)
        if (!P.aux)
            for (const auto& t : tags)
                if (!P.conditions.count(t)) throw std::invalid_argument("place " + P.label + " lacks condition for structure " + t);
}

Frame level_frame(const SelmerInstance& inst, int level) {
    Frame F;
    F.R = inst.ring_at(level);
    const Ring& R = *F.R;
    F.N = inst.ambient();
    F.ell = inst.global_rank;
    const auto tags = inst.tags();
    for (size_t v = 0; v < inst.places.size(); ++v) {
        const auto& P = inst.places[v];
        F.off.push_back(inst.offset(static_cast<int>(v)));
        F.rank.push_back(P.rank);
        F.aux.push_back(P.aux);
        std::vector<std::vector<Vec>> M(P.rank, std::vector<Vec>(P.rank));
        for (int i = 0; i < P.rank; ++i)
            for (int j = 0; j < P.rank; ++j) M[i][j] = reduce_to(R, P.pairing[i][j]);
        F.M.push_back(std::move(M));
        for (const auto& t : tags) {
            std::vector<Vec> g;
            if (P.aux) {
                g.push_back(unit_vec(R, 2, 0));
            } else {
                for (const auto& x : P.conditions.at(t)) g.push_back(reduce_to(R, x));
            }
            F.cond[t].push_back(std::move(g));
        }
    }
    for (const auto& r : inst.loc) F.loc.push_back(reduce_to(R, r));
    std::vector<Vec> dg;
    for (const auto& r : inst.dual_global) dg.push_back(reduce_to(R, r));
    F.dual_global = r_span(R, F.N, dg);
    return F;
}

Frame residual_frame(const SelmerInstance& inst) {
    auto top = Ring::build(inst.ring);
    Frame F;
    F.R = top->residue_field();
    const Ring& k = *F.R;
    F.N = inst.ambient();
    F.ell = inst.global_rank;
    const auto tags = inst.tags();
    for (size_t v = 0; v < inst.places.size(); ++v) {
        const auto& P = inst.places[v];
        F.off.push_back(inst.offset(static_cast<int>(v)));
        F.rank.push_back(P.rank);
        F.aux.push_back(P.aux);
        std::vector<std::vector<Vec>> M(P.rank, std::vector<Vec>(P.rank));
        for (int i = 0; i < P.rank; ++i)
            for (int j = 0; j < P.rank; ++j) M[i][j] = residual_vec(*top, P.pairing[i][j], 1);
        F.M.push_back(std::move(M));
        for (const auto& t : tags) {
            std::vector<Vec> g;
            if (P.aux) {
                g.push_back(unit_vec(k, 2, 0));
            } else if (P.residual_conditions.count(t)) {
                for (const auto& x : P.residual_conditions.at(t)) g.push_back(reduce_to(k, x));
            } else {
                for (const auto& x : P.conditions.at(t)) g.push_back(residual_vec(*top, x, P.rank));
            }
            F.cond[t].push_back(std::move(g));
        }
    }
    for (const auto& r : inst.loc) F.loc.push_back(residual_vec(*top, r, F.N));
    F.dual_global = perp_generic(k, full_pairing(F), r_span(k, F.N, F.loc));
    return F;
}

ZSpan image_span(const Frame& F) { return r_span(*F.R, F.N, F.loc); }

// local condition generators at place v inside R^rank_v, primal or dual (orthogonal complement)
std::vector<Vec> local_gens(const Frame& F, int v, const std::string& tag, Side side) {
    const Ring& R = *F.R;
    const auto& g = F.cond.at(tag)[v];
    if (side == Side::primal) return g;
    return perp_generic(R, F.M[v], r_span(R, F.rank[v], g)).rows();
}

ZSpan modified_span(const Frame& F, const std::string& tag, Side side, PlaceMask relax, PlaceMask strict) {
    const Ring& R = *F.R;
    const int n = R.n();
    std::vector<Vec> gens;
    for (size_t v = 0; v < F.rank.size(); ++v) {
        if (strict >> v & 1) continue;
        if (relax >> v & 1) {
            for (int i = 0; i < F.rank[v]; ++i) gens.push_back(unit_vec(R, F.N, F.off[v] + i));
            continue;
        }
        for (const auto& x : local_gens(F, static_cast<int>(v), tag, side)) {
            Vec e(static_cast<size_t>(F.N) * n, 0);
            std::copy(x.begin(), x.end(), e.begin() + static_cast<long>(F.off[v]) * n);
            gens.push_back(std::move(e));
        }
    }
    return r_span(R, F.N, gens);
}

Subquotient frame_selmer(const Frame& F, Side side, const std::string& tag, PlaceMask relax, PlaceMask strict) {
    const Ring& R = *F.R;
    ZSpan C = modified_span(F, tag, side, relax, strict);
    if (side == Side::primal) {
        ZSpan K = F.ell ? preimage(R.z(), combo_matrix(R, F.loc, F.N), C) : ZSpan(R.z(), 0);
        return present_subquotient(F.R, F.ell, K, ZSpan(R.z(), F.ell * R.n()));
    }
    return present_subquotient(F.R, F.N, F.dual_global.meet(C), ZSpan(R.z(), F.N * R.n()));
}

void require_tag(const SelmerInstance& inst, const std::string& tag) {
    auto t = inst.tags();
    if (std::find(t.begin(), t.end(), tag) == t.end()) throw std::invalid_argument("unknown structure tag " + tag);
}

}  // namespace

ZSpan condition_span(const SelmerInstance& inst, const std::string& tag, PlaceMask relax, PlaceMask strict, int level) {
    require_tag(inst, tag);
    return modified_span(level_frame(inst, level), tag, Side::primal, relax, strict);
}

ZSpan perp(const SelmerInstance& inst, const ZSpan& X, int level) {
    Frame F = level_frame(inst, level);
    return perp_generic(*F.R, full_pairing(F), X);
}

ZSpan global_image(const SelmerInstance& inst, int level) { return image_span(level_frame(inst, level)); }

Subquotient selmer_module(const SelmerInstance& inst, Side side, const std::string& tag, PlaceMask relax, PlaceMask strict, int level) {
    require_tag(inst, tag);
    return frame_selmer(level_frame(inst, level), side, tag, relax, strict);
}

int residual_selmer_dim(const SelmerInstance& inst, Side side, const std::string& tag, PlaceMask relax, PlaceMask strict) {
    require_tag(inst, tag);
    Frame F = residual_frame(inst);
    return frame_selmer(F, side, tag, relax, strict).module.log_card() / F.R->f();
}

ValidationReport validate_instance(const SelmerInstance& inst) {
    ValidationReport rep;
    try {
        check_lengths(inst);
    } catch (const std::exception& e) {
        rep.checks.push_back({"shape", false, e.what()});
        return rep;
    }
    rep.checks.push_back({"shape", true, ""});
    auto R = Ring::build(inst.ring);
    if (!R->local()) {
        rep.checks.push_back({"local ring", false, "Selmer data needs a p-group ring"});
        return rep;
    }
    const int n = R->n();
    for (const auto& P : inst.places) {
        bool perfect = R->is_unit(det(*R, P.pairing));
        rep.checks.push_back({"pairing perfect at " + P.label, perfect, perfect ? "" : "determinant of the pairing matrix is not a unit"});
        if (P.aux) {
            bool hyp = P.pairing[0][0] == R->zero() && P.pairing[1][1] == R->zero() && P.pairing[0][1] == R->one() &&
                       P.pairing[1][0] == R->one();
            bool unit = R->is_unit(P.phi_fs);
            std::string d;
            if (!hyp) d = "pairing must be hyperbolic on (finite, transverse)";
            if (!unit) d += std::string(d.empty() ? "" : "; ") + "phi_fs is not a unit";
            rep.checks.push_back({"rank-one decomposition at " + P.label, hyp && unit, d});
        }
    }
    const auto tags = inst.tags();
    for (const auto& t : tags)
        for (size_t v = 0; v < inst.places.size(); ++v) {
            const auto& P = inst.places[v];
            if (P.aux) continue;
            ZSpan F = r_span(*R, P.rank, P.conditions.at(t));
            bool tf = zp_free_quotient(*R, P.rank, F);
            rep.checks.push_back({"torsion-free quotient at " + P.label + " [" + t + "]", tf, tf ? "" : "V/F is not free over Z/p^m"});
        }
    if (!rep.ok()) return rep;

    for (int lv = 1; lv <= inst.ring.m; ++lv) {
        Frame F = level_frame(inst, lv);
        ZSpan img = image_span(F);
        ZSpan pp = perp_generic(*F.R, full_pairing(F), img);
        bool gd = pp == F.dual_global;
        rep.checks.push_back({"global duality at level " + std::to_string(lv), gd, gd ? "" : "dual global module is not the orthogonal of the localization image"});
        if (!gd) continue;
        for (const auto& t : tags) {
            bool ok = true;
            std::string detail;
            for (PlaceMask nm : square_free_masks(inst, inst.depth)) {
                ZSpan C = modified_span(F, t, Side::primal, nm, 0);
                const int full = F.R->log_card() * F.N;
                const int coker = full - C.plus(img).log_card();
                const int dual = frame_selmer(F, Side::dual, t, 0, nm).module.log_card();
                const int sel = frame_selmer(F, Side::primal, t, nm, 0).module.log_card();
                const int hglob = F.R->log_card() * F.ell;
                const int im_mod = C.plus(img).log_card() - C.log_card();
                if (coker != dual || sel + im_mod != hglob) {
                    ok = false;
                    std::ostringstream os;
                    os << "n=" << mask_label(inst, nm) << ": coker " << coker << " vs dual " << dual << ", selmer " << sel << " + image " << im_mod
                       << " vs " << hglob;
                    detail = os.str();
                    break;
                }
            }
            rep.checks.push_back({"five-term duality at level " + std::to_string(lv) + " [" + t + "]", ok, detail});
        }
    }
    rep.checks.push_back({"reductions commute", true, "lower levels and residual data are derived by reduction"});
    (void)n;

    for (const char* h : {"H0", "H1", "H2", "H3", "H4"}) {
        auto it = inst.flags.find(h);
        rep.hypotheses.push_back({h, it != inst.flags.end() && it->second, "declared"});
    }
    bool h5 = true;
    for (const auto& P : inst.places)
        if (!P.aux && P.h0_residual != 0) h5 = false;
    rep.hypotheses.push_back({"H5", h5, "residual H^0 data"});
    if (h5) {
        std::vector<std::string> present;
        for (const char* t : {"can", "ur", "rel"})
            if (std::find(tags.begin(), tags.end(), t) != tags.end()) present.push_back(t);
        if (present.size() > 1) {
            bool same = true;
            for (const auto& P : inst.places) {
                if (P.aux) continue;
                ZSpan a = r_span(*R, P.rank, P.conditions.at(present[0]));
                for (size_t i = 1; i < present.size(); ++i) same = same && a == r_span(*R, P.rank, P.conditions.at(present[i]));
            }
            rep.checks.push_back({"structures coincide", same, same ? "" : "can/ur/rel conditions differ although H5 holds"});
        }
    }
    if (rep.ok()) {
        Frame k = residual_frame(inst);
        for (const auto& t : tags) {
            bool kill = false;
            for (PlaceMask nm : square_free_masks(inst, inst.depth))
                if (frame_selmer(k, Side::dual, t, 0, nm).module.log_card() == 0) {
                    kill = true;
                    break;
                }
            rep.hypotheses.push_back({"residual dual Selmer killable within depth [" + t + "]", kill, ""});
        }
    }
    return rep;
}

CoreRank core_rank(const SelmerInstance& inst, const std::string& tag) {
    require_tag(inst, tag);
    Frame k = residual_frame(inst);
    CoreRank c;
    const int f = k.R->f();
    c.dim_primal = frame_selmer(k, Side::primal, tag, 0, 0).module.log_card() / f;
    c.dim_dual = frame_selmer(k, Side::dual, tag, 0, 0).module.log_card() / f;
    c.chi = c.dim_primal - c.dim_dual;
    int sum = 0;
    bool any = false;
    for (const auto& P : inst.places)
        if (P.h0_rank) {
            any = true;
            sum += *P.h0_rank;
        }
    if (any) {
        c.declared_sum = sum;
        c.formula_ok = sum == c.chi;
    }
    return c;
}

std::vector<VertexCert> core_vertex_search(const SelmerInstance& inst, const std::string& tag, int depth, int level) {
    require_tag(inst, tag);
    if (depth > static_cast<int>(inst.aux_places().size())) depth = static_cast<int>(inst.aux_places().size());
    const int chi = core_rank(inst, tag).chi;
    Frame F = level_frame(inst, level);
    Frame k = residual_frame(inst);
    std::vector<VertexCert> out;
    for (PlaceMask nm : square_free_masks(inst, depth)) {
        VertexCert c;
        c.n = nm;
        c.label = mask_label(inst, nm);
        c.nu = nu(nm);
        auto S = frame_selmer(F, Side::primal, tag, nm, 0);
        c.rank = S.module.min_gens();
        c.selmer_free = S.module.is_free();
        c.dual_zero = frame_selmer(F, Side::dual, tag, 0, nm).module.log_card() == 0;
        c.residual_dual_zero = frame_selmer(k, Side::dual, tag, 0, nm).module.log_card() == 0;
        c.vertex = c.selmer_free && c.dual_zero;
        c.expected_rank = chi + c.nu;
        out.push_back(c);
    }
    return out;
}

CartesianReport cartesian_check(const SelmerInstance& inst, const std::string& tag) {
    require_tag(inst, tag);
    CartesianReport rep;
    auto R1 = inst.ring_at(1);
    Frame k = residual_frame(inst);
    const int f = R1->f(), n1 = R1->n();
    const Vec N = norm_element(*R1, [&] {
        std::vector<std::vector<int>> g;
        for (size_t i = 0; i < inst.ring.group.size(); ++i) {
            std::vector<int> e(inst.ring.group.size(), 0);
            e[i] = 1;
            g.push_back(e);
        }
        return g;
    }());
    for (size_t v = 0; v < inst.places.size(); ++v) {
        const auto& P = inst.places[v];
        if (P.aux) continue;
        PlaceVerdict pv;
        pv.label = P.label;
        const int r = P.rank;
        std::vector<Vec> g1;
        for (const auto& x : P.conditions.at(tag)) g1.push_back(reduce_to(*R1, x));
        ZSpan F1 = r_span(*R1, r, g1);
        ZSpan Fbar = r_span(*k.R, r, k.cond.at(tag)[v]);
        // nu: x -> N * lift(x), residue coordinates embedded at the identity
        Mat Nu(r * f, r * n1);
        for (int i = 0; i < r; ++i)
            for (int c = 0; c < f; ++c) {
                Vec e(f, 0);
                e[c] = 1;
                Vec img = R1->mul(N, R1->gr_embed(e));
                for (int s = 0; s < n1; ++s) Nu.at(i * f + c, i * n1 + s) = img[s];
            }
        ZSpan pushed = ZSpan::from_mat(R1->z(), [&] {
            Mat A(0, r * n1);
            for (const auto& row : Fbar.rows()) A.push_row(vec_mul(R1->z(), row, Nu));
            return A;
        }());
        if (!F1.contains(pushed)) {
            pv.pass = false;
            pv.detail = "norm map does not carry the residual condition into the level-one condition";
        } else {
            ZSpan pre = preimage(R1->z(), Nu, F1);
            pv.pass = pre == Fbar;
            std::ostringstream os;
            os << "kernel dimension " << (pre.log_card() - Fbar.log_card()) / f;
            pv.detail = os.str();
        }
        rep.cartesian = rep.cartesian && pv.pass;
        rep.places.push_back(pv);
    }
    return rep;
}

std::vector<PlaceVerdict> level_injectivity(const SelmerInstance& inst, const std::string& tag, int level) {
    require_tag(inst, tag);
    auto R1 = inst.ring_at(1);
    auto Rm = inst.ring_at(level);
    const int n = R1->n();
    const i64 scale = ipow(inst.ring.p, level - 1);
    std::vector<PlaceVerdict> out;
    for (const auto& P : inst.places) {
        if (P.aux) continue;
        std::vector<Vec> g1, gm;
        for (const auto& x : P.conditions.at(tag)) {
            g1.push_back(reduce_to(*R1, x));
            gm.push_back(reduce_to(*Rm, x));
        }
        ZSpan F1 = r_span(*R1, P.rank, g1), Fm = r_span(*Rm, P.rank, gm);
        Mat A(P.rank * n, P.rank * n);
        for (int i = 0; i < P.rank * n; ++i) A.at(i, i) = scale % Rm->z().q;
        ZSpan pre = preimage(Rm->z(), A, Fm);
        // pre lives in (Z/p^level)^.. ; read it mod p
        std::vector<Vec> rows;
        for (auto row : pre.rows()) {
            for (auto& x : row) x %= inst.ring.p;
            rows.push_back(row);
        }
        ZSpan pre1 = ZSpan::from_rows(R1->z(), P.rank * n, rows);
        PlaceVerdict pv{P.label, pre1 == F1, ""};
        if (!pv.pass) pv.detail = "multiplication by p^(m-1) does not embed the level-one quotient";
        out.push_back(pv);
    }
    return out;
}

FreeReport theorem_free_report(const SelmerInstance& inst, const std::string& tag) {
    FreeReport rep;
    rep.tag = tag;
    rep.chi = core_rank(inst, tag).chi;
    Frame k = residual_frame(inst);
    for (PlaceMask nm : square_free_masks(inst, inst.depth))
        if (frame_selmer(k, Side::dual, tag, 0, nm).module.log_card() == 0) {
            rep.killable = true;
            break;
        }
    for (int lv = 1; lv <= inst.ring.m; ++lv) {
        auto certs = core_vertex_search(inst, tag, inst.depth, lv);
        bool any = false;
        for (const auto& c : certs)
            if (c.vertex) {
                any = true;
                if (c.rank != c.expected_rank) {
                    rep.ranks_ok = false;
                    rep.notes.push_back("level " + std::to_string(lv) + " vertex " + c.label + " has rank " + std::to_string(c.rank) +
                                        ", expected " + std::to_string(c.expected_rank));
                }
            }
        if (any)
            for (const auto& c : certs)
                if (c.vertex != c.residual_dual_zero) {
                    rep.shortcut_ok = false;
                    rep.notes.push_back("level " + std::to_string(lv) + ": residual criterion disagrees at " + c.label);
                }
        rep.exists_at_level.push_back(any);
        for (const auto& v : level_injectivity(inst, tag, lv)) rep.injective_all = rep.injective_all && v.pass;
    }
    rep.cartesian = cartesian_check(inst, tag).cartesian;
    const bool all_levels = std::all_of(rep.exists_at_level.begin(), rep.exists_at_level.end(), [](bool b) { return b; });
    rep.propagation = rep.exists_at_level.front() == rep.exists_at_level.back() && (rep.exists_at_level.front() == all_levels);
    if (!rep.propagation) rep.notes.push_back("core-vertex existence differs between levels");
    if (rep.killable) {
        rep.equivalence = all_levels == rep.cartesian;
        if (!rep.equivalence) rep.notes.push_back("cartesian verdict and core-vertex existence disagree");
    } else {
        rep.notes.push_back("hypothesis failure: no ideal within depth kills the residual dual Selmer module");
    }
    if (!rep.injective_all) rep.notes.push_back("level-one to level-m quotient map not injective");
    return rep;
}

}  // namespace starklab
