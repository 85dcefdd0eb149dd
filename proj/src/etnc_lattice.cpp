#include "starklab/etnc_lattice.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace starklab {

namespace {

int exponent_of(const std::vector<int>& group) {
    int E = 1;
    for (int d : group) E = std::lcm(E, d);
    return E;
}

int card(const std::vector<int>& group) {
    int c = 1;
    for (int d : group) c *= d;
    return c;
}

std::vector<int> digits(const std::vector<int>& group, int idx) {
    std::vector<int> a(group.size());
    for (int i = static_cast<int>(group.size()) - 1; i >= 0; --i) {
        a[i] = idx % group[i];
        idx /= group[i];
    }
    return a;
}

int undigits(const std::vector<int>& group, const std::vector<int>& a) {
    int idx = 0;
    for (size_t i = 0; i < group.size(); ++i) idx = idx * group[i] + ((a[i] % group[i]) + group[i]) % group[i];
    return idx;
}

// chi(g) = zeta_E^s
i64 pairing(const std::vector<int>& group, const std::vector<int>& chi, const std::vector<int>& g) {
    const i64 E = exponent_of(group);
    i64 s = 0;
    for (size_t i = 0; i < group.size(); ++i) s += static_cast<i64>(chi[i]) * g[i] * (E / group[i]);
    return ((s % E) + E) % E;
}

i64 totient(i64 n) {
    i64 r = n;
    for (i64 q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            while (n % q == 0) n /= q;
            r -= r / q;
        }
    if (n > 1) r -= r / n;
    return r;
}

int moebius(i64 n) {
    int mu = 1;
    for (i64 q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            n /= q;
            if (n % q == 0) return 0;
            mu = -mu;
        }
    if (n > 1) mu = -mu;
    return mu;
}

// sum of zeta_k^(u c) over u prime to k
i64 ramanujan(i64 k, i64 c) {
    const i64 g = std::gcd(k, ((c % k) + k) % k);
    const i64 d = k / g;
    return moebius(d) * totient(k) / totient(d);
}

Vec shift(const Zmod& z, const Vec& v, int k) {
    Vec out(v.size());
    const i64 pk = z.ppow(k);
    for (size_t i = 0; i < v.size(); ++i) out[i] = z.mul(v[i], pk);
    return out;
}

std::vector<Vec> pk_basis(const Ring& R, int k) {
    std::vector<Vec> rows;
    if (k >= R.m()) return rows;
    for (int t = 0; t < R.n(); ++t) rows.push_back(shift(R.z(), R.basis(t), k));
    return rows;
}

ZSpan closure_rows(const EpsRing& C, std::vector<Vec> rows, int prec) {
    for (const auto& k : C.kernel.rows()) rows.push_back(k);
    for (auto& b : pk_basis(*C.R, prec)) rows.push_back(std::move(b));
    return r_span(*C.R, 1, rows);
}

Mat stack(const std::vector<Mat>& parts, int cols) {
    Mat M(0, cols);
    for (const auto& P : parts)
        for (int i = 0; i < P.rows; ++i) M.push_row(P.row(i));
    return M;
}

Mat rows_mat(const std::vector<Vec>& rows, int cols) {
    Mat M(0, cols);
    for (const auto& r : rows) M.push_row(r);
    return M;
}

int coeff_val(const EpsRing& C, const Vec& y) {
    int v = C.N;
    for (i64 c : y) v = std::min(v, C.R->z().val(c));
    return v;
}

}  // namespace

EpsDescriptor eps_all(const std::vector<int>& group) { return all_orbit_reps(group); }

EpsDescriptor eps_normalize(const std::vector<int>& group, const EpsDescriptor& eps) {
    std::set<std::vector<int>> s;
    for (const auto& chi : eps) s.insert(orbit_rep(group, chi));
    return {s.begin(), s.end()};
}

int eps_character_count(const std::vector<int>& group, const EpsDescriptor& eps) {
    int c = 0;
    for (const auto& chi : eps_normalize(group, eps)) c += static_cast<int>(totient(char_order(group, chi)));
    return c;
}

std::vector<i64> scaled_idempotent(const std::vector<int>& group, const EpsDescriptor& eps) {
    const int G = card(group), E = exponent_of(group);
    std::vector<i64> out(G, 0);
    for (const auto& chi : eps_normalize(group, eps)) {
        const int k = char_order(group, chi);
        for (int g = 0; g < G; ++g) out[g] += ramanujan(k, pairing(group, chi, digits(group, g)) / (E / k));
    }
    return out;
}

EpsRing EpsRing::make(int p, int f, const std::vector<int>& group, const EpsDescriptor& eps, int N, int h) {
    if (eps.empty()) throw std::invalid_argument("empty character set");
    for (int d : group)
        if (vp(d, p) == 0 || ipow(p, vp(d, p)) != d) throw std::invalid_argument("G must be a p-group");
    EpsRing C;
    C.p = p;
    C.f = f;
    C.N = N;
    C.h = h;
    C.group = group;
    C.eps = eps_normalize(group, eps);
    const int v = vp(card(group), p);
    auto hi = Ring::build(p, N + v, f, group);
    C.R = Ring::build(p, N, f, group);
    Vec E = hi->zero();
    auto coeff = scaled_idempotent(group, C.eps);
    for (int g = 0; g < card(group); ++g) E[g] = hi->z().red(coeff[g]);
    ZSpan ker = left_kernel(hi->z(), hi->mul_matrix(E));
    std::vector<Vec> rows;
    for (auto r : ker.rows()) {
        for (auto& c : r) c = C.R->z().red(c);
        rows.push_back(std::move(r));
    }
    C.kernel = ZSpan::from_rows(C.R->z(), C.R->n(), std::move(rows));
    C.rank = f * eps_character_count(group, C.eps);
    if (N * C.R->n() - C.kernel.log_card() != N * C.rank) throw std::logic_error("eps-quotient has the wrong rank");
    return C;
}

int EpsRing::unit_exponent(const Vec& y, int prec) const {
    ZSpan S = closure_rows(*this, {y}, prec);
    for (int s = 0; s < prec; ++s)
        if (S.contains(R->scalar(R->z().ppow(s)))) return s;
    return -1;
}

ScaledElem scaled(const EpsRing& C, Vec y, int e) {
    if (static_cast<int>(y.size()) != C.R->n()) throw std::invalid_argument("element has the wrong length");
    return {C.R->red(std::move(y)), e, C.N};
}

// an error in p^prec of one factor costs p^(prec + valuation of the other)
ScaledElem se_mul(const EpsRing& C, const ScaledElem& a, const ScaledElem& b) {
    const int prec = std::min({a.prec + coeff_val(C, b.y), b.prec + coeff_val(C, a.y), C.N});
    return {C.R->mul(a.y, b.y), a.e + b.e, prec};
}

// x with x b = p^s a; x is determined up to {z : z b in p^P}, which lies in p^(P - t_b)
ScaledElem se_div(const EpsRing& C, const ScaledElem& a, const ScaledElem& b) {
    const Ring& R = *C.R;
    const int P = std::min(a.prec, b.prec);
    const int tb = C.unit_exponent(b.y, P);
    if (tb < 0) throw InsufficientPrecision("divisor not invertible at working precision", C.h + 1);
    if (P - tb < 1) throw InsufficientPrecision("quotient loses all precision", C.h + tb - P + 1);
    ZSpan bL = closure_rows(C, {b.y}, P);
    int s = 0;
    while (!bL.contains(shift(R.z(), a.y, s))) ++s;
    Mat A = stack({R.mul_matrix(b.y), rows_mat(C.kernel.rows(), R.n()), rows_mat(pk_basis(R, P), R.n())}, R.n());
    Vec x;
    if (!solve_left(R.z(), A, shift(R.z(), a.y, s), x)) throw std::logic_error("division: inconsistent system");
    x.resize(R.n());
    const int e = a.e - b.e + s;
    if (e > C.h) throw InsufficientPrecision("quotient offset exceeds headroom", e);
    return {x, e, P - tb};
}

ScaledElem se_inverse(const EpsRing& C, const ScaledElem& a) { return se_div(C, {C.R->one(), 0, C.N}, a); }

FractionalLattice FractionalLattice::build(const EpsRing& C, int e, int prec, ZSpan S) {
    const Ring& R = *C.R;
    if (prec < 1) throw InsufficientPrecision("lattice precision exhausted", C.h + 1);
    S = S.plus(closure_rows(C, {}, prec));
    ZSpan pL = closure_rows(C, pk_basis(R, 1), prec);
    Mat P(0, R.n());
    for (int t = 0; t < R.n(); ++t) P.push_row(shift(R.z(), R.basis(t), 1));
    while (pL.contains(S)) {
        if (prec <= 1) throw InsufficientPrecision("lattice vanishes at working precision", C.h + 1);
        S = preimage(R.z(), P, S);
        --prec;
        --e;
        S = S.plus(closure_rows(C, {}, prec));
        pL = closure_rows(C, pk_basis(R, 1), prec);
    }
    int t = 0;
    while (t < prec) {
        bool all = true;
        for (const auto& b : pk_basis(R, t))
            if (!S.contains(b)) {
                all = false;
                break;
            }
        if (all) break;
        ++t;
    }
    if (t >= prec) throw InsufficientPrecision("lattice not certified at working precision", C.h + (t - prec) + 1);
    if (e > C.h) throw InsufficientPrecision("offset exceeds headroom", e);
    FractionalLattice L;
    L.e_ = e;
    L.prec_ = prec;
    L.t_ = t;
    L.S_ = std::move(S);
    return L;
}

FractionalLattice FractionalLattice::from_gens(const EpsRing& C, const std::vector<ScaledElem>& gens) {
    if (gens.empty()) throw std::invalid_argument("lattice needs generators");
    int E = gens[0].e;
    for (const auto& g : gens) E = std::max(E, g.e);
    int prec = C.N;
    std::vector<Vec> rows;
    for (const auto& g : gens) {
        prec = std::min(prec, g.prec + E - g.e);
        rows.push_back(shift(C.R->z(), g.y, E - g.e));
    }
    return build(C, E, prec, r_span(*C.R, 1, rows));
}

ZSpan FractionalLattice::at(const EpsRing& C, int e, int prec) const {
    const int k = e - e_;
    if (k < 0 || prec > prec_ + k || prec > C.N) throw std::logic_error("lattice shift out of range");
    std::vector<Vec> rows;
    for (const auto& r : S_.rows()) rows.push_back(shift(C.R->z(), r, k));
    return closure_rows(C, rows, prec);
}

FractionalLattice FractionalLattice::times(const EpsRing& C, const FractionalLattice& o) const {
    std::vector<Vec> rows;
    for (const auto& a : S_.rows())
        for (const auto& b : o.S_.rows()) rows.push_back(C.R->mul(a, b));
    return build(C, e_ + o.e_, std::min(prec_, o.prec_), r_span(*C.R, 1, rows));
}

FractionalLattice FractionalLattice::scale(const EpsRing& C, const ScaledElem& a) const {
    std::vector<Vec> rows;
    for (const auto& r : S_.rows()) rows.push_back(C.R->mul(r, a.y));
    return build(C, e_ + a.e, std::min({prec_ + coeff_val(C, a.y), a.prec, C.N}), r_span(*C.R, 1, rows));
}

bool FractionalLattice::equals(const EpsRing& C, const FractionalLattice& o) const {
    if (e_ != o.e_) return false;
    const int P = std::min(prec_, o.prec_);
    if (std::max(t_, o.t_) >= P) throw InsufficientPrecision("comparison below certified precision", C.h + 1);
    return at(C, e_, P) == o.at(C, e_, P);
}

bool FractionalLattice::contains(const EpsRing& C, const FractionalLattice& o) const {
    const int e = std::max(e_, o.e_);
    const int P = std::min({prec_ + e - e_, o.prec_ + e - o.e_, C.N});
    if (t_ + e - e_ >= P || o.t_ + e - o.e_ >= P) throw InsufficientPrecision("containment below certified precision", C.h + 1);
    return at(C, e, P).contains(o.at(C, e, P));
}

std::string FractionalLattice::normal_form() const {
    std::ostringstream os;
    os << "p^" << -e_ << " * [prec " << prec_ << "]";
    for (const auto& r : S_.rows()) os << ' ' << vec_str(r);
    return os.str();
}

void validate_etnc(const EtncInstance& inst) {
    if (inst.p != 3 && inst.p != 5 && inst.p != 2 && inst.p != 7) throw std::invalid_argument("unsupported prime");
    if (inst.m < 1 || inst.r < 1) throw std::invalid_argument("m and r must be positive");
    const int v = vp(card(inst.group), inst.p);
    if (inst.h < v) throw std::invalid_argument("headroom below v_p(|G|)");
    if (inst.eps.empty()) throw std::invalid_argument("empty character set");
    for (const auto& chi : inst.eps)
        if (chi.size() != inst.group.size()) throw std::invalid_argument("character length mismatch");
    const int n = inst.f * card(inst.group);
    auto len_ok = [&](const Vec& x) { return static_cast<int>(x.size()) == n; };
    if (!len_ok(inst.basic) || !len_ok(inst.lambda.y) || !len_ok(inst.lstar.y)) throw std::invalid_argument("element has the wrong length");
    for (const auto& rel : inst.h2_relations)
        if (static_cast<int>(rel.size()) != n * inst.h2_gens) throw std::invalid_argument("H^2 relation has the wrong length");
}

std::string verdict_keyword(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        default: return "INSUFFICIENT_PRECISION";
    }
}

BkReport bk_image_check(const EtncInstance& inst) {
    validate_etnc(inst);
    BkReport rep;
    try {
        EpsRing C = EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
        auto prec_of = [&](ScaledElem a) {
            a.y = C.R->red(a.y);
            if (a.prec <= 0 || a.prec > C.N) a.prec = C.N;
            return a;
        };
        const ScaledElem lambda = prec_of(inst.lambda), lstar = prec_of(inst.lstar);
        FPModule H2(C.R, inst.h2_gens, inst.h2_relations);
        Ideal F = fitting_ideal(H2, 0);
        std::vector<ScaledElem> fg;
        for (const auto& g : F.generators()) fg.push_back(scaled(C, g));
        if (fg.empty()) throw InsufficientPrecision("Fitt^0(H^2) vanishes at working precision", inst.h + 1);
        rep.fitt = FractionalLattice::from_gens(C, fg);

        Ideal IB = bidual_and_image(FPModule::free(C.R, inst.r), inst.r, inst.basic).image;
        std::vector<ScaledElem> ig;
        for (const auto& g : IB.generators()) ig.push_back(scaled(C, g));
        if (ig.empty()) throw InsufficientPrecision("basic element vanishes at working precision", inst.h + 1);
        FractionalLattice im_basic = FractionalLattice::from_gens(C, ig);

        const ScaledElem lam_b = se_mul(C, scaled(C, inst.basic), lambda);
        const ScaledElem c = se_div(C, lstar, lam_b);
        rep.eta = se_mul(C, c, scaled(C, inst.basic));
        rep.im_eta = im_basic.scale(C, c);
        rep.xi = FractionalLattice::from_gens(C, {se_div(C, lam_b, lstar)});
        rep.product = rep.im_eta.times(C, rep.xi);
        rep.verdict = rep.product.equals(C, rep.fitt) ? Verdict::pass : Verdict::fail;
        if (rep.verdict == Verdict::fail) rep.detail = "im(eta) * Xi differs from Fitt^0(H^2)";
    } catch (const InsufficientPrecision& e) {
        rep.verdict = Verdict::insufficient_precision;
        rep.required_h = e.required_h;
        rep.detail = e.what();
    }
    return rep;
}

bool headroom_stable(const EtncInstance& inst) {
    EtncInstance up = inst;
    up.h += 1;
    // lift stored data unchanged: representatives stay valid at higher precision
    BkReport a = bk_image_check(inst), b = bk_image_check(up);
    if (a.verdict != b.verdict) return false;
    if (a.verdict == Verdict::insufficient_precision) return true;
    auto same = [](const FractionalLattice& x, const FractionalLattice& y) { return x.offset() == y.offset() && x.exponent() == y.exponent(); };
    if (!same(a.xi, b.xi) || !same(a.im_eta, b.im_eta) || !same(a.product, b.product)) return false;
    EpsRing Ca = EpsRing::make(inst.p, inst.f, inst.group, inst.eps, inst.working_precision(), inst.h);
    EpsRing Cb = EpsRing::make(up.p, up.f, up.group, up.eps, up.working_precision(), up.h);
    return tnc_check(Ca, a.xi) == tnc_check(Cb, b.xi);
}

bool tnc_check(const EpsRing& C, const FractionalLattice& xi, const std::optional<FractionalLattice>& order) {
    FractionalLattice O = order ? *order : FractionalLattice::integral(C);
    return O.times(C, xi).equals(C, O);
}

AssocOrder associated_order(const EpsRing& C, const FractionalLattice& I) {
    const Ring& R = *C.R;
    AssocOrder out;
    const int t = I.exponent(), P = I.precision();
    if (2 * t >= P) throw InsufficientPrecision("stabilizer needs precision above twice the lattice exponent", C.h + 2 * t + 1 - P);
    std::vector<Vec> trows;
    for (const auto& r : I.span().rows()) trows.push_back(shift(R.z(), r, t));
    ZSpan T = closure_rows(C, trows, P);
    ZSpan Y = ZSpan::whole(R.z(), R.n());
    for (const auto& g : I.span().rows()) Y = Y.meet(preimage(R.z(), R.mul_matrix(g), T));
    out.stabilizer = Y;
    out.t = t;
    std::vector<ScaledElem> gens;
    for (const auto& y : Y.rows()) gens.push_back({y, t, P});
    out.order = FractionalLattice::from_gens(C, gens);
    // principality: I / mI one-dimensional over the residue field
    std::vector<Vec> mrows;
    for (const auto& r : I.span().rows()) {
        mrows.push_back(shift(R.z(), r, 1));
        for (int i = 0; i < R.factors(); ++i) mrows.push_back(R.mul(r, R.sub(R.gen(i), R.one())));
    }
    ZSpan mI = closure_rows(C, mrows, P);
    out.principal = (I.span().log_card() - mI.log_card()) == C.f;
    out.order_is_integral = out.order.equals(C, FractionalLattice::integral(C));
    out.cyclic = C.group.size() <= 1;
    return out;
}

EllipticEuler euler_poly_elliptic(long long a, long long ell, int p) {
    if (ell <= 1) throw std::invalid_argument("ell must be a prime");
    if (ell == p) throw std::invalid_argument("ell must differ from p");
    EllipticEuler e;
    e.poly = {Rational(1), Rational(-a, ell), Rational(1, ell)};
    e.weil = a * a <= 4 * ell;
    return e;
}

namespace {

Rational rat_det(std::vector<std::vector<Rational>> A) {
    const size_t n = A.size();
    Rational d = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && A[piv][c].numerator() == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(A[piv], A[c]);
            d = -d;
        }
        d *= A[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            Rational k = A[r][c] / A[c][c];
            for (size_t j = c; j < n; ++j) A[r][j] -= k * A[c][j];
        }
    }
    return d;
}

std::vector<std::vector<Rational>> rat_inverse(const std::vector<std::vector<Rational>>& A) {
    const size_t n = A.size();
    std::vector<std::vector<Rational>> M(n, std::vector<Rational>(2 * n, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
        M[i][n + i] = 1;
    }
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && M[piv][c].numerator() == 0) ++piv;
        if (piv == n) throw std::invalid_argument("Frobenius matrix is singular");
        std::swap(M[piv], M[c]);
        Rational k = M[c][c];
        for (auto& x : M[c]) x /= k;
        for (size_t r = 0; r < n; ++r) {
            if (r == c || M[r][c].numerator() == 0) continue;
            Rational q = M[r][c];
            for (size_t j = 0; j < 2 * n; ++j) M[r][j] -= q * M[c][j];
        }
    }
    std::vector<std::vector<Rational>> B(n, std::vector<Rational>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) B[i][j] = M[i][n + j];
    return B;
}

void require_square(size_t n, const std::vector<size_t>& rows) {
    for (size_t r : rows)
        if (r != n) throw std::invalid_argument("Frobenius matrix must be square");
}

}  // namespace

RatPoly euler_poly_matrix(const std::vector<std::vector<Rational>>& frob) {
    const size_t n = frob.size();
    std::vector<size_t> lens;
    for (const auto& r : frob) lens.push_back(r.size());
    require_square(n, lens);
    auto B = rat_inverse(frob);
    RatPoly out(n + 1, 0);
    out[0] = 1;
    for (int k = 1; k <= static_cast<int>(n); ++k) {
        Rational s = 0;
        for (const auto& I : subsets(static_cast<int>(n), k)) {
            std::vector<std::vector<Rational>> sub(k, std::vector<Rational>(k));
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) sub[a][b] = B[I[a]][I[b]];
            s += rat_det(sub);
        }
        out[k] = k % 2 ? -s : s;
    }
    return out;
}

std::vector<Vec> euler_poly_ring(const Ring& R, const std::vector<std::vector<Vec>>& frob) {
    const int n = static_cast<int>(frob.size());
    std::vector<size_t> lens;
    for (const auto& r : frob) lens.push_back(r.size());
    require_square(static_cast<size_t>(n), lens);
    Vec d = det(R, frob);
    if (!R.is_unit(d)) throw std::invalid_argument("Frobenius matrix is not invertible over the ring");
    Vec dinv = R.inverse(d);
    // B = adj(A) / det(A)
    std::vector<std::vector<Vec>> B(n, std::vector<Vec>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<std::vector<Vec>> minor;
            for (int r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Vec> row;
                for (int c = 0; c < n; ++c)
                    if (c != i) row.push_back(frob[r][c]);
                minor.push_back(row);
            }
            Vec cof = n == 1 ? R.one() : det(R, minor);
            if ((i + j) % 2) cof = R.neg(cof);
            B[i][j] = R.mul(cof, dinv);
        }
    std::vector<Vec> out(n + 1, R.zero());
    out[0] = R.one();
    for (int k = 1; k <= n; ++k) {
        Vec s = R.zero();
        for (const auto& I : subsets(n, k)) {
            std::vector<std::vector<Vec>> sub(k, std::vector<Vec>(k));
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) sub[a][b] = B[I[a]][I[b]];
            s = R.add(s, det(R, sub));
        }
        out[k] = k % 2 ? R.neg(s) : s;
    }
    return out;
}

Vec rational_to_ring(const Ring& R, const Rational& c) {
    if (c.denominator() % R.p() == 0) throw std::invalid_argument("denominator divisible by p");
    const i64 num = R.z().red(c.numerator()), den = R.z().red(c.denominator());
    return R.scalar(R.z().mul(num, R.z().inv(den)));
}

Vec euler_product(const Ring& R, const std::vector<std::pair<RatPoly, int>>& factors) {
    Vec acc = R.one();
    for (const auto& [poly, g] : factors) {
        if (g < 0 || g >= R.order()) throw std::invalid_argument("Frobenius element out of range");
        const Vec x = R.group_elem(R.ginv(g));
        Vec val = R.zero(), xk = R.one();
        for (const auto& c : poly) {
            val = R.add(val, R.mul(rational_to_ring(R, c), xk));
            xk = R.mul(xk, x);
        }
        acc = R.mul(acc, val);
    }
    return acc;
}

Vec project(const Ring& src, const Ring& dst, const std::vector<std::vector<int>>& images, const Vec& x) {
    const auto& sg = src.spec().group;
    const auto& tg = dst.spec().group;
    if (images.size() != sg.size()) throw std::invalid_argument("one image per source generator");
    if (src.f() != dst.f() || src.p() != dst.p() || src.m() != dst.m()) throw std::invalid_argument("incompatible tower rings");
    for (size_t i = 0; i < images.size(); ++i) {
        if (images[i].size() != tg.size()) throw std::invalid_argument("image tuple length mismatch");
        for (size_t j = 0; j < tg.size(); ++j)
            if ((static_cast<i64>(images[i][j]) * sg[i]) % tg[j]) throw std::invalid_argument("images do not define a homomorphism");
    }
    Vec out = dst.zero();
    const int gs = src.order(), gt = dst.order();
    for (int t = 0; t < src.n(); ++t) {
        if (!x[t]) continue;
        const int k = t / gs, g = t % gs;
        auto e = digits(sg, g);
        std::vector<int> img(tg.size(), 0);
        for (size_t i = 0; i < sg.size(); ++i)
            for (size_t j = 0; j < tg.size(); ++j) img[j] = (img[j] + e[i] * images[i][j]) % tg[j];
        const int idx = k * gt + undigits(tg, img);
        out[idx] = dst.z().add(out[idx], x[t]);
    }
    return out;
}

CodescentReport codescent_check(const TowerInstance& T) {
    auto src = Ring::build(T.source);
    auto dst = Ring::build(T.source.p, T.source.m, T.source.f, T.target_group);
    // surjectivity of the group map
    std::set<int> reach{0};
    for (bool grown = true; grown;) {
        grown = false;
        for (int a : std::vector<int>(reach.begin(), reach.end()))
            for (const auto& im : T.images) {
                auto e = digits(T.target_group, a);
                for (size_t j = 0; j < e.size(); ++j) e[j] += im[j];
                if (reach.insert(undigits(T.target_group, e)).second) grown = true;
            }
    }
    if (static_cast<int>(reach.size()) != card(T.target_group)) throw std::invalid_argument("group map is not surjective");
    auto pr = [&](const Vec& x) {
        Vec out;
        const int n = src->n();
        for (size_t b = 0; b * n < x.size(); ++b) {
            Vec blk(x.begin() + static_cast<long>(b * n), x.begin() + static_cast<long>((b + 1) * n));
            Vec y = project(*src, *dst, T.images, blk);
            out.insert(out.end(), y.begin(), y.end());
        }
        return out;
    };
    CodescentReport rep;
    FPModule Ms(src, T.h2_gens, T.h2_relations);
    std::vector<Vec> trel;
    for (const auto& r : T.h2_relations) trel.push_back(pr(r));
    FPModule Mt(dst, T.h2_gens, trel);
    rep.source_fitt = fitting_ideal(Ms, 0);
    rep.target_fitt = fitting_ideal(Mt, 0);
    std::vector<Vec> img;
    for (const auto& g : rep.source_fitt.generators()) img.push_back(pr(g));
    rep.fitting_ok = Ideal(dst, img) == rep.target_fitt;
    rep.source_image = bidual_and_image(FPModule::free(src, T.d), T.r, T.element).image;
    rep.target_image = bidual_and_image(FPModule::free(dst, T.d), T.r, pr(T.element)).image;
    img.clear();
    for (const auto& g : rep.source_image.generators()) img.push_back(pr(g));
    rep.image_ok = Ideal(dst, img) == rep.target_image;
    return rep;
}

namespace {

std::vector<Subgroup> enumerate_subgroups(const std::vector<int>& group) {
    const int G = card(group);
    if (G > 64) throw std::invalid_argument("group too large for subgroup enumeration");
    using Mask = std::uint64_t;
    std::vector<int> table(static_cast<size_t>(G) * G);
    for (int a = 0; a < G; ++a)
        for (int b = 0; b < G; ++b) {
            auto x = digits(group, a), y = digits(group, b);
            for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
            table[static_cast<size_t>(a) * G + b] = undigits(group, x);
        }
    auto add = [&](int a, int b) { return table[static_cast<size_t>(a) * G + b]; };
    auto close = [&](Mask m) {
        for (bool grown = true; grown;) {
            grown = false;
            for (int a = 0; a < G; ++a)
                if (m >> a & 1)
                    for (int b = 0; b < G; ++b)
                        if ((m >> b & 1) && !(m >> add(a, b) & 1)) {
                            m |= Mask(1) << add(a, b);
                            grown = true;
                        }
        }
        return m;
    };
    std::set<Mask> seen{Mask(1)};
    std::vector<Mask> todo{Mask(1)};
    while (!todo.empty()) {
        Mask m = todo.back();
        todo.pop_back();
        for (int g = 0; g < G; ++g)
            if (!(m >> g & 1)) {
                Mask c = close(m | (Mask(1) << g));
                if (seen.insert(c).second) todo.push_back(c);
            }
    }
    std::vector<Subgroup> out;
    for (Mask m : seen) {
        Subgroup H;
        Mask span = 1;
        for (int g = 0; g < G; ++g)
            if (m >> g & 1) {
                H.elems.push_back(g);
                if (!(span >> g & 1)) {
                    H.gens.push_back(digits(group, g));
                    span = close(span | (Mask(1) << g));
                }
            }
        H.order = static_cast<int>(H.elems.size());
        out.push_back(std::move(H));
    }
    std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) { return a.order != b.order ? a.order < b.order : a.elems < b.elems; });
    return out;
}

}  // namespace

std::vector<Subgroup> all_subgroups(const std::vector<int>& group) {
    static std::mutex mu;
    static std::map<std::vector<int>, std::vector<Subgroup>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(group); it != cache.end()) return it->second;
    }
    auto subs = enumerate_subgroups(group);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(group, std::move(subs)).first->second;
}

namespace {

bool trivial_on(const std::vector<int>& group, const std::vector<int>& chi, const Subgroup& H) {
    for (int h : H.elems)
        if (pairing(group, chi, digits(group, h))) return false;
    return true;
}

bool subset_of(const Subgroup& a, const Subgroup& b) { return std::includes(b.elems.begin(), b.elems.end(), a.elems.begin(), a.elems.end()); }

}  // namespace

std::map<std::vector<int>, long long> orbit_multiplicities(const std::vector<int>& group, const std::map<std::vector<int>, long long>& phi) {
    std::map<std::vector<int>, long long> out;
    for (const auto& rep : all_orbit_reps(group)) {
        std::optional<long long> c;
        for (const auto& chi : orbit_members(group, rep)) {
            auto it = phi.find(chi);
            long long v = it == phi.end() ? 0 : it->second;
            if (c && *c != v) throw std::invalid_argument("character is not rational (not constant on a Galois orbit)");
            c = v;
        }
        if (*c) out[rep] = *c;
    }
    for (const auto& [chi, v] : phi) {
        if (chi.size() != group.size()) throw std::invalid_argument("character length mismatch");
        for (size_t i = 0; i < chi.size(); ++i)
            if (chi[i] < 0 || chi[i] >= group[i]) throw std::invalid_argument("character exponent out of range");
    }
    return out;
}

ArtinDecomposition artin_decompose(const std::vector<int>& group, const std::map<std::vector<int>, long long>& phi) {
    auto orb = orbit_multiplicities(group, phi);
    auto subs = all_subgroups(group);
    const size_t S = subs.size();
    // kernel of each orbit
    auto kernel_index = [&](const std::vector<int>& chi) {
        size_t best = S;
        for (size_t i = 0; i < S; ++i)
            if (trivial_on(group, chi, subs[i]) && (best == S || subs[i].order > subs[best].order)) best = i;
        return best;
    };
    // Moebius function of the subgroup lattice from a fixed bottom K
    auto mu_from = [&](size_t K) {
        std::vector<long long> mu(S, 0);
        mu[K] = 1;
        for (size_t L = 0; L < S; ++L) {  // sorted by order, so subgroups come before supergroups
            if (L == K || !subset_of(subs[K], subs[L])) continue;
            long long s = 0;
            for (size_t M = 0; M < S; ++M)
                if (M != L && subset_of(subs[K], subs[M]) && subset_of(subs[M], subs[L])) s += mu[M];
            mu[L] = -s;
        }
        return mu;
    };
    std::vector<long long> n(S, 0);
    for (const auto& [rep, c] : orb) {
        const size_t K = kernel_index(rep);
        auto mu = mu_from(K);
        for (size_t L = 0; L < S; ++L) n[L] += c * mu[L];
    }
    ArtinDecomposition out;
    out.m = 1;
    for (size_t L = 0; L < S; ++L)
        if (n[L]) out.coeffs.push_back({subs[L], n[L]});
    return out;
}

std::map<std::vector<int>, long long> artin_assemble(const std::vector<int>& group,
                                                     const std::vector<std::pair<Subgroup, long long>>& coeffs) {
    std::map<std::vector<int>, long long> out;
    for (const auto& rep : all_orbit_reps(group)) {
        long long c = 0;
        for (const auto& [H, k] : coeffs)
            if (trivial_on(group, rep, H)) c += k;
        if (c) out[rep] = c;
    }
    return out;
}

}  // namespace starklab
