#pragma once

#include <memory>
#include <string>
#include <vector>

#include "starklab/zmod.hpp"

namespace starklab {

struct RingSpec {
    int p = 3;
    int m = 1;
    int f = 1;
    std::vector<int> group;  // invariant factors of the p-group G
    std::vector<int> aux;    // optional prime-to-p factors, only for idempotents
    bool operator==(const RingSpec&) const = default;
};

class Ring;
using RingHandle = std::shared_ptr<const Ring>;

// GR(p^m, f)[G x aux] with coefficients in Z/p^m.  Additive basis index is
// k * |G x aux| + g: residue-extension index major, group element minor, group
// elements in lexicographic exponent order.
class Ring {
public:
    static RingHandle build(int p, int m, int f, std::vector<int> group, std::vector<int> aux = {});
    static RingHandle build(const RingSpec& s) { return build(s.p, s.m, s.f, s.group, s.aux); }

    const RingSpec& spec() const { return spec_; }
    const Zmod& z() const { return z_; }
    int p() const { return spec_.p; }
    int m() const { return spec_.m; }
    int f() const { return spec_.f; }
    int n() const { return n_; }          // additive rank over Z/p^m
    int order() const { return ng_; }     // |G x aux|
    int gorder() const { return gsize_; } // |G|
    int log_card() const { return spec_.m * n_; }
    bool local() const { return spec_.aux.empty(); }
    const std::vector<int>& modulus_poly() const { return h_; }  // monic, low degree first
    std::string describe() const;

    // group elements
    int factors() const { return static_cast<int>(radix_.size()); }
    std::vector<int> exps(int g) const;
    int index(const std::vector<int>& e) const;
    int gmul(int a, int b) const { return gmul_[static_cast<size_t>(a) * ng_ + b]; }
    int ginv(int a) const { return ginv_[a]; }
    int gpow(int a, i64 k) const;
    int gorder_of(int a) const;

    // elements
    Vec zero() const { return Vec(n_, 0); }
    Vec one() const;
    Vec scalar(i64 c) const;
    Vec basis(int t) const;
    Vec group_elem(int g) const;
    Vec gen(int i) const;  // i-th standard generator of G x aux
    Vec add(const Vec& a, const Vec& b) const;
    Vec sub(const Vec& a, const Vec& b) const;
    Vec neg(const Vec& a) const;
    Vec smul(i64 c, const Vec& a) const;
    Vec mul(const Vec& a, const Vec& b) const;
    Vec pow(const Vec& a, i64 e) const;
    bool is_zero(const Vec& a) const;
    Vec red(Vec a) const;

    Vec involution(const Vec& a) const;  // g -> g^{-1}
    i64 trace(const Vec& a) const;       // residue trace of the identity coefficient
    Vec augmentation(const Vec& a) const;  // element of GR(p^m, f), length f
    Mat mul_matrix(const Vec& a) const;    // rows: images of basis elements under x -> x a

    bool is_unit(const Vec& a) const;
    Vec inverse(const Vec& a) const;  // throws unless unit

    // coefficient ring GR(p^m, f)
    Vec gr_mul(const Vec& a, const Vec& b) const;
    Vec gr_pow(const Vec& a, i64 e) const;
    Vec gr_embed(const Vec& c) const;  // c * identity
    Vec gr_coeff(const Vec& a, int g) const;

    RingHandle at_precision(int m2) const;
    RingHandle base() const;  // GR(p^m, f), trivial group
    RingHandle residue_field() const;

private:
    RingSpec spec_;
    Zmod z_;
    int n_ = 1, ng_ = 1, gsize_ = 1;
    std::vector<int> radix_;
    std::vector<int> h_;
    std::vector<Vec> xpow_;  // x^k reduced, k < 2f-1
    std::vector<int> gmul_, ginv_;
    std::vector<i64> trx_;   // trace of x^k
};

bool same_ring(const Ring& a, const Ring& b);
bool same_ring(const RingHandle& a, const RingHandle& b);

// Element carrying its ring.
struct RingElem {
    RingHandle R;
    Vec c;
    RingElem() = default;
    RingElem(RingHandle r, Vec v) : R(std::move(r)), c(std::move(v)) {}
    RingElem operator+(const RingElem& o) const { return {R, R->add(c, o.c)}; }
    RingElem operator-(const RingElem& o) const { return {R, R->sub(c, o.c)}; }
    RingElem operator*(const RingElem& o) const { return {R, R->mul(c, o.c)}; }
    bool operator==(const RingElem& o) const { return c == o.c; }
    bool is_zero() const { return R->is_zero(c); }
};

// Ideal of a ring in canonical (Howell) form of its additive span.
class Ideal {
public:
    Ideal() = default;
    Ideal(RingHandle R, const std::vector<Vec>& gens);
    static Ideal from_span(RingHandle R, ZSpan span);  // verifies closure
    static Ideal whole(RingHandle R) { return Ideal(R, {R->one()}); }
    static Ideal zero(RingHandle R) { return Ideal(R, {}); }

    const RingHandle& ring() const { return R_; }
    const ZSpan& span() const { return span_; }
    bool contains(const Vec& x) const { return span_.contains(x); }
    bool contains(const Ideal& o) const { return same_ring(R_, o.R_) && span_.contains(o.span_); }
    Vec reduce(const Vec& x) const { return span_.reduce(x); }
    int log_card() const { return span_.log_card(); }
    bool is_whole() const;
    bool is_zero() const { return span_.is_zero(); }
    Ideal operator+(const Ideal& o) const;
    Ideal operator*(const Ideal& o) const;
    bool operator==(const Ideal& o) const;  // throws on mixed rings
    bool operator!=(const Ideal& o) const { return !(*this == o); }
    std::vector<Vec> generators() const { return span_.rows(); }

private:
    RingHandle R_;
    ZSpan span_;
};

// Additive span of the R-submodule of R^b generated by the given vectors
// (each of length b*n, blocks of n).
ZSpan r_span(const Ring& R, int b, const std::vector<Vec>& gens);
// Row (i, t) = e_t * (row i of a b x c matrix over R); gives the additive matrix of x -> x A.
Mat additive_matrix(const Ring& R, const std::vector<std::vector<Vec>>& A, int c);

Vec norm_element(const Ring& R, const std::vector<std::vector<int>>& subgroup_gens);
std::vector<int> subgroup_elements(const Ring& R, const std::vector<std::vector<int>>& gens);

// e_chi for a character of the aux factor, chi given by exponents a_i with
// chi(delta_i) = zeta_{e_i}^{a_i}.
Vec chi_idempotent(const Ring& R, const std::vector<int>& chi);
Vec teichmuller_generator(const Ring& R);  // in GR(p^m, f), order p^f - 1

// Q-Galois orbits of characters of a finite abelian group, identified with
// exponent tuples a in prod Z/d_i; the orbit representative is the
// lexicographically least a^u with u prime to the exponent.
std::vector<int> orbit_rep(const std::vector<int>& group, const std::vector<int>& chi);
std::vector<std::vector<int>> all_orbit_reps(const std::vector<int>& group);
std::vector<std::vector<int>> orbit_members(const std::vector<int>& group, const std::vector<int>& rep);
int char_order(const std::vector<int>& group, const std::vector<int>& chi);
// value of chi at g as a fraction k / e of a full turn, reduced to k mod exp
i64 char_pairing(const std::vector<int>& group, const std::vector<int>& chi, const std::vector<int>& g, i64 expo);
int group_exponent(const std::vector<int>& group);

std::string elem_str(const Ring& R, const Vec& a);

// Ring homomorphism GR(p^m,f)[G] -> GR(p^m',f)[G'] (m' <= m) given by a group
// homomorphism on standard generators; identity on the coefficient ring.
struct RingMap {
    RingHandle src, dst;
    Mat A;  // src.n x dst.n
    Vec apply(const Vec& x) const;
    bool surjective() const;
};
RingMap group_quotient_map(const RingHandle& src, const RingHandle& dst, const std::vector<std::vector<int>>& images);
RingMap precision_map(const RingHandle& src, int m2);
Ideal map_ideal(const RingMap& f, const Ideal& I);

}  // namespace starklab
