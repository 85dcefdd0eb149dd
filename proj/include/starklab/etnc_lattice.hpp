#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "starklab/module_algebra.hpp"

namespace starklab {

struct InsufficientPrecision : std::runtime_error {
    int required_h;
    InsufficientPrecision(const std::string& what, int need) : std::runtime_error(what), required_h(need) {}
};

// Galois-stable set of characters of G, as sorted orbit representatives.
using EpsDescriptor = std::vector<std::vector<int>>;
EpsDescriptor eps_all(const std::vector<int>& group);
EpsDescriptor eps_normalize(const std::vector<int>& group, const EpsDescriptor& eps);
int eps_character_count(const std::vector<int>& group, const EpsDescriptor& eps);
// |G| * sum of e_chi over eps, an element of Z[G] (coefficients on group elements)
std::vector<i64> scaled_idempotent(const std::vector<int>& group, const EpsDescriptor& eps);

// Lambda_eps / p^N presented as GR(p^N, f)[G] modulo the eps-kernel K_N.
struct EpsRing {
    int p = 3, f = 1, N = 1, h = 0;
    std::vector<int> group;
    EpsDescriptor eps;
    RingHandle R;  // precision N
    ZSpan kernel;  // K_N
    int rank = 0;  // free rank of Lambda_eps over Z/p^N

    static EpsRing make(int p, int f, const std::vector<int>& group, const EpsDescriptor& eps, int N, int h);
    // least s < prec with p^s in y Lambda_eps (mod p^prec), or -1
    int unit_exponent(const Vec& y, int prec) const;
};

// p^(-e) * y with y known modulo p^prec
struct ScaledElem {
    Vec y;
    int e = 0;
    int prec = 0;
};
ScaledElem scaled(const EpsRing& C, Vec y, int e = 0);
ScaledElem se_mul(const EpsRing& C, const ScaledElem& a, const ScaledElem& b);
// both throw InsufficientPrecision
ScaledElem se_div(const EpsRing& C, const ScaledElem& a, const ScaledElem& b);
ScaledElem se_inverse(const EpsRing& C, const ScaledElem& a);

// p^(-e) * L with L inside Lambda_eps, containing p^t Lambda_eps (t < prec), stored as the
// preimage of L mod p^prec in GR(p^N, f)[G].  Normal form: L not inside p Lambda_eps.
class FractionalLattice {
public:
    FractionalLattice() = default;
    static FractionalLattice from_gens(const EpsRing& C, const std::vector<ScaledElem>& gens);
    static FractionalLattice integral(const EpsRing& C) { return from_gens(C, {scaled(C, C.R->one())}); }

    int offset() const { return e_; }
    int precision() const { return prec_; }
    int exponent() const { return t_; }  // least t with p^t Lambda_eps inside L
    const ZSpan& span() const { return S_; }

    FractionalLattice times(const EpsRing& C, const FractionalLattice& o) const;
    FractionalLattice scale(const EpsRing& C, const ScaledElem& a) const;
    bool equals(const EpsRing& C, const FractionalLattice& o) const;
    bool contains(const EpsRing& C, const FractionalLattice& o) const;
    // canonical text: offset, precision and Howell rows of the integral part
    std::string normal_form() const;

private:
    int e_ = 0, prec_ = 0, t_ = 0;
    ZSpan S_;
    static FractionalLattice build(const EpsRing& C, int e, int prec, ZSpan S);
    ZSpan at(const EpsRing& C, int e, int prec) const;  // p^(e - e_) * L at common offset e
};

// cohomological shadow: H^1 free of rank r, basic element eta_b = beta * (basis wedge),
// lambda(basis wedge), leading term, H^2 finite
struct EtncInstance {
    int p = 3, m = 1, f = 1, h = 2;
    std::vector<int> group;
    EpsDescriptor eps;
    int r = 1;
    Vec basic;   // beta, at precision m + h
    int h2_gens = 0;
    std::vector<Vec> h2_relations;
    ScaledElem lambda;
    ScaledElem lstar;
    int working_precision() const { return m + h; }
};

void validate_etnc(const EtncInstance& inst);

enum class Verdict { pass, fail, insufficient_precision };
std::string verdict_keyword(Verdict v);

struct BkReport {
    Verdict verdict = Verdict::fail;
    ScaledElem eta;  // coefficient of eta on the basis wedge
    FractionalLattice im_eta, xi, fitt, product;
    int required_h = 0;
    std::string detail;
};
BkReport bk_image_check(const EtncInstance& inst);
// same instance recomputed with one more unit of headroom
bool headroom_stable(const EtncInstance& inst);

// R * Xi == R for an order R (default: the integral Lambda_eps)
bool tnc_check(const EpsRing& C, const FractionalLattice& xi, const std::optional<FractionalLattice>& order = std::nullopt);

struct AssocOrder {
    FractionalLattice order;
    ZSpan stabilizer;  // integral part Y with order = p^(-t) Y
    int t = 0;
    bool principal = false;  // min_order verdict
    bool order_is_integral = false;
    bool cyclic = false;  // group cyclic: Lambda_eps is monogenic, hence Gorenstein
};
AssocOrder associated_order(const EpsRing& C, const FractionalLattice& I);

// Euler factors
using Rational = boost::rational<long long>;
using RatPoly = std::vector<Rational>;  // low degree first
struct EllipticEuler {
    RatPoly poly;
    bool weil = false;
};
EllipticEuler euler_poly_elliptic(long long a, long long ell, int p);
RatPoly euler_poly_matrix(const std::vector<std::vector<Rational>>& frob);
// det(1 - Fr^-1 x) over R, with Fr invertible over R; coefficients are ring elements
std::vector<Vec> euler_poly_ring(const Ring& R, const std::vector<std::vector<Vec>>& frob);
Vec rational_to_ring(const Ring& R, const Rational& c);
// prod_q P_q(g_q^-1) in R, P_q given with coefficients in Z_(p)
Vec euler_product(const Ring& R, const std::vector<std::pair<RatPoly, int>>& factors);

// codescent along G -> G/H, the map given by images of the standard generators
struct TowerInstance {
    RingSpec source;
    std::vector<int> target_group;
    std::vector<std::vector<int>> images;  // one exponent tuple per source generator
    int h2_gens = 0;
    std::vector<Vec> h2_relations;
    int r = 1, d = 1;  // H^1 free of rank d, element in wedge^r
    Vec element;       // coefficients over r-subsets of [d]
};
struct CodescentReport {
    bool fitting_ok = false;
    bool image_ok = false;
    Ideal source_fitt, target_fitt, source_image, target_image;
    bool ok() const { return fitting_ok && image_ok; }
};
Vec project(const Ring& src, const Ring& dst, const std::vector<std::vector<int>>& images, const Vec& x);
CodescentReport codescent_check(const TowerInstance& T);

// Artin induction for abelian G: m * phi = sum_H n_H Ind_H^G 1.  phi maps character
// exponent tuples to multiplicities (missing = 0) and must be constant on Galois orbits.
struct Subgroup {
    std::vector<std::vector<int>> gens;  // canonical generating tuples
    int order = 1;
    std::vector<int> elems;  // element indices, lexicographic exponent order
};
std::vector<Subgroup> all_subgroups(const std::vector<int>& group);
struct ArtinDecomposition {
    long long m = 1;
    std::vector<std::pair<Subgroup, long long>> coeffs;  // nonzero n_H only
};
ArtinDecomposition artin_decompose(const std::vector<int>& group, const std::map<std::vector<int>, long long>& phi);
// multiplicities keyed by orbit representative, zeros dropped
std::map<std::vector<int>, long long> orbit_multiplicities(const std::vector<int>& group, const std::map<std::vector<int>, long long>& phi);
// character multiplicities of sum n_H Ind_H^G 1, keyed by orbit representative
std::map<std::vector<int>, long long> artin_assemble(const std::vector<int>& group,
                                                     const std::vector<std::pair<Subgroup, long long>>& coeffs);

}  // namespace starklab
