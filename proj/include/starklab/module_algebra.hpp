#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starklab/ring_core.hpp"

namespace starklab {

// R^b modulo the R-span of the relation vectors ("columns"), each of length b*n.
class FPModule {
public:
    FPModule() = default;
    FPModule(RingHandle R, int b, std::vector<Vec> relations);
    static FPModule free(RingHandle R, int b) { return FPModule(std::move(R), b, {}); }
    // relations = minimal R-generators of an R-stable span
    static FPModule from_span(RingHandle R, int b, const ZSpan& N);
    // from a b x c matrix of ring elements, relations as columns
    static FPModule from_matrix(RingHandle R, const std::vector<std::vector<Vec>>& A);

    const RingHandle& ring() const { return R_; }
    int gens() const { return b_; }
    const std::vector<Vec>& relations() const { return rel_; }
    const ZSpan& rel_span() const { return span_; }
    int log_card() const { return R_->m() * R_->n() * b_ - span_.log_card(); }
    Vec reduce(const Vec& x) const { return span_.reduce(x); }
    bool is_zero_elem(const Vec& x) const { return span_.contains(x); }
    std::vector<std::vector<Vec>> matrix() const;  // b x c, entry (i, j) = block i of relation j

    int min_gens() const;  // dim over the residue field of M / mM (local rings)
    bool is_free() const;  // |M| = |R|^{dim M/mM}
    FPModule direct_sum(const FPModule& o) const;

    bool same_as(const FPModule& o) const { return same_ring(R_, o.R_) && b_ == o.b_ && span_ == o.span_; }

private:
    RingHandle R_;
    int b_ = 0;
    std::vector<Vec> rel_;
    ZSpan span_;
};

FPModule base_change(const FPModule& M, const RingMap& f);

// R-linear map of free modules R^b -> R^c described on generators: images[i] in R^c.
struct ModuleHom {
    FPModule source, target;
    std::vector<Vec> images;
    ModuleHom(FPModule s, FPModule t, std::vector<Vec> im);  // checks relations go to relations
    Mat additive() const;
    Vec apply(const Vec& x) const;
};

// Additive matrix of x -> x * s on R^b (blockwise multiplication by a ring element).
Mat scalar_matrix(const Ring& R, int b, const Vec& s);
// Additive matrix of R^a -> R^c, x -> sum_i x_i v_i for v_i in R^c.
Mat combo_matrix(const Ring& R, const std::vector<Vec>& v, int c);

// Minimal-ish R-generators of K modulo L (Nakayama over local rings).
std::vector<Vec> min_generators(const Ring& R, int b, const ZSpan& K, const ZSpan& L);

// K / L with K, L R-stable in R^a, L inside K.
struct Subquotient {
    FPModule module;
    std::vector<Vec> gens;  // images in R^a of the module generators
    int ambient = 0;
};
Subquotient present_subquotient(const RingHandle& R, int a, const ZSpan& K, const ZSpan& L);
// coordinates c with sum c_i gens_i = x modulo L; throws if x is outside K + L
Vec coordinates(const RingHandle& R, const std::vector<Vec>& gens, int a, const ZSpan& L, const Vec& x);

Vec det(const Ring& R, const std::vector<std::vector<Vec>>& A);  // square matrix over R
Ideal fitting_ideal(const FPModule& M, int j);
Ideal annihilator(const FPModule& M);

// Hom_R(M, R): generators are value vectors psi in R^b, psi(x) = sum psi_i x_i.
Subquotient linear_dual(const FPModule& M);
// Hom_{Z/p^m}(M, Z/p^m) with (r.phi)(x) = phi(iota(r) x); generator y acts by x -> sum_i t(x_i iota(y_i)).
Subquotient pontryagin_dual(const FPModule& M);
i64 pontryagin_pairing(const Ring& R, const Vec& x, const Vec& y);
bool pontryagin_evaluation_bijective(const FPModule& M);

std::vector<std::vector<int>> subsets(int n, int r);  // lexicographic
FPModule exterior_power(const FPModule& M, int r);

struct Bidual {
    FPModule M;
    int r = 0;
    Subquotient dual;     // M^*
    FPModule wedge_dual;  // wedge^r M^*, generators indexed by r-subsets of dual generators
    ZSpan values;         // (wedge^r M^*)^* as value vectors in R^{C(s, r)}
};
Bidual make_bidual(const FPModule& M, int r);
// canonical image of x in wedge^r M (coefficients over r-subsets of [b])
Vec bidual_values(const Bidual& B, const Vec& x);
Ideal value_ideal(const Ring& R, const Vec& values);
struct BidualImage {
    Vec values;
    Ideal image;
};
BidualImage bidual_and_image(const FPModule& M, int r, const Vec& x);
bool canonical_map_bijective(const Bidual& B);

struct TateOrders {
    int log_h0 = 0;
    int log_hm1 = 0;
};
// J = subgroup of the cyclic group G of the given order
TateOrders tate_cohomology_cyclic(const FPModule& M, int jorder);

struct YakovlevResult {
    bool ok = false;
    std::string diagnostic;
    std::map<int, int> mult;               // subgroup order p^i -> n
    std::vector<std::vector<int>> eps;     // orbit representatives of characters in 1 - e_{J_0}
    std::vector<int> fixed_logs;           // log_p |M^{J_i}|, i = 0..k
};
YakovlevResult yakovlev_decompose(const FPModule& M);
FPModule permutation_module(const RingHandle& R, const std::map<int, int>& mult);
int fixed_point_log(const FPModule& M, int jorder);
int coinvariant_log(const FPModule& M, int jorder);

// log_p |X / pX| for X = R^b / S, and whether X is free over Z/p^m
int mod_p_log(const Ring& R, int b, const ZSpan& S);
bool zp_free_quotient(const Ring& R, int b, const ZSpan& S);

std::string normal_form_str(const ZSpan& s);

}  // namespace starklab
