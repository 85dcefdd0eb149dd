#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "starklab/module_algebra.hpp"
#include "starklab/selmer_formalism.hpp"

// Exhaustive-enumeration counterparts of the main algorithms.  Nothing here
// touches Howell forms; everything is sets of explicit vectors.
namespace starklab::oracle {

using Code = std::uint64_t;
using CodeSet = std::unordered_set<Code>;

struct Codec {
    i64 q = 2;
    int len = 0;
    Code encode(const Vec& v) const;
    Vec decode(Code c) const;
    Code size() const;  // q^len, throws if too large
};

std::vector<Vec> all_vectors(i64 q, int len, Code cap = 2000000);
CodeSet closure(const Codec& C, const Zmod& z, const std::vector<Vec>& seeds);  // additive subgroup
CodeSet ideal_set(const Ring& R, const std::vector<Vec>& gens);
bool member(const Codec& C, const CodeSet& S, const Vec& v);

Vec leibniz_det(const Ring& R, const std::vector<std::vector<Vec>>& A);
CodeSet fitting_set(const FPModule& M, int j);

// all R-linear functionals on M, as value vectors on the generators
std::vector<Vec> functionals(const FPModule& M);
CodeSet bidual_image_set(const FPModule& M, int r, const Vec& x);

// elements of M as canonical codes of R^b modulo relations, by closure
i64 module_order(const FPModule& M);

// Enumerated ideal as a set of codes for the main-path comparison
CodeSet ideal_codes(const Ideal& I);

// Stark systems of rank r and depth one by enumeration: Selmer modules as subsets of
// R^ell, duals as explicit functionals, biduals as alternating forms filtered by the
// exterior relations, and the transition maps evaluated term by term.
struct StarkEnumeration {
    int log_card = 0;                // log_p |SS_r|
    std::vector<CodeSet> value_ideals;  // j = 0, 1: ideal of all values over nu(n) = j
    std::uint64_t candidates = 0;
};
StarkEnumeration stark_enumerate(const SelmerInstance& inst, const std::string& tag, int r, Code cap = 2000000);

// Lattices in R / (K + p^prec R) by enumeration; gens and kernel rows are elements of R.
CodeSet lattice_set(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int prec);
// all y in R with y * g in p^t I for every generator g of I
CodeSet stabilizer_set(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int t, int prec, Code cap = 600000);
// some single element of I generates I modulo K + p^prec
bool principal_by_search(const Ring& R, const std::vector<Vec>& gens, const std::vector<Vec>& kernel, int prec);

}  // namespace starklab::oracle
