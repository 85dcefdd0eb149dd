#pragma once

#include <string>
#include <vector>

#include "starklab/selmer_formalism.hpp"

namespace starklab {

// Stark systems of rank r over square-free n with nu(n) <= depth.  The component
// eps_n lives in the bidual of the n-relaxed Selmer module and is stored as its
// values on the wedge generators of the dual.  Transition n -> n q (q not in n):
//   iota(eps_n) = (-1)^(nu(nq) - pos(q)) * (v_q contracted into eps_nq)
// with pos(q) the 1-based position of q in nq under the global place order,
// v_q = phi_fs(q)^-1 * (transverse coordinate at q), contracted in the last slot,
// and iota induced by restricting functionals from the larger Selmer module.
struct StarkVertex {
    PlaceMask n = 0;
    std::string label;
    int nu = 0;
    Subquotient selmer;
    Bidual bidual;
    int offset = 0;  // first ring-element slot in the concatenated system
    int width = 0;   // number of wedge generators
};

struct StarkSolution {
    std::string tag;
    int r = 0, depth = 0, level = 0;
    RingHandle ring;
    std::vector<StarkVertex> vertices;
    int total = 0;
    ZSpan systems;          // the module SS_r inside R^total
    Subquotient structure;  // minimal presentation of SS_r
    bool free_rank_one = false;
    int min_gens = 0;
    std::vector<Vec> generators;

    Vec component(const Vec& eps, int vertex) const;
    bool generates(const Vec& eps) const;
};

StarkSolution stark_solve(const SelmerInstance& inst, const std::string& tag, int r, int depth, int level = 0);

// I_j(eps): ideal generated by the values of eps_n over nu(n) = j
Ideal ij_invariant(const StarkSolution& S, const Vec& eps, int j);

struct StarkFittingReport {
    std::vector<Ideal> ij, fitt;
    std::vector<bool> contained, equal;
    bool generator = false;
    bool all_equal = true;
    bool biconditional = true;  // all equal <-> generator
};
// compares I_j(eps) with Fitt^j of the Pontryagin dual of the dual Selmer module
StarkFittingReport stark_fitting_report(const SelmerInstance& inst, const StarkSolution& S, const Vec& eps, int jmax);

}  // namespace starklab
