#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starklab/module_algebra.hpp"

namespace starklab {

// Local data at one place.  V_v = R^rank, pairing B(x, y) = sum_ij x_i M_ij iota(y_j),
// read as a Z/p^m-valued pairing through the trace of the identity coefficient.
// Auxiliary places have rank 2 with coordinates (finite, transverse), the fixed
// hyperbolic pairing and finite condition R e_f.
struct Place {
    std::string label;
    bool aux = false;
    int rank = 0;
    std::vector<std::vector<Vec>> pairing;
    std::map<std::string, std::vector<Vec>> conditions;           // structure tag -> generators of F_v
    std::map<std::string, std::vector<Vec>> residual_conditions;  // optional, over the residue field
    Vec phi_fs;                                                   // aux only, must be a unit
    int h0_residual = 0;
    std::optional<int> h0_rank;
};

using PlaceMask = std::uint32_t;

// Global data: H_glob = R^global_rank with localization rows loc[i] in V = sum_v V_v.
// Modified structures relax (full local condition) or strictify (zero) at the places
// of a mask; square-free products of auxiliary primes are masks over aux places.
struct SelmerInstance {
    RingSpec ring;
    std::vector<Place> places;  // core places first, then aux places in the fixed order
    int global_rank = 0;
    std::vector<Vec> loc;
    std::vector<Vec> dual_global;  // generators of the dual global module inside V
    int depth = 0;
    std::map<std::string, bool> flags;
    std::string recipe;

    int ambient() const;  // N = sum of ranks
    int offset(int v) const;
    std::vector<int> aux_places() const;
    std::vector<std::string> tags() const;
    RingHandle ring_at(int level) const;
    int level() const { return ring.m; }
};

enum class Side { primal, dual };

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;
    std::vector<Check> hypotheses;  // computed or declared, reported but not fatal
    bool ok() const;
};

ValidationReport validate_instance(const SelmerInstance& inst);

PlaceMask mask_of(const SelmerInstance& inst, const std::vector<int>& aux_indices);
std::string mask_label(const SelmerInstance& inst, PlaceMask n);
int nu(PlaceMask n);
// all masks over aux places with at most d primes, ordered by size then lexicographically
std::vector<PlaceMask> square_free_masks(const SelmerInstance& inst, int d);

// Selmer module as a submodule of H_glob (primal) or of V (dual), at level m' (0 = full level).
// On the dual side relax/strict act on the dual structure.
Subquotient selmer_module(const SelmerInstance& inst, Side side, const std::string& tag, PlaceMask relax, PlaceMask strict,
                          int level = 0);
// same over the residue field, using the coinvariant residual data
int residual_selmer_dim(const SelmerInstance& inst, Side side, const std::string& tag, PlaceMask relax, PlaceMask strict);
// local condition spans inside V at level m' (before modification)
ZSpan condition_span(const SelmerInstance& inst, const std::string& tag, PlaceMask relax, PlaceMask strict, int level = 0);
ZSpan perp(const SelmerInstance& inst, const ZSpan& X, int level = 0);
ZSpan global_image(const SelmerInstance& inst, int level = 0);

struct CoreRank {
    int chi = 0;
    int dim_primal = 0;
    int dim_dual = 0;
    std::optional<int> declared_sum;
    bool formula_ok = true;
};
CoreRank core_rank(const SelmerInstance& inst, const std::string& tag);

struct VertexCert {
    PlaceMask n = 0;
    std::string label;
    int nu = 0;
    bool selmer_free = false;
    int rank = 0;  // minimal number of generators of the relaxed Selmer module
    bool dual_zero = false;
    bool residual_dual_zero = false;  // level-one shortcut
    bool vertex = false;
    int expected_rank = 0;
};
std::vector<VertexCert> core_vertex_search(const SelmerInstance& inst, const std::string& tag, int depth, int level = 0);

struct PlaceVerdict {
    std::string label;
    bool pass = false;
    std::string detail;
};
struct CartesianReport {
    std::vector<PlaceVerdict> places;
    bool cartesian = true;
};
CartesianReport cartesian_check(const SelmerInstance& inst, const std::string& tag);
// quotient map V/F at level one -> V/F at level m' induced by multiplication by p^(m'-1)
std::vector<PlaceVerdict> level_injectivity(const SelmerInstance& inst, const std::string& tag, int level);

struct FreeReport {
    std::string tag;
    std::vector<bool> exists_at_level;  // index m' - 1
    bool injective_all = true;
    bool cartesian = false;
    bool killable = false;
    bool equivalence = true;   // existence at every level <-> cartesian
    bool propagation = true;   // level one <-> level m
    bool ranks_ok = true;      // every vertex has rank chi + nu
    bool shortcut_ok = true;   // residual criterion agrees where a vertex exists
    int chi = 0;
    std::vector<std::string> notes;
    bool violation() const { return !(equivalence && propagation && ranks_ok && shortcut_ok); }
};
FreeReport theorem_free_report(const SelmerInstance& inst, const std::string& tag);

}  // namespace starklab
