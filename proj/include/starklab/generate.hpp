#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "starklab/etnc_lattice.hpp"
#include "starklab/selmer_formalism.hpp"

namespace starklab {

struct GeneratorParams {
    std::uint64_t seed = 1;
    int p = 3;
    int m = 1;
    int f = 1;
    std::vector<int> group{3};
    int core_places = 1;
    int aux_primes = 2;
    int depth = 2;
    int chi = -1;           // -1: pick from the seed in {0, 1, 2}
    int vertex_depth = -1;  // -1: pick from the seed in [0, min(depth, aux)]
    std::string recipe = "cartesian";  // cartesian | non-cartesian | core-vertex-at-depth-k | stark | etnc-basic | tower
};

// Bit-exact across platforms: only raw mt19937_64 output is used, reduced by %.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    std::uint64_t next() { return g_(); }
    int below(int k) { return static_cast<int>(g_() % static_cast<std::uint64_t>(k)); }
    i64 below(i64 k) { return static_cast<i64>(g_() % static_cast<std::uint64_t>(k)); }
    Vec elem(const Ring& R);
    Vec unit(const Ring& R);
    Vec nonunit(const Ring& R);

private:
    std::mt19937_64 g_;
};

void check_generator_bounds(const GeneratorParams& gp);
SelmerInstance generate_selmer(const GeneratorParams& gp);
// H^2 diagonal up to a unit matrix, basic element det * unit, L* = lambda(basic) * unit
EtncInstance generate_etnc(const GeneratorParams& gp);
// source G in {C9, C3 x C3} (taken from gp.group when it has order 9) mapping onto C3
TowerInstance generate_tower(const GeneratorParams& gp);

}  // namespace starklab
