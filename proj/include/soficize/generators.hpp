#pragma once

#include <cstdint>
#include <string>

#include "soficize/sofic.hpp"
#include "soficize/types.hpp"

namespace soficize::gen {

enum class Kind { exact_shift, perturbed_shift, haar_noise, sofic_seeded };

Kind kind_from_string(const std::string& s);
std::string to_string(Kind k);

struct GenConfig {
  Kind kind = Kind::exact_shift;
  int rank = 1;
  Index dim = 101;          // rank >= 2 requires dim = side^rank
  double noise = 0.0;       // eta for perturbed_shift
  int support_radius = 8;   // elements materialized: the box of this radius
  Index tile = 0;           // sofic_seeded tile side (0: ~sqrt(dim))
  std::uint64_t seed = 0;
};

// Torus translation permutations conjugated by a seeded Haar unitary;
// perturbed_shift multiplies in exp(i eta H_g) with per-element Hermitian
// noise normalized to ||H||_HS = sqrt(d), so matrices stay exactly unitary.
sofic::HyperlinearApprox generate_test_approx(const GenConfig& cfg);

// Partial translation action on tiles of {0..point_count-1}, wrapped
// cyclically inside each tile and conjugated by a seeded permutation of the
// point set; a good sofic approximation with boundary-sized defects.
sofic::SoficApprox seeded_sofic(int rank, Index point_count, Index tile,
                                std::uint64_t seed, int support_radius);

// grid sides for a rank-r torus model of the given dimension
std::vector<Index> grid_sides(int rank, Index dim);

}  // namespace soficize::gen
