#pragma once

#include <string>
#include <vector>

#include "soficize/sofic.hpp"
#include "soficize/types.hpp"

namespace soficize::abelian {

// Matching of eigenvectors to the phases of a single d-cycle: eigenvector k
// (phases sorted ascending) is assigned target ((k + offset) mod d) / d.
struct RoundingPlan {
  Index offset = 0;                 // best cyclic rotation, scanned exhaustively
  std::vector<Index> targets;       // eigenvector k -> target index
  std::vector<double> phase_errors; // |lambda_k - target|
};

struct OracleResult {
  sofic::SoficInducedApprox beta;  // single d-cycle in the rotated eigenbasis
  double distance = 0;             // ||u - beta(1)||_HS^2 / d
  RoundingPlan plan;
};

// Rounds the eigenvalues of a unitary to the d-th roots of unity, keeping
// its eigenvectors; the support of the emitted permutation family covers
// shifts in [-support_radius, support_radius].
OracleResult round_eigenvalues_to_permutation(const Matrix& u,
                                              int support_radius = 1);

struct MultiOracleResult {
  bool declined = false;
  std::string reason;
  sofic::SoficInducedApprox beta;
  std::vector<double> distances;  // per generator
  double distance = 0;            // max over generators
};

// Componentwise rounding for commuting generator families of Z^r on a
// d_1 x ... x d_r grid (prod d_i must equal the dimension). Declines when
// the generators fail to commute within commute_tol (Hilbert-Schmidt,
// normalized) or the joint diagonalization residual is too large.
MultiOracleResult round_commuting_generators(const std::vector<Matrix>& gens,
                                             const std::vector<Index>& grid,
                                             int support_radius = 1,
                                             double commute_tol = 1e-6);

}  // namespace soficize::abelian
