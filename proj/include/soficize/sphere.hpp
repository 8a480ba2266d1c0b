#pragma once

#include <cstdint>

#include "soficize/types.hpp"

namespace soficize::sphere {

// Counter-based sampler: draw k of stream (seed) is a pure function of
// (seed, k), so replay and parallel use with disjoint counter ranges are
// exact. Gaussians come from a hand-rolled Box-Muller over mt19937_64 to
// keep the stream identical across standard libraries.
struct SeededSampler {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  explicit SeededSampler(std::uint64_t seed_, std::uint64_t counter_ = 0)
      : seed(seed_), counter(counter_) {}

  // Independent stream for a labelled subtask.
  SeededSampler substream(std::uint64_t label) const;
};

// n independent standard real Gaussians from draw index `sampler.counter`;
// advances the counter by one.
RealVector sample_gaussians(Index n, SeededSampler& sampler);

// Uniform draw from the unit sphere of C^d (2d normalized Gaussians).
Vector sample_unit_vector(Index d, SeededSampler& sampler);

// Haar-distributed d x d unitary (QR of a Ginibre matrix with the
// R-diagonal phase fix).
Matrix sample_haar_unitary(Index d, SeededSampler& sampler);

// arccos of Re<xi, eta>, clipped to [-1, 1]; dominates the chord ||xi-eta||.
double geodesic_distance(const Vector& xi, const Vector& eta);

// Monte Carlo estimate of tr(s)/d as the mean of <s xi, xi>.
Complex trace_monte_carlo(const Matrix& s, Index n_samples,
                          SeededSampler& sampler);

enum class ConcentrationMode {
  quadratic_form,  // |<s xi, xi> - tr(s)/d| <= c
  vector_norm      // ||s xi||^2 <= c + ||s||_HS^2 / d
};

struct ConcentrationReport {
  Index dimension = 0;
  Index samples = 0;
  double deviation = 0;  // c
  ConcentrationMode mode = ConcentrationMode::quadratic_form;
  double empirical_success = 0;
  double paper_bound = 0;  // 1 - 2 exp(-c^2 (2d-1) / (8 ||s||_op^k)), clipped
};

ConcentrationReport concentration_experiment(
    const Matrix& s, double c, Index n_samples, SeededSampler& sampler,
    ConcentrationMode mode = ConcentrationMode::quadratic_form);

}  // namespace soficize::sphere
