#include "soficize/sphere.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "soficize/linalg.hpp"

namespace soficize::sphere {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0,1] and [0,1) from a fully specified engine.
double uniform_pos(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}
double uniform_half_open(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

SeededSampler SeededSampler::substream(std::uint64_t label) const {
  return SeededSampler(splitmix64(seed ^ splitmix64(label)), 0);
}

RealVector sample_gaussians(Index n, SeededSampler& sampler) {
  if (n < 0) throw DomainError("sample_gaussians: n must be >= 0");
  std::mt19937_64 rng(splitmix64(sampler.seed) ^ splitmix64(sampler.counter));
  ++sampler.counter;
  RealVector out(n);
  for (Index i = 0; i < n; i += 2) {
    double u1 = uniform_pos(rng);
    double u2 = uniform_half_open(rng);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    out(i) = r * std::cos(a);
    if (i + 1 < n) out(i + 1) = r * std::sin(a);
  }
  return out;
}

Vector sample_unit_vector(Index d, SeededSampler& sampler) {
  if (d < 1) throw DomainError("sample_unit_vector: dimension must be >= 1");
  RealVector g = sample_gaussians(2 * d, sampler);
  Vector xi(d);
  for (Index i = 0; i < d; ++i) xi(i) = Complex(g(2 * i), g(2 * i + 1));
  return xi / xi.norm();
}

Matrix sample_haar_unitary(Index d, SeededSampler& sampler) {
  if (d < 1) throw DomainError("sample_haar_unitary: dimension must be >= 1");
  RealVector g = sample_gaussians(2 * d * d, sampler);
  Matrix z(d, d);
  Index t = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i, ++t) z(i, j) = Complex(g(2 * t), g(2 * t + 1));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    Complex rjj = r(j, j);
    double a = std::abs(rjj);
    q.col(j) *= (a > 0) ? rjj / a : Complex(1, 0);
  }
  return q;
}

double geodesic_distance(const Vector& xi, const Vector& eta) {
  if (xi.size() != eta.size())
    throw StructuralError("geodesic_distance: dimension mismatch");
  double c = std::real(eta.dot(xi));
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

Complex trace_monte_carlo(const Matrix& s, Index n_samples,
                          SeededSampler& sampler) {
  if (s.rows() != s.cols())
    throw StructuralError("trace_monte_carlo: matrix must be square");
  if (n_samples < 1) throw DomainError("trace_monte_carlo: n_samples must be >= 1");
  Complex acc(0, 0);
  for (Index i = 0; i < n_samples; ++i) {
    Vector xi = sample_unit_vector(s.rows(), sampler);
    acc += xi.dot(s * xi);  // <s xi, xi>
  }
  return acc / static_cast<double>(n_samples);
}

ConcentrationReport concentration_experiment(const Matrix& s, double c,
                                             Index n_samples,
                                             SeededSampler& sampler,
                                             ConcentrationMode mode) {
  if (c <= 0) throw DomainError("concentration_experiment: c must be > 0");
  if (s.rows() != s.cols())
    throw StructuralError("concentration_experiment: matrix must be square");
  const Index d = s.rows();
  ConcentrationReport rep;
  rep.dimension = d;
  rep.samples = n_samples;
  rep.deviation = c;
  rep.mode = mode;

  const Complex mean_target = s.trace() / static_cast<double>(d);
  const double hs2_over_d = s.squaredNorm() / static_cast<double>(d);
  Index hits = 0;
  for (Index i = 0; i < n_samples; ++i) {
    Vector xi = sample_unit_vector(d, sampler);
    Vector sxi = s * xi;
    bool ok;
    if (mode == ConcentrationMode::quadratic_form)
      ok = std::abs(xi.dot(sxi) - mean_target) <= c;
    else
      ok = sxi.squaredNorm() <= c + hs2_over_d;
    if (ok) ++hits;
  }
  rep.empirical_success =
      n_samples > 0 ? static_cast<double>(hits) / static_cast<double>(n_samples)
                    : 1.0;

  double op = linalg::op_norm(s);
  if (op == 0.0) {
    rep.paper_bound = 1.0;
  } else {
    double denom = (mode == ConcentrationMode::quadratic_form)
                       ? 8.0 * op * op
                       : 8.0 * op * op * op * op;
    double bound =
        1.0 - 2.0 * std::exp(-c * c * (2.0 * static_cast<double>(d) - 1.0) / denom);
    rep.paper_bound = std::clamp(bound, 0.0, 1.0);
  }
  return rep;
}

}  // namespace soficize::sphere
