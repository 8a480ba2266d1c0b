#include "soficize/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace soficize::spectra {

namespace {

using torus::AtomicTorusMeasure;

LocalizedSpectralMeasure measure_from_weights(const UnitaryEigen& eig,
                                              const RealVector& weights,
                                              Index rank) {
  const Index d = eig.phases.size();
  double total = weights.sum();
  if (total <= kMassTol)
    throw DomainError("localized_spectral_measure: zero subspace");
  std::vector<AtomicTorusMeasure::Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k)
    atoms.push_back({eig.phases(k), weights(k) / total});
  LocalizedSpectralMeasure out;
  out.measure = AtomicTorusMeasure(std::move(atoms));
  out.source_dim = d;
  out.subspace_rank = rank;
  return out;
}

}  // namespace

LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const ProjectionRep& v) {
  if (v.rank() == 0)
    throw DomainError("localized_spectral_measure: zero subspace");
  Matrix m = v.basis.adjoint() * eig.vectors;  // r x d
  RealVector w = m.colwise().squaredNorm().real();
  return measure_from_weights(eig, w, v.rank());
}

LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const Frame& span) {
  if (span.cols() == 0)
    throw DomainError("localized_spectral_measure: zero subspace");
  Frame basis = linalg::is_orthonormal(span)
                    ? span
                    : linalg::symmetric_orthonormalize(span);
  return localized_spectral_measure(
      eig, ProjectionRep(span.rows(), std::move(basis)));
}

LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const Vector& xi) {
  double n = xi.norm();
  if (n <= kMassTol)
    throw DomainError("localized_spectral_measure: zero vector");
  RealVector w = (eig.vectors.adjoint() * (xi / n)).cwiseAbs2();
  return measure_from_weights(eig, w, 1);
}

LocalizedSpectralMeasure localized_spectral_measure_complement(
    const UnitaryEigen& eig, const ProjectionRep& p) {
  const Index d = eig.phases.size();
  if (p.rank() >= d)
    throw DomainError("localized_spectral_measure_complement: zero subspace");
  RealVector w = RealVector::Ones(d);
  if (!p.is_zero()) {
    Matrix m = p.basis.adjoint() * eig.vectors;
    w -= m.colwise().squaredNorm().real();
    w = w.cwiseMax(0.0);
  }
  return measure_from_weights(eig, w, d - p.rank());
}

LocalizedSpectralMeasure localized_spectral_measure(const Matrix& u,
                                                    const ProjectionRep& v) {
  return localized_spectral_measure(linalg::unitary_eigendecomposition(u), v);
}

LocalizedSpectralMeasure localized_spectral_measure(const Matrix& u,
                                                    const Frame& span) {
  return localized_spectral_measure(linalg::unitary_eigendecomposition(u), span);
}

BoundPair trace_vs_ds_check(const UnitaryEigen& eig, const ProjectionRep& p,
                            int N) {
  if (p.rank() == 0) throw DomainError("trace_vs_ds_check: zero projection");
  // tr(pu) as sum_k lambda_k ||p theta_k||^2
  Matrix m = p.basis.adjoint() * eig.vectors;
  RealVector w = m.colwise().squaredNorm().real();
  Complex tr(0, 0);
  for (Index k = 0; k < w.size(); ++k)
    tr += w(k) * std::exp(Complex(0, 2.0 * std::numbers::pi * eig.phases(k)));
  BoundPair out;
  out.lhs = std::abs(tr) / static_cast<double>(p.rank());
  out.rhs = torus::ds_n(localized_spectral_measure(eig, p).measure, N) +
            2.0 / static_cast<double>(N);
  return out;
}

BoundPair trace_vs_ds_check(const Matrix& u, const ProjectionRep& p, int N) {
  return trace_vs_ds_check(linalg::unitary_eigendecomposition(u), p, N);
}

double set_mass(const torus::AtomicTorusMeasure& mu, const IntervalSet& e) {
  double s = 0;
  for (const auto& [a, b] : e) {
    if (a < 0.0 || b > 1.0 || a > b)
      throw DomainError("set_mass: interval outside [0,1)");
    s += mu.interval_mass(a, b);
  }
  return s;
}

double interval_projection_mass(const UnitaryEigen& eig, const ProjectionRep& p,
                                const IntervalSet& e) {
  return set_mass(localized_spectral_measure(eig, p).measure, e);
}

DsTraceBound ds_power_trace_bound(const UnitaryEigen& eig, int M, int N) {
  if (M < 1) throw DomainError("ds_power_trace_bound: M must be >= 1");
  if (N < 1) throw DomainError("ds_power_trace_bound: N must be >= 1");
  const Index d = eig.phases.size();
  DsTraceBound out;
  RealVector uniform = RealVector::Ones(d);
  out.ds_exact = torus::ds_n(measure_from_weights(eig, uniform, d).measure, N);

  // tr(u^k) = sum_j exp(2 pi i k phase_j)
  out.trace_moments.resize(static_cast<std::size_t>(M));
  double moment_sum = 0;
  for (int k = 1; k <= M; ++k) {
    Complex tr(0, 0);
    for (Index j = 0; j < d; ++j)
      tr += std::exp(Complex(0, 2.0 * std::numbers::pi * k * eig.phases(j)));
    double norm_tr = std::abs(tr) / static_cast<double>(d);
    out.trace_moments[static_cast<std::size_t>(k - 1)] = norm_tr;
    moment_sum += norm_tr / static_cast<double>(k);
  }
  // Erdos-Turan with deliberately conservative constants, then
  // ds_n <= N * (extreme interval discrepancy) <= 2N * (star discrepancy).
  double star = 6.0 / (static_cast<double>(M) + 1.0) + 4.0 * moment_sum;
  out.et_bound = 2.0 * static_cast<double>(N) * star;
  return out;
}

DsTraceBound ds_power_trace_bound(const Matrix& u, int M, int N) {
  return ds_power_trace_bound(linalg::unitary_eigendecomposition(u), M, N);
}

BoundPair span_ds_bound(const UnitaryEigen& eig, const Frame& xs, double eta,
                        int N) {
  const Index n = xs.cols();
  if (n == 0) throw DomainError("span_ds_bound: empty frame");
  if (eta > 1.0 / static_cast<double>(n) + 1e-15)
    throw DomainError("span_ds_bound: eta must be <= 1/n");
  double measured = linalg::max_offdiag_abs(linalg::gram(xs));
  if (measured > eta + 1e-12)
    throw DomainError("span_ds_bound: pairwise overlap " +
                      std::to_string(measured) + " exceeds eta " +
                      std::to_string(eta));
  BoundPair out;
  out.lhs = torus::ds_n(localized_spectral_measure(eig, xs).measure, N);
  double avg = 0;
  for (Index k = 0; k < n; ++k)
    avg += torus::ds_n(localized_spectral_measure(eig, Vector(xs.col(k))).measure, N);
  avg /= static_cast<double>(n);
  out.rhs = avg + 2.0 * eta * static_cast<double>(n);
  return out;
}

BoundPair persist_bound(const UnitaryEigen& eig, const ProjectionRep& p,
                        const Frame& xs, double delta, int N) {
  const Index d = eig.phases.size();
  const Index n = xs.cols();
  std::ostringstream bad;
  if (n > 0 && 2.0 * delta > 1.0 / static_cast<double>(n) + 1e-15)
    bad << "[2*delta <= 1/n fails] ";
  if (2 * p.rank() > d) bad << "[tr(p) <= d/2 fails] ";
  double kappa_meas = 0;
  for (Index k = 0; k < n; ++k)
    kappa_meas = std::max(kappa_meas, p.apply(xs.col(k)).norm());
  if (kappa_meas > 0.1 + 1e-12) bad << "[max ||p xi_k|| <= 1/10 fails] ";
  Frame comp(d, n);
  for (Index k = 0; k < n; ++k) comp.col(k) = p.complement_apply(xs.col(k));
  double offdiag = n > 0 ? linalg::max_offdiag_abs(Matrix(comp.adjoint() * xs)) : 0.0;
  if (offdiag > delta + 1e-12)
    bad << "[pairwise |<(I-p)xi_j, xi_k>| <= delta fails, measured " << offdiag
        << "] ";
  if (!bad.str().empty())
    throw DomainError("persist_bound: hypothesis failure: " + bad.str());

  // q projects onto span(pH, xs); its complement carries the lhs measure.
  ProjectionRep q = p;
  if (n > 0) {
    auto dec = linalg::complement_decompose(p, xs, delta, 0.1,
                                            linalg::PreconditionPolicy::monitored);
    Frame qb(d, p.rank() + n);
    if (p.rank() > 0) qb.leftCols(p.rank()) = p.basis;
    qb.rightCols(n) = dec.thetas;
    q = ProjectionRep(d, std::move(qb));
  }
  if (q.rank() >= d)
    throw DomainError("persist_bound: span(pH, xs) exhausts the space");

  BoundPair out;
  out.lhs =
      torus::ds_n(localized_spectral_measure_complement(eig, q).measure, N);
  double ds_ip =
      torus::ds_n(localized_spectral_measure_complement(eig, p).measure, N);
  double vec_sum = 0;
  for (Index k = 0; k < n; ++k)
    vec_sum +=
        torus::ds_n(localized_spectral_measure(eig, Vector(comp.col(k))).measure, N);
  double nd = static_cast<double>(n), dd = static_cast<double>(d);
  out.rhs = (1.0 + 4.0 * nd / dd) *
            (ds_ip + (2.0 / dd) * (4.0 * delta * nd * nd + vec_sum));
  return out;
}

}  // namespace soficize::spectra
