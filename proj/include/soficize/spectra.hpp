#pragma once

#include <utility>
#include <vector>

#include "soficize/linalg.hpp"
#include "soficize/torus_measure.hpp"
#include "soficize/types.hpp"

namespace soficize::spectra {

using linalg::Frame;
using linalg::ProjectionRep;
using linalg::UnitaryEigen;

// Eigenphase distribution of a unitary weighted by eigenvector overlap with
// a subspace; masses ||p theta_k||^2 / rank sum to 1.
struct LocalizedSpectralMeasure {
  torus::AtomicTorusMeasure measure;
  Index source_dim = 0;
  Index subspace_rank = 0;
};

LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const ProjectionRep& v);
// Frame columns span the subspace (orthonormalized internally).
LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const Frame& span);
LocalizedSpectralMeasure localized_spectral_measure(const UnitaryEigen& eig,
                                                    const Vector& xi);
// Subspace = orthogonal complement of range(p).
LocalizedSpectralMeasure localized_spectral_measure_complement(
    const UnitaryEigen& eig, const ProjectionRep& p);

LocalizedSpectralMeasure localized_spectral_measure(const Matrix& u,
                                                    const ProjectionRep& v);
LocalizedSpectralMeasure localized_spectral_measure(const Matrix& u,
                                                    const Frame& span);

struct BoundPair {
  double lhs = 0;
  double rhs = 0;
  bool holds(double tol = 0) const { return lhs <= rhs + tol; }
};

// |tr(pu)|/tr(p) against ds_n(S_u(p)) + 2/N.
BoundPair trace_vs_ds_check(const Matrix& u, const ProjectionRep& p, int N);
BoundPair trace_vs_ds_check(const UnitaryEigen& eig, const ProjectionRep& p,
                            int N);

// Finite union of right-open subintervals of [0,1).
using IntervalSet = std::vector<std::pair<double, double>>;

double set_mass(const torus::AtomicTorusMeasure& mu, const IntervalSet& e);

// [S_u(p)](E); equals ||qp||_HS^2 / tr(p) for q the eigenspace projection
// onto phases in E (the equality is what the tests verify).
double interval_projection_mass(const UnitaryEigen& eig, const ProjectionRep& p,
                                const IntervalSet& e);

struct DsTraceBound {
  double ds_exact = 0;  // ds_n of the full spectral measure
  double et_bound = 0;  // discrepancy bound assembled from |tr(u^k)|/d
  std::vector<double> trace_moments;  // |tr(u^k)|/d for k = 1..M
};

// Exact disuniformity of the eigenphase distribution next to an
// Erdos-Turan style bound from the first M power traces.
DsTraceBound ds_power_trace_bound(const UnitaryEigen& eig, int M, int N);
DsTraceBound ds_power_trace_bound(const Matrix& u, int M, int N);

// ds_n(S_u(span xs)) against the average vector ds plus 2 eta n, for unit
// vectors with pairwise overlaps <= eta <= 1/n.
BoundPair span_ds_bound(const UnitaryEigen& eig, const Frame& xs, double eta,
                        int N);

// Disuniformity persistence on the complement of the enlarged projection:
// lhs = ds_n(S_u(I-q)) for q onto span(pH, xs); rhs assembled from
// ds_n(S_u(I-p)), the per-vector ds values and the 4 delta n^2 term.
BoundPair persist_bound(const UnitaryEigen& eig, const ProjectionRep& p,
                        const Frame& xs, double delta, int N);

}  // namespace soficize::spectra
