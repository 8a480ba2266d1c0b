#include "soficize/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace soficize::linalg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unitary_defect_op(const Matrix& u) {
  Matrix defect = u.adjoint() * u - Matrix::Identity(u.cols(), u.cols());
  double hs = defect.norm();
  if (hs <= kUnitaryTol) return hs;  // op <= hs
  return op_norm(defect);
}

void require_unitary(const Matrix& u, double tol, const char* where) {
  if (u.rows() != u.cols())
    throw StructuralError(std::string(where) + ": matrix must be square");
  double defect = unitary_defect_op(u);
  if (defect > tol)
    throw ValidationError(std::string(where) +
                              ": input is not unitary within tolerance (defect " +
                              std::to_string(defect) + ")",
                          defect);
}

}  // namespace

double op_norm(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(s);
  return svd.singularValues()(0);
}

NormReport norms(const Matrix& s) {
  if (s.rows() != s.cols())
    throw StructuralError("norms: trace requires a square matrix");
  NormReport r;
  r.hs = s.norm();
  r.op = op_norm(s);
  r.trace = s.trace();
  return r;
}

double phase_of(Complex z) {
  double ph = std::arg(z) / kTwoPi;
  if (ph < 0) ph += 1.0;
  if (ph >= 1.0) ph -= 1.0;  // arg rounding at the wrap point
  return ph;
}

Matrix gram(const Frame& xs) { return xs.adjoint() * xs; }

double max_offdiag_abs(const Matrix& g) {
  double m = 0;
  for (Index j = 0; j < g.rows(); ++j)
    for (Index k = 0; k < g.cols(); ++k)
      if (j != k) m = std::max(m, std::abs(g(j, k)));
  return m;
}

bool is_orthonormal(const Frame& xs, double tol) {
  Matrix g = gram(xs);
  g -= Matrix::Identity(g.rows(), g.cols());
  return g.cwiseAbs().maxCoeff() <= tol;
}

ProjectionRep::ProjectionRep(Index d, Frame b) : ambient_dim(d), basis(std::move(b)) {
  if (basis.size() != 0 && basis.rows() != d)
    throw StructuralError("ProjectionRep: basis rows must match ambient dim");
  if (basis.cols() > 0 && !is_orthonormal(basis))
    throw ValidationError("ProjectionRep: basis is not orthonormal", 0.0);
}

ProjectionRep ProjectionRep::zero(Index d) {
  ProjectionRep p;
  p.ambient_dim = d;
  p.basis = Matrix(d, 0);
  return p;
}

Vector ProjectionRep::apply(const Vector& x) const {
  if (is_zero()) return Vector::Zero(ambient_dim);
  return basis * (basis.adjoint() * x);
}

Vector ProjectionRep::complement_apply(const Vector& x) const {
  return x - apply(x);
}

Matrix ProjectionRep::apply_left(const Matrix& m) const {
  if (is_zero()) return Matrix::Zero(ambient_dim, m.cols());
  return basis * (basis.adjoint() * m);
}

Matrix ProjectionRep::matrix() const {
  if (is_zero()) return Matrix::Zero(ambient_dim, ambient_dim);
  return basis * basis.adjoint();
}

namespace {

UnitaryEigen sort_eigen(RealVector phases, Matrix vectors) {
  const Index d = phases.size();
  std::vector<Index> order(d);
  for (Index i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return phases(a) < phases(b);
  });
  UnitaryEigen out;
  out.phases.resize(d);
  out.vectors.resize(vectors.rows(), d);
  for (Index i = 0; i < d; ++i) {
    out.phases(i) = phases(order[i]);
    out.vectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

double eig_residual(const Matrix& u, const UnitaryEigen& e) {
  Matrix lambda = (Complex(0, kTwoPi) * e.phases.cast<Complex>()).array().exp().matrix().asDiagonal();
  return (u * e.vectors - e.vectors * lambda).colwise().norm().maxCoeff();
}

UnitaryEigen eigen_via_schur(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw DegeneracyError("unitary_eigendecomposition: Schur iteration failed");
  const Index d = u.rows();
  RealVector phases(d);
  for (Index i = 0; i < d; ++i) phases(i) = phase_of(schur.matrixT()(i, i));
  return sort_eigen(std::move(phases), schur.matrixU());
}

// Eigenbasis of a unitary u via the Hermitian part (u + u*)/2: its
// eigenspaces are u-invariant, so u restricted to each cos-cluster is a
// small unitary handled by a dense Schur pass. Much faster than a full
// complex Schur at large d.
UnitaryEigen eigen_via_hermitian_split(const Matrix& u) {
  const Index d = u.rows();
  Matrix a = (u + u.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> saes(a);
  if (saes.info() != Eigen::Success)
    throw DegeneracyError("unitary_eigendecomposition: Hermitian solve failed");
  const RealVector& cosv = saes.eigenvalues();
  const Matrix& v = saes.eigenvectors();
  Matrix uv = u * v;

  constexpr double cluster_gap = 1e-6;
  RealVector phases(d);
  Matrix q(d, d);
  Index start = 0;
  while (start < d) {
    Index end = start + 1;
    while (end < d && cosv(end) - cosv(end - 1) <= cluster_gap) ++end;
    const Index c = end - start;
    if (c == 1) {
      Complex lambda = v.col(start).dot(uv.col(start));
      phases(start) = phase_of(lambda);
      q.col(start) = v.col(start);
    } else {
      Matrix m = v.middleCols(start, c).adjoint() * uv.middleCols(start, c);
      Eigen::ComplexSchur<Matrix> schur(m, true);
      if (schur.info() != Eigen::Success)
        throw DegeneracyError("unitary_eigendecomposition: cluster solve failed");
      q.middleCols(start, c) = v.middleCols(start, c) * schur.matrixU();
      for (Index i = 0; i < c; ++i)
        phases(start + i) = phase_of(schur.matrixT()(i, i));
    }
    start = end;
  }
  return sort_eigen(std::move(phases), std::move(q));
}

}  // namespace

UnitaryEigen unitary_eigendecomposition(const Matrix& u, double unitary_tol,
                                        double eig_tol) {
  require_unitary(u, unitary_tol, "unitary_eigendecomposition");
  const Index d = u.rows();
  if (d > 224) {
    UnitaryEigen e = eigen_via_hermitian_split(u);
    if (eig_residual(u, e) <= eig_tol) return e;
  }
  UnitaryEigen e = eigen_via_schur(u);
  double res = eig_residual(u, e);
  if (res > eig_tol)
    throw ValidationError(
        "unitary_eigendecomposition: eigenpair residual " + std::to_string(res),
        res);
  return e;
}

Frame symmetric_orthonormalize(const Frame& xs, OrthonormalizeStats* stats) {
  const Index n = xs.cols();
  if (n == 0) return xs;
  Matrix g = gram(xs);
  g = (g + g.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> saes(g);
  if (saes.info() != Eigen::Success)
    throw DegeneracyError("symmetric_orthonormalize: Gram eigensolve failed");
  const RealVector& lam = saes.eigenvalues();
  double lam_max = lam(n - 1);
  if (lam(0) <= kSingularFloor * std::max(1.0, lam_max))
    throw DegeneracyError(
        "symmetric_orthonormalize: Gram matrix numerically singular (min "
        "eigenvalue " +
        std::to_string(lam(0)) + ")");
  Matrix inv_sqrt = saes.eigenvectors() *
                    lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                    saes.eigenvectors().adjoint();
  Frame thetas = xs * inv_sqrt;
  if (stats) {
    stats->max_offdiag = max_offdiag_abs(g);
    stats->min_gram_eig = lam(0);
    stats->max_gram_eig = lam_max;
    stats->max_displacement = (xs - thetas).colwise().norm().maxCoeff();
  }
  return thetas;
}

Frame lowdin_orthogonalize(const Frame& xs, double delta) {
  const Index n = xs.cols();
  if (n == 0) return xs;
  for (Index k = 0; k < n; ++k) {
    double nk = xs.col(k).norm();
    if (std::abs(nk - 1.0) > 1e-8)
      throw DomainError("lowdin_orthogonalize: column " + std::to_string(k) +
                        " is not a unit vector (norm " + std::to_string(nk) + ")");
  }
  OrthonormalizeStats stats;
  Frame thetas = symmetric_orthonormalize(xs, &stats);
  if (stats.max_offdiag > delta + 1e-12)
    throw DomainError("lowdin_orthogonalize: pairwise overlap " +
                      std::to_string(stats.max_offdiag) + " exceeds delta " +
                      std::to_string(delta));
  if (stats.max_displacement > delta * static_cast<double>(n) + 1e-12)
    throw std::logic_error(
        "lowdin_orthogonalize: displacement bound delta*n violated "
        "(displacement " +
        std::to_string(stats.max_displacement) + ")");
  return thetas;
}

bool check_linear_independence(const Frame& xs) {
  const Index n = xs.cols();
  if (n == 0) return true;
  Matrix g = gram(xs);
  if (max_offdiag_abs(g) <= 1.0 / static_cast<double>(n) + 1e-15)
    return true;  // strictly diagonally dominant Gram
  Eigen::SelfAdjointEigenSolver<Matrix> saes((g + g.adjoint()) * 0.5);
  return saes.eigenvalues()(0) >
         kSingularFloor * std::max(1.0, saes.eigenvalues()(n - 1));
}

std::string ComplementPreReport::describe(double delta, double kappa) const {
  std::ostringstream os;
  os << "kappa<1/10: " << (kappa_param_ok ? "ok" : "FAIL") << " (kappa=" << kappa
     << "); 2*delta<=1/n: " << (delta_param_ok ? "ok" : "FAIL")
     << " (delta=" << delta << "); max||p xi||<=kappa: "
     << (kappa_ok ? "ok" : "FAIL") << " (measured " << kappa_measured
     << "); max|<(I-p)xi_j,xi_k>|<=delta: " << (offdiag_ok ? "ok" : "FAIL")
     << " (measured " << offdiag_measured << ")";
  return os.str();
}

ComplementDecomposition complement_decompose(const ProjectionRep& p,
                                             const Frame& xs, double delta,
                                             double kappa,
                                             PreconditionPolicy policy) {
  const Index n = xs.cols();
  const Index d = xs.rows();
  if (n == 0) throw DomainError("complement_decompose: empty frame");
  if (p.ambient_dim != d)
    throw StructuralError("complement_decompose: dimension mismatch");

  ComplementDecomposition out;
  Frame comp(d, n);
  RealVector pnorm(n);
  for (Index k = 0; k < n; ++k) {
    Vector px = p.apply(xs.col(k));
    pnorm(k) = px.norm();
    comp.col(k) = xs.col(k) - px;
  }
  out.pre.kappa_measured = n ? pnorm.maxCoeff() : 0.0;
  Matrix cross = comp.adjoint() * xs;  // <(I-p)xi_j, xi_k> at (j,k)
  out.pre.offdiag_measured = max_offdiag_abs(cross);
  out.pre.kappa_param_ok = kappa < 0.1;
  out.pre.delta_param_ok = 2.0 * delta <= 1.0 / static_cast<double>(n) + 1e-15;
  out.pre.kappa_ok = out.pre.kappa_measured <= kappa + 1e-12;
  out.pre.offdiag_ok = out.pre.offdiag_measured <= delta + 1e-12;

  if (policy == PreconditionPolicy::enforce && !out.pre.all_ok())
    throw DomainError("complement_decompose: precondition failure: " +
                      out.pre.describe(delta, kappa));

  out.phis.resize(d, n);
  for (Index k = 0; k < n; ++k) {
    double denom2 = 1.0 - pnorm(k) * pnorm(k);
    if (denom2 <= kSingularFloor)
      throw DegeneracyError("complement_decompose: xi_" + std::to_string(k) +
                            " lies in range(p)");
    out.phis.col(k) = comp.col(k) / std::sqrt(denom2);
  }
  out.thetas = symmetric_orthonormalize(out.phis, &out.ortho);
  if (policy == PreconditionPolicy::enforce &&
      out.ortho.max_displacement > 2.0 * delta * static_cast<double>(n) + 1e-12)
    throw std::logic_error(
        "complement_decompose: displacement bound 2*delta*n violated");
  return out;
}

RepairResult repair_block_unitary(const Matrix& u, const ProjectionRep& p,
                                  double delta) {
  require_unitary(u, kUnitaryTol, "repair_block_unitary");
  if (delta >= 0.5)
    throw DomainError("repair_block_unitary: delta must be < 1/2");
  const Index d = u.rows();
  if (p.ambient_dim != d)
    throw StructuralError("repair_block_unitary: dimension mismatch");

  RepairResult out;
  if (p.is_zero()) {
    out.v = Matrix::Zero(d, d);
    return out;
  }
  const Matrix& b = p.basis;
  Matrix ub = u * b;
  Matrix w = b.adjoint() * ub;  // p u p restricted to range(p)
  out.defect_before = (ub - b * w).squaredNorm();
  if (out.defect_before > delta * static_cast<double>(d) * (1.0 + 1e-9))
    throw DomainError(
        "repair_block_unitary: ||(I-p)up||_HS^2 = " +
        std::to_string(out.defect_before) + " exceeds delta*d = " +
        std::to_string(delta * static_cast<double>(d)));

  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  for (Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) < kSingularFloor) out.degenerate_directions.push_back(k);
  // Singular values collapse to unit phase; below the floor the pairing is
  // arbitrary and phase 1 is kept.
  Matrix vr = svd.matrixU() * svd.matrixV().adjoint();
  out.v = b * vr * b.adjoint();
  out.defect_after = ((u - out.v) * p.matrix()).squaredNorm();
  return out;
}

Frame complement_basis(const Frame& basis, Index ambient_dim) {
  const Index r = basis.cols();
  if (r == 0) return Matrix::Identity(ambient_dim, ambient_dim);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, ambient_dim);
  return q.rightCols(ambient_dim - r);
}

}  // namespace soficize::linalg
