#pragma once

#include <optional>
#include <vector>

#include "soficize/types.hpp"

namespace soficize::linalg {

// A frame is a d x n matrix whose columns are the vectors.
using Frame = Matrix;

template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& s) {
  return s.norm();
}

double op_norm(const Matrix& s);  // largest singular value

struct NormReport {
  double hs = 0;
  double op = 0;
  Complex trace{0, 0};
};

// All three norms of a square matrix.
NormReport norms(const Matrix& s);

// Phase of a nonzero complex number as a point of [0,1).
double phase_of(Complex z);

Matrix gram(const Frame& xs);
double max_offdiag_abs(const Matrix& g);
bool is_orthonormal(const Frame& xs, double tol = kGramTol);

// Orthogonal projection represented by an orthonormal basis of its range.
struct ProjectionRep {
  Index ambient_dim = 0;
  Frame basis;  // d x r, orthonormal columns; r == 0 is the zero projection

  ProjectionRep() = default;
  ProjectionRep(Index d, Frame b);
  static ProjectionRep zero(Index d);

  Index rank() const { return basis.cols(); }
  bool is_zero() const { return basis.cols() == 0; }
  Vector apply(const Vector& x) const;             // p x
  Vector complement_apply(const Vector& x) const;  // (I - p) x
  Matrix apply_left(const Matrix& m) const;        // p m
  Matrix matrix() const;                           // B B*
};

struct UnitaryEigen {
  RealVector phases;  // ascending, in [0,1)
  Matrix vectors;     // orthonormal columns, vectors.col(k) has phase(k)
};

// Eigendecomposition of a (near-)unitary matrix with an orthonormal
// eigenbasis. Throws ValidationError when ||u*u - I||_op exceeds
// unitary_tol; the residual of every returned eigenpair is checked
// against eig_tol.
UnitaryEigen unitary_eigendecomposition(const Matrix& u,
                                        double unitary_tol = kUnitaryTol,
                                        double eig_tol = kEigTol);

struct OrthonormalizeStats {
  double max_displacement = 0;  // max_j ||xi_j - theta_j||
  double max_offdiag = 0;       // max_{j!=k} |<xi_j, xi_k>|
  double min_gram_eig = 0;
  double max_gram_eig = 0;
};

// Symmetric (Gram inverse square root) orthonormalization. Output spans the
// same space and is exactly orthonormal up to roundoff. Throws
// DegeneracyError when the Gram matrix is numerically singular.
Frame symmetric_orthonormalize(const Frame& xs,
                               OrthonormalizeStats* stats = nullptr);

// Contract form: unit inputs with pairwise overlaps <= delta come out
// orthonormal with max_j ||xi_j - theta_j|| <= delta * n.
Frame lowdin_orthogonalize(const Frame& xs, double delta);

// True when unit vectors are linearly independent; decided by Gram
// diagonal dominance when pairwise overlaps are <= 1/n, by Gram rank
// otherwise.
bool check_linear_independence(const Frame& xs);

enum class PreconditionPolicy { enforce, monitored };

struct ComplementPreReport {
  double kappa_measured = 0;    // max_k ||p xi_k||
  double offdiag_measured = 0;  // max_{j!=k} |<(I-p) xi_j, xi_k>|
  bool kappa_param_ok = false;  // kappa < 1/10
  bool delta_param_ok = false;  // 2 delta <= 1/n
  bool kappa_ok = false;
  bool offdiag_ok = false;
  bool all_ok() const {
    return kappa_param_ok && delta_param_ok && kappa_ok && offdiag_ok;
  }
  std::string describe(double delta, double kappa) const;
};

struct ComplementDecomposition {
  Frame phis;    // normalized complement parts (I-p) xi_k / sqrt(1-||p xi_k||^2)
  Frame thetas;  // orthonormal basis of span(phis)
  ComplementPreReport pre;
  OrthonormalizeStats ortho;
};

// Splits span(pH, xi_1..xi_n) as pH (+) span(thetas) with
// max_k ||phi_k - theta_k|| <= 2 delta n under the stated preconditions.
// With policy == enforce, any violated precondition throws DomainError
// carrying the per-condition report; monitored mode records and proceeds
// as long as the Gram matrix stays nonsingular.
ComplementDecomposition complement_decompose(
    const ProjectionRep& p, const Frame& xs, double delta, double kappa,
    PreconditionPolicy policy = PreconditionPolicy::enforce);

struct RepairResult {
  Matrix v;                  // partial unitary: v*v = vv* = p, commutes with p
  double defect_before = 0;  // ||(I-p) u p||_HS^2
  double defect_after = 0;   // ||(u-v) p||_HS^2
  std::vector<Index> degenerate_directions;  // singular values below floor
};

// Nearest block unitary: v agrees with a unitary on range(p), vanishes on
// the complement, and ||(u-v)p||_HS^2 <= 4 delta dim(H) whenever
// ||(I-p)up||_HS^2 <= delta dim(H). Built from the SVD of p u p restricted
// to range(p) with singular values normalized to unit phase; singular
// values below kSingularFloor keep phase 1 and are reported.
RepairResult repair_block_unitary(const Matrix& u, const ProjectionRep& p,
                                  double delta);

// Orthonormal basis of the orthogonal complement of range(basis).
Frame complement_basis(const Frame& basis, Index ambient_dim);

}  // namespace soficize::linalg
