#include "soficize/abelian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "soficize/linalg.hpp"

namespace soficize::abelian {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex root_of_unity(double numerator, double denominator) {
  return std::exp(Complex(0, kTwoPi * numerator / denominator));
}

// multi-index <-> flat index, row-major over the grid
std::vector<Index> unflatten(Index v, const std::vector<Index>& grid) {
  std::vector<Index> a(grid.size());
  for (std::size_t i = grid.size(); i-- > 0;) {
    a[i] = v % grid[i];
    v /= grid[i];
  }
  return a;
}

Index flatten(const std::vector<Index>& a, const std::vector<Index>& grid) {
  Index v = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) v = v * grid[i] + a[i];
  return v;
}

// sigma(g): grid translation by g (componentwise, toroidal)
std::vector<Index> grid_translation(const groups::GroupElement& g,
                                    const std::vector<Index>& grid) {
  Index n = 1;
  for (Index s : grid) n *= s;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    std::vector<Index> a = unflatten(v, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Index shifted = (a[i] + g.coords[i]) % grid[i];
      if (shifted < 0) shifted += grid[i];
      a[i] = shifted;
    }
    perm[static_cast<std::size_t>(v)] = flatten(a, grid);
  }
  return perm;
}

sofic::SoficApprox grid_sofic(const std::vector<Index>& grid,
                              int support_radius) {
  groups::GroupSpec spec(static_cast<int>(grid.size()));
  groups::FolnerBox box = groups::folner_box(spec, support_radius);
  sofic::SoficApprox sigma;
  Index n = 1;
  for (Index s : grid) n *= s;
  sigma.point_count = n;
  sigma.support = box.elements;
  for (const auto& g : box.elements)
    sigma.perms.emplace(g, grid_translation(g, grid));
  return sigma;
}

// Fourier eigenbasis of the d-cycle: column j has entries w^{-jv}/sqrt(d),
// an eigenvector for eigenvalue w^j.
Matrix cycle_fourier_basis(Index d) {
  Matrix f(d, d);
  for (Index v = 0; v < d; ++v)
    for (Index j = 0; j < d; ++j)
      f(v, j) = root_of_unity(-double(j) * double(v), double(d)) /
                std::sqrt(double(d));
  return f;
}

// tensor of per-axis Fourier bases: joint eigenvectors of all translations
Matrix grid_fourier_basis(const std::vector<Index>& grid) {
  Matrix f = cycle_fourier_basis(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Matrix g = cycle_fourier_basis(grid[i]);
    Matrix out(f.rows() * g.rows(), f.cols() * g.cols());
    for (Index a = 0; a < f.rows(); ++a)
      for (Index b = 0; b < f.cols(); ++b)
        out.block(a * g.rows(), b * g.cols(), g.rows(), g.cols()) = f(a, b) * g;
    f = std::move(out);
  }
  return f;
}

}  // namespace

OracleResult round_eigenvalues_to_permutation(const Matrix& u,
                                              int support_radius) {
  linalg::UnitaryEigen eig = linalg::unitary_eigendecomposition(u);
  const Index d = u.rows();

  // best cyclic rotation of the sorted-to-sorted assignment
  OracleResult out;
  double best_cost = std::numeric_limits<double>::infinity();
  Index best_offset = 0;
  for (Index o = 0; o < d; ++o) {
    double cost = 0;
    for (Index k = 0; k < d; ++k) {
      Complex lambda = root_of_unity(eig.phases(k), 1.0);
      cost += std::norm(lambda - root_of_unity(double((k + o) % d), double(d)));
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_offset = o;
    }
  }
  out.plan.offset = best_offset;
  out.plan.targets.resize(static_cast<std::size_t>(d));
  out.plan.phase_errors.resize(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    Index t = (k + best_offset) % d;
    out.plan.targets[static_cast<std::size_t>(k)] = t;
    out.plan.phase_errors[static_cast<std::size_t>(k)] =
        std::abs(root_of_unity(eig.phases(k), 1.0) -
                 root_of_unity(double(t), double(d)));
  }
  out.distance = best_cost / double(d);

  // basis carrying the cycle: column j is the beta-eigenvector of
  // eigenvalue w^j, i.e. eigenvector k with (k + offset) mod d == j
  Matrix q_perm(d, d);
  for (Index k = 0; k < d; ++k)
    q_perm.col((k + best_offset) % d) = eig.vectors.col(k);
  out.beta.basis = q_perm * cycle_fourier_basis(d).adjoint();
  out.beta.sofic = grid_sofic({d}, support_radius);
  out.beta.identity_block_rank = 0;
  return out;
}

MultiOracleResult round_commuting_generators(const std::vector<Matrix>& gens,
                                             const std::vector<Index>& grid,
                                             int support_radius,
                                             double commute_tol) {
  MultiOracleResult out;
  if (gens.empty()) throw DomainError("round_commuting_generators: no generators");
  if (gens.size() != grid.size())
    throw StructuralError("round_commuting_generators: one grid side per generator");
  const Index d = gens[0].rows();
  Index prod = 1;
  for (Index s : grid) {
    if (s < 1) throw DomainError("round_commuting_generators: grid side < 1");
    prod *= s;
  }
  if (prod != d)
    throw StructuralError("round_commuting_generators: grid does not fill dim " +
                          std::to_string(d));
  const int r = static_cast<int>(gens.size());

  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      double comm = (gens[i] * gens[j] - gens[j] * gens[i]).norm() /
                    std::sqrt(double(d));
      if (comm > commute_tol) {
        out.declined = true;
        out.reason = "generators " + std::to_string(i) + "," + std::to_string(j) +
                     " do not commute within tolerance (defect " +
                     std::to_string(comm) + ")";
        return out;
      }
    }

  // joint eigenbasis: diagonalize the first generator, then refine inside
  // each eigenvalue cluster with the next one
  linalg::UnitaryEigen eig = linalg::unitary_eigendecomposition(gens[0]);
  Matrix q = eig.vectors;
  std::vector<std::pair<Index, Index>> clusters;  // [begin, end)
  {
    constexpr double ctol = 1e-7;
    // rotate the columns so the phase circle is cut at its widest gap and
    // no eigenvalue cluster straddles the 0/1 wrap point
    Index cut = 0;
    double widest = (1.0 - eig.phases(d - 1)) + eig.phases(0);
    for (Index k = 1; k < d; ++k) {
      double gap = eig.phases(k) - eig.phases(k - 1);
      if (gap > widest) {
        widest = gap;
        cut = k;
      }
    }
    if (cut != 0) {
      Matrix qr(d, d);
      RealVector ph(d);
      for (Index k = 0; k < d; ++k) {
        qr.col(k) = q.col((cut + k) % d);
        ph(k) = eig.phases((cut + k) % d);
      }
      q = std::move(qr);
      eig.phases = std::move(ph);
    }
    auto circ_gap = [&](Index k) {
      double g = eig.phases(k) - eig.phases(k - 1);
      return g >= 0 ? g : g + 1.0;
    };
    Index begin = 0;
    for (Index k = 1; k <= d; ++k) {
      if (k == d || circ_gap(k) > ctol) {
        clusters.push_back({begin, k});
        begin = k;
      }
    }
  }
  for (int i = 1; i < r; ++i) {
    std::vector<std::pair<Index, Index>> refined;
    for (const auto& [b, e] : clusters) {
      const Index c = e - b;
      if (c == 1) {
        refined.push_back({b, e});
        continue;
      }
      Matrix block = q.middleCols(b, c);
      Matrix m = block.adjoint() * (gens[static_cast<std::size_t>(i)] * block);
      Eigen::ComplexSchur<Matrix> schur(m, true);
      if (schur.info() != Eigen::Success) {
        out.declined = true;
        out.reason = "joint diagonalization failed in a cluster";
        return out;
      }
      // sort the refined columns by phase for stable clustering
      RealVector ph(c);
      for (Index t = 0; t < c; ++t)
        ph(t) = linalg::phase_of(schur.matrixT()(t, t));
      std::vector<Index> order(static_cast<std::size_t>(c));
      for (Index t = 0; t < c; ++t) order[static_cast<std::size_t>(t)] = t;
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a2, Index b2) { return ph(a2) < ph(b2); });
      Matrix rotated = block * schur.matrixU();
      for (Index t = 0; t < c; ++t)
        q.col(b + t) = rotated.col(order[static_cast<std::size_t>(t)]);
      Index begin = b;
      for (Index t = 1; t <= c; ++t) {
        if (t == c ||
            ph(order[static_cast<std::size_t>(t)]) -
                    ph(order[static_cast<std::size_t>(t - 1)]) > 1e-7) {
          refined.push_back({begin, b + t});
          begin = b + t;
        }
      }
    }
    clusters = std::move(refined);
  }

  // joint phases, with a residual certificate per generator
  Eigen::MatrixXd phases(d, r);
  for (int i = 0; i < r; ++i) {
    Matrix moved = gens[static_cast<std::size_t>(i)] * q;
    double residual = 0;
    for (Index k = 0; k < d; ++k) {
      Complex lambda = q.col(k).dot(moved.col(k));
      double mod = std::abs(lambda);
      if (mod > 0) lambda /= mod;
      phases(k, i) = linalg::phase_of(lambda);
      residual = std::max(residual, (moved.col(k) - lambda * q.col(k)).norm());
    }
    if (residual > std::max(1e-6, 10.0 * commute_tol)) {
      out.declined = true;
      out.reason = "joint eigenbasis residual " + std::to_string(residual) +
                   " for generator " + std::to_string(i);
      return out;
    }
  }

  // lexicographic sorted matching of joint phases to the grid, then the
  // best per-axis rotation
  std::vector<Index> order(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (int i = 0; i < r; ++i) {
      if (phases(a, i) < phases(b, i) - 1e-12) return true;
      if (phases(a, i) > phases(b, i) + 1e-12) return false;
    }
    return false;
  });

  std::vector<Index> offsets(static_cast<std::size_t>(r), 0);
  out.distances.assign(static_cast<std::size_t>(r), 0.0);
  for (int i = 0; i < r; ++i) {
    const Index di = grid[static_cast<std::size_t>(i)];
    double best_cost = std::numeric_limits<double>::infinity();
    for (Index o = 0; o < di; ++o) {
      double cost = 0;
      for (Index rank_pos = 0; rank_pos < d; ++rank_pos) {
        Index k = order[static_cast<std::size_t>(rank_pos)];
        std::vector<Index> a = unflatten(rank_pos, grid);
        cost += std::norm(root_of_unity(phases(k, i), 1.0) -
                          root_of_unity(double((a[static_cast<std::size_t>(i)] + o) % di),
                                        double(di)));
      }
      if (cost < best_cost) {
        best_cost = cost;
        offsets[static_cast<std::size_t>(i)] = o;
      }
    }
    out.distances[static_cast<std::size_t>(i)] = best_cost / double(d);
    out.distance = std::max(out.distance, out.distances[static_cast<std::size_t>(i)]);
  }

  // eigenvector at sorted position rank_pos carries grid point
  // a(rank_pos) + offsets (componentwise mod)
  Matrix q_perm(d, d);
  for (Index rank_pos = 0; rank_pos < d; ++rank_pos) {
    std::vector<Index> a = unflatten(rank_pos, grid);
    for (int i = 0; i < r; ++i)
      a[static_cast<std::size_t>(i)] =
          (a[static_cast<std::size_t>(i)] + offsets[static_cast<std::size_t>(i)]) %
          grid[static_cast<std::size_t>(i)];
    q_perm.col(flatten(a, grid)) = q.col(order[static_cast<std::size_t>(rank_pos)]);
  }
  out.beta.basis = q_perm * grid_fourier_basis(grid).adjoint();
  out.beta.sofic = grid_sofic(grid, support_radius);
  out.beta.identity_block_rank = 0;
  return out;
}

}  // namespace soficize::abelian
