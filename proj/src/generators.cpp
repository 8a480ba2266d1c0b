#include "soficize/generators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "soficize/sphere.hpp"

namespace soficize::gen {

namespace {

using groups::ElementSet;
using groups::GroupElement;

std::uint64_t element_hash(const GroupElement& g) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto c : g.coords) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return h;
}

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

Matrix translation_matrix(const GroupElement& g, const std::vector<Index>& grid,
                          Index d) {
  Matrix p = Matrix::Zero(d, d);
  for (Index v = 0; v < d; ++v) {
    std::vector<Index> a = unflatten(v, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Index s = (a[i] + g.coords[i]) % grid[i];
      if (s < 0) s += grid[i];
      a[i] = s;
    }
    p(flatten(a, grid), v) = 1.0;
  }
  return p;
}

// exp(i eta H) for a seeded Hermitian H with ||H||_HS = sqrt(d)
Matrix unitary_noise(Index d, double eta, sphere::SeededSampler sampler) {
  RealVector g = sphere::sample_gaussians(2 * d * d, sampler);
  Matrix z(d, d);
  Index t = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i, ++t)
      z(i, j) = Complex(g(2 * t), g(2 * t + 1));
  Matrix h = (z + z.adjoint()) * 0.5;
  h *= std::sqrt(static_cast<double>(d)) / h.norm();
  Eigen::SelfAdjointEigenSolver<Matrix> saes(h);
  Matrix phases = (Complex(0, eta) * saes.eigenvalues().cast<Complex>())
                      .array()
                      .exp()
                      .matrix()
                      .asDiagonal();
  return saes.eigenvectors() * phases * saes.eigenvectors().adjoint();
}

}  // namespace

Kind kind_from_string(const std::string& s) {
  if (s == "exact-shift") return Kind::exact_shift;
  if (s == "perturbed-shift") return Kind::perturbed_shift;
  if (s == "haar-noise") return Kind::haar_noise;
  if (s == "sofic-seeded") return Kind::sofic_seeded;
  throw ConfigError("unknown generator kind: " + s);
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::exact_shift: return "exact-shift";
    case Kind::perturbed_shift: return "perturbed-shift";
    case Kind::haar_noise: return "haar-noise";
    case Kind::sofic_seeded: return "sofic-seeded";
  }
  return "?";
}

std::vector<Index> grid_sides(int rank, Index dim) {
  if (rank == 1) return {dim};
  auto side = static_cast<Index>(std::llround(std::pow(double(dim), 1.0 / rank)));
  Index prod = 1;
  for (int i = 0; i < rank; ++i) prod *= side;
  if (prod != dim)
    throw ConfigError("rank " + std::to_string(rank) +
                      " torus models need dim = side^rank; got " +
                      std::to_string(dim));
  return std::vector<Index>(static_cast<std::size_t>(rank), side);
}

sofic::HyperlinearApprox generate_test_approx(const GenConfig& cfg) {
  if (cfg.dim < 1) throw ConfigError("generate_test_approx: dim must be >= 1");
  if (cfg.rank < 1) throw ConfigError("generate_test_approx: rank must be >= 1");
  if (cfg.support_radius < 1)
    throw ConfigError("generate_test_approx: support radius must be >= 1");
  if (cfg.kind == Kind::perturbed_shift && cfg.noise < 0)
    throw ConfigError("generate_test_approx: negative noise");

  groups::GroupSpec spec(cfg.rank);
  groups::FolnerBox box = groups::folner_box(spec, cfg.support_radius);
  const Index d = cfg.dim;

  if (cfg.kind == Kind::sofic_seeded) {
    sofic::SoficApprox sigma =
        seeded_sofic(cfg.rank, d, cfg.tile, cfg.seed, cfg.support_radius);
    return sofic::to_hyperlinear(sofic_induce(sigma));
  }

  std::vector<Index> grid = grid_sides(cfg.rank, d);
  auto conj = std::make_shared<Matrix>();
  {
    sphere::SeededSampler s(cfg.seed ^ 0xC0B3ULL);
    *conj = sphere::sample_haar_unitary(d, s);
  }
  const Kind kind = cfg.kind;
  const double eta = cfg.noise;
  const std::uint64_t seed = cfg.seed;

  auto provider = [=](const GroupElement& g) -> Matrix {
    if (g.is_identity()) return Matrix::Identity(d, d);
    // a(g^-1) = a(g)^*, built from the positive (lex) representative
    GroupElement rep = g;
    bool adjoint = false;
    GroupElement ginv = groups::inverse(g);
    if (ginv < g) {
      rep = ginv;
      adjoint = true;
    }
    Matrix core = translation_matrix(rep, grid, d);
    switch (kind) {
      case Kind::exact_shift:
        break;
      case Kind::perturbed_shift:
        core = core * unitary_noise(
                          d, eta,
                          sphere::SeededSampler(seed ^ element_hash(rep)));
        break;
      case Kind::haar_noise: {
        sphere::SeededSampler s(seed ^ element_hash(rep));
        core = sphere::sample_haar_unitary(d, s);
        break;
      }
      case Kind::sofic_seeded:
        break;  // handled above
    }
    Matrix u = (*conj) * core * conj->adjoint();
    if (adjoint) return u.adjoint();
    return u;
  };
  return sofic::HyperlinearApprox(d, box.elements, provider);
}

sofic::SoficApprox seeded_sofic(int rank, Index point_count, Index tile,
                                std::uint64_t seed, int support_radius) {
  if (point_count < 1) throw ConfigError("seeded_sofic: empty point set");
  groups::GroupSpec spec(rank);
  groups::FolnerBox box = groups::folner_box(spec, support_radius);
  if (tile <= 0)
    tile = std::max<Index>(
        2, static_cast<Index>(std::llround(std::sqrt(double(point_count)))));

  // seeded relabelling of the point set
  std::vector<Index> relabel(static_cast<std::size_t>(point_count));
  std::iota(relabel.begin(), relabel.end(), Index{0});
  {
    sphere::SeededSampler s(seed ^ 0x50F1CULL);
    RealVector keys = sphere::sample_gaussians(point_count, s);
    std::stable_sort(relabel.begin(), relabel.end(),
                     [&](Index a, Index b) { return keys(a) < keys(b); });
  }

  // rank-r tiles: contiguous runs of tile^rank points carrying a toroidal
  // translation wrapped inside the tile; the ragged remainder is fixed
  Index tile_points = 1;
  for (int i = 0; i < rank; ++i) tile_points *= tile;
  std::vector<Index> tile_grid(static_cast<std::size_t>(rank), tile);

  sofic::SoficApprox sigma;
  sigma.point_count = point_count;
  sigma.support = box.elements;
  for (const auto& g : box.elements) {
    std::vector<Index> perm(static_cast<std::size_t>(point_count));
    for (Index base = 0; base < point_count; base += tile_points) {
      Index len = std::min(tile_points, point_count - base);
      if (len < tile_points) {
        for (Index v = 0; v < len; ++v)
          perm[static_cast<std::size_t>(relabel[base + v])] =
              relabel[base + v];
        break;
      }
      for (Index v = 0; v < tile_points; ++v) {
        std::vector<Index> a = unflatten(v, tile_grid);
        for (std::size_t i = 0; i < tile_grid.size(); ++i) {
          // translate inside the tile; overflowing slots reflect to the free
          // positions (a -> tile-1-a), so tiles are not exact quotients and
          // boundary-sized defects survive
          Index t = a[i] + g.coords[i];
          a[i] = (t >= 0 && t < tile) ? t : tile - 1 - a[i];
        }
        perm[static_cast<std::size_t>(relabel[base + v])] =
            relabel[base + flatten(a, tile_grid)];
      }
    }
    sigma.perms.emplace(g, std::move(perm));
  }
  return sigma;
}

}  // namespace soficize::gen
