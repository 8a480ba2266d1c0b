#include "soficize/sofic.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "soficize/spectra.hpp"
#include "soficize/torus_measure.hpp"

namespace soficize::sofic {

namespace {

int env_thread_count() {
  const char* env = std::getenv("SOFICIZE_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

// Deterministic chunked parallel map: results land by index, so thread
// scheduling cannot change any outcome.
template <typename Fn>
void parallel_indexed(Index count, Fn&& fn) {
  int threads = env_thread_count();
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<Index> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      while (true) {
        Index i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// HyperlinearApprox
// ---------------------------------------------------------------------------

HyperlinearApprox::HyperlinearApprox(Index d, ElementSet support,
                                     Provider provider)
    : d_(d), support_(std::move(support)), provider_(std::move(provider)) {
  if (d < 1) throw DomainError("HyperlinearApprox: dimension must be >= 1");
  if (!groups::is_symmetric(support_))
    throw StructuralError("HyperlinearApprox: support not closed under inverse");
}

HyperlinearApprox HyperlinearApprox::from_map(
    Index d, std::map<GroupElement, Matrix> units) {
  ElementSet support;
  support.reserve(units.size());
  for (const auto& [g, m] : units) {
    if (m.rows() != d || m.cols() != d)
      throw StructuralError("HyperlinearApprox: matrix shape mismatch at " +
                            groups::to_string(g));
    support.push_back(g);
  }
  auto shared = std::make_shared<std::map<GroupElement, Matrix>>(std::move(units));
  return HyperlinearApprox(d, groups::make_set(std::move(support)),
                           [shared](const GroupElement& g) -> Matrix {
                             return shared->at(g);
                           });
}

const Matrix& HyperlinearApprox::unit(const GroupElement& g) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->units.find(g);
  if (it != cache_->units.end()) return it->second;
  if (!groups::contains(support_, g))
    throw StructuralError("HyperlinearApprox: element " + groups::to_string(g) +
                          " outside support");
  Matrix m = provider_(g);
  if (m.rows() != d_ || m.cols() != d_)
    throw StructuralError("HyperlinearApprox: provider shape mismatch at " +
                          groups::to_string(g));
  return cache_->units.emplace(g, std::move(m)).first->second;
}

const linalg::UnitaryEigen& HyperlinearApprox::eigen(const GroupElement& g) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->eigs.find(g);
    if (it != cache_->eigs.end()) return it->second;
  }
  linalg::UnitaryEigen e = linalg::unitary_eigendecomposition(unit(g));
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->eigs.emplace(g, std::move(e)).first->second;
}

void HyperlinearApprox::release_cache() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->units.clear();
  cache_->eigs.clear();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

DefectReport validate_hyperlinear(const HyperlinearApprox& alpha,
                                  const ElementSet& F, double eps) {
  const double d = static_cast<double>(alpha.dim());
  DefectReport rep;
  rep.threshold = eps;
  for (const auto& g : F) {
    const Matrix& ug = alpha.unit(g);
    for (const auto& h : F) {
      GroupElement gh = groups::multiply(g, h);
      double comp = (alpha.unit(gh) - ug * alpha.unit(h)).squaredNorm() / d;
      rep.composition.push_back({g, h, comp});
      rep.max_composition = std::max(rep.max_composition, comp);
    }
  }
  for (const auto& g : F)
    for (const auto& h : F) {
      if (g == h) continue;
      GroupElement hg = groups::multiply(groups::inverse(h), g);
      double tr = std::abs(alpha.unit(hg).trace()) / d;
      rep.trace.push_back({g, h, tr});
      rep.max_trace = std::max(rep.max_trace, tr);
    }
  rep.pass = rep.max_composition <= eps && rep.max_trace <= eps;
  return rep;
}

const std::vector<Index>& SoficApprox::perm(const GroupElement& g) const {
  auto it = perms.find(g);
  if (it == perms.end())
    throw StructuralError("SoficApprox: element " + groups::to_string(g) +
                          " outside support");
  return it->second;
}

void SoficApprox::validate_bijections() const {
  for (const auto& [g, p] : perms) {
    if (static_cast<Index>(p.size()) != point_count)
      throw StructuralError("SoficApprox: permutation size mismatch at " +
                            groups::to_string(g));
    std::vector<bool> seen(p.size(), false);
    for (Index v : p) {
      if (v < 0 || v >= point_count || seen[static_cast<std::size_t>(v)])
        throw StructuralError("SoficApprox: image of " + groups::to_string(g) +
                              " is not a bijection");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
}

DefectReport validate_sofic(const SoficApprox& sigma, const ElementSet& F,
                            double eps) {
  sigma.validate_bijections();
  const double n = static_cast<double>(sigma.point_count);
  DefectReport rep;
  rep.threshold = eps;
  for (const auto& g : F) {
    const auto& pg = sigma.perm(g);
    for (const auto& h : F) {
      const auto& ph = sigma.perm(h);
      const auto& pgh = sigma.perm(groups::multiply(g, h));
      Index bad = 0;
      for (Index v = 0; v < sigma.point_count; ++v)
        if (pg[static_cast<std::size_t>(ph[static_cast<std::size_t>(v)])] !=
            pgh[static_cast<std::size_t>(v)])
          ++bad;
      double frac = static_cast<double>(bad) / n;
      rep.composition.push_back({g, h, frac});
      rep.max_composition = std::max(rep.max_composition, frac);
    }
  }
  for (const auto& g : F)
    for (const auto& h : F) {
      if (g == h) continue;
      const auto& pg = sigma.perm(g);
      const auto& ph = sigma.perm(h);
      Index coincide = 0;
      for (Index v = 0; v < sigma.point_count; ++v)
        if (pg[static_cast<std::size_t>(v)] == ph[static_cast<std::size_t>(v)])
          ++coincide;
      double frac = static_cast<double>(coincide) / n;
      rep.trace.push_back({g, h, frac});
      rep.max_trace = std::max(rep.max_trace, frac);
    }
  rep.pass = rep.max_composition <= eps && rep.max_trace <= eps;
  return rep;
}

Matrix permutation_matrix(const std::vector<Index>& perm) {
  const Index n = static_cast<Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Index v = 0; v < n; ++v) p(perm[static_cast<std::size_t>(v)], v) = 1.0;
  return p;
}

Matrix SoficInducedApprox::beta(const GroupElement& g) const {
  const auto& perm = sofic.perm(g);
  // beta b_v = b_{perm(v)}
  Frame permuted(basis.rows(), basis.cols());
  for (Index v = 0; v < basis.cols(); ++v)
    permuted.col(v) = basis.col(perm[static_cast<std::size_t>(v)]);
  return permuted * basis.adjoint();
}

SoficInducedApprox sofic_induce(const SoficApprox& sigma) {
  sigma.validate_bijections();
  SoficInducedApprox out;
  out.basis = Matrix::Identity(sigma.point_count, sigma.point_count);
  out.sofic = sigma;
  return out;
}

HyperlinearApprox to_hyperlinear(const SoficInducedApprox& b) {
  std::map<GroupElement, Matrix> units;
  for (const auto& [g, p] : b.sofic.perms) units.emplace(g, b.beta(g));
  return HyperlinearApprox::from_map(b.ambient_dim(), std::move(units));
}

double almost_invariance_defect(const HyperlinearApprox& alpha,
                                const ProjectionRep& p, const ElementSet& E) {
  if (p.rank() == 0)
    throw DomainError("almost_invariance_defect: zero projection");
  double worst = 0;
  for (const auto& g : E) {
    Matrix m = alpha.unit(g) * p.basis;
    m -= p.basis * (p.basis.adjoint() * m);
    worst = std::max(worst, m.norm());
  }
  return worst / std::sqrt(static_cast<double>(p.rank()));
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

double ParamSchedule::paper_delta0(int folner_size, double delta) const {
  return delta * std::exp(-16.0 * static_cast<double>(folner_size));
}

ParamSchedule make_paper_schedule(const GroupSpec& spec, const ElementSet& E,
                                  double eps) {
  ParamSchedule s;
  s.epsilon = eps;
  s.kappa = eps / 25.0;
  s.m = static_cast<int>(
      std::ceil(std::log(eps / 2.0) / std::log(1.0 - s.kappa * s.kappa / 2.0)));
  s.strict = true;
  s.slack = 1.0;
  // nu decreasing in the theorem's index; execution runs that index
  // downward, so the stored (execution-order) list is increasing.
  double budget = eps * eps / (16.0 * s.m) *
                  std::pow(1.0 - s.kappa * s.kappa / 2.0, s.m);
  double weight_sum = 0.5 * static_cast<double>(s.m) * (s.m + 1);
  double delta_min = 1.0;
  for (int n = s.m; n >= 1; --n) {
    BlockParams b;
    b.nu = std::sqrt(budget * static_cast<double>(s.m - n + 1) / weight_sum);
    auto box = groups::choose_folner_radius(spec, E, b.nu * b.nu / 4.0, 1 << 20);
    b.folner_radius = box.radius;
    b.delta = b.nu / (12.0 * static_cast<double>(box.elements.size()));
    delta_min = std::min(delta_min, b.delta);
    s.blocks.push_back(b);
  }
  s.N = static_cast<int>(std::ceil(3.0 / delta_min));
  int fmax = 2 * s.blocks.front().folner_radius + 1;
  int fsize = 1;
  for (int r = 0; r < spec.rank; ++r) fsize *= fmax;
  s.delta0 = s.paper_delta0(fsize, delta_min);
  return s;
}

ParamSchedule make_desk_schedule(const GroupSpec& spec, int e_radius, double eps,
                                 Index d) {
  ParamSchedule s;
  s.epsilon = eps;
  s.kappa = 0.35;
  s.N = 8;
  s.slack = 1.0;
  s.strict = false;
  s.budget = 300;
  s.min_dim = 16;
  s.delta0 = 0;  // measured at entry
  // Two large leading blocks, then geometric shrink. Big blocks keep the
  // number of complement repairs small, which is what the accumulated
  // composition defect of the residual family scales with; the block size
  // is capped by the conditioning of the translate Gram matrices.
  const int min_radius = 2 * e_radius;  // E^2 must fit
  auto box_size = [&](int radius) {
    Index size = 1;
    for (int r = 0; r < spec.rank; ++r) size *= (2 * radius + 1);
    return size;
  };
  auto radius_for = [&](double target) {
    int radius = static_cast<int>(
        std::floor((std::pow(std::max(target, 3.0), 1.0 / spec.rank) - 1.0) /
                   2.0));
    return std::max(radius, min_radius);
  };
  // A box covering the whole torus grid wraps exactly, so one block of
  // full radius recovers cyclic structure with no boundary at all; worth
  // it whenever the grid is small enough for the translate Gram.
  {
    auto side = static_cast<Index>(
        std::llround(std::pow(static_cast<double>(d), 1.0 / spec.rank)));
    Index prod = 1;
    for (int r = 0; r < spec.rank; ++r) prod *= side;
    int full_radius = static_cast<int>((side - 1) / 2);
    if (prod == d && side % 2 == 1 && full_radius >= min_radius && d <= 311) {
      s.blocks.push_back({full_radius, 0.8, 0.45});
      s.m = 1;
      return s;
    }
  }
  Index remaining = d;
  int i = 0;
  while (static_cast<int>(s.blocks.size()) < 64) {
    // the two leading blocks are sized off the full dimension so the bulk
    // of the space is peeled while the residual family is still clean
    double target = s.blocks.size() < 2 ? 0.36 * static_cast<double>(d)
                                        : 0.40 * static_cast<double>(remaining);
    int radius = radius_for(target);
    Index size = box_size(radius);
    while (radius > min_radius &&
           size > (2 * remaining) / 3)  // leave room for the complement
      size = box_size(--radius);
    if (size > (2 * remaining) / 3) break;
    BlockParams b;
    b.folner_radius = radius;
    b.nu = 0.8;
    b.delta = std::min(0.11 * (1.0 + 0.85 * i), 0.95);
    s.blocks.push_back(b);
    remaining -= size;
    ++i;
  }
  if (s.blocks.empty()) {
    BlockParams b;
    b.folner_radius = min_radius;
    b.nu = 0.9;
    b.delta = 0.2;
    s.blocks.push_back(b);
  }
  s.m = static_cast<int>(s.blocks.size());
  return s;
}

ScheduleCheck validate_schedule(const ParamSchedule& s, const GroupSpec& spec,
                                const ElementSet& E, Index d) {
  ScheduleCheck out;
  auto fail = [&](const std::string& msg) { out.violations.push_back(msg); };
  std::ostringstream os;

  if (s.m != static_cast<int>(s.blocks.size()))
    fail("m does not match the number of block entries");
  if (!(s.kappa > 0 && s.kappa < 0.1)) {
    os.str("");
    os << "kappa = " << s.kappa << " outside (0, 1/10)";
    fail(os.str());
  }
  double shrink = std::pow(1.0 - s.kappa * s.kappa / 2.0, s.m);
  if (shrink > s.epsilon / 2.0) {
    os.str("");
    os << "(1 - kappa^2/2)^m = " << shrink << " exceeds epsilon/2";
    fail(os.str());
  }
  double nu_sq_sum = 0;
  for (const auto& b : s.blocks) nu_sq_sum += b.nu * b.nu;
  double nu_budget = s.epsilon * s.epsilon / (16.0 * std::max(1, s.m)) * shrink;
  if (nu_sq_sum > nu_budget + 1e-15) {
    os.str("");
    os << "sum nu_n^2 = " << nu_sq_sum << " exceeds budget " << nu_budget;
    fail(os.str());
  }
  for (std::size_t i = 1; i < s.blocks.size(); ++i) {
    if (s.blocks[i].nu + 1e-15 < s.blocks[i - 1].nu)
      fail("nu must be nondecreasing in execution order");
    if (s.blocks[i].folner_radius > s.blocks[i - 1].folner_radius)
      fail("folner radii must be nonincreasing in execution order");
  }
  ElementSet e2 = groups::product_set(E, E);
  Index total_rank = 0;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = s.blocks[i];
    groups::FolnerBox box = groups::folner_box(spec, b.folner_radius);
    double fsize = static_cast<double>(box.elements.size());
    total_rank += static_cast<Index>(box.elements.size());
    if (!groups::is_subset(e2, box.elements)) {
      os.str("");
      os << "block " << i << ": E^2 not contained in box(" << b.folner_radius
         << ")";
      fail(os.str());
    }
    double ratio = groups::boundary_ratio(E, box.elements);
    if (ratio > b.nu * b.nu / 4.0) {
      os.str("");
      os << "block " << i << ": |EF (sym diff) F|/|F| = " << ratio
         << " exceeds nu^2/4 = " << b.nu * b.nu / 4.0;
      fail(os.str());
    }
    if (2.0 * b.delta * fsize > b.nu / 6.0) {
      os.str("");
      os << "block " << i << ": 2 delta |F| = " << 2.0 * b.delta * fsize
         << " exceeds nu/6";
      fail(os.str());
    }
    if (b.nu / 6.0 >= 0.5) {
      os.str("");
      os << "block " << i << ": nu/6 = " << b.nu / 6.0 << " not below 1/2";
      fail(os.str());
    }
    if (3.0 / static_cast<double>(s.N) > b.delta) {
      os.str("");
      os << "block " << i << ": 3/N = " << 3.0 / s.N << " exceeds delta "
         << b.delta;
      fail(os.str());
    }
  }
  if (total_rank > d) {
    os.str("");
    os << "blocks require at least " << total_rank << " dimensions, input has "
       << d;
    fail(os.str());
  }
  if (d < s.min_dim) {
    os.str("");
    os << "dimension " << d << " below the configured floor " << s.min_dim;
    fail(os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidate search
// ---------------------------------------------------------------------------

namespace {

struct SearchContext {
  const HyperlinearApprox* alpha = nullptr;
  const ProjectionRep* p = nullptr;
  const SearchParams* params = nullptr;
  ElementSet vec_elements;  // elements whose a(g) xi the families consume
  std::vector<std::array<Index, 3>> comp_pairs;  // (g, h, gh) as vec indices
  ElementSet ds_elements;
};

SearchContext build_search_context(const HyperlinearApprox& alpha,
                                   const ProjectionRep& p,
                                   const SearchParams& params) {
  SearchContext ctx;
  ctx.alpha = &alpha;
  ctx.p = &p;
  ctx.params = &params;

  // composition pairs: full F x F while |F| is small, otherwise the pairs
  // the construction itself consumes (g in E, h in F)
  const bool full = static_cast<Index>(params.F.size()) <= params.comp_full_limit;
  std::vector<GroupElement> vec(params.F.begin(), params.F.end());
  std::vector<std::array<GroupElement, 3>> pairs;
  const ElementSet& lhs = full ? params.F : params.E;
  for (const auto& g : lhs)
    for (const auto& h : params.F) {
      GroupElement gh = groups::multiply(g, h);
      if (!alpha.has(gh)) continue;
      pairs.push_back({g, h, gh});
      vec.push_back(gh);
    }
  ctx.vec_elements = groups::make_set(std::move(vec));
  auto idx = [&](const GroupElement& e) {
    return static_cast<Index>(
        std::lower_bound(ctx.vec_elements.begin(), ctx.vec_elements.end(), e) -
        ctx.vec_elements.begin());
  };
  for (const auto& [g, h, gh] : pairs)
    ctx.comp_pairs.push_back({idx(g), idx(h), idx(gh)});
  if (params.ds_scope != DsScope::off) {
    const ElementSet& base =
        params.ds_scope == DsScope::full ? params.F : params.E;
    for (const auto& g : base)
      if (!g.is_identity()) ctx.ds_elements.push_back(g);
  }
  return ctx;
}

ConditionReport evaluate_candidate(const SearchContext& ctx, const Vector& xi) {
  const HyperlinearApprox& alpha = *ctx.alpha;
  const ProjectionRep& p = *ctx.p;
  const SearchParams& params = *ctx.params;
  const Index d = alpha.dim();
  const Index nv = static_cast<Index>(ctx.vec_elements.size());
  const Index nf = static_cast<Index>(params.F.size());

  ConditionReport rep;
  rep.thresholds = params.thresholds;

  Matrix w(d, nv);
  for (Index i = 0; i < nv; ++i) w.col(i) = alpha.unit(ctx.vec_elements[i]) * xi;

  for (const auto& pair : ctx.comp_pairs) {
    Vector lhs = alpha.unit(ctx.vec_elements[pair[0]]) * w.col(pair[1]);
    rep.composition_measured =
        std::max(rep.composition_measured, (lhs - w.col(pair[2])).norm());
  }

  auto windex = [&](const GroupElement& e) {
    return static_cast<Index>(
        std::lower_bound(ctx.vec_elements.begin(), ctx.vec_elements.end(), e) -
        ctx.vec_elements.begin());
  };
  Matrix wf(d, nf);  // a(h) xi in F order
  for (Index i = 0; i < nf; ++i) wf.col(i) = w.col(windex(params.F[i]));

  if (!p.is_zero()) {
    Matrix pw = p.basis.adjoint() * wf;
    rep.kappa_measured = pw.colwise().norm().maxCoeff();
    Matrix pwf = p.basis * pw;
    for (const auto& g : params.E) {
      Matrix moved = alpha.unit(g) * pwf;
      moved -= p.basis * (p.basis.adjoint() * moved);
      rep.cross_measured =
          std::max(rep.cross_measured, moved.colwise().norm().maxCoeff());
    }
  }

  Matrix comp = wf;
  if (!p.is_zero()) comp -= p.basis * (p.basis.adjoint() * wf);
  rep.overlap_measured = linalg::max_offdiag_abs(Matrix(comp.adjoint() * comp));

  for (const auto& g : ctx.ds_elements) {
    const linalg::UnitaryEigen& eig = alpha.eigen(g);
    Matrix coef = eig.vectors.adjoint() * comp;
    for (Index i = 0; i < nf; ++i) {
      RealVector masses = coef.col(i).cwiseAbs2();
      double total = masses.sum();
      if (total <= kMassTol) continue;
      std::vector<torus::AtomicTorusMeasure::Atom> atoms;
      atoms.reserve(static_cast<std::size_t>(d));
      for (Index k = 0; k < d; ++k)
        atoms.push_back({eig.phases(k), masses(k) / total});
      double ds =
          torus::ds_n(torus::AtomicTorusMeasure(std::move(atoms)), params.N);
      rep.ds_measured = std::max(rep.ds_measured, ds);
    }
  }

  auto ratio = [](double measured, double threshold) {
    if (measured <= 0) return 0.0;
    if (threshold <= 0) return std::numeric_limits<double>::infinity();
    return measured / threshold;
  };
  rep.score = std::max({ratio(rep.kappa_measured, rep.thresholds.kappa),
                        ratio(rep.cross_measured, rep.thresholds.cross),
                        ratio(rep.composition_measured, rep.thresholds.composition),
                        ratio(rep.overlap_measured, rep.thresholds.overlap),
                        ctx.ds_elements.empty()
                            ? 0.0
                            : ratio(rep.ds_measured, rep.thresholds.ds)});
  rep.admissible = rep.score <= 1.0 + 1e-12;
  return rep;
}

}  // namespace

SearchResult candidate_vector_search(const HyperlinearApprox& alpha,
                                     const ProjectionRep& p,
                                     const SearchParams& params,
                                     sphere::SeededSampler& sampler) {
  SearchResult out;
  out.report.thresholds = params.thresholds;
  out.report.score = std::numeric_limits<double>::infinity();
  if (params.budget <= 0) return out;
  if (params.F.empty()) throw DomainError("candidate_vector_search: empty F");

  SearchContext ctx = build_search_context(alpha, p, params);
  // warm the caches so the parallel loop only reads
  for (const auto& g : ctx.vec_elements) alpha.unit(g);
  for (const auto& g : ctx.ds_elements) alpha.eigen(g);

  const Index chunk = std::max<Index>(env_thread_count(), 1);
  ConditionReport best;
  best.score = std::numeric_limits<double>::infinity();
  Vector best_xi;

  std::vector<Vector> xis(static_cast<std::size_t>(chunk));
  std::vector<ConditionReport> reps(static_cast<std::size_t>(chunk));
  Index drawn = 0;
  while (drawn < params.budget) {
    Index batch = std::min<Index>(chunk, params.budget - drawn);
    for (Index i = 0; i < batch; ++i) {
      sphere::SeededSampler local(sampler.seed, sampler.counter + drawn + i);
      xis[static_cast<std::size_t>(i)] =
          sphere::sample_unit_vector(alpha.dim(), local);
    }
    parallel_indexed(batch, [&](Index i) {
      reps[static_cast<std::size_t>(i)] =
          evaluate_candidate(ctx, xis[static_cast<std::size_t>(i)]);
    });
    for (Index i = 0; i < batch; ++i) {
      const auto& r = reps[static_cast<std::size_t>(i)];
      if (r.score < best.score) {
        best = r;
        best_xi = xis[static_cast<std::size_t>(i)];
      }
      if (r.admissible) {
        out.found = true;
        out.xi = xis[static_cast<std::size_t>(i)];
        out.report = r;
        out.draws_used = drawn + i + 1;
        sampler.counter += static_cast<std::uint64_t>(out.draws_used);
        return out;
      }
      if (!params.best_of) break;
    }
    drawn += batch;
  }
  out.found = false;
  out.draws_used = drawn;
  out.report = best;
  out.xi = best_xi;
  sampler.counter += static_cast<std::uint64_t>(drawn);
  return out;
}

// ---------------------------------------------------------------------------
// Inner recursion
// ---------------------------------------------------------------------------

RecursionState RecursionState::initial(Index d) {
  RecursionState s;
  s.p = ProjectionRep::zero(d);
  return s;
}

ConditionThresholds StepSettings::thresholds() const {
  ConditionThresholds t;
  t.kappa = kappa * slack;
  t.cross = std::min(kappa * nu, nu / 5.0) * slack;
  t.composition = 2.0 * delta * slack;
  t.overlap = 2.0 * delta * slack;
  t.ds = 2.0 * delta * slack;
  return t;
}

namespace {

double complement_ds_max(const HyperlinearApprox& alpha, const ElementSet& scope,
                         const ProjectionRep& p, int N) {
  double worst = 0;
  for (const auto& g : scope) {
    if (g.is_identity()) continue;
    const linalg::UnitaryEigen& eig = alpha.eigen(g);
    torus::AtomicTorusMeasure mu =
        p.rank() == 0
            ? spectra::localized_spectral_measure(
                  eig,
                  ProjectionRep(alpha.dim(),
                                Matrix::Identity(alpha.dim(), alpha.dim())))
                  .measure
            : spectra::localized_spectral_measure_complement(eig, p).measure;
    worst = std::max(worst, torus::ds_n(mu, N));
  }
  return worst;
}

}  // namespace

StepOutcome inner_step(const HyperlinearApprox& alpha,
                       const RecursionState& state, const StepSettings& settings,
                       sphere::SeededSampler& sampler) {
  StepOutcome out;
  out.state = state;
  const Index d = alpha.dim();
  const Index nf = static_cast<Index>(settings.F.size());
  const double trp = static_cast<double>(state.p.rank());
  StepMetrics& m = out.metrics;
  m.step = state.steps;
  m.tr_p = state.p.rank();

  // --- entry hypotheses ---
  if (settings.check_trace_cap &&
      trp > settings.kappa * settings.kappa * static_cast<double>(d) / 2.0) {
    out.reason = "hypothesis: trace cap tr(p) <= kappa^2 d / 2 violated";
    return out;
  }
  if (state.p.rank() > 0) {
    double ai = almost_invariance_defect(alpha, state.p, settings.E);
    if (ai > settings.nu * settings.slack + 1e-12) {
      out.reason =
          "hypothesis: almost-invariance ||(I-p)a(g)p||_HS <= nu sqrt(tr p) "
          "violated (measured " +
          std::to_string(ai) + ")";
      return out;
    }
  }
  double delta0 = state.delta0;
  const ElementSet& ds_scope_set =
      settings.ds_scope == DsScope::full
          ? settings.F
          : (settings.ds_scope == DsScope::generating ? settings.E
                                                      : ElementSet{});
  if (!ds_scope_set.empty()) {
    double entry_ds = complement_ds_max(alpha, ds_scope_set, state.p, settings.N);
    if (delta0 <= 0) delta0 = std::max(entry_ds, 1e-12);
    double budget = delta0 * std::exp(16.0 * state.steps *
                                      static_cast<double>(nf) * nf /
                                      static_cast<double>(d));
    if (entry_ds > budget * settings.slack + 1e-12) {
      out.reason =
          "hypothesis: disuniformity budget ds <= delta0 exp(16 n |F|^2 / d) "
          "violated (measured " +
          std::to_string(entry_ds) + ", budget " + std::to_string(budget) + ")";
      return out;
    }
  } else if (delta0 <= 0) {
    delta0 = settings.delta;
  }
  if (trp + static_cast<double>(nf) > static_cast<double>(d)) {
    out.reason = "hypothesis: no room for another |F| columns";
    return out;
  }

  // --- candidate search ---
  SearchParams sp;
  sp.E = settings.E;
  sp.F = settings.F;
  sp.thresholds = settings.thresholds();
  sp.budget = settings.budget;
  sp.ds_scope = settings.ds_scope;
  sp.comp_full_limit = settings.comp_full_limit;
  sp.N = settings.N;
  SearchResult sr = candidate_vector_search(alpha, state.p, sp, sampler);
  m.search_draws = sr.draws_used;
  m.search_report = sr.report;
  if (!sr.found) {
    out.reason = "candidate search exhausted budget " +
                 std::to_string(settings.budget) + " (best score " +
                 std::to_string(sr.report.score) + ")";
    return out;
  }
  m.kappa_measured = sr.report.kappa_measured;
  m.composition_measured = sr.report.composition_measured;

  // --- orthonormalize the new block ---
  Frame xs(d, nf);
  for (Index i = 0; i < nf; ++i) xs.col(i) = alpha.unit(settings.F[i]) * sr.xi;
  auto dec = linalg::complement_decompose(state.p, xs, sp.thresholds.overlap,
                                          settings.kappa, settings.ortho_policy);
  m.ortho_displacement = dec.ortho.max_displacement;

  Frame qb(d, state.p.rank() + nf);
  if (state.p.rank() > 0) qb.leftCols(state.p.rank()) = state.p.basis;
  qb.rightCols(nf) = dec.thetas;
  double gram_defect =
      (qb.adjoint() * qb - Matrix::Identity(qb.cols(), qb.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (gram_defect > kGramTol) {
    out.reason = "clause: block frame lost orthonormality (Gram defect " +
                 std::to_string(gram_defect) + ")";
    return out;
  }
  ProjectionRep q(d, qb);
  m.tr_q = q.rank();

  // --- extend the partial permutations (lowest free slot completion) ---
  RecursionState next = state;
  next.delta0 = delta0;
  const Index base = state.p.rank();
  std::map<GroupElement, Index> labels;
  for (Index i = 0; i < nf; ++i) labels[settings.F[i]] = base + i;
  next.slot_labels.push_back(labels);
  for (const auto& g : settings.E2) {
    auto& perm = next.tau[g];
    perm.resize(static_cast<std::size_t>(base + nf), -1);
    std::vector<bool> taken(static_cast<std::size_t>(nf), false);
    std::vector<Index> unmatched;
    for (Index i = 0; i < nf; ++i) {
      GroupElement gh = groups::multiply(g, settings.F[i]);
      auto it = labels.find(gh);
      if (it != labels.end()) {
        perm[static_cast<std::size_t>(base + i)] = it->second;
        taken[static_cast<std::size_t>(it->second - base)] = true;
      } else {
        unmatched.push_back(base + i);
      }
    }
    Index free_slot = 0;
    for (Index src : unmatched) {
      while (taken[static_cast<std::size_t>(free_slot)]) ++free_slot;
      perm[static_cast<std::size_t>(src)] = base + free_slot;
      taken[static_cast<std::size_t>(free_slot)] = true;
    }
  }

  // --- verify clauses at the scheduled constants ---
  const double sqrt_trq = std::sqrt(static_cast<double>(q.rank()));
  m.trii_rhs = (settings.nu * settings.nu +
                std::pow(4.0 * settings.kappa +
                             10.0 * static_cast<double>(nf) * settings.delta,
                         2)) *
               static_cast<double>(q.rank());
  for (const auto& g : settings.E) {
    Matrix moved = alpha.unit(g) * qb;
    Matrix resid = moved - qb * (qb.adjoint() * moved);
    m.nu_measured = std::max(m.nu_measured, resid.norm() / sqrt_trq);
    const auto& perm = next.tau.at(g);
    double dist2 = 0;
    for (Index s = 0; s < q.rank(); ++s)
      dist2 += (qb.col(perm[static_cast<std::size_t>(s)]) - moved.col(s))
                   .squaredNorm();
    m.trii_lhs = std::max(m.trii_lhs, dist2);
  }
  if (m.nu_measured > settings.nu * settings.slack + 1e-12) {
    out.reason =
        "clause (b): ||(I-q)a(g)q||_HS <= nu sqrt(tr q) violated (measured " +
        std::to_string(m.nu_measured) + ")";
    return out;
  }
  if (!ds_scope_set.empty() && q.rank() < d) {  // vacuous once q fills H
    m.ds_budget = delta0 * std::exp(16.0 * (state.steps + 1) *
                                    static_cast<double>(nf) * nf /
                                    static_cast<double>(d));
    m.ds_measured = complement_ds_max(alpha, ds_scope_set, q, settings.N);
    if (m.ds_measured > m.ds_budget * settings.slack + 1e-12) {
      out.reason =
          "clause (c): complement disuniformity exceeded the inflation budget "
          "(measured " +
          std::to_string(m.ds_measured) + ", budget " +
          std::to_string(m.ds_budget) + ")";
      return out;
    }
  }
  if (m.trii_lhs > m.trii_rhs * settings.slack + 1e-9) {
    out.reason =
        "clause: permutation distance (nu^2 + (4 kappa + 10 |F| delta)^2) tr(q)"
        " violated (measured " +
        std::to_string(m.trii_lhs) + ", budget " + std::to_string(m.trii_rhs) +
        ")";
    return out;
  }

  next.p = std::move(q);
  next.steps = state.steps + 1;
  next.log.push_back(m);
  out.accepted = true;
  out.state = std::move(next);
  return out;
}

// ---------------------------------------------------------------------------
// Block builder
// ---------------------------------------------------------------------------

BlockResult build_block(const HyperlinearApprox& alpha,
                        const BlockSettings& settings,
                        sphere::SeededSampler& sampler) {
  BlockResult out;
  const Index d = alpha.dim();
  if (d < settings.min_dim) {
    out.reason = "dimension " + std::to_string(d) +
                 " below the required floor " + std::to_string(settings.min_dim);
    return out;
  }
  const double kappa = settings.step.kappa;
  double cap_fraction = settings.trace_cap_fraction > 0
                            ? settings.trace_cap_fraction
                            : kappa * kappa / 2.0;
  const double cap = cap_fraction * static_cast<double>(d);

  RecursionState state = RecursionState::initial(d);
  while (static_cast<double>(state.p.rank()) <= cap) {
    if (state.p.rank() + static_cast<Index>(settings.step.F.size()) > d) {
      out.reason = "insufficient dimension for another step (rank " +
                   std::to_string(state.p.rank()) + " + |F| exceeds " +
                   std::to_string(d) + ")";
      out.metrics.step_log = state.log;
      return out;
    }
    StepOutcome step = inner_step(alpha, state, settings.step, sampler);
    if (!step.accepted) {
      out.reason = step.reason;
      out.metrics.step_log = state.log;
      out.metrics.step_log.push_back(step.metrics);
      return out;
    }
    state = std::move(step.state);
  }

  out.p = state.p;
  out.metrics.steps = state.steps;
  out.metrics.block_rank = state.p.rank();
  out.metrics.step_log = state.log;

  out.beta.basis = state.p.basis;
  out.beta.sofic.point_count = state.p.rank();
  out.beta.sofic.support = settings.step.E2;
  out.beta.sofic.perms = state.tau;
  out.beta.identity_block_rank = 0;

  const double nu = settings.step.nu;
  out.metrics.beta_target2 =
      std::pow(5.0 * kappa + nu, 2) * static_cast<double>(state.p.rank());
  for (const auto& g : settings.step.E) {
    Matrix diff = alpha.unit(g) * state.p.basis;
    const auto& perm = out.beta.sofic.perm(g);
    for (Index s = 0; s < state.p.rank(); ++s)
      diff.col(s) -= state.p.basis.col(perm[static_cast<std::size_t>(s)]);
    out.metrics.beta_distance2 =
        std::max(out.metrics.beta_distance2, diff.squaredNorm());
  }

  const Index dc = d - state.p.rank();
  out.metrics.gamma_target2 = 4.0 * nu * nu * static_cast<double>(dc);
  out.metrics.gamma_defect_target = 7.0 * nu;
  if (dc > 0) {
    out.complement = linalg::complement_basis(state.p.basis, d);
    for (const auto& g : settings.gamma_support) {
      Matrix ac = alpha.unit(g) * out.complement;
      Matrix w = out.complement.adjoint() * ac;
      Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
      if (groups::contains(settings.step.E, g)) {
        double dist2 = (ac - out.complement * polar).squaredNorm();
        out.metrics.gamma_distance2 =
            std::max(out.metrics.gamma_distance2, dist2);
      }
      out.gamma.emplace(g, std::move(polar));
    }
    if (!out.gamma.empty()) {
      HyperlinearApprox gamma_approx = HyperlinearApprox::from_map(dc, out.gamma);
      DefectReport grep = validate_hyperlinear(gamma_approx, settings.step.E,
                                               out.metrics.gamma_defect_target);
      out.metrics.gamma_defect = std::max(grep.max_composition, grep.max_trace);
    }
  } else {
    out.complement = Matrix(d, 0);
  }
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

ElementSet block_needed_support(const GroupSpec& spec, const ElementSet& E,
                                const ElementSet& E2, int folner_radius,
                                Index comp_full_limit) {
  groups::FolnerBox box = groups::folner_box(spec, folner_radius);
  std::vector<GroupElement> need(box.elements.begin(), box.elements.end());
  for (const auto& g : E2) need.push_back(g);
  const bool full = static_cast<Index>(box.elements.size()) <= comp_full_limit;
  const ElementSet& lhs = full ? box.elements : E;
  for (const auto& g : lhs)
    for (const auto& h : box.elements) need.push_back(groups::multiply(g, h));
  return groups::make_set(std::move(need));
}

}  // namespace

std::vector<CertificateEntry> verify_certificate(const HyperlinearApprox& alpha,
                                                 const SoficInducedApprox& beta,
                                                 const ElementSet& E,
                                                 double eps) {
  std::vector<CertificateEntry> out;
  const Index d = alpha.dim();

  beta.sofic.validate_bijections();
  Matrix gram = beta.basis.adjoint() * beta.basis;
  double gram_defect =
      (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  out.push_back({"permutation_basis_orthonormal", gram_defect, kGramTol,
                 gram_defect <= kGramTol});

  DefectReport sofic_rep = validate_sofic(beta.sofic, E, eps);
  out.push_back({"sofic_composition_defect", sofic_rep.max_composition, eps,
                 sofic_rep.max_composition <= eps});
  out.push_back({"sofic_coincidence_defect", sofic_rep.max_trace, eps,
                 sofic_rep.max_trace <= eps});

  double worst = 0;
  for (const auto& g : E)
    worst = std::max(worst, (alpha.unit(g) - beta.beta(g)).squaredNorm());
  double allowed = eps * eps * static_cast<double>(d);
  out.push_back({"hs_distance_sq", worst, allowed, worst <= allowed});
  return out;
}

SofifyResult sofify(const HyperlinearApprox& alpha, const ElementSet& E,
                    double eps, const ParamSchedule& schedule,
                    std::uint64_t seed) {
  SofifyResult res;
  SofifyReport& rep = res.report;
  rep.seed = seed;
  const Index d = alpha.dim();
  if (E.empty()) throw DomainError("sofify: empty E");
  GroupSpec spec(E.front().rank());
  ElementSet e2 = groups::product_set(E, E);

  ScheduleCheck check = validate_schedule(schedule, spec, E, d);
  rep.schedule_violations = check.violations;
  if (schedule.strict && !check.ok()) {
    std::string msg = "sofify: schedule refused:";
    for (const auto& v : check.violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  if (d < schedule.min_dim)
    throw ConfigError("sofify: dimension " + std::to_string(d) +
                      " below required minimum " +
                      std::to_string(schedule.min_dim));

  rep.input_defects = validate_hyperlinear(alpha, E, eps);

  sphere::SeededSampler master(seed);
  struct BlockRecord {
    Frame basis_global;
    std::map<GroupElement, std::vector<Index>> tau;
  };
  std::vector<BlockRecord> records;
  Matrix embed = Matrix::Identity(d, d);
  std::optional<HyperlinearApprox> current;

  for (int i = 0; i < schedule.m; ++i) {
    const HyperlinearApprox& a = current ? *current : alpha;
    const BlockParams& bp = schedule.blocks[static_cast<std::size_t>(i)];
    groups::FolnerBox box = groups::folner_box(spec, bp.folner_radius);

    BlockSettings bs;
    bs.step.E = E;
    bs.step.E2 = e2;
    bs.step.F = box.elements;
    bs.step.kappa = schedule.kappa;
    bs.step.nu = bp.nu;
    bs.step.delta = bp.delta;
    bs.step.N = schedule.N;
    bs.step.budget = schedule.budget;
    bs.step.slack = schedule.slack;
    bs.step.ds_scope = schedule.ds_scope;
    bs.step.comp_full_limit = schedule.comp_full_limit;
    bs.min_dim = schedule.min_dim;
    bs.step.ortho_policy = schedule.strict
                               ? linalg::PreconditionPolicy::enforce
                               : linalg::PreconditionPolicy::monitored;
    if (i + 1 < schedule.m) {
      bs.gamma_support = block_needed_support(
          spec, E, e2,
          schedule.blocks[static_cast<std::size_t>(i + 1)].folner_radius,
          schedule.comp_full_limit);
    } else {
      bs.gamma_support = e2;
    }
    rep.enforced = bs.step.thresholds();

    sphere::SeededSampler block_sampler =
        master.substream(static_cast<std::uint64_t>(i) + 1);
    BlockResult block = build_block(a, bs, block_sampler);
    rep.per_block.push_back(block.metrics);
    if (!block.ok) {
      res.failed = true;
      rep.failure = "block " + std::to_string(i) + ": " + block.reason;
      break;
    }
    records.push_back({embed * block.beta.basis, block.beta.sofic.perms});
    rep.block_ranks.push_back(block.p.rank());
    embed = (embed * block.complement).eval();
    if (embed.cols() == 0 || block.gamma.empty()) {
      current.reset();
      if (i + 1 < schedule.m) {
        res.failed = true;
        rep.failure = "block " + std::to_string(i) +
                      ": complement exhausted before the last block";
        break;
      }
    } else {
      current.emplace(HyperlinearApprox::from_map(embed.cols(), block.gamma));
    }
    if (i == 0) alpha.release_cache();
  }

  // assemble beta = blocks (+) identity tail
  Index slot_total = 0;
  for (const auto& r : records) slot_total += r.basis_global.cols();
  const Index tail = d - slot_total;
  rep.identity_block_rank = tail;

  SoficInducedApprox beta;
  beta.basis.resize(d, d);
  Index offset = 0;
  for (const auto& r : records) {
    beta.basis.middleCols(offset, r.basis_global.cols()) = r.basis_global;
    offset += r.basis_global.cols();
  }
  if (tail > 0) beta.basis.rightCols(tail) = embed;
  beta.sofic.point_count = d;
  beta.sofic.support = e2;
  beta.identity_block_rank = tail;
  for (const auto& g : e2) {
    std::vector<Index> perm(static_cast<std::size_t>(d));
    Index base = 0;
    for (const auto& r : records) {
      const auto& tau = r.tau.at(g);
      for (std::size_t s = 0; s < tau.size(); ++s)
        perm[static_cast<std::size_t>(base) + s] = base + tau[s];
      base += static_cast<Index>(tau.size());
    }
    for (Index v = base; v < d; ++v) perm[static_cast<std::size_t>(v)] = v;
    beta.sofic.perms.emplace(g, std::move(perm));
  }
  res.beta = beta;

  if (res.failed) {
    res.certified = false;
    return res;
  }

  rep.certificate = verify_certificate(alpha, beta, E, eps);
  for (const auto& g : E) {
    double dist2 = (alpha.unit(g) - beta.beta(g)).squaredNorm();
    rep.distance2_raw = std::max(rep.distance2_raw, dist2);
  }
  rep.distance2 = rep.distance2_raw / static_cast<double>(d);
  double tail_bound =
      std::pow(1.0 - schedule.kappa * schedule.kappa / 2.0, schedule.m) *
      static_cast<double>(d);
  rep.certificate.push_back({"identity_tail_dim", static_cast<double>(tail),
                             tail_bound,
                             static_cast<double>(tail) <= tail_bound});
  res.certified = true;
  for (const auto& entry : rep.certificate) res.certified &= entry.pass;
  rep.certified = res.certified;
  return res;
}

}  // namespace soficize::sofic
