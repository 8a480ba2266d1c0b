// Acceptance suite: every release criterion as an executable check with its
// tolerance pinned in code. Prints one pass/fail line per criterion and
// exits with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "soficize/abelian.hpp"
#include "soficize/generators.hpp"
#include "soficize/linalg.hpp"
#include "soficize/sofic.hpp"
#include "soficize/spectra.hpp"
#include "soficize/sphere.hpp"
#include "soficize/torus_measure.hpp"

using namespace soficize;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix haar(Index d, std::uint64_t seed) {
  sphere::SeededSampler s(seed);
  return sphere::sample_haar_unitary(d, s);
}

// ---------------------------------------------------------------------------
// 1. orthogonalization: 200 seeded trials, n <= 16, delta <= 1/(2n), d <= 128
// ---------------------------------------------------------------------------
void criterion_orthogonalization() {
  auto t0 = Clock::now();
  int bad = 0;
  std::ostringstream detail;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    sphere::SeededSampler s(10000 + trial);
    std::mt19937_64 rng(500 + trial);
    Index n = 2 + static_cast<Index>(rng() % 15);  // 2..16
    Index d = std::max<Index>(2 * n, 20 + static_cast<Index>(rng() % 109));
    d = std::min<Index>(d, 128);
    double delta = 1.0 / (2.0 * static_cast<double>(n));
    Matrix q = sphere::sample_haar_unitary(d, s).leftCols(n);
    linalg::Frame xs(d, n);
    for (Index k = 0; k < n; ++k) {
      xs.col(k) = q.col(k) + 0.45 * delta * sphere::sample_unit_vector(d, s);
      xs.col(k) /= xs.col(k).norm();
    }
    if (linalg::max_offdiag_abs(linalg::gram(xs)) > delta) {
      ++bad;
      continue;
    }
    linalg::Frame th = linalg::lowdin_orthogonalize(xs, delta);
    bool gram_ok =
        (linalg::gram(th) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <=
        1e-9;
    bool span_ok =
        (xs - th * (th.adjoint() * xs)).colwise().norm().maxCoeff() <= 1e-7 &&
        (th - xs * (xs.colPivHouseholderQr().solve(th))).norm() / th.norm() <=
            1e-6;
    bool bound_ok = (xs - th).colwise().norm().maxCoeff() <=
                    delta * static_cast<double>(n) + 1e-12;
    if (!(gram_ok && span_ok && bound_ok)) ++bad;
  }
  double dt = elapsed(t0);
  detail << "200 trials, " << bad << " violations, " << dt << "s";
  report("orthogonalization", bad == 0 && dt < 5.0, detail.str());
}

// ---------------------------------------------------------------------------
// 2. block-unitary repair: 200 seeded trials with ||(I-p)up||^2 <= delta d
// ---------------------------------------------------------------------------
void criterion_repair() {
  auto t0 = Clock::now();
  int bad = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(900 + trial);
    Index d = 16 + static_cast<Index>(rng() % 81);  // 16..96
    Index r = 4 + static_cast<Index>(rng() % (d / 2 - 3));
    Matrix u = Matrix::Zero(d, d);
    u.topLeftCorner(r, r) = haar(r, 2 * trial);
    u.bottomRightCorner(d - r, d - r) = haar(d - r, 2 * trial + 1);
    int rotations = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < rotations; ++t) {
      double phi = 0.02 + 0.1 * static_cast<double>(rng() % 1000) / 1000.0;
      Matrix g = Matrix::Identity(d, d);
      Index i = static_cast<Index>(rng() % static_cast<std::uint64_t>(r));
      Index j =
          r + static_cast<Index>(rng() % static_cast<std::uint64_t>(d - r));
      g(i, i) = std::cos(phi);
      g(j, j) = std::cos(phi);
      g(j, i) = std::sin(phi);
      g(i, j) = -std::sin(phi);
      u = g * u;
    }
    Matrix bp = Matrix::Zero(d, r);
    bp.topRows(r) = Matrix::Identity(r, r);
    linalg::ProjectionRep p(d, bp);
    Matrix pm = p.matrix();
    double leak2 = ((Matrix::Identity(d, d) - pm) * u * pm).squaredNorm();
    double delta = leak2 / static_cast<double>(d) + 1e-12;
    if (delta >= 0.5) {
      ++bad;
      continue;
    }
    auto rep = linalg::repair_block_unitary(u, p, delta);
    bool commute = (rep.v * pm - pm * rep.v).norm() <= 1e-9;
    bool partial = (rep.v.adjoint() * rep.v - pm).norm() <= 1e-9 &&
                   (rep.v * rep.v.adjoint() - pm).norm() <= 1e-9;
    bool bound = rep.defect_after <= 4.0 * delta * static_cast<double>(d) + 1e-9;
    if (!(commute && partial && bound)) ++bad;
  }
  double dt = elapsed(t0);
  std::ostringstream detail;
  detail << "200 trials, " << bad << " violations, " << dt << "s";
  report("block_unitary_repair", bad == 0 && dt < 10.0, detail.str());
}

// ---------------------------------------------------------------------------
// 3. trace identity: d = 64, 10^4 samples, 20 operators, >= 19/20 inside
//    5 ||s||_op / sqrt(n)
// ---------------------------------------------------------------------------
void criterion_trace_identity() {
  const Index d = 64;
  const Index n = 10000;
  int hits = 0;
  for (int k = 0; k < 20; ++k) {
    Matrix s;
    if (k < 7) {
      s = haar(d, 3000 + k);
    } else if (k < 14) {
      sphere::SeededSampler g(3100 + k);
      RealVector raw = sphere::sample_gaussians(2 * d * d, g);
      s.resize(d, d);
      Index t = 0;
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j, ++t)
          s(i, j) = Complex(raw(2 * t), raw(2 * t + 1)) / std::sqrt(double(d));
    } else {
      sphere::SeededSampler g(3200 + k);
      RealVector diag = sphere::sample_gaussians(d, g);
      s = Matrix::Zero(d, d);
      for (Index i = 0; i < d; ++i) s(i, i) = diag(i);
    }
    sphere::SeededSampler sampler(4000 + k);
    Complex mc = sphere::trace_monte_carlo(s, n, sampler);
    Complex target = s.trace() / static_cast<double>(d);
    double budget = 5.0 * linalg::op_norm(s) / std::sqrt(double(n));
    if (std::abs(mc - target) <= budget) ++hits;
  }
  std::ostringstream detail;
  detail << hits << "/20 within budget";
  report("trace_identity", hits >= 19, detail.str());
}

// ---------------------------------------------------------------------------
// 4. concentration grid: d in {64, 256, 1024}, c in {0.1, 0.3, 0.5},
//    empirical >= paper bound - 3 binomial SE for both event families
// ---------------------------------------------------------------------------
void criterion_concentration() {
  const std::vector<Index> dims = {64, 256, 1024};
  const std::vector<double> cs = {0.1, 0.3, 0.5};
  const Index n = 10000;
  int bad = 0;
  std::ostringstream detail;
  for (Index d : dims) {
    Matrix s_quad = haar(d, 5000 + d);
    // rank-d/2 projection in a random basis: a nontrivial norm-mode operator
    Matrix w = haar(d, 5100 + d);
    Matrix s_norm = w.leftCols(d / 2) * w.leftCols(d / 2).adjoint();
    const Complex mean_target = s_quad.trace() / static_cast<double>(d);
    const double hs2_over_d = s_norm.squaredNorm() / static_cast<double>(d);
    std::vector<Index> quad_hits(cs.size(), 0), norm_hits(cs.size(), 0);
    sphere::SeededSampler sampler(6000 + d);
    for (Index i = 0; i < n; ++i) {
      Vector xi = sphere::sample_unit_vector(d, sampler);
      double quad_stat = std::abs(xi.dot(s_quad * xi) - mean_target);
      double norm_stat = (s_norm * xi).squaredNorm();
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        if (quad_stat <= cs[ci]) ++quad_hits[ci];
        if (norm_stat <= cs[ci] + hs2_over_d) ++norm_hits[ci];
      }
    }
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      double c = cs[ci];
      // ||s||_op = 1 for both operators
      double b = std::clamp(
          1.0 - 2.0 * std::exp(-c * c * (2.0 * double(d) - 1.0) / 8.0), 0.0,
          1.0);
      double se = std::sqrt(std::max(b * (1.0 - b), 1e-12) / double(n));
      double eq = double(quad_hits[ci]) / double(n);
      double en = double(norm_hits[ci]) / double(n);
      if (eq < b - 3 * se || en < b - 3 * se) {
        ++bad;
        detail << " miss(d=" << d << ",c=" << c << ")";
      }
    }
  }
  std::ostringstream head;
  head << "18 grid cells, " << bad << " below bound" << detail.str();
  report("concentration_grid", bad == 0, head.str());
}

// ---------------------------------------------------------------------------
// 5. measure calculus: 500 randomized instances, every stated inequality
//    holds, equalities within 1e-9, under 60 s
// ---------------------------------------------------------------------------
torus::AtomicTorusMeasure random_measure(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_atoms(1, 10);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  int n = n_atoms(rng);
  std::vector<torus::AtomicTorusMeasure::Atom> atoms;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    double m = mass(rng);
    atoms.push_back({std::min(pos(rng), 1.0 - 1e-12), m});
    total += m;
  }
  for (auto& a : atoms) a.mass /= total;
  return torus::AtomicTorusMeasure(std::move(atoms));
}

void criterion_measure_calculus() {
  auto t0 = Clock::now();
  int bad = 0;
  std::ostringstream what;
  auto flag = [&](bool ok, const char* name, int inst) {
    if (!ok) {
      ++bad;
      if (bad < 5) what << " " << name << "@" << inst;
    }
  };
  for (int inst = 0; inst < 500; ++inst) {
    std::mt19937_64 rng(77000 + inst);
    const Index d = 16 + 16 * (inst % 8);  // 16..128
    Matrix u = haar(d, 80000 + inst);
    auto eig = linalg::unitary_eigendecomposition(u);
    const int N = 2 + inst % 8;

    // circle calculus on synthetic atomic measures
    auto mu = random_measure(rng);
    auto nu = random_measure(rng);
    {
      std::uniform_real_distribution<double> coeff(-1.0, 1.0);
      double a1 = coeff(rng), b1 = coeff(rng);
      torus::TestFunction psi{
          [=](double x) {
            return Complex(a1 * std::cos(2 * std::numbers::pi * x),
                           b1 * std::sin(4 * std::numbers::pi * x));
          },
          std::abs(a1) + std::abs(b1),
          2 * std::numbers::pi * (std::abs(a1) + 2 * std::abs(b1))};
      auto idf = torus::integral_defect(mu, psi, N);
      flag(idf.lhs <= idf.rhs + 1e-9, "integral", inst);
    }
    flag(std::abs(torus::ds_n(mu, N) - torus::ds_n(nu, N)) <=
             2.0 * torus::tv_distance(mu, nu) + 1e-10,
         "ds_tv", inst);
    {
      std::uniform_real_distribution<double> wdist(0.0, 1.0);
      double w0 = wdist(rng), w1 = wdist(rng);
      double tot = w0 + w1;
      auto mixed = torus::mix({mu, nu}, {w0 / tot, w1 / tot});
      flag(torus::ds_n(mixed, N) <= (w0 * torus::ds_n(mu, N) +
                                     w1 * torus::ds_n(nu, N)) /
                                            tot +
                                        1e-10,
           "convexity", inst);
      std::uniform_real_distribution<double> cdist(0.1, 0.9);
      double c = cdist(rng);
      auto dom = torus::mix({nu, mu}, {c, 1.0 - c});
      auto sub = torus::subtract_rescale(dom, nu, c);
      flag(torus::ds_n(sub, N) <=
               (torus::ds_n(dom, N) + c * torus::ds_n(nu, N)) / (1.0 - c) +
                   1e-10,
           "subtract", inst);
    }

    // localized spectra
    Matrix frames = haar(d, 81000 + inst);
    Index rank = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(d / 4));
    linalg::ProjectionRep p(d, frames.leftCols(rank));
    auto tvd = spectra::trace_vs_ds_check(eig, p, N);
    flag(tvd.holds(1e-12), "trace_vs_ds", inst);

    {
      spectra::IntervalSet e = {{0.0, 0.37}, {0.62, 0.9}};
      double mass = spectra::interval_projection_mass(eig, p, e);
      Matrix qb(d, d);
      Index cols = 0;
      for (Index k = 0; k < d; ++k) {
        double ph = eig.phases(k);
        if ((ph >= 0.0 && ph < 0.37) || (ph >= 0.62 && ph < 0.9))
          qb.col(cols++) = eig.vectors.col(k);
      }
      Matrix qm = qb.leftCols(cols) * qb.leftCols(cols).adjoint();
      double oracle = (qm * p.matrix()).squaredNorm() / double(rank);
      flag(std::abs(mass - oracle) <= 1e-9, "interval_mass", inst);

      sphere::SeededSampler vs(82000 + inst);
      Vector xi = sphere::sample_unit_vector(d, vs);
      Vector pxi = p.apply(xi);
      double vmass =
          spectra::set_mass(spectra::localized_spectral_measure(eig, pxi).measure, e);
      Vector qpxi = qm * pxi;
      flag(std::abs(vmass - qpxi.squaredNorm() / pxi.squaredNorm()) <= 1e-9,
           "vector_mass", inst);
    }

    {
      Index r2 = 1 + static_cast<Index>(rng() % 5);
      linalg::ProjectionRep v1(d, frames.leftCols(rank));
      linalg::ProjectionRep v2(d, frames.middleCols(rank, r2));
      linalg::ProjectionRep v12(d, frames.leftCols(rank + r2));
      auto m1 = spectra::localized_spectral_measure(eig, v1).measure;
      auto m2 = spectra::localized_spectral_measure(eig, v2).measure;
      auto m12 = spectra::localized_spectral_measure(eig, v12).measure;
      auto mixed =
          torus::mix({m1, m2}, {double(rank) / double(rank + r2),
                                double(r2) / double(rank + r2)});
      flag(torus::tv_distance(m12, mixed) <= 1e-10, "direct_sum", inst);
      double c = double(r2) / double(rank + r2);
      flag(torus::ds_n(m1, N) <=
               (torus::ds_n(m12, N) + c * torus::ds_n(m2, N)) / (1.0 - c) +
                   1e-10,
           "spec_subtract", inst);
    }

    {
      const Index nvec = 3;
      sphere::SeededSampler vs(83000 + inst);
      linalg::Frame xs(d, nvec);
      for (Index k = 0; k < nvec; ++k) {
        Vector t = frames.col(rank + 5 + k);
        xs.col(k) = t + 0.03 * sphere::sample_unit_vector(d, vs);
        xs.col(k) /= xs.col(k).norm();
      }
      double eta = linalg::max_offdiag_abs(linalg::gram(xs)) + 1e-12;
      if (eta <= 1.0 / nvec) {
        flag(spectra::span_ds_bound(eig, xs, eta, N).holds(1e-10), "span_ds",
             inst);
      }
      linalg::Frame comp(d, nvec);
      for (Index k = 0; k < nvec; ++k) comp.col(k) = p.complement_apply(xs.col(k));
      double delta =
          linalg::max_offdiag_abs(Matrix(comp.adjoint() * xs)) + 1e-12;
      double kap = 0;
      for (Index k = 0; k < nvec; ++k)
        kap = std::max(kap, p.apply(xs.col(k)).norm());
      if (2 * delta <= 1.0 / nvec && 2 * p.rank() <= d && kap <= 0.1 &&
          p.rank() + nvec < d) {
        flag(spectra::persist_bound(eig, p, xs, delta, N).holds(1e-10),
             "persist", inst);
      }
    }
  }
  double dt = elapsed(t0);
  std::ostringstream detail;
  detail << "500 instances, " << bad << " violations" << what.str() << ", "
         << dt << "s";
  report("measure_calculus", bad == 0 && dt < 60.0, detail.str());
}

// ---------------------------------------------------------------------------
// 6. equidistribution surrogate: Haar d = 1024, ds_8 <= 0.15 in >= 95/100,
//    ds_exact <= et_bound always
// ---------------------------------------------------------------------------
void criterion_equidistribution() {
  int small = 0;
  bool bound_ok = true;
  double worst_ds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Matrix u = haar(1024, 90000 + seed);
    auto r = spectra::ds_power_trace_bound(u, 32, 8);
    worst_ds = std::max(worst_ds, r.ds_exact);
    if (r.ds_exact <= 0.15) ++small;
    if (r.ds_exact > r.et_bound) bound_ok = false;
  }
  std::ostringstream detail;
  detail << small << "/100 below 0.15 (worst ds " << worst_ds
         << "), trace bound " << (bound_ok ? "held" : "VIOLATED");
  report("equidistribution_surrogate", small >= 95 && bound_ok, detail.str());
}

// ---------------------------------------------------------------------------
// 7. inner-step invariants on the perturbed shift (d=512, eta=0.05, seed 42)
// ---------------------------------------------------------------------------
void criterion_inner_step() {
  gen::GenConfig cfg;
  cfg.kind = gen::Kind::perturbed_shift;
  cfg.dim = 512;
  cfg.noise = 0.05;
  cfg.support_radius = 15;
  cfg.seed = 42;
  sofic::HyperlinearApprox alpha = gen::generate_test_approx(cfg);
  groups::GroupSpec spec(1);

  sofic::StepSettings st;
  st.E = groups::folner_box(spec, 3).elements;
  st.E2 = groups::folner_box(spec, 6).elements;
  st.F = groups::folner_box(spec, 6).elements;
  st.kappa = 0.35;
  st.nu = 0.7;
  st.delta = 0.07;
  st.N = 8;
  st.budget = 300;
  st.ds_scope = sofic::DsScope::full;

  sphere::SeededSampler sampler(42);
  sofic::RecursionState state = sofic::RecursionState::initial(512);
  bool ok = true;
  std::ostringstream detail;
  const Index f_size = 13;
  double prev_nu = 0;
  for (int step = 0; step < 3; ++step) {
    auto out = sofic::inner_step(alpha, state, st, sampler);
    if (!out.accepted) {
      ok = false;
      detail << " step" << step << " rejected: " << out.reason;
      break;
    }
    const auto& m = out.metrics;
    bool clauses =
        m.composition_measured <= 2 * st.delta + 1e-12 &&   // (a)
        m.nu_measured <= st.nu + 1e-12 &&                   // (b)
        (m.ds_budget == 0 || m.ds_measured <= m.ds_budget + 1e-12) &&  // (c)
        m.kappa_measured <= st.kappa + 1e-12 &&             // (d)
        m.trii_lhs <= m.trii_rhs + 1e-9;
    bool trace_exact = (m.tr_q - m.tr_p) == f_size;
    if (!clauses || !trace_exact) {
      ok = false;
      detail << " step" << step << " clause failure";
    }
    detail << " [step" << step << " nu=" << m.nu_measured
           << " kappa=" << m.kappa_measured << " ds=" << m.ds_measured << "]";
    prev_nu = m.nu_measured;
    state = std::move(out.state);
  }
  (void)prev_nu;
  if (state.steps != 3) ok = false;
  report("inner_step_invariants", ok, "3 steps at scheduled constants," +
                                           detail.str());
}

// ---------------------------------------------------------------------------
// 8. end-to-end theorem shape (d=512, eta=0.05, E = box(3), eps = 0.5,
//    seed 42) plus the oracle feasibility cross-check
// ---------------------------------------------------------------------------
void criterion_end_to_end() {
  auto t0 = Clock::now();
  gen::GenConfig cfg;
  cfg.kind = gen::Kind::perturbed_shift;
  cfg.dim = 512;
  cfg.noise = 0.05;
  cfg.support_radius = 95;
  cfg.seed = 42;
  sofic::HyperlinearApprox alpha = gen::generate_test_approx(cfg);
  groups::GroupSpec spec(1);
  groups::ElementSet E = groups::folner_box(spec, 3).elements;
  const double eps = 0.5;

  // oracle feasibility first: the rounding baseline must reach eps^2
  double oracle_max_e = 0;
  {
    auto orc = abelian::round_eigenvalues_to_permutation(
        alpha.unit(groups::GroupElement({1})), 3);
    for (const auto& g : E)
      oracle_max_e =
          std::max(oracle_max_e,
                   (alpha.unit(g) - orc.beta.beta(g)).squaredNorm() / 512.0);
  }

  sofic::ParamSchedule s;
  s.epsilon = eps;
  s.kappa = 0.35;
  s.N = 8;
  s.budget = 300;
  s.min_dim = 16;
  s.blocks = {{90, 0.8, 0.11},
              {90, 0.8, 0.20},
              {40, 0.8, 0.33},
              {20, 0.8, 0.48},
              {6, 0.8, 0.80}};
  s.m = 5;
  sofic::SofifyResult res = sofify(alpha, E, eps, s, 42);
  double dt = elapsed(t0);

  bool cert_ok = !res.failed && res.certified;
  bool verifier_ok = false;
  if (!res.failed) {
    auto recomputed = sofic::verify_certificate(alpha, res.beta, E, eps);
    verifier_ok = recomputed.size() <= res.report.certificate.size();
    for (std::size_t i = 0; verifier_ok && i < recomputed.size(); ++i)
      verifier_ok = std::abs(recomputed[i].achieved -
                             res.report.certificate[i].achieved) <= 1e-9;
  }
  bool runtime_ok = dt < 600.0;
  bool oracle_feasible = oracle_max_e <= eps * eps;
  bool within_4x = res.report.distance2 <= 4.0 * oracle_max_e;

  std::ostringstream detail;
  detail << "certificate " << (cert_ok ? "pass" : "FAIL") << ", verifier "
         << (verifier_ok ? "match" : "MISMATCH") << ", " << dt << "s"
         << ", dist2 " << res.report.distance2 << ", oracle maxE "
         << oracle_max_e << " (4x check "
         << (within_4x ? "pass" : "FAIL: pipeline exceeds 4x oracle") << ")";
  report("end_to_end_theorem_shape",
         cert_ok && verifier_ok && runtime_ok && oracle_feasible && within_4x,
         detail.str());
}

// ---------------------------------------------------------------------------
// 9. exact-input regression: distance 0 through oracle and pipeline
// ---------------------------------------------------------------------------
void criterion_exact_regression() {
  gen::GenConfig cfg;
  cfg.kind = gen::Kind::exact_shift;
  cfg.dim = 101;
  cfg.support_radius = 55;
  cfg.seed = 42;
  sofic::HyperlinearApprox alpha = gen::generate_test_approx(cfg);
  groups::GroupSpec spec(1);
  groups::ElementSet E = groups::folner_box(spec, 3).elements;

  auto orc = abelian::round_eigenvalues_to_permutation(
      alpha.unit(groups::GroupElement({1})), 3);

  sofic::ParamSchedule s;
  s.epsilon = 0.5;
  s.kappa = 0.35;
  s.N = 8;
  s.budget = 300;
  s.min_dim = 16;
  s.blocks = {{50, 0.8, 0.45}};
  s.m = 1;
  sofic::SofifyResult res = sofify(alpha, E, 0.5, s, 42);

  bool ok = orc.distance <= 1e-9 && !res.failed && res.certified &&
            res.report.distance2 <= 1e-9;
  std::ostringstream detail;
  detail << "oracle " << orc.distance << ", pipeline "
         << (res.failed ? std::string("FAILED: ") + res.report.failure
                        : std::to_string(res.report.distance2));
  report("exact_input_regression", ok, detail.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  criterion_orthogonalization();
  criterion_repair();
  criterion_trace_identity();
  criterion_concentration();
  criterion_measure_calculus();
  criterion_equidistribution();
  criterion_inner_step();
  criterion_end_to_end();
  criterion_exact_regression();
  std::printf("----------------\n%d criterion(s) failed\n", g_failures);
  return g_failures;
}
