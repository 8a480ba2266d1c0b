#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "soficize/torus_measure.hpp"

using namespace soficize;
using namespace soficize::torus;

namespace {

std::mt19937_64 rng(20240816);

AtomicTorusMeasure random_measure(int max_atoms = 12) {
  std::uniform_int_distribution<int> n_atoms(1, max_atoms);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> mass(0.01, 1.0);
  int n = n_atoms(rng);
  std::vector<AtomicTorusMeasure::Atom> atoms;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    double m = mass(rng);
    atoms.push_back({std::min(pos(rng), 1.0 - 1e-12), m});
    total += m;
  }
  for (auto& a : atoms) a.mass /= total;
  return AtomicTorusMeasure(std::move(atoms));
}

}  // namespace

TEST_CASE("ds_n fixed values") {
  // exact equidistribution at the grid points
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(k / 8.0);
  CHECK(ds_n(AtomicTorusMeasure::uniform_on(grid), 8) <= 1e-12);

  CHECK(ds_n(AtomicTorusMeasure::point_mass(0.0), 4) == doctest::Approx(1.5));

  AtomicTorusMeasure halves({{0.1, 0.5}, {0.3, 0.5}});
  CHECK(ds_n(halves, 4) == doctest::Approx(1.0));

  // boundary convention: an atom exactly at k/N lands in interval k
  AtomicTorusMeasure at_boundary({{0.25, 1.0}});
  CHECK(at_boundary.interval_mass(0.25, 0.5) == doctest::Approx(1.0));
  CHECK(at_boundary.interval_mass(0.0, 0.25) == doctest::Approx(0.0));
}

TEST_CASE("tv_distance fixed values") {
  AtomicTorusMeasure mu({{0.2, 0.5}, {0.7, 0.5}});
  CHECK(tv_distance(mu, mu) == 0.0);
  CHECK(tv_distance(AtomicTorusMeasure::point_mass(0.0),
                    AtomicTorusMeasure::point_mass(0.5)) == doctest::Approx(1.0));
  AtomicTorusMeasure nu({{0.2, 0.75}, {0.7, 0.25}});
  CHECK(tv_distance(mu, nu) == doctest::Approx(0.25));
}

TEST_CASE("mix basics and convexity of ds_n") {
  AtomicTorusMeasure mu({{0.2, 0.5}, {0.7, 0.5}});
  AtomicTorusMeasure same = mix({mu}, {1.0});
  CHECK(tv_distance(mu, same) <= 1e-12);

  AtomicTorusMeasure two =
      mix({AtomicTorusMeasure::point_mass(0.0), AtomicTorusMeasure::point_mass(0.5)},
          {0.5, 0.5});
  CHECK(ds_n(two, 2) <= 1e-12);

  CHECK_THROWS_AS(mix({mu, mu}, {0.5, 0.2}), DomainError);

  for (int trial = 0; trial < 300; ++trial) {
    auto m1 = random_measure(), m2 = random_measure(), m3 = random_measure();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng), c = u(rng);
    double t = a + b + c;
    std::vector<double> w = {a / t, b / t, c / t};
    for (int N : {1, 2, 5, 8}) {
      double lhs = ds_n(mix({m1, m2, m3}, w), N);
      double rhs = w[0] * ds_n(m1, N) + w[1] * ds_n(m2, N) + w[2] * ds_n(m3, N);
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("subtract_rescale fixed values and randomized bound") {
  AtomicTorusMeasure mu({{0.2, 0.5}, {0.7, 0.5}});
  auto self = subtract_rescale(mu, mu, 0.5);
  CHECK(tv_distance(self, mu) <= 1e-12);

  AtomicTorusMeasure uniform2({{0.0, 0.5}, {0.5, 0.5}});
  auto sub = subtract_rescale(uniform2, AtomicTorusMeasure::point_mass(0.0), 0.25);
  REQUIRE(sub.atoms().size() == 2);
  CHECK(sub.atoms()[0].position == doctest::Approx(0.0));
  CHECK(sub.atoms()[0].mass == doctest::Approx(1.0 / 3.0));
  CHECK(sub.atoms()[1].mass == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(
      subtract_rescale(uniform2, AtomicTorusMeasure::point_mass(0.25), 0.5),
      DomainError);

  for (int trial = 0; trial < 300; ++trial) {
    AtomicTorusMeasure nu = random_measure();
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double c = u(rng);
    // build mu >= c nu by mixing nu with something else
    AtomicTorusMeasure other = random_measure();
    AtomicTorusMeasure mu2 = mix({nu, other}, {c, 1.0 - c});
    for (int N : {2, 4, 8}) {
      double lhs = ds_n(subtract_rescale(mu2, nu, c), N);
      double rhs = (ds_n(mu2, N) + c * ds_n(nu, N)) / (1.0 - c);
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("integral_defect analytic cases") {
  TestFunction constant{[](double) { return Complex(1.0, 0.0); }, 1.0, 0.0};
  auto r1 = integral_defect(AtomicTorusMeasure::point_mass(0.3), constant, 4);
  CHECK(r1.lhs <= 1e-9);

  TestFunction wave{
      [](double x) { return std::exp(Complex(0, 2 * std::numbers::pi * x)); },
      1.0, 2 * std::numbers::pi};
  auto r2 = integral_defect(AtomicTorusMeasure::point_mass(0.0), wave, 8);
  CHECK(r2.lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r2.rhs == doctest::Approx(7.0 / 4.0 + std::numbers::pi / 2.0));
  CHECK(r2.lhs <= r2.rhs);
}

TEST_CASE("integral_defect randomized trigonometric suite") {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double a1 = coeff(rng), b1 = coeff(rng), a2 = coeff(rng), b2 = coeff(rng);
    auto f = [=](double x) {
      return Complex(a1 * std::cos(2 * std::numbers::pi * x) +
                         a2 * std::cos(4 * std::numbers::pi * x),
                     b1 * std::sin(2 * std::numbers::pi * x) +
                         b2 * std::sin(4 * std::numbers::pi * x));
    };
    // crude but valid sup bounds
    double sup = std::abs(a1) + std::abs(a2) + std::abs(b1) + std::abs(b2);
    double sup_deriv = 2 * std::numbers::pi *
                       (std::abs(a1) + std::abs(b1) +
                        2 * (std::abs(a2) + std::abs(b2)));
    TestFunction psi{f, sup, sup_deriv};
    AtomicTorusMeasure mu = random_measure();
    for (int N : {2, 4, 8, 16}) {
      auto r = integral_defect(mu, psi, N);
      CHECK(r.lhs <= r.rhs + 1e-9);
    }
  }
}

TEST_CASE("ds vs tv perturbation bound and ds range") {
  for (int trial = 0; trial < 400; ++trial) {
    auto mu = random_measure();
    auto nu = random_measure();
    for (int N : {2, 4, 8}) {
      CHECK(std::abs(ds_n(mu, N) - ds_n(nu, N)) <=
            2.0 * tv_distance(mu, nu) + 1e-10);
      double ds = ds_n(mu, N);
      CHECK(ds >= -1e-12);
      CHECK(ds <= 2.0 * (N - 1) / double(N) + 1e-12);
    }
  }
  // point mass attains the maximum
  CHECK(ds_n(AtomicTorusMeasure::point_mass(0.1), 8) ==
        doctest::Approx(2.0 * 7.0 / 8.0));
}

TEST_CASE("tv satisfies the triangle inequality on random triples") {
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_measure(), b = random_measure(), c = random_measure();
    CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
  }
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(AtomicTorusMeasure({{1.5, 1.0}}), DomainError);
  CHECK_THROWS_AS(AtomicTorusMeasure({{0.5, 0.6}}), DomainError);
  // atoms at merge-tolerance distance coalesce
  AtomicTorusMeasure merged({{0.5, 0.5}, {0.5 + 1e-13, 0.5}});
  CHECK(merged.atoms().size() == 1);
}
