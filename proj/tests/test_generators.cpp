#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soficize/generators.hpp"
#include "soficize/sofic.hpp"

using namespace soficize;
using namespace soficize::gen;

namespace {

groups::ElementSet box_set(int rank, int radius) {
  return groups::folner_box(groups::GroupSpec(rank), radius).elements;
}

}  // namespace

TEST_CASE("exact shift is an exact representation with traceless powers") {
  GenConfig cfg;
  cfg.kind = Kind::exact_shift;
  cfg.dim = 101;
  cfg.support_radius = 7;
  cfg.seed = 1;
  sofic::HyperlinearApprox alpha = generate_test_approx(cfg);
  sofic::DefectReport rep =
      validate_hyperlinear(alpha, box_set(1, 3), 1e-6);
  CHECK(rep.max_composition <= 1e-18);
  CHECK(rep.max_trace <= 1e-10);
  CHECK(rep.pass);
  // conjugation keeps matrices exactly unitary
  const Matrix& u = alpha.unit(groups::GroupElement({1}));
  CHECK((u.adjoint() * u - Matrix::Identity(101, 101)).norm() <= 1e-12);
}

TEST_CASE("perturbed shift carries noise-sized defects and exact unitarity") {
  GenConfig cfg;
  cfg.kind = Kind::perturbed_shift;
  cfg.dim = 64;
  cfg.noise = 0.05;
  cfg.support_radius = 4;
  cfg.seed = 2;
  sofic::HyperlinearApprox alpha = generate_test_approx(cfg);
  groups::GroupElement one({1});
  const Matrix& u = alpha.unit(one);
  CHECK((u.adjoint() * u - Matrix::Identity(64, 64)).norm() <= 1e-11);
  CHECK((alpha.unit(groups::inverse(one)) - u.adjoint()).norm() <= 1e-12);
  CHECK((alpha.unit(groups::GroupElement({0})) -
         Matrix::Identity(64, 64)).norm() == 0.0);

  sofic::DefectReport rep = validate_hyperlinear(alpha, box_set(1, 2), 0.5);
  CHECK(rep.max_composition > 1e-8);
  CHECK(rep.max_composition <= 0.1);
}

TEST_CASE("identical configs produce bit-identical families") {
  GenConfig cfg;
  cfg.kind = Kind::perturbed_shift;
  cfg.dim = 32;
  cfg.noise = 0.1;
  cfg.support_radius = 3;
  cfg.seed = 77;
  sofic::HyperlinearApprox a = generate_test_approx(cfg);
  sofic::HyperlinearApprox b = generate_test_approx(cfg);
  for (const auto& g : box_set(1, 3))
    CHECK((a.unit(g) - b.unit(g)).norm() == 0.0);
}

TEST_CASE("rank-2 torus models") {
  GenConfig cfg;
  cfg.kind = Kind::exact_shift;
  cfg.rank = 2;
  cfg.dim = 49;
  cfg.support_radius = 2;
  cfg.seed = 5;
  sofic::HyperlinearApprox alpha = generate_test_approx(cfg);
  sofic::DefectReport rep = validate_hyperlinear(alpha, box_set(2, 1), 1e-6);
  CHECK(rep.max_composition <= 1e-18);
  CHECK(rep.pass);

  GenConfig bad = cfg;
  bad.dim = 50;  // not a square
  CHECK_THROWS_AS(generate_test_approx(bad), ConfigError);
}

TEST_CASE("haar-noise families are far from multiplicative") {
  GenConfig cfg;
  cfg.kind = Kind::haar_noise;
  cfg.dim = 48;
  cfg.support_radius = 2;
  cfg.seed = 6;
  sofic::HyperlinearApprox alpha = generate_test_approx(cfg);
  sofic::DefectReport rep = validate_hyperlinear(alpha, box_set(1, 1), 0.5);
  CHECK(rep.max_composition > 0.5);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("seeded sofic approximations of Z^2 validate with small defects") {
  sofic::SoficApprox sigma = seeded_sofic(2, 100, 10, 11, 2);
  sigma.validate_bijections();
  sofic::DefectReport rep = validate_sofic(sigma, box_set(2, 1), 0.9);
  CHECK(rep.max_composition > 0);
  CHECK(rep.max_composition < 0.9);
  CHECK(rep.pass);

  GenConfig cfg;
  cfg.kind = Kind::sofic_seeded;
  cfg.rank = 1;
  cfg.dim = 64;
  cfg.tile = 16;
  cfg.support_radius = 2;
  cfg.seed = 12;
  sofic::HyperlinearApprox alpha = generate_test_approx(cfg);
  sofic::DefectReport hrep = validate_hyperlinear(alpha, box_set(1, 1), 0.9);
  CHECK(hrep.max_composition > 0);
  CHECK(hrep.pass);
}
