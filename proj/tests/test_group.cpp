#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soficize/group.hpp"

using namespace soficize;
using namespace soficize::groups;

namespace {

GroupElement el(std::vector<std::int64_t> c) { return GroupElement(std::move(c)); }

// Brute-force |EF (sym diff) F| / |F| used as the independent oracle.
double boundary_ratio_oracle(const ElementSet& E, const ElementSet& F) {
  ElementSet ef = product_set(E, F);
  std::size_t diff = 0;
  for (const auto& g : ef)
    if (!contains(F, g)) ++diff;
  for (const auto& g : F)
    if (!contains(ef, g)) ++diff;
  return double(diff) / double(F.size());
}

}  // namespace

TEST_CASE("multiply is the componentwise group law") {
  CHECK(multiply(el({1, 2}), el({3, -1})) == el({4, 1}));
  GroupSpec spec(2);
  GroupElement g = el({5, -7});
  CHECK(multiply(g, spec.identity()) == g);
  CHECK(multiply(g, inverse(g)) == spec.identity());
  CHECK_THROWS_AS(multiply(el({1}), el({1, 2})), StructuralError);
}

TEST_CASE("folner boxes are symmetric lexicographic windows") {
  GroupSpec spec(2);
  FolnerBox box = folner_box(spec, 2);
  CHECK(box.elements.size() == 25);
  CHECK(contains(box.elements, spec.identity()));
  CHECK(is_symmetric(box.elements));
  CHECK(std::is_sorted(box.elements.begin(), box.elements.end()));
  CHECK(folner_box(GroupSpec(3), 1).elements.size() == 27);
}

TEST_CASE("boundary_ratio on intervals of Z") {
  ElementSet E = make_set({el({-1}), el({0}), el({1})});
  ElementSet F;
  for (int k = -10; k <= 10; ++k) F.push_back(el({k}));
  F = make_set(F);
  CHECK(boundary_ratio(E, F) == doctest::Approx(2.0 / 21.0));

  ElementSet id_only = {el({0})};
  CHECK(boundary_ratio(id_only, F) == 0.0);
  CHECK_THROWS_AS(boundary_ratio(E, ElementSet{}), DomainError);
}

TEST_CASE("boundary_ratio cross-shaped E in Z^2") {
  ElementSet E = make_set(
      {el({0, 0}), el({1, 0}), el({-1, 0}), el({0, 1}), el({0, -1})});
  FolnerBox box = folner_box(GroupSpec(2), 5);
  double r = boundary_ratio(E, box.elements);
  CHECK(r == doctest::Approx(44.0 / 121.0));
  CHECK(r == doctest::Approx(boundary_ratio_oracle(E, box.elements)));
}

TEST_CASE("choose_folner_radius finds the first admissible box") {
  GroupSpec spec(1);
  ElementSet E = make_set({el({-1}), el({0}), el({1})});
  FolnerBox box = choose_folner_radius(spec, E, 0.5);
  CHECK(box.radius == 2);

  // bound >= 2 means only the E^2-containment constraint binds
  FolnerBox loose = choose_folner_radius(spec, E, 2.0);
  CHECK(loose.radius == 2);  // E^2 = {-2..2}

  // scan oracle for a tighter bound and a wider E
  ElementSet E3;
  for (int k = -3; k <= 3; ++k) E3.push_back(el({k}));
  E3 = make_set(E3);
  FolnerBox tight = choose_folner_radius(spec, E3, 0.05);
  int expected = -1;
  ElementSet e2 = product_set(E3, E3);
  for (int L = 0; L < 1000; ++L) {
    FolnerBox b = folner_box(spec, L);
    if (is_subset(e2, b.elements) &&
        boundary_ratio_oracle(E3, b.elements) <= 0.05) {
      expected = L;
      break;
    }
  }
  CHECK(tight.radius == expected);
  CHECK_THROWS_AS(choose_folner_radius(spec, E3, 1e-9, 32), DomainError);
}

TEST_CASE("boundary_ratio is nonincreasing in L and decays to zero") {
  GroupSpec spec(1);
  ElementSet E = make_set({el({-2}), el({-1}), el({0}), el({1}), el({2})});
  double prev = 2.0;
  for (int L = 2; L <= 40; L += 2) {
    double r = boundary_ratio(E, folner_box(spec, L).elements);
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
  CHECK(prev <= 0.1);
}
