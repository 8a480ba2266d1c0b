#pragma once

#include <cstdint>
#include <vector>

#include "soficize/types.hpp"

namespace soficize::groups {

// Element of Z^r as an exact integer tuple.
struct GroupElement {
  std::vector<std::int64_t> coords;

  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> c) : coords(std::move(c)) {}

  int rank() const { return static_cast<int>(coords.size()); }
  bool is_identity() const;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  // Lexicographic; fixes the column order of every sofic output.
  friend auto operator<=>(const GroupElement& a, const GroupElement& b) {
    return a.coords <=> b.coords;
  }
};

struct GroupSpec {
  int rank = 1;
  explicit GroupSpec(int r);
  GroupElement identity() const;
};

using ElementSet = std::vector<GroupElement>;  // sorted, unique

GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// All elements with max-norm <= L, lexicographic order.
struct FolnerBox {
  int radius = 0;
  ElementSet elements;
};

FolnerBox folner_box(const GroupSpec& spec, int radius);

ElementSet make_set(std::vector<GroupElement> elems);
ElementSet product_set(const ElementSet& a, const ElementSet& b);
bool is_subset(const ElementSet& a, const ElementSet& b);
bool is_symmetric(const ElementSet& a);
bool contains(const ElementSet& a, const GroupElement& g);

// |EF (symmetric difference) F| / |F| by exact enumeration.
double boundary_ratio(const ElementSet& E, const ElementSet& F);

// Smallest L with boundary_ratio(E, box(L)) <= bound and E^2 inside box(L).
// Scans L upward; throws DomainError past max_radius (Z^r guarantees a hit
// eventually, but how soon is input-dependent).
FolnerBox choose_folner_radius(const GroupSpec& spec, const ElementSet& E,
                               double bound, int max_radius = 4096);

std::string to_string(const GroupElement& g);

}  // namespace soficize::groups
