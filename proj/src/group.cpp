#include "soficize/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace soficize::groups {

bool GroupElement::is_identity() const {
  return std::all_of(coords.begin(), coords.end(),
                     [](std::int64_t c) { return c == 0; });
}

GroupSpec::GroupSpec(int r) : rank(r) {
  if (r < 1) throw DomainError("group rank must be >= 1");
}

GroupElement GroupSpec::identity() const {
  return GroupElement(std::vector<std::int64_t>(rank, 0));
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  if (g.rank() != h.rank())
    throw StructuralError("group element rank mismatch: " +
                          std::to_string(g.rank()) + " vs " +
                          std::to_string(h.rank()));
  GroupElement out = g;
  for (int i = 0; i < g.rank(); ++i) out.coords[i] += h.coords[i];
  return out;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement out = g;
  for (auto& c : out.coords) c = -c;
  return out;
}

FolnerBox folner_box(const GroupSpec& spec, int radius) {
  if (radius < 0) throw DomainError("folner radius must be >= 0");
  FolnerBox box;
  box.radius = radius;
  const int r = spec.rank;
  GroupElement cur(std::vector<std::int64_t>(r, -radius));
  while (true) {
    box.elements.push_back(cur);
    int i = r - 1;
    while (i >= 0 && cur.coords[i] == radius) {
      cur.coords[i] = -radius;
      --i;
    }
    if (i < 0) break;
    ++cur.coords[i];
  }
  std::sort(box.elements.begin(), box.elements.end());
  return box;
}

ElementSet make_set(std::vector<GroupElement> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

ElementSet product_set(const ElementSet& a, const ElementSet& b) {
  std::set<GroupElement> out;
  for (const auto& g : a)
    for (const auto& h : b) out.insert(multiply(g, h));
  return ElementSet(out.begin(), out.end());
}

bool contains(const ElementSet& a, const GroupElement& g) {
  return std::binary_search(a.begin(), a.end(), g);
}

bool is_subset(const ElementSet& a, const ElementSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool is_symmetric(const ElementSet& a) {
  return std::all_of(a.begin(), a.end(),
                     [&](const GroupElement& g) { return contains(a, inverse(g)); });
}

double boundary_ratio(const ElementSet& E, const ElementSet& F) {
  if (F.empty()) throw DomainError("boundary_ratio: F must be nonempty");
  if (E.empty()) throw DomainError("boundary_ratio: E must be nonempty");
  ElementSet ef = product_set(E, F);
  std::size_t sym_diff = 0;
  for (const auto& g : ef)
    if (!contains(F, g)) ++sym_diff;
  for (const auto& g : F)
    if (!contains(ef, g)) ++sym_diff;
  return static_cast<double>(sym_diff) / static_cast<double>(F.size());
}

FolnerBox choose_folner_radius(const GroupSpec& spec, const ElementSet& E,
                               double bound, int max_radius) {
  if (bound <= 0) throw DomainError("choose_folner_radius: bound must be > 0");
  ElementSet e2 = product_set(E, E);
  for (int L = 0; L <= max_radius; ++L) {
    FolnerBox box = folner_box(spec, L);
    if (!is_subset(e2, box.elements)) continue;
    if (boundary_ratio(E, box.elements) <= bound) return box;
  }
  throw DomainError("choose_folner_radius: no radius <= " +
                    std::to_string(max_radius) + " meets bound " +
                    std::to_string(bound));
}

std::string to_string(const GroupElement& g) {
  std::string s = "(";
  for (int i = 0; i < g.rank(); ++i) {
    if (i) s += ",";
    s += std::to_string(g.coords[i]);
  }
  return s + ")";
}

}  // namespace soficize::groups
