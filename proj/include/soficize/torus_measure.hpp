#pragma once

#include <functional>
#include <vector>

#include "soficize/types.hpp"

namespace soficize::torus {

// Finitely many atoms on [0,1) with nonnegative masses summing to 1.
// Atoms are kept sorted by position; positions within kMergeTol merge.
class AtomicTorusMeasure {
 public:
  struct Atom {
    double position;  // in [0,1)
    double mass;      // >= 0
  };

  AtomicTorusMeasure() = default;
  explicit AtomicTorusMeasure(std::vector<Atom> atoms);

  static AtomicTorusMeasure point_mass(double position);
  static AtomicTorusMeasure uniform_on(const std::vector<double>& positions);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const;
  // Mass of [a, b) with 0 <= a <= b <= 1.
  double interval_mass(double a, double b) const;

 private:
  std::vector<Atom> atoms_;
};

// Resolution-N disuniformity: sum_k |mu([k/N,(k+1)/N)) - 1/N|.
// An atom exactly at k/N belongs to interval k.
double ds_n(const AtomicTorusMeasure& mu, int N);

// Exact total variation distance for atomic measures: half the l1 distance
// of masses over the merged atom set.
double tv_distance(const AtomicTorusMeasure& mu, const AtomicTorusMeasure& nu);

// Convex combination; weights must be nonnegative and sum to 1.
AtomicTorusMeasure mix(const std::vector<AtomicTorusMeasure>& measures,
                       const std::vector<double>& weights);

// (mu - c nu) / (1 - c); requires 0 < c < 1 and c*nu <= mu atomwise.
AtomicTorusMeasure subtract_rescale(const AtomicTorusMeasure& mu,
                                    const AtomicTorusMeasure& nu, double c);

// C^1 test function on the circle: value plus sup bounds.
struct TestFunction {
  std::function<Complex(double)> value;
  double sup_abs = 0;        // sup |psi|
  double sup_abs_deriv = 0;  // sup |psi'|
};

struct IntegralDefect {
  double lhs = 0;  // |int psi dmu - int psi dx|
  double rhs = 0;  // ds_n(mu) * sup|psi| + (2/N) * sup|psi'|
};

// Lebesgue integral evaluated by adaptive quadrature to 1e-10.
IntegralDefect integral_defect(const AtomicTorusMeasure& mu,
                               const TestFunction& psi, int N);

}  // namespace soficize::torus
