#include "soficize/torus_measure.hpp"

#include <algorithm>
#include <cmath>

namespace soficize::torus {

namespace {

std::vector<AtomicTorusMeasure::Atom> merge_atoms(
    std::vector<AtomicTorusMeasure::Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.position < b.position; });
  std::vector<AtomicTorusMeasure::Atom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && a.position - out.back().position <= kMergeTol)
      out.back().mass += a.mass;
    else
      out.push_back(a);
  }
  return out;
}

}  // namespace

AtomicTorusMeasure::AtomicTorusMeasure(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (a.position < 0.0 || a.position >= 1.0)
      throw DomainError("AtomicTorusMeasure: position " +
                        std::to_string(a.position) + " outside [0,1)");
    if (a.mass < -kMassTol)
      throw DomainError("AtomicTorusMeasure: negative mass " +
                        std::to_string(a.mass));
  }
  atoms_ = merge_atoms(std::move(atoms));
  double total = total_mass();
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("AtomicTorusMeasure: masses sum to " +
                      std::to_string(total) + ", expected 1");
}

AtomicTorusMeasure AtomicTorusMeasure::point_mass(double position) {
  return AtomicTorusMeasure({{position, 1.0}});
}

AtomicTorusMeasure AtomicTorusMeasure::uniform_on(
    const std::vector<double>& positions) {
  if (positions.empty())
    throw DomainError("AtomicTorusMeasure::uniform_on: empty support");
  std::vector<Atom> atoms;
  atoms.reserve(positions.size());
  double w = 1.0 / static_cast<double>(positions.size());
  for (double p : positions) atoms.push_back({p, w});
  return AtomicTorusMeasure(std::move(atoms));
}

double AtomicTorusMeasure::total_mass() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double AtomicTorusMeasure::interval_mass(double a, double b) const {
  double s = 0;
  for (const auto& atom : atoms_)
    if (atom.position >= a && atom.position < b) s += atom.mass;
  return s;
}

double ds_n(const AtomicTorusMeasure& mu, int N) {
  if (N < 1) throw DomainError("ds_n: N must be >= 1");
  std::vector<double> bucket(static_cast<std::size_t>(N), 0.0);
  for (const auto& atom : mu.atoms()) {
    double y = atom.position * N;
    auto k = static_cast<long>(std::floor(y));
    // an atom exactly on k/N belongs to interval k; positions within 1e-9
    // of the right boundary are treated as sitting on it (eigenphase roundoff)
    if (y - static_cast<double>(k) > 1.0 - 1e-9) ++k;
    k %= N;
    if (k < 0) k += N;
    bucket[static_cast<std::size_t>(k)] += atom.mass;
  }
  double sum = 0;
  double uniform = 1.0 / static_cast<double>(N);
  for (double m : bucket) sum += std::abs(m - uniform);
  return sum;
}

double tv_distance(const AtomicTorusMeasure& mu, const AtomicTorusMeasure& nu) {
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  double sum = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && a[i].position < b[j].position - kMergeTol)) {
      sum += a[i++].mass;
    } else if (i >= a.size() || b[j].position < a[i].position - kMergeTol) {
      sum += b[j++].mass;
    } else {
      sum += std::abs(a[i].mass - b[j].mass);
      ++i;
      ++j;
    }
  }
  return 0.5 * sum;
}

AtomicTorusMeasure mix(const std::vector<AtomicTorusMeasure>& measures,
                       const std::vector<double>& weights) {
  if (measures.size() != weights.size())
    throw StructuralError("mix: measures/weights size mismatch");
  double total = 0;
  for (double w : weights) {
    if (w < -kMassTol) throw DomainError("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("mix: weights sum to " + std::to_string(total));
  std::vector<AtomicTorusMeasure::Atom> atoms;
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (const auto& a : measures[i].atoms())
      atoms.push_back({a.position, weights[i] * a.mass});
  return AtomicTorusMeasure(std::move(atoms));
}

AtomicTorusMeasure subtract_rescale(const AtomicTorusMeasure& mu,
                                    const AtomicTorusMeasure& nu, double c) {
  if (!(c > 0.0 && c < 1.0))
    throw DomainError("subtract_rescale: c must lie in (0,1)");
  std::vector<AtomicTorusMeasure::Atom> atoms = mu.atoms();
  for (const auto& b : nu.atoms()) {
    auto it = std::find_if(atoms.begin(), atoms.end(), [&](const auto& a) {
      return std::abs(a.position - b.position) <= kMergeTol;
    });
    if (it == atoms.end() || it->mass < c * b.mass - 1e-12)
      throw DomainError(
          "subtract_rescale: c*nu is not dominated by mu at atom position " +
          std::to_string(b.position));
    it->mass -= c * b.mass;
  }
  for (auto& a : atoms) a.mass = std::max(a.mass, 0.0) / (1.0 - c);
  std::erase_if(atoms, [](const auto& a) { return a.mass <= kMassTol; });
  return AtomicTorusMeasure(std::move(atoms));
}

namespace {

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a,
                         double b, Complex fa, Complex fm, Complex fb,
                         Complex whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  Complex flm = f(lm), frm = f(rm);
  Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  Complex delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

Complex integrate_circle(const std::function<Complex(double)>& f, double tol) {
  // Split at the half point so a wrap discontinuity at 0 sits on a boundary.
  Complex f0 = f(0.0), fh = f(0.5), f1 = f(1.0 - 1e-15);
  Complex q1 = f(0.25), q3 = f(0.75);
  Complex w1 = 0.5 / 6.0 * (f0 + 4.0 * q1 + fh);
  Complex w2 = 0.5 / 6.0 * (fh + 4.0 * q3 + f1);
  return adaptive_simpson(f, 0.0, 0.5, f0, q1, fh, w1, tol / 2, 48) +
         adaptive_simpson(f, 0.5, 1.0 - 1e-15, fh, q3, f1, w2, tol / 2, 48);
}

}  // namespace

IntegralDefect integral_defect(const AtomicTorusMeasure& mu,
                               const TestFunction& psi, int N) {
  if (N < 1) throw DomainError("integral_defect: N must be >= 1");
  Complex atom_integral(0, 0);
  for (const auto& a : mu.atoms()) atom_integral += a.mass * psi.value(a.position);
  Complex lebesgue = integrate_circle(psi.value, 1e-10);
  IntegralDefect out;
  out.lhs = std::abs(atom_integral - lebesgue);
  out.rhs = ds_n(mu, N) * psi.sup_abs +
            2.0 / static_cast<double>(N) * psi.sup_abs_deriv;
  return out;
}

}  // namespace soficize::torus
