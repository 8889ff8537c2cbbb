#include "lightcone/kernels.hpp"

#include <cmath>

#include "lightcone/errors.hpp"

namespace lce {

namespace {
const double kPi = std::acos(-1.0);
const double kPi2 = kPi * kPi;
const double kPi3 = kPi2 * kPi;
}  // namespace

bool KernelTag::pointwise_evaluable() const {
  switch (family) {
    case KernelFamily::p: return order >= 0 && order <= 4;
    case KernelFamily::k: return order == 3 || order == 4;
    case KernelFamily::symbolic: return false;
  }
  return false;
}

std::string KernelTag::str() const {
  const char* f = family == KernelFamily::p ? "p" : (family == KernelFamily::k ? "k" : "C");
  return f + std::to_string(order);
}

KernelTag KernelTag::parse(const std::string& s) {
  if (s.size() != 2 || s[1] < '0' || s[1] > '4') throw Error("unknown kernel tag '" + s + "'");
  KernelTag t;
  t.order = s[1] - '0';
  switch (s[0]) {
    case 'p': t.family = KernelFamily::p; break;
    case 'k': t.family = KernelFamily::k; break;
    case 'C':
      t.family = KernelFamily::symbolic;
      if (t.order > 3) throw Error("unknown kernel tag '" + s + "'");
      break;
    default: throw Error("unknown kernel tag '" + s + "'");
  }
  return t;
}

SpinorMatrix kernel_value(const KernelTag& tag, const FourVector& xi, double rel_tol) {
  if (!tag.pointwise_evaluable())
    throw Error("kernel " + tag.str() + " has no pointwise value");
  if (causal_class_relative(xi, rel_tol) == CausalClass::lightlike)
    throw Error("kernel evaluation on the light cone");
  const double x2 = minkowski_square(xi);
  const SpinorMatrix one = SpinorMatrix::Identity();
  const SpinorMatrix xs = slash(xi);
  const double lg = std::log(std::abs(x2)) + kEulerGamma;
  const double step = (x2 > 0.0) ? (xi[0] > 0.0 ? 1.0 : (xi[0] < 0.0 ? -1.0 : 0.0)) : 0.0;
  if (tag.family == KernelFamily::p) {
    switch (tag.order) {
      case 0: return (-kI / (2.0 * kPi3 * x2 * x2)) * xs;
      case 1: return (-1.0 / (4.0 * kPi3 * x2)) * one;
      case 2: return (-kI / (8.0 * kPi3 * x2)) * xs;
      case 3: return (lg / (16.0 * kPi3)) * one;
      case 4: return (kI * lg / (64.0 * kPi3)) * xs;
    }
  }
  if (tag.order == 3) return (-kI * step / (16.0 * kPi2)) * one;
  return (step / (64.0 * kPi2)) * xs;
}

SwapRule swap_adjoint_factor(const KernelTag& tag) {
  if (!tag.pointwise_evaluable()) throw Error("kernel " + tag.str() + " has no swap rule");
  // Odd slash kernels carry a compensating i (p0, p2, p4) or sign function
  // (k4); even scalar kernels are real (p1, p3) or odd imaginary (k3).
  return SwapRule::identity;
}

SpinorMatrix apply(SwapRule rule, const SpinorMatrix& m) {
  return rule == SwapRule::identity ? m : SpinorMatrix(-m);
}

Homogeneity kernel_homogeneity(const KernelTag& tag) {
  if (tag.family == KernelFamily::k) {
    // Theta/epsilon supported: k3 bounded, k4 slash times bounded.
    return tag.order == 4 ? Homogeneity{1, false} : Homogeneity{0, false};
  }
  switch (tag.order) {
    case 0: return {-3, false};
    case 1: return {-2, false};
    case 2: return {-1, false};
    case 3: return {0, true};
    default: return {1, true};
  }
}

}  // namespace lce
