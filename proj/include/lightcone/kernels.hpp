#pragma once

#include <string>

#include "lightcone/minkowski.hpp"
#include "lightcone/spin_algebra.hpp"

namespace lce {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

enum class KernelFamily { p, k, symbolic };

struct KernelTag {
  KernelFamily family = KernelFamily::p;
  int order = 0;

  // p0..p4 and k3, k4 have closed forms off the light cone; k0..k2 are
  // delta-supported and symbolic tags C0..C3 are never evaluated.
  bool pointwise_evaluable() const;
  std::string str() const;
  static KernelTag parse(const std::string& s);

  friend bool operator==(const KernelTag&, const KernelTag&) = default;
  friend bool operator<(const KernelTag& a, const KernelTag& b) {
    return a.family != b.family ? a.family < b.family : a.order < b.order;
  }
};

inline KernelTag p_kernel(int order) { return {KernelFamily::p, order}; }
inline KernelTag k_kernel(int order) { return {KernelFamily::k, order}; }

// Swap+adjoint behaviour: dirac_adjoint(K(-xi)) = rule applied to K(xi).
enum class SwapRule { identity, negate };

SpinorMatrix kernel_value(const KernelTag& tag, const FourVector& xi,
                          double rel_tol = kDefaultLightlikeTolerance);
SwapRule swap_adjoint_factor(const KernelTag& tag);
SpinorMatrix apply(SwapRule rule, const SpinorMatrix& m);

// Homogeneity of a kernel in xi (slash counts as one power), with a flag for
// a logarithmic factor. Used to compare singular behaviour on the cone.
struct Homogeneity {
  int degree = 0;
  bool log = false;

  // True if *this is at least as singular as other.
  bool at_least_as_singular_as(const Homogeneity& other) const {
    if (degree != other.degree) return degree < other.degree;
    return log || !other.log;
  }
  friend bool operator==(const Homogeneity&, const Homogeneity&) = default;
};

Homogeneity kernel_homogeneity(const KernelTag& tag);

}  // namespace lce
