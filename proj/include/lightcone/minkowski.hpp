#pragma once

#include <array>
#include <cmath>
#include <string>

namespace lce {

// Signature (+,-,-,-); index 0 is time.
inline constexpr std::array<double, 4> kMetric{1.0, -1.0, -1.0, -1.0};

struct FourVector {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  FourVector() = default;
  FourVector(double t, double x1, double x2, double x3) : c{t, x1, x2, x3} {}

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend FourVector operator+(FourVector a, const FourVector& b) {
    for (int i = 0; i < 4; ++i) a[i] += b[i];
    return a;
  }
  friend FourVector operator-(FourVector a, const FourVector& b) {
    for (int i = 0; i < 4; ++i) a[i] -= b[i];
    return a;
  }
  friend FourVector operator-(FourVector a) {
    for (int i = 0; i < 4; ++i) a[i] = -a[i];
    return a;
  }
  friend FourVector operator*(double s, FourVector a) {
    for (int i = 0; i < 4; ++i) a[i] *= s;
    return a;
  }
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

inline FourVector unit_vector(int k) {
  FourVector e;
  e[k] = 1.0;
  return e;
}

enum class CausalClass { timelike, spacelike, lightlike };

std::string to_string(CausalClass c);

// Orientation of the Levi-Civita symbol. The default fixes eps^{0123} = +1,
// hence eps_{0123} = -1.
enum class EpsilonConvention { upper_0123_positive, lower_0123_positive };

inline constexpr double kDefaultLightlikeTolerance = 1e-9;

double inner(const FourVector& u, const FourVector& v);
double minkowski_square(const FourVector& v);
FourVector lower(const FourVector& v);
double euclidean_norm(const FourVector& v);

// z = lam*y + (1-lam)*x; lam outside [0,1] extrapolates along the line.
FourVector chord_point(const FourVector& x, const FourVector& y, double lam);

// Absolute band: lightlike iff |xi^2| <= tol.
CausalClass causal_class(const FourVector& xi, double tol);
// Band relative to the Euclidean norm squared of xi.
CausalClass causal_class_relative(const FourVector& xi,
                                  double rel_tol = kDefaultLightlikeTolerance);

// Lower-index Levi-Civita symbol eps_{ijkl}.
int levi_civita_lower(int i, int j, int k, int l,
                      EpsilonConvention conv = EpsilonConvention::upper_0123_positive);

struct Segment {
  FourVector x;
  FourVector y;
  FourVector xi;
  CausalClass causal = CausalClass::lightlike;

  static Segment make(const FourVector& x, const FourVector& y,
                      double rel_tol = kDefaultLightlikeTolerance);
  FourVector point(double lam) const { return chord_point(x, y, lam); }
};

}  // namespace lce
