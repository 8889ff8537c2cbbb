#include "lightcone/minkowski.hpp"

#include <algorithm>

namespace lce {

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::timelike: return "timelike";
    case CausalClass::spacelike: return "spacelike";
    case CausalClass::lightlike: return "lightlike";
  }
  return "unknown";
}

double inner(const FourVector& u, const FourVector& v) {
  return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3];
}

double minkowski_square(const FourVector& v) { return inner(v, v); }

FourVector lower(const FourVector& v) {
  return FourVector(v[0], -v[1], -v[2], -v[3]);
}

double euclidean_norm(const FourVector& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

FourVector chord_point(const FourVector& x, const FourVector& y, double lam) {
  FourVector z;
  for (int i = 0; i < 4; ++i) z[i] = lam * y[i] + (1.0 - lam) * x[i];
  return z;
}

CausalClass causal_class(const FourVector& xi, double tol) {
  const double s = minkowski_square(xi);
  if (s > tol) return CausalClass::timelike;
  if (s < -tol) return CausalClass::spacelike;
  return CausalClass::lightlike;
}

CausalClass causal_class_relative(const FourVector& xi, double rel_tol) {
  const double e = euclidean_norm(xi);
  return causal_class(xi, rel_tol * e * e);
}

int levi_civita_lower(int i, int j, int k, int l, EpsilonConvention conv) {
  int p[4] = {i, j, k, l};
  for (int a = 0; a < 4; ++a) {
    if (p[a] < 0 || p[a] > 3) return 0;
    for (int b = a + 1; b < 4; ++b)
      if (p[a] == p[b]) return 0;
  }
  // Parity by counting inversions.
  int inv = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (p[a] > p[b]) ++inv;
  const int perm = (inv % 2 == 0) ? 1 : -1;
  // Lowering all four indices multiplies by det(g) = -1.
  return conv == EpsilonConvention::upper_0123_positive ? -perm : perm;
}

Segment Segment::make(const FourVector& x, const FourVector& y, double rel_tol) {
  Segment s;
  s.x = x;
  s.y = y;
  s.xi = y - x;
  s.causal = causal_class_relative(s.xi, rel_tol);
  return s;
}

}  // namespace lce
