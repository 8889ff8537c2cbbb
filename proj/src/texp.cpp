#include "lightcone/texp.hpp"

#include <algorithm>
#include <cmath>

namespace lce {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

std::function<FlavorMatrix(double)> chord_generator(const VectorFlavorField& a, const FourVector& x,
                                                    const FourVector& xi, cplx factor) {
  return [&a, x, xi, factor](double lam) -> FlavorMatrix {
    return factor * a.contract(x + lam * xi, xi);
  };
}

}  // namespace

OdeTolerance ode_tolerance(const QuadratureSpec& spec) {
  OdeTolerance t;
  t.rel = std::clamp(spec.rel_tol * 1e-3, 1e-14, 1e-8);
  t.abs = t.rel;
  return t;
}

FlavorMatrix propagate(const std::function<FlavorMatrix(double)>& m, double l0, double l1,
                       const OdeTolerance& tol) {
  FlavorMatrix k1 = m(l0);
  const Eigen::Index n = k1.rows();
  FlavorMatrix w = FlavorMatrix::Identity(n, n);
  if (l0 == l1) return w;
  const double span = l1 - l0;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double mnorm = max_abs(k1);
  double h = std::abs(span);
  if (mnorm > 0.0) h = std::min(h, 0.05 / mnorm);
  h = std::max(h, 1e-6 * std::abs(span));
  k1 = w * k1;  // derivative at the start
  double t = l0;
  long steps = 0;
  const double min_step = 1e-14 * std::max(1.0, std::abs(span));
  while (dir * (l1 - t) > 0.0) {
    if (++steps > tol.max_steps) throw OdeError("Texp integration exceeded the step budget");
    if (h < min_step) throw OdeError("Texp integration step size underflow");
    bool last = false;
    if (h >= std::abs(l1 - t)) {
      h = std::abs(l1 - t);
      last = true;
    }
    const double s = dir * h;
    const FlavorMatrix k2 = (w + s * a21 * k1) * m(t + c2 * s);
    const FlavorMatrix k3 = (w + s * (a31 * k1 + a32 * k2)) * m(t + c3 * s);
    const FlavorMatrix k4 = (w + s * (a41 * k1 + a42 * k2 + a43 * k3)) * m(t + c4 * s);
    const FlavorMatrix k5 = (w + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)) * m(t + c5 * s);
    const double t_new = last ? l1 : t + s;
    const FlavorMatrix k6 =
        (w + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)) * m(t_new);
    const FlavorMatrix w_new = w + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const FlavorMatrix k7 = w_new * m(t_new);
    const FlavorMatrix err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = tol.abs + tol.rel * std::max(max_abs(w), max_abs(w_new));
    const double r = max_abs(err) / scale;
    if (r <= 1.0) {
      t = t_new;
      w = w_new;
      k1 = k7;
      if (last) break;
    }
    const double fac = r == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r, -0.2), 0.2, 5.0);
    h *= fac;
  }
  return w;
}

FlavorMatrix texp(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                  const QuadratureSpec& spec, cplx factor) {
  const int n = a.flavors();
  if (a.is_trivial()) return FlavorMatrix::Identity(n, n);
  return propagate(chord_generator(a, x, y - x, factor), 0.0, 1.0, ode_tolerance(spec));
}

FlavorMatrix texp_i(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                    const QuadratureSpec& spec) {
  return texp(a, x, y, spec, -kI);
}

FlavorMatrix dyson_term(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                        int n, const QuadratureSpec& spec, cplx factor) {
  if (n < 0 || n > 4) throw Error("dyson_term: order must be in 0..4");
  const int dim = a.flavors();
  if (n == 0) return FlavorMatrix::Identity(dim, dim);
  if (a.is_trivial() || x == y) return FlavorMatrix::Zero(dim, dim);
  const auto g = chord_generator(a, x, y - x, factor);
  return nested_ordered_integral([&g](double l) -> Eigen::MatrixXcd { return g(l); }, n, spec);
}

double texp_truncation_bound(const VectorFlavorField& a, const FourVector& x,
                             const FourVector& y, int N, cplx factor) {
  if (a.is_trivial()) return 0.0;
  const FourVector xi = y - x;
  const int samples = 1025;
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double lam = static_cast<double>(i) / (samples - 1);
    const FlavorMatrix m = factor * a.contract(x + lam * xi, xi);
    Eigen::JacobiSVD<FlavorMatrix> svd(m);
    s = std::max(s, svd.singularValues()(0));
  }
  if (s == 0.0) return 0.0;
  // s^{N+1}/(N+1)! * e^s, accumulated in logs to avoid overflow.
  return std::exp((N + 1) * std::log(s) - std::lgamma(N + 2.0) + s);
}

ChordPropagator::ChordPropagator(const VectorFlavorField& a, const FourVector& x,
                                 const FourVector& y, double lam_lo, double lam_hi,
                                 const QuadratureSpec& spec, cplx factor)
    : a_(&a), x_(x), xi_(y - x), factor_(factor), tol_(ode_tolerance(spec)),
      trivial_(a.is_trivial()), n_(a.flavors()) {
  full_ = FlavorMatrix::Identity(n_, n_);
  if (trivial_) return;
  lam_lo = std::min(lam_lo, 0.0);
  lam_hi = std::max(lam_hi, 1.0);
  first_ = static_cast<int>(std::floor(lam_lo / step_));
  const int last = static_cast<int>(std::ceil(lam_hi / step_));
  const int count = last - first_ + 1;
  const int c0 = -first_;            // entry index of lambda = 0
  const int c1 = c0 + static_cast<int>(std::lround(1.0 / step_));  // lambda = 1
  std::vector<FlavorMatrix> fwd(static_cast<std::size_t>(count));  // Te(c -> c+1)
  std::vector<FlavorMatrix> bwd(static_cast<std::size_t>(count));  // Te(c+1 -> c)
  for (int c = 0; c + 1 < count; ++c) {
    fwd[c] = between(grid(c), grid(c + 1));
    if (c < c0 || c >= c1) bwd[c] = between(grid(c + 1), grid(c));
  }
  from_x_.assign(static_cast<std::size_t>(count), FlavorMatrix::Identity(n_, n_));
  to_y_.assign(static_cast<std::size_t>(count), FlavorMatrix::Identity(n_, n_));
  for (int c = c0 + 1; c < count; ++c) from_x_[c] = from_x_[c - 1] * fwd[c - 1];
  for (int c = c0 - 1; c >= 0; --c) from_x_[c] = from_x_[c + 1] * bwd[c];
  for (int c = c1 - 1; c >= 0; --c) to_y_[c] = fwd[c] * to_y_[c + 1];
  for (int c = c1 + 1; c < count; ++c) to_y_[c] = bwd[c - 1] * to_y_[c - 1];
  full_ = from_x_[c1];
}

int ChordPropagator::nearest(double lam) const {
  const int c = static_cast<int>(std::lround(lam / step_)) - first_;
  return std::clamp(c, 0, static_cast<int>(from_x_.size()) - 1);
}

FlavorMatrix ChordPropagator::between(double l1, double l2) const {
  if (trivial_ || l1 == l2) return FlavorMatrix::Identity(n_, n_);
  return propagate(chord_generator(*a_, x_, xi_, factor_), l1, l2, tol_);
}

FlavorMatrix ChordPropagator::from_start(double lam) const {
  if (trivial_) return FlavorMatrix::Identity(n_, n_);
  const int c = nearest(lam);
  return from_x_[c] * between(grid(c), lam);
}

FlavorMatrix ChordPropagator::to_end(double lam) const {
  if (trivial_) return FlavorMatrix::Identity(n_, n_);
  const int c = nearest(lam);
  return between(lam, grid(c)) * to_y_[c];
}

FlavorMatrix covariant_link_derivative(const VectorFlavorField& a_l, const VectorFlavorField& a_r,
                                       const CompositeField& f, const FourVector& z, int k) {
  FlavorMatrix g = f.d1(z, k);
  if (a_l.is_trivial() && a_r.is_trivial()) return g;
  const FlavorMatrix fz = f.value(z);
  if (!a_l.is_trivial()) g -= (kI * kMetric[k]) * a_l.value(z)[k] * fz;
  if (!a_r.is_trivial()) g += (kI * kMetric[k]) * fz * a_r.value(z)[k];
  return g;
}

FlavorMatrix hat_derivative_sandwich(const VectorFlavorField& a_l, const VectorFlavorField& a_r,
                                     const CompositeField& f, const FourVector& x,
                                     const FourVector& z, const FourVector& y, int k,
                                     const QuadratureSpec& spec) {
  return texp_i(a_l, x, z, spec) * covariant_link_derivative(a_l, a_r, f, z, k) *
         texp_i(a_r, z, y, spec);
}

}  // namespace lce
