#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lightcone/errors.hpp"
#include "lightcone/fields.hpp"
#include "lightcone/minkowski.hpp"

namespace lce {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  // Evaluate the nodes of each refinement step in an OpenMP loop. The
  // summation order does not depend on this flag, so results are identical.
  bool parallel = true;

  void validate() const;
};

struct QuadratureResult {
  Eigen::MatrixXcd value;
  double error = 0.0;
  int intervals = 0;
  long evaluations = 0;
  bool converged = true;
};

struct QuadratureError : Error {
  QuadratureResult best;
  QuadratureError(const std::string& what, QuadratureResult r) : Error(what), best(std::move(r)) {}
};

using MatrixFunction = std::function<Eigen::MatrixXcd(double)>;

// Adaptive Gauss-Kronrod (7/15) on [a,b]; all entries share one subdivision
// and the error is measured in the max norm. Breakpoints inside (a,b) start
// the subdivision.
QuadratureResult integrate_adaptive(const MatrixFunction& f, double a, double b,
                                    const QuadratureSpec& spec,
                                    const std::vector<double>& breakpoints = {});
// As above, but throws QuadratureError (carrying the best estimate) on failure.
Eigen::MatrixXcd integrate(const MatrixFunction& f, double a, double b, const QuadratureSpec& spec,
                           const std::vector<double>& breakpoints = {});

// Polynomial weight w(alpha) = sum_k c_k alpha^k.
struct Polynomial {
  std::vector<double> c;

  double operator()(double t) const;
  static Polynomial one() { return {{1.0}}; }
  static Polynomial alpha() { return {{0.0, 1.0}}; }
  static Polynomial two_alpha_minus_one() { return {{-1.0, 2.0}}; }
  static Polynomial alpha_squared_minus_alpha() { return {{0.0, -1.0, 1.0}}; }
  static Polynomial one_minus_alpha() { return {{1.0, -1.0}}; }
};

// int_0^1 w(alpha) f(alpha) dalpha, with f already expressed on the chord.
Eigen::MatrixXcd line_integral(const MatrixFunction& f, const Polynomial& weight,
                               const QuadratureSpec& spec);

// Ordered simplex integral over 1 >= l_1 >= ... >= l_n >= 0 of
// g(l_n) ... g(l_1), the latest point rightmost. Composite Gauss-Legendre
// panels with spectral integration; depth <= 4.
Eigen::MatrixXcd nested_ordered_integral(const MatrixFunction& g, int depth,
                                         const QuadratureSpec& spec);

enum class LineWeight { plain, eps_lambda, eps_one_minus_lambda };

// Range of lambda for which chord_point(x, y, lambda) meets the support ball,
// widened to contain [0,1] and padded by 5%.
struct LambdaWindow {
  double lo = 0.0;
  double hi = 1.0;
  double enter = 0.0;  // ball entry/exit parameters (equal to 0, 1 if missed)
  double leave = 1.0;
  bool meets_support = false;
};
LambdaWindow lambda_window(const FourVector& x, const FourVector& y, const Support& support);

struct NonlocalSegments {
  Eigen::MatrixXcd below;  // lambda in [lo, 0]
  Eigen::MatrixXcd inside;  // lambda in [0, 1]
  Eigen::MatrixXcd above;  // lambda in [1, hi]
  LambdaWindow window;

  Eigen::MatrixXcd combine(LineWeight w) const;
};

// Integrals of f over the three pieces of the truncated line; throws
// SupportError if f does not vanish at the window ends.
NonlocalSegments nonlocal_segments(const MatrixFunction& f, const FourVector& x,
                                   const FourVector& y, const Support& support,
                                   const QuadratureSpec& spec);
Eigen::MatrixXcd nonlocal_line_integral(const MatrixFunction& f, LineWeight weight,
                                        const FourVector& x, const FourVector& y,
                                        const Support& support, const QuadratureSpec& spec);

// Nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q);

}  // namespace lce
