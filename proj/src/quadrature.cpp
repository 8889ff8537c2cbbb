#include "lightcone/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <omp.h>

namespace lce {

namespace {

// Kronrod 15-point abscissae/weights (nonnegative half) and embedded Gauss 7.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kNodes = 15;

struct Panel {
  double a, b;
  Eigen::MatrixXcd value;
  double error;
};

// Node t in [-1,1] for index i in 0..14 (7 left, centre, 7 right).
double node(int i) { return i < 7 ? -kXgk[i] : (i == 7 ? 0.0 : kXgk[14 - i]); }
double kronrod_weight(int i) { return i <= 7 ? kWgk[i] : kWgk[14 - i]; }
double gauss_weight(int i) {
  const int j = i <= 7 ? i : 14 - i;
  return (j % 2 == 1) ? kWg[j / 2] : (j == 7 ? kWg[3] : 0.0);
}

void evaluate_nodes(const MatrixFunction& f, const std::vector<std::pair<double, double>>& ivs,
                    std::vector<Eigen::MatrixXcd>& out, bool parallel) {
  const int total = static_cast<int>(ivs.size()) * kNodes;
  out.resize(static_cast<std::size_t>(total));
  const bool par = parallel && !omp_in_parallel() && omp_get_max_threads() > 1;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int k = 0; k < total; ++k) {
    const auto& iv = ivs[static_cast<std::size_t>(k / kNodes)];
    const double c = 0.5 * (iv.first + iv.second);
    const double h = 0.5 * (iv.second - iv.first);
    out[static_cast<std::size_t>(k)] = f(c + h * node(k % kNodes));
  }
}

Panel make_panel(double a, double b, const Eigen::MatrixXcd* vals) {
  const double h = 0.5 * (b - a);
  Eigen::MatrixXcd k = kronrod_weight(0) * vals[0];
  Eigen::MatrixXcd g = gauss_weight(0) * vals[0];
  for (int i = 1; i < kNodes; ++i) {
    k += kronrod_weight(i) * vals[i];
    const double wg = gauss_weight(i);
    if (wg != 0.0) g += wg * vals[i];
  }
  const Eigen::MatrixXcd mean = 0.5 * k;
  double resasc = 0.0, resabs = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    resasc += kronrod_weight(i) * max_abs(vals[i] - mean);
    resabs += kronrod_weight(i) * max_abs(vals[i]);
  }
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = max_abs(k - g) * std::abs(h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  err = std::max(err, 50.0 * eps * resabs);
  return Panel{a, b, h * k, err};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw Error("max_subdivisions must be positive");
}

QuadratureResult integrate_adaptive(const MatrixFunction& f, double a, double b,
                                    const QuadratureSpec& spec,
                                    const std::vector<double>& breakpoints) {
  spec.validate();
  QuadratureResult res;
  if (a == b) {
    res.value = f(a) * 0.0;
    res.evaluations = 1;
    return res;
  }
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double p : breakpoints)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> ivs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) ivs.emplace_back(cuts[i], cuts[i + 1]);
  std::vector<Eigen::MatrixXcd> vals;
  evaluate_nodes(f, ivs, vals, spec.parallel);
  res.evaluations += static_cast<long>(vals.size());

  std::vector<Panel> panels;
  for (std::size_t i = 0; i < ivs.size(); ++i)
    panels.push_back(make_panel(ivs[i].first, ivs[i].second, &vals[i * kNodes]));

  auto cmp = [&panels](std::size_t l, std::size_t r) {
    if (panels[l].error != panels[r].error) return panels[l].error < panels[r].error;
    return panels[l].a > panels[r].a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  for (std::size_t i = 0; i < panels.size(); ++i) queue.push(i);

  auto totals = [&panels](Eigen::MatrixXcd& v, double& e) {
    // Fixed summation order (by position) keeps results independent of history.
    std::vector<std::size_t> idx(panels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&panels](std::size_t l, std::size_t r) { return panels[l].a < panels[r].a; });
    v = panels[idx[0]].value;
    e = panels[idx[0]].error;
    for (std::size_t i = 1; i < idx.size(); ++i) {
      v += panels[idx[i]].value;
      e += panels[idx[i]].error;
    }
  };

  Eigen::MatrixXcd total;
  double err = 0.0;
  totals(total, err);
  double running_err = err;
  const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * (hi - lo);
  bool converged = false;
  while (true) {
    if (running_err <= std::max(spec.abs_tol, spec.rel_tol * max_abs(total))) {
      converged = true;
      break;
    }
    if (static_cast<int>(panels.size()) >= spec.max_subdivisions) break;
    const std::size_t worst = queue.top();
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (p.b - p.a < min_width) break;
    queue.pop();
    std::vector<std::pair<double, double>> halves{{p.a, mid}, {mid, p.b}};
    evaluate_nodes(f, halves, vals, spec.parallel);
    res.evaluations += 2 * kNodes;
    Panel left = make_panel(p.a, mid, &vals[0]);
    Panel right = make_panel(mid, p.b, &vals[kNodes]);
    total += left.value + right.value - p.value;
    running_err += left.error + right.error - p.error;
    panels[worst] = left;
    panels.push_back(right);
    queue.push(worst);
    queue.push(panels.size() - 1);
  }
  totals(total, err);
  res.value = sign * total;
  res.error = err;
  res.intervals = static_cast<int>(panels.size());
  res.converged = converged || err <= std::max(spec.abs_tol, spec.rel_tol * max_abs(total));
  return res;
}

Eigen::MatrixXcd integrate(const MatrixFunction& f, double a, double b, const QuadratureSpec& spec,
                           const std::vector<double>& breakpoints) {
  QuadratureResult r = integrate_adaptive(f, a, b, spec, breakpoints);
  if (!r.converged)
    throw QuadratureError("quadrature tolerance not reached (error estimate " +
                              std::to_string(r.error) + ")",
                          r);
  return r.value;
}

double Polynomial::operator()(double t) const {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

Eigen::MatrixXcd line_integral(const MatrixFunction& f, const Polynomial& weight,
                               const QuadratureSpec& spec) {
  return integrate([&](double t) -> Eigen::MatrixXcd { return weight(t) * f(t); }, 0.0, 1.0, spec);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q) {
  std::vector<double> x(static_cast<std::size_t>(q)), w(static_cast<std::size_t>(q));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < q; ++i) {
    double t = std::cos(pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[static_cast<std::size_t>(q - 1 - i)] = t;
    w[static_cast<std::size_t>(q - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

namespace {

// S(i,j) = int_{-1}^{x_i} l_j(t) dt for the Lagrange basis on the GL nodes.
Eigen::MatrixXd spectral_integration_matrix(const std::vector<double>& x) {
  const int q = static_cast<int>(x.size());
  Eigen::MatrixXd V(q, q), Q(q, q);
  for (int i = 0; i < q; ++i) {
    std::vector<double> p(static_cast<std::size_t>(q + 1));
    p[0] = 1.0;
    if (q >= 1) p[1] = x[i];
    for (int k = 2; k <= q; ++k)
      p[k] = ((2.0 * k - 1.0) * x[i] * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
    for (int k = 0; k < q; ++k) {
      V(i, k) = p[k];
      Q(i, k) = k == 0 ? x[i] + 1.0 : (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
    }
  }
  // l_j = sum_k C(k,j) P_k with V C = I.
  return Q * V.inverse();
}

Eigen::MatrixXcd simplex_panels(const MatrixFunction& g, int depth, int panels,
                                const std::vector<double>& x, const std::vector<double>& w,
                                const Eigen::MatrixXd& S, bool parallel) {
  const int q = static_cast<int>(x.size());
  const double h = 1.0 / panels;
  std::vector<Eigen::MatrixXcd> gv(static_cast<std::size_t>(panels * q));
  const bool par = parallel && !omp_in_parallel() && omp_get_max_threads() > 1;
#pragma omp parallel for schedule(static) if (par)
  for (int k = 0; k < panels * q; ++k) {
    const int p = k / q, i = k % q;
    gv[static_cast<std::size_t>(k)] = g((p + 0.5 * (x[i] + 1.0)) * h);
  }
  const Eigen::Index n = gv[0].rows();
  // T[d] at the start of the current panel; T^d(l) = int_0^l T^{d-1}(s) g(s) ds.
  std::vector<Eigen::MatrixXcd> start(static_cast<std::size_t>(depth + 1),
                                      Eigen::MatrixXcd::Zero(n, n));
  start[0] = Eigen::MatrixXcd::Identity(n, n);
  for (int p = 0; p < panels; ++p) {
    std::vector<std::vector<Eigen::MatrixXcd>> tn(static_cast<std::size_t>(depth + 1));
    tn[0].assign(static_cast<std::size_t>(q), Eigen::MatrixXcd::Identity(n, n));
    std::vector<Eigen::MatrixXcd> next_start = start;
    for (int d = 1; d <= depth; ++d) {
      std::vector<Eigen::MatrixXcd> integrand(static_cast<std::size_t>(q));
      for (int i = 0; i < q; ++i)
        integrand[i] = tn[d - 1][i] * gv[static_cast<std::size_t>(p * q + i)];
      tn[d].resize(static_cast<std::size_t>(q));
      for (int i = 0; i < q; ++i) {
        Eigen::MatrixXcd acc = start[d];
        for (int j = 0; j < q; ++j) acc += (0.5 * h * S(i, j)) * integrand[j];
        tn[d][i] = acc;
      }
      Eigen::MatrixXcd end = start[d];
      for (int j = 0; j < q; ++j) end += (0.5 * h * w[j]) * integrand[j];
      next_start[d] = end;
    }
    start = next_start;
  }
  return start[depth];
}

}  // namespace

Eigen::MatrixXcd nested_ordered_integral(const MatrixFunction& g, int depth,
                                         const QuadratureSpec& spec) {
  if (depth < 0 || depth > 4) throw Error("nested_ordered_integral: depth must be in 0..4");
  const Eigen::MatrixXcd g0 = g(0.0);
  if (depth == 0) return Eigen::MatrixXcd::Identity(g0.rows(), g0.cols());
  const int q = 16;
  static const auto gl = gauss_legendre(q);
  static const Eigen::MatrixXd S = spectral_integration_matrix(gl.first);
  Eigen::MatrixXcd prev = simplex_panels(g, depth, 2, gl.first, gl.second, S, spec.parallel);
  for (int panels = 4; panels <= 1024; panels *= 2) {
    Eigen::MatrixXcd cur = simplex_panels(g, depth, panels, gl.first, gl.second, S, spec.parallel);
    if (max_abs(cur - prev) <= std::max(spec.abs_tol, spec.rel_tol * max_abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureError("nested_ordered_integral did not converge", QuadratureResult{prev, 0.0, 0, 0, false});
}

LambdaWindow lambda_window(const FourVector& x, const FourVector& y, const Support& support) {
  LambdaWindow w;
  w.lo = 0.0;
  w.hi = 1.0;
  w.enter = 0.0;
  w.leave = 1.0;
  if (support.empty()) return w;
  const FourVector xi = y - x;
  const FourVector d = x - support.center;
  double a = 0.0, b = 0.0, c = -support.radius * support.radius;
  for (int i = 0; i < 4; ++i) {
    a += xi[i] * xi[i];
    b += 2.0 * d[i] * xi[i];
    c += d[i] * d[i];
  }
  const double disc = b * b - 4.0 * a * c;
  if (a == 0.0 || disc <= 0.0) return w;
  const double s = std::sqrt(disc);
  w.enter = (-b - s) / (2.0 * a);
  w.leave = (-b + s) / (2.0 * a);
  w.meets_support = true;
  double lo = std::min(w.enter, 0.0), hi = std::max(w.leave, 1.0);
  const double pad = 0.05 * (hi - lo);
  w.lo = lo - pad;
  w.hi = hi + pad;
  return w;
}

Eigen::MatrixXcd NonlocalSegments::combine(LineWeight w) const {
  switch (w) {
    case LineWeight::plain: return below + inside + above;
    case LineWeight::eps_lambda: return -below + inside + above;
    case LineWeight::eps_one_minus_lambda: return below + inside - above;
  }
  return inside;
}

NonlocalSegments nonlocal_segments(const MatrixFunction& f, const FourVector& x,
                                   const FourVector& y, const Support& support,
                                   const QuadratureSpec& spec) {
  NonlocalSegments seg;
  seg.window = lambda_window(x, y, support);
  const LambdaWindow& w = seg.window;
  const Eigen::MatrixXcd f_lo = f(w.lo), f_hi = f(w.hi), f_mid = f(0.5);
  const double scale = 1.0 + max_abs(f_mid);
  if (max_abs(f_lo) > 1e-12 * scale || max_abs(f_hi) > 1e-12 * scale)
    throw SupportError("integrand does not vanish at the ends of the truncated line");
  std::vector<double> cuts;
  if (w.meets_support) cuts = {w.enter, w.leave};
  seg.inside = integrate(f, 0.0, 1.0, spec, cuts);
  seg.below = w.lo < 0.0 ? integrate(f, w.lo, 0.0, spec, cuts) : Eigen::MatrixXcd(f_mid * 0.0);
  seg.above = w.hi > 1.0 ? integrate(f, 1.0, w.hi, spec, cuts) : Eigen::MatrixXcd(f_mid * 0.0);
  return seg;
}

Eigen::MatrixXcd nonlocal_line_integral(const MatrixFunction& f, LineWeight weight,
                                        const FourVector& x, const FourVector& y,
                                        const Support& support, const QuadratureSpec& spec) {
  return nonlocal_segments(f, x, y, support, spec).combine(weight);
}

}  // namespace lce
