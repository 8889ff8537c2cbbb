#include "lightcone/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "lightcone/mass2.hpp"
#include "lightcone/texp.hpp"

namespace lce {

std::string to_string(Truncation t) {
  switch (t) {
    case Truncation::log_xi2: return "O(ln|xi^2|)";
    case Truncation::mass2: return "O(m^2)";
    case Truncation::xi0: return "O(xi^0)";
    case Truncation::xi2: return "O(xi^2)";
  }
  return "?";
}

Truncation parse_truncation(const std::string& s) {
  for (Truncation t : {Truncation::log_xi2, Truncation::mass2, Truncation::xi0, Truncation::xi2})
    if (to_string(t) == s) return t;
  throw Error("unknown truncation class '" + s + "'");
}

std::string SingularOrder::str() const {
  if (bounded) return "xi^0";
  std::string s = slash ? "slash(xi) " : "";
  if (log) return s + "ln|xi^2|";
  return s + "xi^" + std::to_string(power);
}

Homogeneity SingularOrder::homogeneity() const {
  if (bounded) return {0, false};
  return {(log ? 0 : power) + (slash ? 1 : 0), log};
}

SingularOrder singular_order(int p_mass, int q_deriv) {
  if (p_mass < 0 || q_deriv < 0) throw Error("singular_order: orders must be nonnegative");
  const int s = p_mass + q_deriv;
  SingularOrder o;
  switch (s) {
    case 0:
    case 2:
      o.slash = true;
      o.power = -4 + s;
      break;
    case 1: o.power = -3 + s; break;
    case 3: o.log = true; break;
    case 4:
      o.slash = true;
      o.log = true;
      break;
    default: o.bounded = true; break;
  }
  return o;
}

BlockMatrix ExpansionResult::coefficient(int order) const {
  BlockMatrix c = BlockMatrix::Zero(4 * n, 4 * n);
  for (const auto& t : terms)
    if (t.tag.order == order) c += t.coeff;
  return c;
}

const ExpansionTerm* ExpansionResult::find(const std::string& provenance) const {
  for (const auto& t : terms)
    if (t.provenance == provenance) return &t;
  return nullptr;
}

std::vector<int> ExpansionResult::orders() const {
  std::vector<int> o;
  for (const auto& t : terms)
    if (std::find(o.begin(), o.end(), t.tag.order) == o.end()) o.push_back(t.tag.order);
  std::sort(o.begin(), o.end());
  return o;
}

bool respects_singular_order(const ExpansionTerm& term) {
  if (term.tag.family != KernelFamily::p) return true;
  Homogeneity h = kernel_homogeneity(term.tag);
  h.degree += term.xi_factors;
  const Homogeneity allowed = singular_order(term.mass_order, term.derivative_order).homogeneity();
  return h == allowed || !h.at_least_as_singular_as(allowed);
}

std::vector<FourVector> gate_samples(const ChiralConfig& cfg, const FourVector& x,
                                     const FourVector& y) {
  std::vector<FourVector> pts = support_samples(cfg.support());
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) pts.push_back(chord_point(x, y, a));
  return pts;
}

namespace {

// Horizontal slice k of width n from a stacked n x (K n) matrix.
FlavorMatrix slice(const Eigen::MatrixXcd& m, int k, int n) { return m.block(0, k * n, n, n); }

void check_gate(const ChiralConfig& cfg, const FourVector& x, const FourVector& y) {
  const auto pts = gate_samples(cfg, x, y);
  const double tol = 1e-10 * (1.0 + max_abs(cfg.X_L) + max_abs(cfg.X_R));
  if (!commutes_with_X(cfg.A_L, cfg.X_L, cfg.X_R, pts, tol) ||
      !commutes_with_X(cfg.A_R, cfg.X_L, cfg.X_R, pts, tol))
    throw PreconditionError("gauge potentials do not commute with X");
}

ExpansionTerm make_term(KernelFamily fam, int order, BlockMatrix c, const char* prov, int p, int q,
                        int xi) {
  return ExpansionTerm{KernelTag{fam, order}, std::move(c), prov, p, q, xi};
}

}  // namespace

ExpansionResult chiral_expansion(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                 Side s, KernelFamily fam, const QuadratureSpec& spec) {
  cfg.validate();
  if (x == y) throw PreconditionError("chiral_expansion: x and y coincide");
  check_gate(cfg, x, y);
  const int n = cfg.n;
  const Side o = other(s);
  const FourVector xi = y - x;
  const FourVector xi_lo = lower(xi);
  const SpinorMatrix& chi = chiral_projector(s);
  const SpinorMatrix xs = slash(xi);
  const Support sup = cfg.support();
  const LambdaWindow win = lambda_window(x, y, sup);

  const VectorFlavorField& a_s = cfg.A(s);
  const VectorFlavorField& a_o = cfg.A(o);
  const ChordPropagator prop_s(a_s, x, y, win.lo, win.hi, spec);

  const FlavorMatrix ux = cfg.U(s).value(x);
  const FlavorMatrix uy_inv = cfg.U(s).inverse(y);
  const FlavorMatrix& x_s = cfg.X(s);
  const FlavorMatrix& x_o = cfg.X(o);

  ExpansionResult res;
  res.side = s;
  res.family = fam;
  res.x = x;
  res.y = y;
  res.n = n;
  res.truncation = {Truncation::log_xi2, Truncation::mass2};

  const FlavorMatrix phase = ux * prop_s.full() * x_s * uy_inv;
  res.terms.push_back(make_term(fam, 0, kron_embed(chi, phase), "gauge_phase", 0, 0, 0));

  if (!a_s.is_trivial()) {
    std::vector<double> cuts;
    if (win.meets_support) cuts = {win.enter, win.leave};
    auto integrand = [&](double alpha) -> Eigen::MatrixXcd {
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 9 * n);
      const FourVector z = chord_point(x, y, alpha);
      if (!a_s.support().contains(z)) return out;
      const FlavorMatrix te_f = prop_s.from_start(alpha);
      const FlavorMatrix te_b = prop_s.to_end(alpha);
      const FlavorTensor f = field_strength(a_s, z);
      const FlavorVector j = current(a_s, z);
      const FlavorVector e = epsilon_contract(f, xi, cfg.epsilon);
      FlavorMatrix jx = FlavorMatrix::Zero(n, n);
      for (int k = 0; k < 4; ++k) {
        FlavorMatrix g = FlavorMatrix::Zero(n, n);
        for (int l = 0; l < 4; ++l) g += xi_lo[l] * f[k][l];
        out.block(0, k * n, n, n) = (2.0 * alpha - 1.0) * te_f * g * te_b;
        out.block(0, (5 + k) * n, n, n) = te_f * e[k] * te_b;
        jx += xi_lo[k] * j[k];
      }
      out.block(0, 4 * n, n, n) = (alpha * alpha - alpha) * te_f * jx * te_b;
      return out;
    };
    const Eigen::MatrixXcd acc = integrate(integrand, 0.0, 1.0, spec, cuts);
    const FlavorMatrix left = ux * x_s;
    BlockMatrix fs = BlockMatrix::Zero(4 * n, 4 * n);
    BlockMatrix ax = BlockMatrix::Zero(4 * n, 4 * n);
    for (int k = 0; k < 4; ++k) {
      fs += kron_embed(chi * (kMetric[k] * gamma(k)), left * slice(acc, k, n) * uy_inv);
      ax += kron_embed(chi * rho() * gamma(k), left * slice(acc, 5 + k, n) * uy_inv);
    }
    const BlockMatrix cur = kron_embed(chi * xs, left * slice(acc, 4, n) * uy_inv);
    res.terms.push_back(make_term(fam, 1, -0.5 * fs, "field_strength", 0, 1, 1));
    res.terms.push_back(make_term(fam, 1, 0.5 * cur, "current", 0, 2, 2));
    res.terms.push_back(make_term(fam, 1, (-0.25 * kI) * ax, "axial_field_strength", 0, 1, 1));
  }

  const FlavorMatrix y_end = dynamical_mass(cfg, y, s);
  res.terms.push_back(make_term(fam, 1, kron_embed(chi, cfg.m * phase * y_end), "mass_phase", 1, 0, 0));

  const bool link_varies = !cfg.U_L.is_trivial() || !cfg.U_R.is_trivial() ||
                           cfg.has_scalar_perturbation() || !a_s.is_trivial() || !a_o.is_trivial();
  if (cfg.m != 0.0 && link_varies) {
    const ChordPropagator prop_o(a_o, x, y, win.lo, win.hi, spec);
    const CompositeField link = mass_link(cfg, s);
    auto integrand = [&](double lam) -> Eigen::MatrixXcd {
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 4 * n);
      const FourVector z = chord_point(x, y, lam);
      if (!sup.contains(z)) return out;
      const FlavorMatrix te_f = prop_s.from_start(lam);
      const FlavorMatrix te_b = prop_o.to_end(lam);
      for (int k = 0; k < 4; ++k)
        out.block(0, k * n, n, n) = te_f * covariant_link_derivative(a_s, a_o, link, z, k) * te_b;
      return out;
    };
    const NonlocalSegments seg = nonlocal_segments(integrand, x, y, sup, spec);
    const Eigen::MatrixXcd i1 = seg.combine(LineWeight::eps_lambda);
    const Eigen::MatrixXcd i2 = seg.combine(LineWeight::eps_one_minus_lambda);
    const FlavorMatrix uoy_inv = cfg.U(o).inverse(y);
    BlockMatrix c = BlockMatrix::Zero(4 * n, 4 * n);
    for (int k = 0; k < 4; ++k)
      c += kron_embed(chi * gamma(k) * xs,
                      ux * (slice(i1, k, n) * x_o + x_s * slice(i2, k, n)) * uoy_inv);
    res.terms.push_back(make_term(fam, 1, (-0.25 * cfg.m) * c, "mass_nonlocal", 1, 1, 1));
  }
  return res;
}

BlockMatrix evaluate_numeric(const ExpansionResult& res, double tol) {
  const FourVector xi = res.y - res.x;
  if (causal_class_relative(xi, tol) == CausalClass::lightlike)
    throw Error("evaluate_numeric: xi is lightlike");
  const FlavorMatrix id = FlavorMatrix::Identity(res.n, res.n);
  BlockMatrix v = BlockMatrix::Zero(4 * res.n, 4 * res.n);
  for (const auto& t : res.terms) {
    if (!t.tag.pointwise_evaluable()) {
      if (max_abs(t.coeff) > 0.0)
        throw Error("evaluate_numeric: nonzero term with kernel " + t.tag.str() +
                    " has no pointwise value (" + t.provenance + ")");
      continue;
    }
    v += t.coeff * kron_embed(kernel_value(t.tag, xi, tol), id);
  }
  return v;
}

namespace {

std::map<int, BlockMatrix> evaluate_by_order(const ChiralConfig& cfg, const FourVector& x,
                                             const FourVector& y, const QuadratureSpec& spec,
                                             HermiticityOptions opts) {
  std::map<int, BlockMatrix> out;
  const FourVector xi = y - x;
  const FlavorMatrix id = FlavorMatrix::Identity(cfg.n, cfg.n);
  auto add = [&](const ExpansionResult& r, double scale) {
    for (const auto& t : r.terms) {
      BlockMatrix v = scale * t.coeff * kron_embed(kernel_value(t.tag, xi), id);
      auto it = out.find(t.tag.order);
      if (it == out.end()) out.emplace(t.tag.order, v);
      else it->second += v;
    }
  };
  for (Side s : {Side::L, Side::R}) {
    add(chiral_expansion(cfg, x, y, s, KernelFamily::p, spec), 1.0);
    if (opts.include_mass2) add(mass2_expansion(cfg, x, y, s, KernelFamily::p, spec), cfg.m * cfg.m);
  }
  return out;
}

}  // namespace

double hermiticity_defect(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                          const QuadratureSpec& spec, HermiticityOptions opts) {
  const auto fwd = evaluate_by_order(cfg, x, y, spec, opts);
  const auto bwd = evaluate_by_order(cfg, y, x, spec, opts);
  BlockMatrix pf = BlockMatrix::Zero(4 * cfg.n, 4 * cfg.n), pb = pf;
  for (const auto& [o, v] : fwd) pf += v;
  for (const auto& [o, v] : bwd) pb += v;
  const double norm = max_abs(pf);
  const double diff = max_abs(dirac_adjoint(pb) - pf);
  return norm == 0.0 ? diff : diff / norm;
}

std::map<int, double> hermiticity_defect_by_order(const ChiralConfig& cfg, const FourVector& x,
                                                  const FourVector& y, const QuadratureSpec& spec,
                                                  HermiticityOptions opts) {
  const auto fwd = evaluate_by_order(cfg, x, y, spec, opts);
  const auto bwd = evaluate_by_order(cfg, y, x, spec, opts);
  std::map<int, double> out;
  for (const auto& [o, v] : fwd) {
    const auto it = bwd.find(o);
    const BlockMatrix back = it == bwd.end() ? BlockMatrix::Zero(v.rows(), v.cols()) : it->second;
    const double norm = max_abs(v);
    const double diff = max_abs(dirac_adjoint(back) - v);
    out[o] = norm == 0.0 ? diff : diff / norm;
  }
  return out;
}

ExpansionResult linearize_in_potential(const ChiralConfig& cfg, const FourVector& x,
                                       const FourVector& y, Side side, double eps,
                                       const QuadratureSpec& spec) {
  if (eps == 0.0) throw Error("linearize_in_potential: eps must be nonzero");
  ChiralConfig scaled_cfg = cfg;
  scaled_cfg.A_L = scaled(cfg.A_L, eps);
  scaled_cfg.A_R = scaled(cfg.A_R, eps);
  ChiralConfig base = cfg;
  base.A_L = VectorFlavorField::zero(cfg.n);
  base.A_R = VectorFlavorField::zero(cfg.n);
  const ExpansionResult r1 = chiral_expansion(scaled_cfg, x, y, side, KernelFamily::p, spec);
  const ExpansionResult r0 = chiral_expansion(base, x, y, side, KernelFamily::p, spec);
  ExpansionResult out = r1;
  out.terms.clear();
  std::vector<int> orders = r1.orders();
  for (int o : r0.orders())
    if (std::find(orders.begin(), orders.end(), o) == orders.end()) orders.push_back(o);
  std::sort(orders.begin(), orders.end());
  for (int o : orders) {
    ExpansionTerm t;
    t.tag = KernelTag{KernelFamily::p, o};
    t.coeff = (r1.coefficient(o) - r0.coefficient(o)) / eps;
    t.provenance = "linearized";
    out.terms.push_back(t);
  }
  return out;
}

}  // namespace lce
