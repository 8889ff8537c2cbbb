// Special-case implementations of the expansion, each written directly from
// its own closed form so that they cross-check the general evaluator.
#include <cmath>

#include "lightcone/expansion.hpp"
#include "lightcone/texp.hpp"

namespace lce {

std::string to_string(ReferenceVariant v) {
  switch (v) {
    case ReferenceVariant::satz5_abelian: return "abelian";
    case ReferenceVariant::satz6_noXY: return "no_xy";
    case ReferenceVariant::satz7_massY: return "mass_y";
    case ReferenceVariant::satz10_noA: return "no_potential";
    case ReferenceVariant::thm1_general: return "general";
  }
  return "?";
}

namespace {

FlavorMatrix slice(const Eigen::MatrixXcd& m, int k, int n) { return m.block(0, k * n, n, n); }

ExpansionResult base_result(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                            Side s, KernelFamily fam) {
  ExpansionResult r;
  r.side = s;
  r.family = fam;
  r.x = x;
  r.y = y;
  r.n = cfg.n;
  r.truncation = {Truncation::log_xi2, Truncation::mass2};
  return r;
}

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(std::string("reference expansion: ") + what);
}

std::vector<double> cuts_for(const FourVector& x, const FourVector& y, const Support& sup) {
  const LambdaWindow w = lambda_window(x, y, sup);
  if (!w.meets_support) return {};
  return {w.enter, w.leave};
}

// Field strength, current and axial terms with fresh ordered exponentials at
// every node; coefficients are left * integral * right. For one flavor the
// exponentials are scalars and can be folded into `left` instead.
void add_field_terms(ExpansionResult& res, const ChiralConfig& cfg, Side s, const FlavorMatrix& left,
                     const FlavorMatrix& right, const QuadratureSpec& spec, bool abelian = false) {
  const VectorFlavorField& a = cfg.A(s);
  if (a.is_trivial()) return;
  const int n = cfg.n;
  const FourVector x = res.x, y = res.y, xi = y - x;
  const SpinorMatrix& chi = chiral_projector(s);
  auto integrand = [&](double alpha) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 9 * n);
    const FourVector z = chord_point(x, y, alpha);
    if (!a.support().contains(z)) return out;
    const FlavorMatrix id = FlavorMatrix::Identity(n, n);
    const FlavorMatrix tf = abelian ? id : texp_i(a, x, z, spec);
    const FlavorMatrix tb = abelian ? id : texp_i(a, z, y, spec);
    const FlavorTensor f = field_strength(a, z);
    const FlavorVector j = current(a, z);
    const FlavorVector e = epsilon_contract(f, xi, cfg.epsilon);
    for (int k = 0; k < 4; ++k) {
      FlavorMatrix fk = FlavorMatrix::Zero(n, n);
      for (int l = 0; l < 4; ++l) fk += kMetric[l] * xi[l] * f[k][l];
      out.block(0, k * n, n, n) = (2.0 * alpha - 1.0) * tf * fk * tb;
      out.block(0, 4 * n, n, n) += (alpha * alpha - alpha) * kMetric[k] * xi[k] * tf * j[k] * tb;
      out.block(0, (5 + k) * n, n, n) = tf * e[k] * tb;
    }
    return out;
  };
  const Eigen::MatrixXcd acc = integrate(integrand, 0.0, 1.0, spec, cuts_for(x, y, a.support()));
  BlockMatrix fs = BlockMatrix::Zero(4 * n, 4 * n), ax = fs;
  for (int k = 0; k < 4; ++k) {
    // gamma_k = g_kk gamma^k
    fs += kron_embed(chi * gamma(k) * kMetric[k], left * slice(acc, k, n) * right);
    ax += kron_embed(chi * rho() * gamma(k), left * slice(acc, 5 + k, n) * right);
  }
  const BlockMatrix cur = kron_embed(chi * slash(xi), left * slice(acc, 4, n) * right);
  const KernelTag t{res.family, 1};
  res.terms.push_back(ExpansionTerm{t, -0.5 * fs, "field_strength", 0, 1, 1});
  res.terms.push_back(ExpansionTerm{t, 0.5 * cur, "current", 0, 2, 2});
  res.terms.push_back(ExpansionTerm{t, (-0.25 * kI) * ax, "axial_field_strength", 0, 1, 1});
}

// -(m/2) sum_k chi gamma^k xi-slash (x) left * int_0^1 M_k * right.
void add_convex_mass_term(ExpansionResult& res, const ChiralConfig& cfg, Side s,
                          const std::function<Eigen::MatrixXcd(double)>& stacked,
                          const FlavorMatrix& left, const FlavorMatrix& right, double factor,
                          const QuadratureSpec& spec) {
  const int n = cfg.n;
  const Eigen::MatrixXcd acc = integrate(stacked, 0.0, 1.0, spec, cuts_for(res.x, res.y, cfg.support()));
  const SpinorMatrix cs = chiral_projector(s);
  const SpinorMatrix xs = slash(res.y - res.x);
  BlockMatrix c = BlockMatrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < 4; ++k) c += kron_embed(cs * gamma(k) * xs, left * slice(acc, k, n) * right);
  res.terms.push_back(ExpansionTerm{KernelTag{res.family, 1}, (-0.5 * factor) * c, "mass_convex", 1, 1, 1});
}

ExpansionResult thm1_general(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                             Side s, KernelFamily fam, const QuadratureSpec& spec) {
  require(!cfg.has_scalar_perturbation(), "general variant requires Xi = Phi = 0");
  const int n = cfg.n;
  const Side o = other(s);
  const VectorFlavorField& a_s = cfg.A(s);
  const VectorFlavorField& a_o = cfg.A(o);
  const UnitaryField& u_s = cfg.U(s);
  const UnitaryField& u_o = cfg.U(o);
  const FlavorMatrix& x_s = cfg.X(s);
  const FlavorMatrix& x_o = cfg.X(o);
  const SpinorMatrix& chi = chiral_projector(s);
  const FourVector xi = y - x;
  const FlavorMatrix ux = u_s.value(x);
  const FlavorMatrix uy_inv = u_s.value(y).adjoint();

  ExpansionResult res = base_result(cfg, x, y, s, fam);
  const FlavorMatrix te = texp_i(a_s, x, y, spec);
  const FlavorMatrix phase = ux * te * x_s * uy_inv;
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 0}, kron_embed(chi, phase), "gauge_phase", 0, 0, 0});
  add_field_terms(res, cfg, s, ux, x_s * uy_inv, spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, kron_embed(chi, cfg.m * phase * cfg.Y),
                                    "mass_phase", 1, 0, 0});
  if (cfg.m == 0.0) return res;

  // -i A_{s,k} V + d_k V + i V A_{o,k} with V = U_s^{-1} Y U_o.
  auto link_derivative = [&](const FourVector& z, int k) -> FlavorMatrix {
    const FlavorMatrix us = u_s.value(z), uo = u_o.value(z);
    const FlavorMatrix v = us.adjoint() * cfg.Y * uo;
    const FlavorMatrix dv = u_s.d1(z, k).adjoint() * cfg.Y * uo + us.adjoint() * cfg.Y * u_o.d1(z, k);
    const FlavorMatrix as = kMetric[k] * a_s.value(z)[k];
    const FlavorMatrix ao = kMetric[k] * a_o.value(z)[k];
    return -kI * as * v + dv + kI * v * ao;
  };
  const Support sup = cfg.support();
  auto integrand = [&](double lam) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 8 * n);
    const FourVector z = chord_point(x, y, lam);
    if (!sup.contains(z)) return out;
    const FlavorMatrix tf = texp_i(a_s, x, z, spec);
    const FlavorMatrix tb = texp_i(a_o, z, y, spec);
    const double e1 = lam < 0.0 ? -1.0 : 1.0;
    const double e2 = lam > 1.0 ? -1.0 : 1.0;
    for (int k = 0; k < 4; ++k) {
      const FlavorMatrix sk = tf * link_derivative(z, k) * tb;
      out.block(0, k * n, n, n) = e1 * sk;
      out.block(0, (4 + k) * n, n, n) = e2 * sk;
    }
    return out;
  };
  const Eigen::MatrixXcd acc = nonlocal_line_integral(integrand, LineWeight::plain, x, y, sup, spec);
  const FlavorMatrix uoy_inv = u_o.value(y).adjoint();
  const SpinorMatrix xs = slash(xi);
  BlockMatrix c = BlockMatrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < 4; ++k)
    c += kron_embed(chi * gamma(k) * xs,
                    ux * (slice(acc, k, n) * x_o + x_s * slice(acc, 4 + k, n)) * uoy_inv);
  if (max_abs(c) > 0.0)
    res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, (-0.25 * cfg.m) * c, "mass_nonlocal", 1, 1, 1});
  return res;
}

ExpansionResult satz10_noA(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                           Side s, KernelFamily fam, const QuadratureSpec& spec) {
  require(cfg.A_L.is_trivial() && cfg.A_R.is_trivial(), "variant requires A_L = A_R = 0");
  require(!cfg.has_scalar_perturbation(), "variant requires Xi = Phi = 0");
  const int n = cfg.n;
  const Side o = other(s);
  const UnitaryField& u_s = cfg.U(s);
  const UnitaryField& u_o = cfg.U(o);
  const FlavorMatrix& x_s = cfg.X(s);
  const FlavorMatrix& x_o = cfg.X(o);
  const SpinorMatrix& chi = chiral_projector(s);
  const FlavorMatrix ux = u_s.value(x);

  ExpansionResult res = base_result(cfg, x, y, s, fam);
  const FlavorMatrix phase = ux * x_s * u_s.value(y).adjoint();
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 0}, kron_embed(chi, phase), "gauge_phase", 0, 0, 0});
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, kron_embed(chi, cfg.m * phase * cfg.Y),
                                    "mass_phase", 1, 0, 0});
  if (cfg.m == 0.0 || (u_s.is_trivial() && u_o.is_trivial())) return res;

  const Support sup = cfg.support();
  auto integrand = [&](double lam) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out(n, 4 * n);
    const FourVector z = chord_point(x, y, lam);
    const FlavorMatrix us = u_s.value(z), uo = u_o.value(z);
    for (int k = 0; k < 4; ++k)
      out.block(0, k * n, n, n) =
          u_s.d1(z, k).adjoint() * cfg.Y * uo + us.adjoint() * cfg.Y * u_o.d1(z, k);
    return out;
  };
  const Eigen::MatrixXcd i1 = nonlocal_line_integral(integrand, LineWeight::eps_lambda, x, y, sup, spec);
  const Eigen::MatrixXcd i2 =
      nonlocal_line_integral(integrand, LineWeight::eps_one_minus_lambda, x, y, sup, spec);
  const FlavorMatrix uoy_inv = u_o.value(y).adjoint();
  const SpinorMatrix xs = slash(y - x);
  BlockMatrix c = BlockMatrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < 4; ++k)
    c += kron_embed(chi * gamma(k) * xs, ux * (slice(i1, k, n) * x_o + x_s * slice(i2, k, n)) * uoy_inv);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, (-0.25 * cfg.m) * c, "mass_nonlocal", 1, 1, 1});
  return res;
}

ExpansionResult satz5_abelian(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                              Side s, KernelFamily fam, const QuadratureSpec& spec) {
  require(cfg.n == 1, "abelian variant requires one flavor");
  require(!cfg.has_scalar_perturbation(), "abelian variant requires Xi = Phi = 0");
  require(std::abs(cfg.X_L(0, 0) - 1.0) == 0.0 && std::abs(cfg.X_R(0, 0) - 1.0) == 0.0,
          "abelian variant requires X = 1");
  require(cfg.Y(0, 0).imag() == 0.0, "abelian variant requires real Y");
  const double y0 = cfg.Y(0, 0).real();
  const Side o = other(s);
  const SpinorMatrix& chi = chiral_projector(s);
  const FlavorMatrix one = FlavorMatrix::Identity(1, 1);

  // U_s(z1) U_s(z2)^* exp(-i int_{z1}^{z2} A_s)
  auto ph = [&](Side side, const FourVector& z1, const FourVector& z2) -> cplx {
    const VectorFlavorField& a = cfg.A(side);
    const UnitaryField& u = cfg.U(side);
    cplx line = 0.0;
    if (!a.is_trivial()) {
      const FourVector d = z2 - z1;
      line = line_integral(
          [&](double t) -> Eigen::MatrixXcd { return a.contract(chord_point(z1, z2, t), d); },
          Polynomial::one(), spec)(0, 0);
    }
    return u.value(z1)(0, 0) * std::conj(u.value(z2)(0, 0)) * std::exp(-kI * line);
  };
  // d_k Lambda_side = -i U^* d_k U + A_{side,k}
  auto dlambda = [&](Side side, const FourVector& z, int k) -> cplx {
    const UnitaryField& u = cfg.U(side);
    return -kI * std::conj(u.value(z)(0, 0)) * u.d1(z, k)(0, 0) +
           kMetric[k] * cfg.A(side).value(z)[k](0, 0);
  };

  ExpansionResult res = base_result(cfg, x, y, s, fam);
  const cplx pxy = ph(s, x, y);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 0}, kron_embed(chi, pxy * one), "gauge_phase", 0, 0, 0});
  add_field_terms(res, cfg, s, pxy * one, one, spec, true);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, kron_embed(chi, (cfg.m * y0 * pxy) * one),
                                    "mass_phase", 1, 0, 0});
  if (cfg.m == 0.0) return res;
  auto stacked = [&](double alpha) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out(1, 4);
    const FourVector z = chord_point(x, y, alpha);
    const cplx p = ph(s, x, z) * ph(o, z, y);
    for (int k = 0; k < 4; ++k) out(0, k) = kI * (dlambda(o, z, k) - dlambda(s, z, k)) * p;
    return out;
  };
  add_convex_mass_term(res, cfg, s, stacked, one, one, cfg.m * y0, spec);
  return res;
}

ExpansionResult satz6_noXY(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                           Side s, KernelFamily fam, const QuadratureSpec& spec) {
  const int n = cfg.n;
  const FlavorMatrix one = FlavorMatrix::Identity(n, n);
  require(cfg.U_L.is_trivial() && cfg.U_R.is_trivial(), "variant requires U = 1");
  require(!cfg.has_scalar_perturbation(), "variant requires Xi = Phi = 0");
  require(cfg.X_L == one && cfg.X_R == one && cfg.Y == one, "variant requires X = Y = 1");
  const Side o = other(s);
  const VectorFlavorField& a_s = cfg.A(s);
  const VectorFlavorField& a_o = cfg.A(o);
  const SpinorMatrix& chi = chiral_projector(s);

  ExpansionResult res = base_result(cfg, x, y, s, fam);
  const FlavorMatrix te = texp_i(a_s, x, y, spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 0}, kron_embed(chi, te), "gauge_phase", 0, 0, 0});
  add_field_terms(res, cfg, s, one, one, spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, kron_embed(chi, cfg.m * te), "mass_phase", 1, 0, 0});
  if (cfg.m == 0.0 || (a_s.is_trivial() && a_o.is_trivial())) return res;
  auto stacked = [&](double alpha) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 4 * n);
    const FourVector z = chord_point(x, y, alpha);
    if (!cfg.support().contains(z)) return out;
    const FlavorMatrix tf = texp_i(a_s, x, z, spec);
    const FlavorMatrix tb = texp_i(a_o, z, y, spec);
    const FlavorVector as = a_s.value(z), ao = a_o.value(z);
    for (int k = 0; k < 4; ++k)
      out.block(0, k * n, n, n) = tf * (kMetric[k] * (-kI * as[k] + kI * ao[k])) * tb;
    return out;
  };
  add_convex_mass_term(res, cfg, s, stacked, one, one, cfg.m, spec);
  return res;
}

ExpansionResult satz7_massY(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                            Side s, KernelFamily fam, const QuadratureSpec& spec) {
  const int n = cfg.n;
  const FlavorMatrix one = FlavorMatrix::Identity(n, n);
  require(cfg.U_L.is_trivial() && cfg.U_R.is_trivial(), "variant requires U = 1");
  require(!cfg.has_scalar_perturbation(), "variant requires Xi = Phi = 0");
  require(max_abs(cfg.X_L - cfg.X_R) == 0.0, "variant requires X_L = X_R");
  require(max_abs(cfg.X_L * cfg.Y - cfg.Y * cfg.X_L) <= 1e-12 * (1.0 + max_abs(cfg.Y)),
          "variant requires [X, Y] = 0");
  const Side o = other(s);
  const VectorFlavorField& a_s = cfg.A(s);
  const VectorFlavorField& a_o = cfg.A(o);
  const FlavorMatrix& xm = cfg.X_L;
  const FlavorMatrix& ym = cfg.Y;
  const SpinorMatrix& chi = chiral_projector(s);

  ExpansionResult res = base_result(cfg, x, y, s, fam);
  const FlavorMatrix te = texp_i(a_s, x, y, spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 0}, kron_embed(chi, te * xm), "gauge_phase", 0, 0, 0});
  add_field_terms(res, cfg, s, xm, one, spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 1}, kron_embed(chi, cfg.m * te * xm * ym),
                                    "mass_phase", 1, 0, 0});
  if (cfg.m == 0.0 || (a_s.is_trivial() && a_o.is_trivial())) return res;
  auto stacked = [&](double alpha) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 4 * n);
    const FourVector z = chord_point(x, y, alpha);
    if (!cfg.support().contains(z)) return out;
    const FlavorMatrix tf = texp_i(a_s, x, z, spec);
    const FlavorMatrix tb = texp_i(a_o, z, y, spec);
    const FlavorVector as = a_s.value(z), ao = a_o.value(z);
    for (int k = 0; k < 4; ++k)
      out.block(0, k * n, n, n) = tf * (kMetric[k] * (-kI * as[k] * ym + kI * ym * ao[k])) * tb;
    return out;
  };
  add_convex_mass_term(res, cfg, s, stacked, xm, one, cfg.m, spec);
  return res;
}

}  // namespace

ExpansionResult reference_expansion(ReferenceVariant variant, const ChiralConfig& cfg,
                                    const FourVector& x, const FourVector& y, Side side,
                                    KernelFamily family, const QuadratureSpec& spec) {
  cfg.validate();
  if (x == y) throw PreconditionError("reference_expansion: x and y coincide");
  switch (variant) {
    case ReferenceVariant::satz5_abelian: return satz5_abelian(cfg, x, y, side, family, spec);
    case ReferenceVariant::satz6_noXY: return satz6_noXY(cfg, x, y, side, family, spec);
    case ReferenceVariant::satz7_massY: return satz7_massY(cfg, x, y, side, family, spec);
    case ReferenceVariant::satz10_noA: return satz10_noA(cfg, x, y, side, family, spec);
    case ReferenceVariant::thm1_general: return thm1_general(cfg, x, y, side, family, spec);
  }
  throw Error("unknown reference variant");
}

}  // namespace lce
