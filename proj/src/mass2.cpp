#include "lightcone/mass2.hpp"

namespace lce {

namespace {

FlavorMatrix slice(const Eigen::MatrixXcd& m, int k, int n) { return m.block(0, k * n, n, n); }

void require_no_potential(const ChiralConfig& cfg, const char* who) {
  if (!cfg.A_L.is_trivial() || !cfg.A_R.is_trivial())
    throw PreconditionError(std::string(who) + ": requires A_L = A_R = 0");
}

std::vector<Truncation> truncation_for(KernelFamily fam) {
  return {fam == KernelFamily::k ? Truncation::xi2 : Truncation::xi0};
}

ExpansionResult empty_result(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                             Side s, KernelFamily fam) {
  ExpansionResult r;
  r.side = s;
  r.family = fam;
  r.x = x;
  r.y = y;
  r.n = cfg.n;
  r.truncation = truncation_for(fam);
  return r;
}

}  // namespace

ExpansionResult mass2_expansion(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                Side s, KernelFamily fam, const QuadratureSpec& spec,
                                BoxMethod box_method) {
  cfg.validate();
  require_no_potential(cfg, "mass2_expansion");
  if (x == y) throw PreconditionError("mass2_expansion: x and y coincide");
  const int n = cfg.n;
  const Side o = other(s);
  const SpinorMatrix& chi = chiral_projector(s);
  const SpinorMatrix xs = slash(y - x);
  const CompositeField v = mass_link(cfg, s);
  const CompositeField w = mass_link(cfg, o);
  const CompositeField g = mass_square_link(cfg, s);
  const FlavorMatrix ux = cfg.U(s).value(x);
  const FlavorMatrix uy_inv = cfg.U(s).inverse(y);
  const bool varies = !cfg.U_L.is_trivial() || !cfg.U_R.is_trivial() || cfg.has_scalar_perturbation();
  std::vector<double> cuts;
  const LambdaWindow win = lambda_window(x, y, cfg.support());
  if (win.meets_support) cuts = {win.enter, win.leave};

  // [G | (a^2-a) box G | (1-a) d_a V W (4) | a V d_b W (4)]
  auto integrand = [&](double alpha) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, 10 * n);
    const FourVector z = chord_point(x, y, alpha);
    out.block(0, 0, n, n) = g.value(z);
    if (!varies) return out;
    out.block(0, n, n, n) = (alpha * alpha - alpha) * box(g, z, box_method);
    const FlavorMatrix vz = v.value(z), wz = w.value(z);
    for (int a = 0; a < 4; ++a) {
      out.block(0, (2 + a) * n, n, n) = (1.0 - alpha) * v.d1(z, a) * wz;
      out.block(0, (6 + a) * n, n, n) = alpha * vz * w.d1(z, a);
    }
    return out;
  };
  const Eigen::MatrixXcd acc = integrate(integrand, 0.0, 1.0, spec, cuts);

  ExpansionResult res = empty_result(cfg, x, y, s, fam);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 2}, kron_embed(chi, ux * slice(acc, 0, n) * uy_inv),
                                    "m2_phase", 2, 0, 0});
  if (!varies) return res;

  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3},
                                    (-0.5 * kI) * kron_embed(chi * xs, ux * slice(acc, 1, n) * uy_inv),
                                    "m2_box", 2, 2, 1});

  // int_0^1 da int_0^a db dslash V(z_b) xi-slash dslash W(z_a)
  auto outer = [&](double alpha) -> Eigen::MatrixXcd {
    auto inner = [&](double beta) -> Eigen::MatrixXcd {
      Eigen::MatrixXcd d(n, 4 * n);
      const FourVector u = chord_point(x, y, beta);
      for (int a = 0; a < 4; ++a) d.block(0, a * n, n, n) = v.d1(u, a);
      return d;
    };
    const Eigen::MatrixXcd iv = integrate(inner, 0.0, alpha, spec);
    const FourVector z = chord_point(x, y, alpha);
    std::array<FlavorMatrix, 4> dw;
    for (int b = 0; b < 4; ++b) dw[b] = w.d1(z, b);
    Eigen::MatrixXcd out(n, 16 * n);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out.block(0, (4 * a + b) * n, n, n) = slice(iv, a, n) * dw[b];
    return out;
  };
  const Eigen::MatrixXcd nested = integrate(outer, 0.0, 1.0, spec, cuts);
  BlockMatrix cn = BlockMatrix::Zero(4 * n, 4 * n);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      cn += kron_embed(chi * gamma(a) * xs * gamma(b), ux * slice(nested, 4 * a + b, n) * uy_inv);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, (0.5 * kI) * cn, "m2_nested", 2, 2, 1});

  BlockMatrix cl = BlockMatrix::Zero(4 * n, 4 * n), cr = cl;
  for (int a = 0; a < 4; ++a) {
    cl += kron_embed(chi * gamma(a), ux * slice(acc, 2 + a, n) * uy_inv);
    cr += kron_embed(chi * gamma(a), ux * slice(acc, 6 + a, n) * uy_inv);
  }
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, kI * cl, "m2_left_derivative", 2, 1, 0});
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, -kI * cr, "m2_right_derivative", 2, 1, 0});
  return res;
}

ExpansionResult satz25_reference(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                 Side s, KernelFamily fam, const QuadratureSpec& spec) {
  cfg.validate();
  require_no_potential(cfg, "satz25_reference");
  if (cfg.has_scalar_perturbation()) throw PreconditionError("satz25_reference: requires Xi = Phi = 0");
  if (x == y) throw PreconditionError("satz25_reference: x and y coincide");
  const int n = cfg.n;
  const Side o = other(s);
  const UnitaryField& us = cfg.U(s);
  const UnitaryField& uo = cfg.U(o);
  const FlavorMatrix& yy = cfg.Y;
  const FlavorMatrix y2 = yy * yy;
  const FourVector xi = y - x;
  const SpinorMatrix& chi = chiral_projector(s);
  const SpinorMatrix xs = slash(xi);
  const FlavorMatrix ux = us.value(x);
  const FlavorMatrix uy_inv = us.value(y).adjoint();

  auto dv = [&](const FourVector& z, int a) -> FlavorMatrix {
    return us.d1(z, a).adjoint() * yy * uo.value(z) + us.value(z).adjoint() * yy * uo.d1(z, a);
  };
  auto dw = [&](const FourVector& z, int a) -> FlavorMatrix {
    return uo.d1(z, a).adjoint() * yy * us.value(z) + uo.value(z).adjoint() * yy * us.d1(z, a);
  };
  auto box_g = [&](const FourVector& z) -> FlavorMatrix {
    const FlavorMatrix u = us.value(z);
    FlavorMatrix out = FlavorMatrix::Zero(n, n);
    for (int a = 0; a < 4; ++a) {
      const FlavorMatrix d = us.d1(z, a), dd = us.d2(z, a, a);
      out += kMetric[a] * (dd.adjoint() * y2 * u + 2.0 * d.adjoint() * y2 * d + u.adjoint() * y2 * dd);
    }
    return out;
  };
  auto wrap = [&](FlavorMatrix m) { return FlavorMatrix(ux * m * uy_inv); };

  ExpansionResult res = empty_result(cfg, x, y, s, fam);
  const FlavorMatrix c2 = line_integral(
      [&](double a) -> Eigen::MatrixXcd {
        const FourVector z = chord_point(x, y, a);
        return us.value(z).adjoint() * y2 * us.value(z);
      },
      Polynomial::one(), spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 2}, kron_embed(chi, wrap(c2)), "m2_phase", 2, 0, 0});
  if (us.is_trivial() && uo.is_trivial()) return res;

  const FlavorMatrix cb = line_integral(
      [&](double a) -> Eigen::MatrixXcd { return box_g(chord_point(x, y, a)); },
      Polynomial::alpha_squared_minus_alpha(), spec);
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, (-0.5 * kI) * kron_embed(chi * xs, wrap(cb)),
                                    "m2_box", 2, 2, 1});

  // int_x^y dz int_x^z du dslash V(u) (z-x)^j gamma_j dslash W(z), with the
  // inner integral taken over the sub-chord from x to z.
  BlockMatrix cn = BlockMatrix::Zero(4 * n, 4 * n);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const SpinorMatrix sp = gamma(a) * xs * gamma(b);
      const FlavorMatrix m = line_integral(
          [&](double alpha) -> Eigen::MatrixXcd {
            const FourVector z = chord_point(x, y, alpha);
            const FlavorMatrix inner = line_integral(
                [&](double t) -> Eigen::MatrixXcd { return dv(chord_point(x, z, t), a); },
                Polynomial::one(), spec);
            // (z - x)^j gamma_j = alpha xi-slash
            return alpha * inner * dw(z, b);
          },
          Polynomial::one(), spec);
      cn += kron_embed(chi * sp, wrap(m));
    }
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, (0.5 * kI) * cn, "m2_nested", 2, 2, 1});

  BlockMatrix cl = BlockMatrix::Zero(4 * n, 4 * n), cr = cl;
  for (int a = 0; a < 4; ++a) {
    const FlavorMatrix l = line_integral(
        [&](double al) -> Eigen::MatrixXcd {
          const FourVector z = chord_point(x, y, al);
          return dv(z, a) * uo.value(z).adjoint() * yy * us.value(z);
        },
        Polynomial::one_minus_alpha(), spec);
    const FlavorMatrix r = line_integral(
        [&](double al) -> Eigen::MatrixXcd {
          const FourVector z = chord_point(x, y, al);
          return us.value(z).adjoint() * yy * uo.value(z) * dw(z, a);
        },
        Polynomial::alpha(), spec);
    cl += kron_embed(chi * gamma(a), wrap(l));
    cr += kron_embed(chi * gamma(a), wrap(r));
  }
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, kI * cl, "m2_left_derivative", 2, 1, 0});
  res.terms.push_back(ExpansionTerm{KernelTag{fam, 3}, -kI * cr, "m2_right_derivative", 2, 1, 0});
  return res;
}

}  // namespace lce
