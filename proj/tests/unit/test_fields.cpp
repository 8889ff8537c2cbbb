#include <gtest/gtest.h>

#include "lightcone/random_fields.hpp"
#include "oracles.hpp"

using namespace lce;
using lce::testing::diff;

namespace {

// 4th-order central difference of a matrix function along e_a.
template <class F>
FlavorMatrix fd(const F& f, const FourVector& z, int a, double h = 1e-3) {
  const FourVector e = unit_vector(a);
  return (8.0 * (f(z + h * e) - f(z - h * e)) - (f(z + 2 * h * e) - f(z - 2 * h * e))) / (12 * h);
}

PotentialTerm term(const ScalarProfile& p, FourVector pol, FlavorMatrix g) { return {p, pol, std::move(g)}; }

ScalarProfile gaussian(FourVector c, double w, double amp = 1.0) {
  ScalarProfile p;
  p.center = c;
  p.scale = w;
  p.amplitude = amp;
  return p;
}

}  // namespace

TEST(ScalarProfile, DerivativesMatchFiniteDifferences) {
  Rng rng(11);
  for (bool window : {false, true}) {
    RandomFieldOptions o;
    o.window = window;
    for (int i = 0; i < 10; ++i) {
      const ScalarProfile p = random_profile(rng, o);
      const FourVector z = random_point(rng, 0.5);
      const auto g = p.gradient(z);
      const auto h = p.hessian(z);
      for (int a = 0; a < 4; ++a) {
        auto f = [&](const FourVector& q) { return FlavorMatrix::Constant(1, 1, p.value(q)); };
        EXPECT_NEAR(g[a], fd(f, z, a)(0, 0).real(), 1e-8);
        for (int b = 0; b < 4; ++b) {
          auto fg = [&](const FourVector& q) { return FlavorMatrix::Constant(1, 1, p.gradient(q)[b]); };
          EXPECT_NEAR(h[a][b], fd(fg, z, a)(0, 0).real(), 1e-7);
        }
      }
    }
  }
}

TEST(ScalarProfile, CompactSupport) {
  ScalarProfile w;
  w.kind = ScalarProfile::Kind::window;
  w.scale = 1.5;
  EXPECT_EQ(w.value({1.6, 0, 0, 0}), 0.0);
  EXPECT_GT(w.value({1.4, 0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(w.support().radius, 1.5);
  const ScalarProfile g = gaussian({0, 0, 0, 0}, 0.5);
  EXPECT_EQ(g.value({0.5 * kGaussianCutoffWidths + 1e-9, 0, 0, 0}), 0.0);
  EXPECT_GT(g.value({0.5 * kGaussianCutoffWidths - 1e-3, 0, 0, 0}), 0.0);
}

TEST(Potential, RejectsNonHermitianAndWrongDimension) {
  FlavorMatrix g(2, 2);
  g << 0, 1, 0, 0;
  EXPECT_THROW(potential_from_terms(2, {term(gaussian({}, 0.5), {1, 0, 0, 0}, g)}), PreconditionError);
  EXPECT_THROW(potential_from_terms(3, {term(gaussian({}, 0.5), {1, 0, 0, 0}, FlavorMatrix::Identity(2, 2))}),
               DimensionError);
}

TEST(FieldStrength, AntisymmetricExact) {
  Rng rng(12);
  for (int i = 0; i < 10; ++i) {
    const VectorFlavorField a = random_potential(rng, 2, {});
    const FlavorTensor f = field_strength(a, random_point(rng, 0.5));
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) EXPECT_EQ(f[j][k], FlavorMatrix(-f[k][j]));
  }
}

TEST(FieldStrength, ConstantPotentialWithEqualComponentsVanishes) {
  FlavorMatrix m(2, 2);
  m << 1, cplx(0, 1), cplx(0, -1), 2;
  const VectorFlavorField a(
      2, Support{{}, 100.0}, [m](const FourVector&) { return FlavorVector{m, m, m, m}; },
      [](const FourVector&, int) { return zero_flavor_vector(2); },
      [](const FourVector&, int, int) { return zero_flavor_vector(2); });
  const FlavorTensor f = field_strength(a, {0.1, 0.2, 0, 0});
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(max_abs(f[j][k]), 0.0);
}

TEST(FieldStrength, SingleComponentTimeDependence) {
  // A^1 = phi(z^0) M: F^{01} = d^0 A^1 = phi'(z^0) M.
  FlavorMatrix m(2, 2);
  m << 0, 1, 1, 0;
  auto phi = [](double t) { return std::exp(-t * t); };
  auto dphi = [](double t) { return -2 * t * std::exp(-t * t); };
  const VectorFlavorField a(
      2, Support{{}, 100.0},
      [=](const FourVector& z) {
        FlavorVector v = zero_flavor_vector(2);
        v[1] = phi(z[0]) * m;
        return v;
      },
      [=](const FourVector& z, int k) {
        FlavorVector v = zero_flavor_vector(2);
        if (k == 0) v[1] = dphi(z[0]) * m;
        return v;
      },
      [=](const FourVector& z, int j, int k) {
        FlavorVector v = zero_flavor_vector(2);
        if (j == 0 && k == 0) v[1] = (4 * z[0] * z[0] - 2) * phi(z[0]) * m;
        return v;
      });
  const FourVector z(0.3, 0.1, 0, 0);
  const FlavorTensor f = field_strength(a, z);
  EXPECT_LE(diff(f[0][1], dphi(0.3) * m), 1e-15);
  EXPECT_LE(diff(f[1][0], -dphi(0.3) * m), 1e-15);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      if (!((j == 0 && k == 1) || (j == 1 && k == 0))) EXPECT_EQ(max_abs(f[j][k]), 0.0);
}

TEST(Current, VanishesForZeroPotential) {
  const VectorFlavorField a = VectorFlavorField::zero(2);
  const FlavorVector j = current(a, {0, 0, 0, 0});
  for (const auto& c : j) EXPECT_EQ(max_abs(c), 0.0);
}

TEST(Current, MatchesFiniteDifferenceDivergence) {
  // j^k = d_l F^{kl} - i g_ll [A^l, F^{kl}]
  Rng rng(13);
  for (int n : {1, 2}) {
    const VectorFlavorField a = random_potential(rng, n, {});
    const FourVector z = random_point(rng, 0.4);
    const FlavorVector j = current(a, z);
    const FlavorVector av = a.value(z);
    const FlavorTensor fz = field_strength(a, z);
    for (int k = 0; k < 4; ++k) {
      FlavorMatrix expect = FlavorMatrix::Zero(n, n);
      for (int l = 0; l < 4; ++l) {
        expect += fd([&](const FourVector& q) { return FlavorMatrix(field_strength(a, q)[k][l]); }, z, l);
        expect += -kI * kMetric[l] * (av[l] * fz[k][l] - fz[k][l] * av[l]);
      }
      EXPECT_LE(diff(j[k], expect), 1e-7) << "n=" << n << " k=" << k;
    }
  }
}

TEST(PureGauge, IdentityGivesZero) {
  const VectorFlavorField a = pure_gauge_potential(UnitaryField::identity(2));
  EXPECT_TRUE(a.is_trivial());
}

TEST(PureGauge, AbelianPhaseGivesGradient) {
  ScalarProfile lam = gaussian({0.1, 0, 0.2, 0}, 0.6, 0.9);
  const UnitaryField u = exp_unitary(1, {{lam, FlavorMatrix::Identity(1, 1)}});
  const VectorFlavorField a = pure_gauge_potential(u);
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    const FourVector z = random_point(rng, 0.8);
    const auto g = lam.gradient(z);
    const FlavorVector v = a.value(z);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(v[j](0, 0) - kMetric[j] * g[j]), 0.0, 1e-13);
  }
}

TEST(PureGauge, HermitianAndSourceFree) {
  Rng rng(15);
  for (int i = 0; i < 5; ++i) {
    const UnitaryField u = random_unitary_field(rng, 2, {});
    const VectorFlavorField a = pure_gauge_potential(u);
    const VectorFlavorField afd = pure_gauge_potential(u, true);
    const FourVector z = random_point(rng, 0.4);
    const FlavorVector v = a.value(z);
    for (const auto& c : v) EXPECT_LE(diff(c, c.adjoint()), 1e-10);
    const FlavorTensor f = field_strength(a, z);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) EXPECT_LE(max_abs(f[j][k]), 1e-6);
    for (const auto& c : current(afd, z)) EXPECT_LE(max_abs(c), 1e-4);
  }
}

TEST(UnitaryField, ValuesAndDerivatives) {
  Rng rng(16);
  const UnitaryField u = random_unitary_field(rng, 3, {});
  for (int i = 0; i < 5; ++i) {
    const FourVector z = random_point(rng, 0.5);
    EXPECT_TRUE(is_unitary(u.value(z), 1e-12));
    for (int a = 0; a < 4; ++a) {
      EXPECT_LE(diff(u.d1(z, a), fd([&](const FourVector& q) { return u.value(q); }, z, a)), 1e-8);
      for (int b = 0; b < 4; ++b)
        EXPECT_LE(diff(u.d2(z, a, b), fd([&](const FourVector& q) { return u.d1(q, b); }, z, a)), 1e-7);
    }
  }
  EXPECT_EQ(u.value({100, 0, 0, 0}), FlavorMatrix::Identity(3, 3));
}

TEST(FiniteDifferenceFallback, OptInAndAccurate) {
  Rng rng(17);
  const VectorFlavorField a = random_potential(rng, 2, {});
  VectorFlavorField bare(2, a.support(), [&a](const FourVector& z) { return a.value(z); });
  const FourVector z = random_point(rng, 0.3);
  EXPECT_THROW(bare.d1(z, 0), DerivativeUnavailable);
  EXPECT_THROW(bare.d2(z, 0, 1), DerivativeUnavailable);
  bare.enable_fd_fallback();
  bare.set_length_scale(0.5);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_LE(diff(bare.d1(z, k)[j], a.d1(z, k)[j]), 1e-7);
      EXPECT_LE(diff(bare.d2(z, k, j)[j], a.d2(z, k, j)[j]), 1e-4);
    }
  }
}

TEST(DynamicalMass, Examples) {
  Rng rng(18);
  ChiralConfig cfg = ChiralConfig::free(2, 1.0);
  cfg.Y = random_hermitian(rng, 2);
  const FourVector z(0.1, 0, 0.2, 0);
  auto [yl, yr] = dynamical_mass(cfg, z);
  EXPECT_EQ(yl, cfg.Y);
  EXPECT_EQ(yr, cfg.Y);
  cfg.Xi = random_matrix_field(rng, 2, {});
  std::tie(yl, yr) = dynamical_mass(cfg, z);
  EXPECT_LE(diff(yl, yr), 0.0);
  EXPECT_TRUE(is_hermitian(yl, 1e-14));
  cfg.Phi = random_matrix_field(rng, 2, {});
  for (int i = 0; i < 10; ++i) {
    const FourVector q = random_point(rng, 0.5);
    std::tie(yl, yr) = dynamical_mass(cfg, q);
    EXPECT_LE(diff(yr, yl.adjoint()), 1e-15);
    EXPECT_EQ(dynamical_mass(cfg, q, Side::L), yl);
    // Y + Xi + i rho Phi = chi_R (x) Y_L + chi_L (x) Y_R
    const BlockMatrix lhs = kron_embed(SpinorMatrix::Identity(), cfg.Y + cfg.Xi.value(q)) +
                            kron_embed(kI * rho(), cfg.Phi.value(q));
    const BlockMatrix rhs = kron_embed(chiral_projector(Side::R), yl) + kron_embed(chiral_projector(Side::L), yr);
    EXPECT_LE(diff(lhs, rhs), 1e-14);
  }
}

TEST(CommutesWithX, Examples) {
  Rng rng(19);
  const VectorFlavorField a = random_potential(rng, 2, {});
  const std::vector<FourVector> pts = support_samples(a.support());
  const FlavorMatrix one = FlavorMatrix::Identity(2, 2);
  EXPECT_TRUE(commutes_with_X(a, one, one, pts, 1e-12));
  FlavorMatrix x(2, 2);
  x << 1, 0, 0, 0;
  RandomFieldOptions o;
  o.commute_with = FlavorMatrix(FlavorMatrix::Identity(2, 2) + x);
  const VectorFlavorField diag = random_potential(rng, 2, o);
  EXPECT_TRUE(commutes_with_X(diag, x, x, pts, 1e-12));
  FlavorMatrix pauli(2, 2);
  pauli << 0, 1, 1, 0;
  const VectorFlavorField off = potential_from_terms(2, {term(gaussian({}, 0.5), {1, 0, 0, 0}, pauli)});
  EXPECT_FALSE(commutes_with_X(off, x, x, pts, 1e-12));
}

TEST(CompositeField, ProductRuleAndBox) {
  Rng rng(20);
  ChiralConfig cfg = random_config(rng, {});
  cfg.A_L = cfg.A_R = VectorFlavorField::zero(cfg.n);
  for (Side s : {Side::L, Side::R}) {
    const CompositeField v = mass_link(cfg, s);
    const CompositeField g = mass_square_link(cfg, s);
    const FourVector z = random_point(rng, 0.4);
    const FlavorMatrix expect_v = cfg.U(s).inverse(z) * dynamical_mass(cfg, z, s) * cfg.U(other(s)).value(z);
    EXPECT_LE(diff(v.value(z), expect_v), 1e-14);
    for (int a = 0; a < 4; ++a) EXPECT_LE(diff(v.d1(z, a), fd(v.value, z, a)), 1e-8);
    ASSERT_TRUE(g.has_d2());
    EXPECT_LE(diff(box(g, z, BoxMethod::analytic), box(g, z, BoxMethod::finite_difference)), 1e-9);
  }
}

TEST(CompositeField, BoxWithoutSecondDerivatives) {
  CompositeField f = constant_composite(FlavorMatrix::Identity(2, 2));
  f.d2 = nullptr;
  EXPECT_THROW(box(f, {}, BoxMethod::analytic), DerivativeUnavailable);
  EXPECT_EQ(max_abs(box(f, {}, BoxMethod::automatic)), 0.0);
}

TEST(GaugeTransform, MatchesDefinition) {
  Rng rng(21);
  const VectorFlavorField a = random_potential(rng, 2, {});
  const UnitaryField u = random_unitary_field(rng, 2, {});
  const VectorFlavorField g = gauge_transform(a, u);
  const VectorFlavorField pg = pure_gauge_potential(u);
  const FourVector z = random_point(rng, 0.4);
  for (int j = 0; j < 4; ++j) {
    const FlavorMatrix expect = u.value(z) * a.value(z)[j] * u.inverse(z) + pg.value(z)[j];
    EXPECT_LE(diff(g.value(z)[j], expect), 1e-13);
  }
}

TEST(ChiralConfig, Validation) {
  ChiralConfig cfg = ChiralConfig::free(2, 1.0);
  EXPECT_NO_THROW(cfg.validate());
  cfg.Y = FlavorMatrix::Identity(3, 3);
  EXPECT_THROW(cfg.validate(), DimensionError);
  cfg.Y = FlavorMatrix::Zero(2, 2);
  cfg.Y(0, 1) = 1.0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = ChiralConfig::free(2, 1.0);
  cfg.A_L = VectorFlavorField::zero(3);
  EXPECT_THROW(cfg.validate(), DimensionError);
}

TEST(Support, EncloseContainsBoth) {
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const Support a{random_point(rng, 2), uniform(rng, 0.1, 1)};
    const Support b{random_point(rng, 2), uniform(rng, 0.1, 1)};
    const Support c = enclose(a, b);
    EXPECT_LE(euclidean_norm(a.center - c.center) + a.radius, c.radius + 1e-12);
    EXPECT_LE(euclidean_norm(b.center - c.center) + b.radius, c.radius + 1e-12);
  }
}
