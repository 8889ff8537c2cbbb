#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "lightcone/random_fields.hpp"
#include "lightcone/texp.hpp"
#include "oracles.hpp"

using namespace lce;
using lce::testing::diff;

namespace {

// exp(i t H) for hermitian H.
FlavorMatrix exp_ih(const FlavorMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<FlavorMatrix> es(h);
  const Eigen::VectorXcd d = (kI * t * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

VectorFlavorField constant_potential(const FlavorVector& v) {
  const int n = static_cast<int>(v[0].rows());
  return VectorFlavorField(
      n, Support{{}, 100.0}, [v](const FourVector&) { return v; },
      [n](const FourVector&, int) { return zero_flavor_vector(n); },
      [n](const FourVector&, int, int) { return zero_flavor_vector(n); });
}

RandomFieldOptions strong() {
  RandomFieldOptions o;
  o.amplitude = 0.8;
  return o;
}

std::pair<FourVector, FourVector> chord(Rng& rng) {
  const CausalClass c = static_cast<CausalClass>(std::uniform_int_distribution<int>(0, 1)(rng));
  return random_chord(rng, c, 0.8);
}

}  // namespace

TEST(Texp, TrivialAndDegenerate) {
  const QuadratureSpec spec;
  const VectorFlavorField z = VectorFlavorField::zero(3);
  EXPECT_EQ(texp_i(z, {0, 0, 0, 0}, {1, 0, 0, 0}, spec), FlavorMatrix::Identity(3, 3));
  Rng rng(41);
  const VectorFlavorField a = random_potential(rng, 2, {});
  const FourVector p(0.1, 0.2, 0, 0);
  EXPECT_LE(diff(texp_i(a, p, p, spec), FlavorMatrix::Identity(2, 2)), 1e-15);
}

TEST(Texp, ConstantPotentialIsMatrixExponential) {
  Rng rng(42);
  const QuadratureSpec spec;
  FlavorVector v;
  for (auto& c : v) c = random_hermitian(rng, 3, 0.5);
  const VectorFlavorField a = constant_potential(v);
  const FourVector x(0.1, -0.2, 0.3, 0), y(0.9, 0.2, -0.1, 0.4);
  const FourVector xi = y - x;
  FlavorMatrix axi = FlavorMatrix::Zero(3, 3);
  for (int j = 0; j < 4; ++j) axi += kMetric[j] * xi[j] * v[j];
  EXPECT_LE(diff(texp_i(a, x, y, spec), exp_ih(axi, -1.0)), 1e-12);
  // factor 1 without the -i: exp(A xi) for anti-hermitian i*axi
  EXPECT_LE(diff(texp(a, x, y, spec, kI), exp_ih(axi, 1.0)), 1e-12);
}

TEST(Texp, SingleGeneratorIsPhaseOfLineIntegral) {
  // A^j = phi(z) pol^j H: texp_i = exp(-i H int phi pol.xi).
  Rng rng(43);
  const QuadratureSpec spec;
  for (int i = 0; i < 5; ++i) {
    const ScalarProfile p = random_profile(rng, strong());
    FourVector pol(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const FlavorMatrix h = random_hermitian(rng, 2);
    const VectorFlavorField a = potential_from_terms(2, {{p, pol, h}});
    const auto [x, y] = chord(rng);
    const double phase = lce::testing::composite_gl(
        [&](double l) { return p.value(chord_point(x, y, l)) * inner(pol, y - x); }, 0, 1);
    EXPECT_LE(diff(texp_i(a, x, y, spec), exp_ih(h, -phase)), 1e-11);
  }
}

TEST(Texp, DysonSeriesWithinBound) {
  Rng rng(44);
  const QuadratureSpec spec;
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 3;
    const VectorFlavorField a = random_potential(rng, n, strong());
    const auto [x, y] = chord(rng);
    FlavorMatrix sum = FlavorMatrix::Zero(n, n);
    for (int k = 0; k <= 4; ++k) sum += dyson_term(a, x, y, k, spec, -kI);
    const double bound = texp_truncation_bound(a, x, y, 4, -kI);
    EXPECT_LE(max_abs(texp_i(a, x, y, spec) - sum), bound);
    EXPECT_GT(bound, 0.0);
  }
}

TEST(Texp, DysonTermsOfConstantPotential) {
  Rng rng(45);
  FlavorVector v;
  for (auto& c : v) c = random_hermitian(rng, 2, 0.5);
  const VectorFlavorField a = constant_potential(v);
  const FourVector x(0, 0, 0, 0), y(1, 0.3, 0, 0);
  FlavorMatrix m = FlavorMatrix::Zero(2, 2);
  for (int j = 0; j < 4; ++j) m += kMetric[j] * (y - x)[j] * v[j];
  FlavorMatrix power = FlavorMatrix::Identity(2, 2);
  double fact = 1;
  for (int k = 0; k <= 4; ++k) {
    if (k > 0) {
      power = power * m;
      fact *= k;
    }
    EXPECT_LE(diff(dyson_term(a, x, y, k, {}), power / fact), 1e-13) << k;
  }
  EXPECT_THROW(dyson_term(a, x, y, 5, {}), Error);
}

TEST(Texp, TruncationBoundExample) {
  // Scalar A^0 = 1 on a unit time step: s = 1, N = 6 bound is e/7!.
  const VectorFlavorField a = constant_potential(
      {FlavorMatrix::Identity(1, 1), FlavorMatrix::Zero(1, 1), FlavorMatrix::Zero(1, 1), FlavorMatrix::Zero(1, 1)});
  const double b = texp_truncation_bound(a, {0, 0, 0, 0}, {1, 0, 0, 0}, 6, -kI);
  EXPECT_NEAR(b, std::exp(1.0) / 5040.0, 1e-15);
  FlavorMatrix sum = FlavorMatrix::Zero(1, 1);
  double fact = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) fact *= k;
    sum(0, 0) += std::pow(-kI, k) / fact;
  }
  EXPECT_LE(std::abs(std::exp(-kI) - sum(0, 0)), b);
  EXPECT_EQ(texp_truncation_bound(VectorFlavorField::zero(1), {}, {1, 0, 0, 0}, 4), 0.0);
}

TEST(Texp, CompositionAdjointUnitarity) {
  Rng rng(46);
  const QuadratureSpec spec;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    const VectorFlavorField a = random_potential(rng, n, strong());
    const auto [x, y] = chord(rng);
    const FourVector z = chord_point(x, y, uniform(rng, -0.5, 1.5));
    const FlavorMatrix w = texp_i(a, x, y, spec);
    EXPECT_LE(diff(texp_i(a, x, z, spec) * texp_i(a, z, y, spec), w), 1e-10);
    EXPECT_LE(diff(w.adjoint(), texp_i(a, y, x, spec)), 1e-10);
    EXPECT_LE(diff(w * w.adjoint(), FlavorMatrix::Identity(n, n)), 1e-10);
    EXPECT_LE(diff(w * texp_i(a, y, x, spec), FlavorMatrix::Identity(n, n)), 1e-10);
  }
}

TEST(Texp, OrderingAgainstProductOfShortSteps) {
  // Product of midpoint exponentials over many short steps, latest factor on the right.
  Rng rng(47);
  const QuadratureSpec spec;
  const VectorFlavorField a = random_potential(rng, 3, strong());
  const auto [x, y] = chord(rng);
  const FourVector xi = y - x;
  auto product = [&](int steps) {
    FlavorMatrix p = FlavorMatrix::Identity(3, 3);
    for (int s = 0; s < steps; ++s) {
      const double l = (s + 0.5) / steps;
      p = p * exp_ih(a.contract(chord_point(x, y, l), xi), -1.0 / steps);
    }
    return p;
  };
  const FlavorMatrix w = texp_i(a, x, y, spec);
  const double e1 = diff(product(400), w), e2 = diff(product(800), w);
  EXPECT_LE(e2, 1e-5);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(Texp, ForwardAndBackwardEquations) {
  // d/dl Te(x -> z(l)) = Te(x -> z(l)) (-i A xi);  d/dl Te(z(l) -> y) = (i A xi) Te(z(l) -> y).
  Rng rng(48);
  const QuadratureSpec spec;
  for (int i = 0; i < 5; ++i) {
    const int n = 1 + i % 3;
    const VectorFlavorField a = random_potential(rng, n, strong());
    const auto [x, y] = chord(rng);
    const FourVector xi = y - x;
    const double l = uniform(rng, 0.2, 0.8);
    const FourVector z = chord_point(x, y, l);
    const FlavorMatrix fwd_exact = texp_i(a, x, z, spec) * (-kI * a.contract(z, xi));
    const FlavorMatrix bwd_exact = (kI * a.contract(z, xi)) * texp_i(a, z, y, spec);
    auto residuals = [&](double h) {
      auto fwd = [&](double t) { return texp_i(a, x, chord_point(x, y, t), spec); };
      auto bwd = [&](double t) { return texp_i(a, chord_point(x, y, t), y, spec); };
      const FlavorMatrix df = (fwd(l + h) - fwd(l - h)) / (2 * h);
      const FlavorMatrix db = (bwd(l + h) - bwd(l - h)) / (2 * h);
      return std::pair{diff(df, fwd_exact), diff(db, bwd_exact)};
    };
    const auto [f1, b1] = residuals(1e-2);
    const auto [f2, b2] = residuals(5e-3);
    EXPECT_LE(f2, 1e-4);
    EXPECT_LE(b2, 1e-4);
    EXPECT_GE(std::log2(f1 / f2), 1.9);
    EXPECT_GE(std::log2(b1 / b2), 1.9);
  }
}

TEST(Texp, PureGaugeAndGaugeConjugation) {
  Rng rng(49);
  const QuadratureSpec spec;
  for (int i = 0; i < 6; ++i) {
    const int n = 1 + i % 3;
    const UnitaryField u = random_unitary_field(rng, n, strong());
    const VectorFlavorField a = random_potential(rng, n, strong());
    const auto [x, y] = chord(rng);
    EXPECT_LE(diff(texp_i(pure_gauge_potential(u), x, y, spec), u.value(x) * u.inverse(y)), 1e-8);
    EXPECT_LE(diff(texp_i(gauge_transform(a, u), x, y, spec), u.value(x) * texp_i(a, x, y, spec) * u.inverse(y)),
              1e-8);
  }
}

TEST(Texp, DifferenceIdentity) {
  // Te(A; x->y) - Te(B; x->y) = int dl Te(A; x->z) (-i A xi + i B xi)(z) Te(B; z->y)
  Rng rng(50);
  const QuadratureSpec spec;
  for (int i = 0; i < 5; ++i) {
    const int n = 1 + i % 3;
    const VectorFlavorField a = random_potential(rng, n, strong());
    const VectorFlavorField b = random_potential(rng, n, strong());
    const auto [x, y] = chord(rng);
    const FourVector xi = y - x;
    const FlavorMatrix rhs = lce::testing::composite_gl(
        [&](double l) -> FlavorMatrix {
          const FourVector z = chord_point(x, y, l);
          return texp_i(a, x, z, spec) * (-kI * a.contract(z, xi) + kI * b.contract(z, xi)) * texp_i(b, z, y, spec);
        },
        0, 1, 8, 20);
    EXPECT_LE(diff(texp_i(a, x, y, spec) - texp_i(b, x, y, spec), rhs), 1e-8);
  }
}

TEST(ChordPropagator, MatchesDirectTexp) {
  Rng rng(51);
  const QuadratureSpec spec;
  const VectorFlavorField a = random_potential(rng, 2, strong());
  const auto [x, y] = chord(rng);
  const ChordPropagator p(a, x, y, -0.5, 1.5, spec);
  EXPECT_LE(diff(p.full(), texp_i(a, x, y, spec)), 1e-12);
  for (double l : {-0.4, -0.1, 0.0, 0.3, 0.55, 1.0, 1.2, 1.45}) {
    const FourVector z = chord_point(x, y, l);
    EXPECT_LE(diff(p.from_start(l), texp_i(a, x, z, spec)), 1e-11) << l;
    EXPECT_LE(diff(p.to_end(l), texp_i(a, z, y, spec)), 1e-11) << l;
    EXPECT_LE(diff(p.between(l, 0.7), texp_i(a, z, chord_point(x, y, 0.7), spec)), 1e-11) << l;
  }
  const ChordPropagator triv(VectorFlavorField::zero(2), x, y, 0, 1, spec);
  EXPECT_EQ(triv.from_start(0.3), FlavorMatrix::Identity(2, 2));
}

TEST(Propagate, ExhaustedStepBudgetRaisesOdeError) {
  OdeTolerance tol;
  tol.max_steps = 5;
  auto m = [](double t) { return FlavorMatrix::Constant(1, 1, cplx(0, 1e3 * std::cos(1e3 * t))); };
  EXPECT_THROW(propagate(m, 0, 1, tol), OdeError);
}

TEST(Propagate, ScalarExample) {
  // W' = W t => W(1) = e^{1/2}; backwards gives the inverse.
  auto m = [](double t) { return FlavorMatrix::Constant(1, 1, t); };
  EXPECT_NEAR(propagate(m, 0, 1, {})(0, 0).real(), std::exp(0.5), 1e-13);
  EXPECT_NEAR(propagate(m, 1, 0, {})(0, 0).real(), std::exp(-0.5), 1e-13);
}

TEST(HatDerivative, SandwichDefinitionAndFiniteDifference) {
  Rng rng(52);
  const QuadratureSpec spec;
  const VectorFlavorField al = random_potential(rng, 2, strong());
  const VectorFlavorField ar = random_potential(rng, 2, strong());
  const MatrixField m = random_matrix_field(rng, 2, strong());
  const CompositeField f = as_composite(m);
  const auto [x, y] = chord(rng);
  const FourVector z = chord_point(x, y, 0.4);
  for (int k = 0; k < 4; ++k) {
    const FlavorMatrix cov = -kI * lower(al.value(z))[k] * m.value(z) + m.d1(z, k) + kI * m.value(z) * lower(ar.value(z))[k];
    EXPECT_LE(diff(covariant_link_derivative(al, ar, f, z, k), cov), 1e-14);
    EXPECT_LE(diff(hat_derivative_sandwich(al, ar, f, x, z, y, k, spec),
                   texp_i(al, x, z, spec) * cov * texp_i(ar, z, y, spec)),
              1e-11);
  }
  // Along the chord, xi^k times the sandwich is the derivative of
  // Te(A_L; x->z) f(z) Te(A_R; z->y) in the chord parameter.
  const FourVector xi = y - x;
  auto s = [&](double l) {
    const FourVector q = chord_point(x, y, l);
    return FlavorMatrix(texp_i(al, x, q, spec) * m.value(q) * texp_i(ar, q, y, spec));
  };
  const double h = 1e-3;
  const FlavorMatrix d = (8.0 * (s(0.4 + h) - s(0.4 - h)) - (s(0.4 + 2 * h) - s(0.4 - 2 * h))) / (12 * h);
  FlavorMatrix contracted = FlavorMatrix::Zero(2, 2);
  for (int k = 0; k < 4; ++k) contracted += xi[k] * hat_derivative_sandwich(al, ar, f, x, z, y, k, spec);
  EXPECT_LE(diff(d, contracted), 1e-8);
}
