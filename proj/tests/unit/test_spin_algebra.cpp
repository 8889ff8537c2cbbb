#include <gtest/gtest.h>

#include "lightcone/random_fields.hpp"
#include "lightcone/spin_algebra.hpp"

using namespace lce;

namespace {
const SpinorMatrix kOne = SpinorMatrix::Identity();

double d(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return max_abs(a - b); }

FlavorMatrix random_matrix(Rng& rng, int n) {
  FlavorMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  return m;
}
}  // namespace

TEST(Gamma, CliffordRelationExact) {
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      const SpinorMatrix ac = gamma(j) * gamma(k) + gamma(k) * gamma(j);
      const SpinorMatrix expect = (j == k ? 2.0 * kMetric[j] : 0.0) * kOne;
      EXPECT_EQ(ac, expect) << j << k;
    }
}

TEST(Gamma, RhoSquaresToOneAndAnticommutes) {
  EXPECT_EQ(rho() * rho(), kOne);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(rho() * gamma(j) + gamma(j) * rho(), SpinorMatrix::Zero());
  EXPECT_EQ(d(rho(), rho().adjoint()), 0.0);
}

TEST(Gamma, IndexOutOfRange) { EXPECT_THROW(gamma(4), DimensionError); }

TEST(ChiralProjector, Algebra) {
  const SpinorMatrix& l = chiral_projector(Side::L);
  const SpinorMatrix& r = chiral_projector(Side::R);
  EXPECT_EQ(l + r, kOne);
  EXPECT_EQ(l * r, SpinorMatrix::Zero());
  EXPECT_EQ(l * l, l);
  EXPECT_EQ(d(l, 0.5 * (kOne - rho())), 0.0);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(l * gamma(j), gamma(j) * r);
}

TEST(Sigma, CommutatorDefinition) {
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      const SpinorMatrix c = 0.5 * kI * (gamma(j) * gamma(k) - gamma(k) * gamma(j));
      EXPECT_LE(d(sigma(j, k), c), 1e-15);
      EXPECT_LE(d(sigma(j, k), -sigma(k, j)), 1e-15);
    }
}

TEST(Slash, Examples) {
  EXPECT_EQ(slash(unit_vector(0)) * slash(unit_vector(0)), kOne);
  EXPECT_LE(max_abs(slash(FourVector(1, 1, 0, 0)) * slash(FourVector(1, 1, 0, 0))), 1e-15);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const FourVector xi = random_point(rng, 2);
    EXPECT_LE(d(slash(xi) * slash(xi), minkowski_square(xi) * kOne), 1e-13);
  }
}

TEST(Slash, ContractionIdentityOnLightCone) {
  // xi v w xi - 2 (v.xi) w xi + 2 (w.xi) v xi = xi^2 v w
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const FourVector v = random_point(rng, 1), w = random_point(rng, 1);
    FourVector xi = random_point(rng, 1);
    const double r = std::sqrt(xi[1] * xi[1] + xi[2] * xi[2] + xi[3] * xi[3]);
    xi[0] = i % 2 ? r : -r;
    const SpinorMatrix res = slash(xi) * slash(v) * slash(w) * slash(xi) -
                             2 * inner(v, xi) * slash(w) * slash(xi) + 2 * inner(w, xi) * slash(v) * slash(xi);
    EXPECT_LE(max_abs(res), 1e-12);
  }
}

TEST(Slash, FlavorValuedMatchesComponents) {
  Rng rng(6);
  FlavorVector a;
  for (auto& c : a) c = random_hermitian(rng, 2);
  BlockMatrix expect = BlockMatrix::Zero(8, 8);
  for (int j = 0; j < 4; ++j) expect += kron_embed(kMetric[j] * gamma(j), a[j]);
  EXPECT_LE(d(slash(a), expect), 1e-15);
}

TEST(DiracAdjoint, Examples) {
  EXPECT_EQ(dirac_adjoint(BlockMatrix::Identity(4, 4)), BlockMatrix::Identity(4, 4));
  for (int j = 0; j < 4; ++j) EXPECT_LE(d(dirac_adjoint(gamma(j)), gamma(j)), 1e-15);
  EXPECT_LE(d(dirac_adjoint(chiral_projector(Side::L)), chiral_projector(Side::R)), 1e-15);
}

TEST(DiracAdjoint, InvolutionAndAntiMultiplicative) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    const BlockMatrix a = random_matrix(rng, 4 * n), b = random_matrix(rng, 4 * n);
    EXPECT_LE(d(dirac_adjoint(dirac_adjoint(a)), a), 1e-14);
    EXPECT_LE(d(dirac_adjoint(a * b), dirac_adjoint(b) * dirac_adjoint(a)), 1e-12);
  }
}

TEST(KronEmbed, Examples) {
  Rng rng(8);
  const FlavorMatrix f = random_matrix(rng, 3), g = random_matrix(rng, 3);
  EXPECT_EQ(kron_embed(kOne, FlavorMatrix::Identity(3, 3)), BlockMatrix::Identity(12, 12));
  EXPECT_LE(d(kron_embed(gamma(0), f) * kron_embed(gamma(0), g), kron_embed(kOne, f * g)), 1e-14);
  EXPECT_LE(d(kron_embed(chiral_projector(Side::L), f) + kron_embed(chiral_projector(Side::R), f),
              kron_embed(kOne, f)),
            1e-15);
  // spinor-major layout
  const BlockMatrix k = kron_embed(gamma(1), f);
  EXPECT_EQ(k(0 * 3 + 1, 3 * 3 + 2), gamma(1)(0, 3) * f(1, 2));
}

TEST(KronEmbed, MixedProductProperty) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + i % 3;
    SpinorMatrix s1, s2;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        s1(a, b) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        s2(a, b) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
      }
    const FlavorMatrix f1 = random_matrix(rng, n), f2 = random_matrix(rng, n);
    EXPECT_LE(d(kron_embed(s1, f1) * kron_embed(s2, f2), kron_embed(s1 * s2, f1 * f2)), 1e-12);
  }
}

TEST(KronEmbed, RejectsNonSquareFlavor) {
  EXPECT_THROW(kron_embed(kOne, FlavorMatrix::Zero(2, 3)), DimensionError);
  EXPECT_THROW(flavor_dim(BlockMatrix::Zero(6, 6)), DimensionError);
  EXPECT_EQ(flavor_dim(BlockMatrix::Zero(8, 8)), 2);
}

TEST(EpsilonPseudoTerm, Zeros) {
  FlavorTensor f = zero_flavor_tensor(2);
  EXPECT_EQ(max_abs(epsilon_pseudo_term(f, {1, 2, 3, 4})), 0.0);
  Rng rng(10);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) {
      f[i][j] = random_hermitian(rng, 2);
      f[j][i] = -f[i][j];
    }
  EXPECT_EQ(max_abs(epsilon_pseudo_term(f, {0, 0, 0, 0})), 0.0);
}

TEST(EpsilonPseudoTerm, BruteForceIndexLoop) {
  // F^{01} = -F^{10} = f, xi = e_2: eps_{ijkl} F^{ij} xi^k rho gamma^l.
  const double fv = 0.7;
  FlavorTensor ft = zero_flavor_tensor(1);
  ft[0][1] = FlavorMatrix::Constant(1, 1, fv);
  ft[1][0] = -ft[0][1];
  const FourVector xi = unit_vector(2);
  for (auto conv : {EpsilonConvention::upper_0123_positive, EpsilonConvention::lower_0123_positive}) {
    SpinorMatrix expect = SpinorMatrix::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            expect += (levi_civita_lower(i, j, k, l, conv) * ft[i][j](0, 0).real() * xi[k]) * rho() * gamma(l);
    // Only l = 3 survives: 2 f eps_{0123}.
    const double e0123 = conv == EpsilonConvention::upper_0123_positive ? -1.0 : 1.0;
    EXPECT_LE(d(expect, (2 * fv * e0123) * rho() * gamma(3)), 1e-15);
    EXPECT_LE(d(epsilon_pseudo_term(ft, xi, conv), expect), 1e-15);
  }
}
