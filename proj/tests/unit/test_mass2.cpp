#include <gtest/gtest.h>

#include "lightcone/mass2.hpp"
#include "lightcone/random_fields.hpp"
#include "lightcone/verify.hpp"
#include "oracles.hpp"

using namespace lce;
using lce::testing::any_chord;
using lce::testing::diff;

namespace {

RandomConfigOptions without_potentials(int n, bool scalars) {
  RandomConfigOptions o;
  o.n = n;
  o.potentials = false;
  o.scalars = scalars;
  return o;
}

}  // namespace

TEST(Mass2, ConstantMassGivesOnlyThePhaseTerm) {
  const double y0 = 1.7;
  ChiralConfig cfg = ChiralConfig::free(2, 1.0);
  cfg.Y = y0 * FlavorMatrix::Identity(2, 2);
  const FourVector x(0, 0, 0, 0), y(1, 0.3, 0, 0);
  for (Side s : {Side::L, Side::R}) {
    const ExpansionResult r = mass2_expansion(cfg, x, y, s, KernelFamily::p, {});
    ASSERT_EQ(r.terms.size(), 1u);
    EXPECT_EQ(r.terms[0].provenance, "m2_phase");
    EXPECT_EQ(r.terms[0].tag, p_kernel(2));
    EXPECT_LE(diff(r.terms[0].coeff, kron_embed(chiral_projector(s), y0 * y0 * FlavorMatrix::Identity(2, 2))),
              1e-14);
  }
}

TEST(Mass2, ZeroMassMatrixGivesZero) {
  Rng rng(101);
  ChiralConfig cfg = random_config(rng, without_potentials(2, false));
  cfg.Y = FlavorMatrix::Zero(2, 2);
  const auto [x, y] = any_chord(rng);
  for (const auto& t : mass2_expansion(cfg, x, y, Side::L, KernelFamily::p, {}).terms)
    EXPECT_EQ(max_abs(t.coeff), 0.0) << t.provenance;
}

TEST(Mass2, TruncationDependsOnFamily) {
  const ChiralConfig cfg = ChiralConfig::free(1, 1.0);
  const FourVector x(0, 0, 0, 0), y(1, 0, 0, 0);
  EXPECT_EQ(mass2_expansion(cfg, x, y, Side::L, KernelFamily::k, {}).truncation,
            std::vector<Truncation>{Truncation::xi2});
  EXPECT_EQ(mass2_expansion(cfg, x, y, Side::L, KernelFamily::p, {}).truncation,
            std::vector<Truncation>{Truncation::xi0});
}

TEST(Mass2, Preconditions) {
  Rng rng(102);
  const ChiralConfig with_a = random_config(rng, {});
  const FourVector x(0, 0, 0, 0), y(1, 0, 0, 0);
  EXPECT_THROW(mass2_expansion(with_a, x, y, Side::L, KernelFamily::p, {}), PreconditionError);
  EXPECT_THROW(satz25_reference(with_a, x, y, Side::L, KernelFamily::p, {}), PreconditionError);
  const ChiralConfig with_scalars = random_config(rng, without_potentials(2, true));
  EXPECT_NO_THROW(mass2_expansion(with_scalars, x, y, Side::L, KernelFamily::p, {}));
  EXPECT_THROW(satz25_reference(with_scalars, x, y, Side::L, KernelFamily::p, {}), PreconditionError);
  EXPECT_THROW(mass2_expansion(with_scalars, x, x, Side::L, KernelFamily::p, {}), PreconditionError);
}

TEST(Mass2, MatchesDirectFormulaWithUnitaries) {
  Rng rng(103);
  for (int i = 0; i < 4; ++i) {
    const ChiralConfig cfg = random_config(rng, without_potentials(1 + i % 3, false));
    const auto [x, y] = any_chord(rng);
    for (Side s : {Side::L, Side::R}) {
      const ExpansionResult a = mass2_expansion(cfg, x, y, s, KernelFamily::p, {});
      const ExpansionResult b = satz25_reference(cfg, x, y, s, KernelFamily::p, {});
      EXPECT_LE(coefficient_residual(a, b), 1e-9);
      for (const auto& t : a.terms) {
        const ExpansionTerm* u = b.find(t.provenance);
        ASSERT_NE(u, nullptr) << t.provenance;
        EXPECT_LE(diff(t.coeff, u->coeff), 1e-9 * std::max(1.0, max_abs(t.coeff))) << t.provenance;
      }
    }
  }
}

TEST(Mass2, TermsAreNontrivial) {
  Rng rng(104);
  const ChiralConfig cfg = random_config(rng, without_potentials(2, true));
  const FourVector x(-0.3, 0, 0.1, 0), y(0.5, 0.2, 0, 0.1);
  const ExpansionResult r = mass2_expansion(cfg, x, y, Side::R, KernelFamily::p, {});
  for (const char* p : {"m2_phase", "m2_box", "m2_nested", "m2_left_derivative", "m2_right_derivative"}) {
    const ExpansionTerm* t = r.find(p);
    ASSERT_NE(t, nullptr) << p;
    EXPECT_GT(max_abs(t->coeff), 1e-4) << p;
  }
}

TEST(Mass2, NestedTermAgainstSimplexQuadrature) {
  // U = 1, one flavor, Y_L = Y_R = y0 + xi(z): scalar data for the nested integral.
  Rng rng(105);
  for (int i = 0; i < 3; ++i) {
    ChiralConfig cfg = ChiralConfig::free(1, 1.0);
    cfg.Y(0, 0) = uniform(rng, 0.5, 1.5);
    cfg.Xi = random_matrix_field(rng, 1, {});
    const auto [x, y] = any_chord(rng);
    const double y0 = cfg.Y(0, 0).real();
    auto v = [&](const FourVector& z) { return y0 + cfg.Xi.value(z)(0, 0).real(); };
    for (Side s : {Side::L, Side::R}) {
      const ExpansionResult r = mass2_expansion(cfg, x, y, s, KernelFamily::p, {});
      const ExpansionTerm* t = r.find("m2_nested");
      ASSERT_NE(t, nullptr);
      EXPECT_LE(diff(t->coeff, lce::testing::nested_oracle(v, x, y, s)), 1e-8);
    }
  }
}

TEST(Mass2, BoxMethodsAgree) {
  Rng rng(106);
  const ChiralConfig cfg = random_config(rng, without_potentials(2, true));
  const auto [x, y] = any_chord(rng);
  const ExpansionResult a = mass2_expansion(cfg, x, y, Side::L, KernelFamily::p, {}, BoxMethod::analytic);
  const ExpansionResult b = mass2_expansion(cfg, x, y, Side::L, KernelFamily::p, {}, BoxMethod::finite_difference);
  EXPECT_LE(diff(a.find("m2_box")->coeff, b.find("m2_box")->coeff), 1e-6);
  EXPECT_LE(coefficient_residual(a, b), 1e-6);
}

TEST(Mass2, AbelianPhaseExample) {
  // One flavor, U_L = e^{i a}, U_R = e^{i b}, constant Y: the phase coefficient
  // is y0^2 e^{i(a(x) - a(y))} since U_L^{-1} Y U_R U_R^{-1} Y U_L = y0^2.
  ScalarProfile pa, pb;
  pa.scale = 0.5;
  pa.amplitude = 0.7;
  pb.center = {0.2, 0.1, 0, 0};
  pb.scale = 0.6;
  pb.amplitude = -0.4;
  ChiralConfig cfg = ChiralConfig::free(1, 1.0);
  cfg.Y(0, 0) = 1.3;
  cfg.U_L = exp_unitary(1, {{pa, FlavorMatrix::Identity(1, 1)}});
  cfg.U_R = exp_unitary(1, {{pb, FlavorMatrix::Identity(1, 1)}});
  const FourVector x(0, 0, 0, 0), y(0.8, 0.3, 0, 0);
  const ExpansionResult r = mass2_expansion(cfg, x, y, Side::L, KernelFamily::p, {});
  const cplx ph = 1.69 * std::exp(kI * (pa.value(x) - pa.value(y)));
  EXPECT_LE(diff(r.find("m2_phase")->coeff, kron_embed(chiral_projector(Side::L), FlavorMatrix::Constant(1, 1, ph))),
            1e-13);
  // Left and right derivative terms see d(b - a) and are nonzero.
  EXPECT_GT(max_abs(r.find("m2_left_derivative")->coeff), 1e-3);
}

TEST(Mass2, SwapAdjointConsistency) {
  // The combined first- and second-order assembly is hermitian.
  Rng rng(107);
  for (int i = 0; i < 3; ++i) {
    const ChiralConfig cfg = random_config(rng, without_potentials(1 + i, true));
    const auto [x, y] = any_chord(rng);
    EXPECT_LE(hermiticity_defect(cfg, x, y, {}, {true}), 1e-8);
  }
}
