#include "lightcone/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lightcone/mass2.hpp"
#include "lightcone/random_fields.hpp"
#include "lightcone/texp.hpp"

namespace lce {

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json VerifyReport::to_json() const {
  Json j;
  j["pass"] = all_pass();
  j["seconds"] = seconds;
  Json cs = Json::array();
  for (const auto& c : checks) {
    Json e;
    e["group"] = c.group;
    e["name"] = c.name;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    e["pass"] = c.pass;
    cs.push_back(std::move(e));
  }
  j["checks"] = std::move(cs);
  return j;
}

double coefficient_residual(const ExpansionResult& a, const ExpansionResult& b) {
  std::vector<int> orders = a.orders();
  for (int o : b.orders()) orders.push_back(o);
  double r = 0.0;
  for (int o : orders) {
    const BlockMatrix ca = a.coefficient(o), cb = b.coefficient(o);
    r = std::max(r, max_abs(ca - cb) / std::max(1.0, max_abs(ca)));
  }
  return r;
}

namespace {

class Recorder {
 public:
  explicit Recorder(VerifyReport& r) : r_(r) {}
  void add(const std::string& group, const std::string& name, double value, double threshold) {
    r_.checks.push_back({group, name, value, threshold, std::isfinite(value) && value <= threshold});
  }

 private:
  VerifyReport& r_;
};

std::pair<FourVector, FourVector> chord(Rng& rng) {
  return random_chord(rng, uniform(rng, 0, 1) < 0.5 ? CausalClass::timelike : CausalClass::spacelike);
}

void texp_checks(Recorder& rec, const VerifySettings& vs, const QuadratureSpec& spec) {
  Rng rng(vs.seed);
  double comp = 0, adj = 0, unit = 0, pure = 0, conj = 0, diff = 0;
  for (int t = 0; t < vs.texp_chords; ++t) {
    const int n = 1 + t % 3;
    RandomFieldOptions fo;
    fo.amplitude = 0.8;
    const VectorFlavorField a = random_potential(rng, n, fo);
    const auto [x, y] = chord(rng);
    const FourVector z = chord_point(x, y, uniform(rng, -0.5, 1.5));
    const FlavorMatrix w = texp_i(a, x, y, spec);
    comp = std::max(comp, max_abs(texp_i(a, x, z, spec) * texp_i(a, z, y, spec) - w));
    adj = std::max(adj, max_abs(w.adjoint() - texp_i(a, y, x, spec)));
    unit = std::max(unit, max_abs(w * w.adjoint() - FlavorMatrix::Identity(n, n)));
    if (t % 5 == 0) {
      const UnitaryField u = random_unitary_field(rng, n, fo);
      const VectorFlavorField pg = pure_gauge_potential(u);
      pure = std::max(pure, max_abs(texp_i(pg, x, y, spec) - u.value(x) * u.inverse(y)));
      const VectorFlavorField g = gauge_transform(a, u);
      conj = std::max(conj, max_abs(texp_i(g, x, y, spec) - u.value(x) * w * u.inverse(y)));
      const VectorFlavorField b = random_potential(rng, n, fo);
      const ChordPropagator pa(a, x, y, 0.0, 1.0, spec), pb(b, x, y, 0.0, 1.0, spec);
      const FourVector xi = y - x;
      const FlavorMatrix lhs = integrate(
          [&](double l) -> Eigen::MatrixXcd {
            const FourVector p = chord_point(x, y, l);
            return pa.from_start(l) * (-kI * a.contract(p, xi) + kI * b.contract(p, xi)) * pb.to_end(l);
          },
          0.0, 1.0, spec);
      diff = std::max(diff, max_abs(lhs - (w - pb.full())));
    }
  }
  rec.add("texp", "composition", comp, 1e-10);
  rec.add("texp", "adjoint", adj, 1e-10);
  rec.add("texp", "unitarity", unit, 1e-10);
  rec.add("texp", "pure_gauge", pure, 1e-8);
  rec.add("texp", "gauge_conjugation", conj, 1e-8);
  rec.add("texp", "difference_identity", diff, 1e-8);
}

void reduction_checks(Recorder& rec, const VerifySettings& vs, const QuadratureSpec& spec) {
  Rng rng(vs.seed + 1);
  double thm1 = 0, s10 = 0, s5 = 0, s6 = 0, s7 = 0, m2 = 0;
  for (int t = 0; t < vs.random_configs; ++t) {
    const Side s = t % 2 ? Side::R : Side::L;
    const auto [x, y] = chord(rng);
    RandomConfigOptions o;
    o.n = 2;
    o.scalars = false;
    ChiralConfig cfg = random_config(rng, o);
    const auto general = reference_expansion(ReferenceVariant::thm1_general, cfg, x, y, s, KernelFamily::p, spec);
    thm1 = std::max(thm1, coefficient_residual(chiral_expansion(cfg, x, y, s, KernelFamily::p, spec), general));

    ChiralConfig no_a = cfg;
    no_a.A_L = no_a.A_R = VectorFlavorField::zero(o.n);
    s10 = std::max(s10, coefficient_residual(
                            reference_expansion(ReferenceVariant::thm1_general, no_a, x, y, s, KernelFamily::p, spec),
                            reference_expansion(ReferenceVariant::satz10_noA, no_a, x, y, s, KernelFamily::p, spec)));
    m2 = std::max(m2, coefficient_residual(mass2_expansion(no_a, x, y, s, KernelFamily::p, spec),
                                           satz25_reference(no_a, x, y, s, KernelFamily::p, spec)));

    RandomConfigOptions o1;
    o1.n = 1;
    o1.potentials = false;
    o1.scalars = false;
    o1.nontrivial_xy = false;
    ChiralConfig ab = random_config(rng, o1);
    ab.Y(0, 0) = uniform(rng, 0.5, 1.5);
    s5 = std::max(s5, coefficient_residual(
                          reference_expansion(ReferenceVariant::satz10_noA, ab, x, y, s, KernelFamily::p, spec),
                          reference_expansion(ReferenceVariant::satz5_abelian, ab, x, y, s, KernelFamily::p, spec)));

    ChiralConfig plain = ChiralConfig::free(o.n, cfg.m);
    plain.A_L = cfg.A_L;
    plain.A_R = cfg.A_R;
    ChiralConfig free_xy = plain;
    free_xy.X_L = free_xy.X_R = free_xy.Y = FlavorMatrix::Identity(o.n, o.n);
    s6 = std::max(s6, coefficient_residual(
                          chiral_expansion(free_xy, x, y, s, KernelFamily::p, spec),
                          reference_expansion(ReferenceVariant::satz6_noXY, free_xy, x, y, s, KernelFamily::p, spec)));
    plain.X_L = plain.X_R = cfg.X_L;
    plain.Y = cfg.Y;
    s7 = std::max(s7, coefficient_residual(
                          chiral_expansion(plain, x, y, s, KernelFamily::p, spec),
                          reference_expansion(ReferenceVariant::satz7_massY, plain, x, y, s, KernelFamily::p, spec)));
  }
  rec.add("reduction", "chiral_vs_general", thm1, 1e-9);
  rec.add("reduction", "general_vs_no_potential", s10, 1e-9);
  rec.add("reduction", "no_potential_vs_abelian", s5, 1e-9);
  rec.add("reduction", "chiral_vs_no_xy", s6, 1e-9);
  rec.add("reduction", "chiral_vs_mass_y", s7, 1e-9);
  rec.add("reduction", "mass2_vs_reference", m2, 1e-9);
}

void hermiticity_checks(Recorder& rec, const VerifySettings& vs, const QuadratureSpec& spec) {
  Rng rng(vs.seed + 2);
  double full = 0, combined = 0;
  for (int t = 0; t < vs.random_configs; ++t) {
    const auto [x, y] = chord(rng);
    RandomConfigOptions o;
    o.n = 2;
    const ChiralConfig cfg = random_config(rng, o);
    full = std::max(full, hermiticity_defect(cfg, x, y, spec));
    RandomConfigOptions o2 = o;
    o2.potentials = false;
    const ChiralConfig cfg2 = random_config(rng, o2);
    combined = std::max(combined, hermiticity_defect(cfg2, x, y, spec, {true}));
  }
  rec.add("hermiticity", "first_order", full, 1e-8);
  rec.add("hermiticity", "with_mass2", combined, 1e-8);
}

void kernel_checks(Recorder& rec, const VerifySettings& vs) {
  const double pi = std::acos(-1.0);
  const FourVector t(1, 0, 0, 0);
  const double p1 = kernel_value(p_kernel(1), t).real()(0, 0);
  rec.add("kernels", "p1_unit_timelike", std::abs(p1 + 1.0 / (4 * pi * pi * pi)), 1e-14);
  Rng rng(vs.seed + 3);
  double swap = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [x, y] = chord(rng);
    const FourVector xi = y - x;
    for (int o = 0; o <= 4; ++o)
      for (KernelFamily f : {KernelFamily::p, KernelFamily::k}) {
        const KernelTag tag{f, o};
        if (!tag.pointwise_evaluable()) continue;
        const SpinorMatrix a = kernel_value(tag, xi);
        const SpinorMatrix b = lce::apply(swap_adjoint_factor(tag), kernel_value(tag, -xi));
        const SpinorMatrix adj = gamma(0) * b.adjoint() * gamma(0);
        swap = std::max(swap, (adj - a).cwiseAbs().maxCoeff() / std::max(1e-300, a.cwiseAbs().maxCoeff()));
      }
  }
  rec.add("kernels", "swap_adjoint", swap, 1e-12);

  int mismatches = 0;
  for (int p = 0; p <= 8; ++p)
    for (int q = 0; p + q <= 8; ++q) {
      const SingularOrder s = singular_order(p, q);
      const int k = p + q;
      const bool ok = k > 4 ? s.bounded
                            : (k == 3 ? (s.log && !s.slash)
                                      : (k == 4 ? (s.log && s.slash)
                                                : (!s.log && s.slash == (k % 2 == 0) &&
                                                   s.power == (k % 2 == 0 ? -4 : -3) + k)));
      if (!ok) ++mismatches;
    }
  rec.add("classifier", "table_mismatches", mismatches, 0.0);
}

void configured_checks(Recorder& rec, const RunConfig& rc) {
  const ChiralConfig& cfg = rc.cfg;
  if (rc.chords.empty()) return;
  const bool hypotheses = max_abs(cfg.X_L - cfg.X_R) == 0.0 && is_hermitian(cfg.X_L, 1e-14);
  if (!hypotheses) return;
  double d = 0;
  for (const auto& ch : rc.chords) {
    if (causal_class_relative(ch.y - ch.x) == CausalClass::lightlike) continue;
    const bool m2 = rc.mass2 && cfg.A_L.is_trivial() && cfg.A_R.is_trivial();
    d = std::max(d, hermiticity_defect(cfg, ch.x, ch.y, rc.quadrature, {m2}));
  }
  rec.add("configured", "hermiticity", d, 1e-8);
}

}  // namespace

VerifyReport run_verification(const RunConfig& rc) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  Recorder rec(report);
  texp_checks(rec, rc.verify, rc.quadrature);
  reduction_checks(rec, rc.verify, rc.quadrature);
  hermiticity_checks(rec, rc.verify, rc.quadrature);
  kernel_checks(rec, rc.verify);
  configured_checks(rec, rc);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace lce
