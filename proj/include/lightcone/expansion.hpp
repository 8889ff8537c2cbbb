#pragma once

#include <map>
#include <string>
#include <vector>

#include "lightcone/fields.hpp"
#include "lightcone/kernels.hpp"
#include "lightcone/quadrature.hpp"

namespace lce {

enum class Truncation { log_xi2, mass2, xi0, xi2 };
std::string to_string(Truncation t);
Truncation parse_truncation(const std::string& s);

// Light-cone behaviour of a contribution with p mass factors and q
// derivatives of the perturbation.
struct SingularOrder {
  bool slash = false;
  int power = 0;      // power of xi (xi^{power}); only meaningful if !log
  bool log = false;   // ln|xi^2| factor
  bool bounded = false;  // p + q > 4

  std::string str() const;
  Homogeneity homogeneity() const;
  friend bool operator==(const SingularOrder&, const SingularOrder&) = default;
};
SingularOrder singular_order(int p_mass, int q_deriv);

struct ExpansionTerm {
  KernelTag tag;
  BlockMatrix coeff;  // left multiplier of the kernel
  std::string provenance;
  int mass_order = 0;        // p
  int derivative_order = 0;  // q
  int xi_factors = 0;        // explicit xi or xi-slash factors in coeff
};

struct ExpansionResult {
  Side side = Side::L;
  KernelFamily family = KernelFamily::p;
  FourVector x, y;
  int n = 1;
  std::vector<ExpansionTerm> terms;
  std::vector<Truncation> truncation;

  // Sum of all terms carrying the given kernel order (zero if none).
  BlockMatrix coefficient(int order) const;
  BlockMatrix coefficient(const KernelTag& tag) const { return coefficient(tag.order); }
  const ExpansionTerm* find(const std::string& provenance) const;
  std::vector<int> orders() const;
};

// Terms whose kernel together with their explicit xi factors is at least as
// regular as the classifier predicts for their (p, q).
bool respects_singular_order(const ExpansionTerm& term);

ExpansionResult chiral_expansion(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                 Side side, KernelFamily family, const QuadratureSpec& spec);

enum class ReferenceVariant { satz5_abelian, satz6_noXY, satz7_massY, satz10_noA, thm1_general };
std::string to_string(ReferenceVariant v);

// Direct implementations of the special cases, used for cross-validation.
ExpansionResult reference_expansion(ReferenceVariant variant, const ChiralConfig& cfg,
                                    const FourVector& x, const FourVector& y, Side side,
                                    KernelFamily family, const QuadratureSpec& spec);

// sum_terms coeff * (K(xi) (x) 1_n) over evaluable kernels.
BlockMatrix evaluate_numeric(const ExpansionResult& res, double tol = kDefaultLightlikeTolerance);

struct HermiticityOptions {
  bool include_mass2 = false;  // add m^2 * mass2_expansion (requires A = 0)
};

// Relative max-norm defect between the Dirac adjoint of the (y,x) value and
// the (x,y) value, both summed over L and R, family p.
double hermiticity_defect(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                          const QuadratureSpec& spec, HermiticityOptions opts = {});
// Same defect per kernel order.
std::map<int, double> hermiticity_defect_by_order(const ChiralConfig& cfg, const FourVector& x,
                                                  const FourVector& y, const QuadratureSpec& spec,
                                                  HermiticityOptions opts = {});

// (chiral_expansion(eps A) - chiral_expansion(0)) / eps, per kernel order,
// with both A_L and A_R scaled.
ExpansionResult linearize_in_potential(const ChiralConfig& cfg, const FourVector& x,
                                       const FourVector& y, Side side, double eps,
                                       const QuadratureSpec& spec);

// Sample points used for the commutation gate.
std::vector<FourVector> gate_samples(const ChiralConfig& cfg, const FourVector& x,
                                     const FourVector& y);

}  // namespace lce
