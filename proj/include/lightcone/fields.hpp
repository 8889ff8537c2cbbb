#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "lightcone/errors.hpp"
#include "lightcone/minkowski.hpp"
#include "lightcone/spin_algebra.hpp"

namespace lce {

// Closed Euclidean ball in R^4 outside which a field takes its background value.
struct Support {
  FourVector center;
  double radius = 0.0;

  bool empty() const { return radius <= 0.0; }
  bool contains(const FourVector& z) const {
    return !empty() && euclidean_norm(z - center) <= radius;
  }
};

Support enclose(const Support& a, const Support& b);
// Deterministic points inside the ball used for hermiticity/unitarity checks.
std::vector<FourVector> support_samples(const Support& s);

// Smooth scalar bump used by the built-in field families.
struct ScalarProfile {
  enum class Kind { gaussian, window };

  Kind kind = Kind::gaussian;
  FourVector center;
  double scale = 1.0;  // Gaussian width, or window radius
  int power = 4;       // window exponent; the profile is C^{power-1}
  double amplitude = 1.0;

  double value(const FourVector& z) const;
  // d_a phi (lower index).
  std::array<double, 4> gradient(const FourVector& z) const;
  // d_a d_b phi.
  std::array<std::array<double, 4>, 4> hessian(const FourVector& z) const;
  Support support() const;
};

// Gaussians are cut to exactly zero beyond this many widths (exp(-40) ~ 4e-18).
inline constexpr double kGaussianCutoffWidths = 8.94427190999916;

template <class V>
class BasicField {
 public:
  using Value = V;
  using ValueFn = std::function<V(const FourVector&)>;
  using D1Fn = std::function<V(const FourVector&, int)>;
  using D2Fn = std::function<V(const FourVector&, int, int)>;

  int flavors() const { return n_; }
  const Support& support() const { return support_; }
  // True when the field equals its background everywhere.
  bool is_trivial() const { return !value_fn_; }
  double length_scale() const { return length_scale_; }

  V value(const FourVector& z) const;
  // d_a of the (upper-index) components.
  V d1(const FourVector& z, int a) const;
  V d2(const FourVector& z, int a, int b) const;

  bool has_analytic_d1() const { return is_trivial() || static_cast<bool>(d1_fn_); }
  bool has_analytic_d2() const { return is_trivial() || static_cast<bool>(d2_fn_); }
  bool has_d1() const { return has_analytic_d1() || fd_fallback_; }
  bool has_d2() const { return has_analytic_d2() || fd_fallback_; }

  // Opt-in central differences for missing derivative callbacks.
  void enable_fd_fallback(bool on = true) { fd_fallback_ = on; }
  bool fd_fallback() const { return fd_fallback_; }
  void set_length_scale(double l) { length_scale_ = l; }

 protected:
  BasicField() = default;
  BasicField(int n, V background) : n_(n), background_(std::move(background)) {}
  BasicField(int n, V background, Support support, ValueFn value, D1Fn d1, D2Fn d2)
      : n_(n),
        background_(std::move(background)),
        support_(support),
        value_fn_(std::move(value)),
        d1_fn_(std::move(d1)),
        d2_fn_(std::move(d2)) {}

  V zero_value() const;

  int n_ = 1;
  V background_{};
  Support support_{};
  ValueFn value_fn_;
  D1Fn d1_fn_;
  D2Fn d2_fn_;
  bool fd_fallback_ = false;
  double length_scale_ = 1.0;
};

// Potential A^j(z), upper Lorentz index, hermitian flavor components.
class VectorFlavorField : public BasicField<FlavorVector> {
 public:
  VectorFlavorField() : VectorFlavorField(1) {}
  explicit VectorFlavorField(int n) : BasicField(n, zero_flavor_vector(n)) {}
  VectorFlavorField(int n, Support support, ValueFn value, D1Fn d1 = {}, D2Fn d2 = {},
                    bool validate = true);

  static VectorFlavorField zero(int n) { return VectorFlavorField(n); }
  // A_j(z) xi^j with the index contracted by the metric.
  FlavorMatrix contract(const FourVector& z, const FourVector& xi) const;
};

// Hermitian matrix field vanishing outside its support (Xi, Phi).
class MatrixField : public BasicField<FlavorMatrix> {
 public:
  MatrixField() : MatrixField(1) {}
  explicit MatrixField(int n) : BasicField(n, FlavorMatrix::Zero(n, n)) {}
  MatrixField(int n, Support support, ValueFn value, D1Fn d1 = {}, D2Fn d2 = {},
              bool validate = true);

  static MatrixField zero(int n) { return MatrixField(n); }
};

// Unitary field equal to the identity outside its support.
class UnitaryField : public BasicField<FlavorMatrix> {
 public:
  UnitaryField() : UnitaryField(1) {}
  explicit UnitaryField(int n) : BasicField(n, FlavorMatrix::Identity(n, n)) {}
  UnitaryField(int n, Support support, ValueFn value, D1Fn d1 = {}, D2Fn d2 = {},
               bool validate = true);

  static UnitaryField identity(int n) { return UnitaryField(n); }
  FlavorMatrix inverse(const FourVector& z) const { return value(z).adjoint(); }
};

// Built-in families.
struct PotentialTerm {
  ScalarProfile profile;
  FourVector polarization;  // upper-index weights
  FlavorMatrix generator;   // hermitian
};
struct MatrixTerm {
  ScalarProfile profile;
  FlavorMatrix generator;  // hermitian
};
struct UnitaryFactor {
  ScalarProfile profile;
  FlavorMatrix generator;  // hermitian H, factor exp(i phi(z) H)
};

// A^j(z) = sum_t phi_t(z) pol_t^j M_t.
VectorFlavorField potential_from_terms(int n, const std::vector<PotentialTerm>& terms);
// M(z) = sum_t phi_t(z) M_t.
MatrixField matrix_field_from_terms(int n, const std::vector<MatrixTerm>& terms);
// U(z) = prod_t exp(i phi_t(z) H_t), ordered left to right.
UnitaryField exp_unitary(int n, const std::vector<UnitaryFactor>& factors);

// A_j = i U d_j U^{-1}. Second derivatives need third derivatives of U and
// are therefore only available through the finite-difference fallback.
VectorFlavorField pure_gauge_potential(const UnitaryField& u, bool fd_second_derivatives = false);
// A'^j = U A^j U^{-1} + i U d^j U^{-1}.
VectorFlavorField gauge_transform(const VectorFlavorField& a, const UnitaryField& u,
                                  bool fd_second_derivatives = false);
VectorFlavorField scaled(const VectorFlavorField& a, double s);
VectorFlavorField sum(const VectorFlavorField& a, const VectorFlavorField& b);

struct ChiralConfig {
  int n = 1;
  double m = 0.0;
  VectorFlavorField A_L{1}, A_R{1};
  UnitaryField U_L{1}, U_R{1};
  MatrixField Xi{1}, Phi{1};
  FlavorMatrix Y = FlavorMatrix::Identity(1, 1);
  FlavorMatrix X_L = FlavorMatrix::Identity(1, 1);
  FlavorMatrix X_R = FlavorMatrix::Identity(1, 1);
  EpsilonConvention epsilon = EpsilonConvention::upper_0123_positive;

  // Free Dirac sea: no perturbation, X = Y = 1.
  static ChiralConfig free(int n, double m);

  const VectorFlavorField& A(Side s) const { return s == Side::L ? A_L : A_R; }
  const UnitaryField& U(Side s) const { return s == Side::L ? U_L : U_R; }
  const FlavorMatrix& X(Side s) const { return s == Side::L ? X_L : X_R; }

  // Smallest ball containing every field support.
  Support support() const;
  double support_radius() const { return support().radius; }
  double length_scale() const;
  bool has_scalar_perturbation() const { return !Xi.is_trivial() || !Phi.is_trivial(); }

  // Dimensions and hermiticity of Y; throws DimensionError / PreconditionError.
  void validate() const;
};

FlavorTensor field_strength(const VectorFlavorField& a, const FourVector& z);
// j^k = g_{ml}[d^m - i A^m, F^{kl}], upper index k.
FlavorVector current(const VectorFlavorField& a, const FourVector& z);

// (Y_L, Y_R) = (Y + Xi + i Phi, Y + Xi - i Phi).
std::pair<FlavorMatrix, FlavorMatrix> dynamical_mass(const ChiralConfig& cfg, const FourVector& z);
FlavorMatrix dynamical_mass(const ChiralConfig& cfg, const FourVector& z, Side s);

bool commutes_with_X(const VectorFlavorField& a, const FlavorMatrix& x_l, const FlavorMatrix& x_r,
                     const std::vector<FourVector>& samples, double tol);

// Matrix function built from fields, with product-rule derivatives.
struct CompositeField {
  std::function<FlavorMatrix(const FourVector&)> value;
  std::function<FlavorMatrix(const FourVector&, int)> d1;
  std::function<FlavorMatrix(const FourVector&, int, int)> d2;  // empty if unavailable
  double length_scale = 1.0;

  bool has_d2() const { return static_cast<bool>(d2); }
};

CompositeField as_composite(const UnitaryField& u, bool adjoint = false);
CompositeField as_composite(const MatrixField& m);
CompositeField constant_composite(const FlavorMatrix& c);
CompositeField product(const std::vector<CompositeField>& factors);
CompositeField operator+(const CompositeField& a, const CompositeField& b);
CompositeField scaled(const CompositeField& a, cplx s);

// Y_side(z) as a composite field.
CompositeField dynamical_mass_field(const ChiralConfig& cfg, Side s);
// U_s^{-1} Y_s U_o, the matrix whose hat derivative enters the nonlocal mass term.
CompositeField mass_link(const ChiralConfig& cfg, Side s);
// U_s^{-1} Y_s Y_o U_s.
CompositeField mass_square_link(const ChiralConfig& cfg, Side s);

enum class BoxMethod { automatic, analytic, finite_difference };
// d_0^2 - nabla^2 of a composite field.
FlavorMatrix box(const CompositeField& f, const FourVector& z, BoxMethod method = BoxMethod::automatic);

bool is_hermitian(const FlavorMatrix& m, double tol);
bool is_unitary(const FlavorMatrix& m, double tol);

}  // namespace lce
