#pragma once

#include <functional>
#include <vector>

#include "lightcone/fields.hpp"
#include "lightcone/quadrature.hpp"

namespace lce {

struct OdeTolerance {
  double rel = 1e-13;
  double abs = 1e-14;
  long max_steps = 2000000;
};

// Tolerance for the Runge-Kutta engine derived from a quadrature spec: three
// orders tighter than the quadrature, clamped to [1e-14, 1e-8].
OdeTolerance ode_tolerance(const QuadratureSpec& spec);

// Solves W'(l) = W(l) M(l), W(l0) = 1, from l0 to l1 (either direction) with
// embedded Dormand-Prince 5(4). Throws OdeError on step-size underflow.
FlavorMatrix propagate(const std::function<FlavorMatrix(double)>& m, double l0, double l1,
                       const OdeTolerance& tol);

// Ordered exponential of factor * A_j xi^j along the chord from x to y, the
// latest factor on the right.
FlavorMatrix texp(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                  const QuadratureSpec& spec, cplx factor = 1.0);
// texp of -i A, the convention used by the expansions.
FlavorMatrix texp_i(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                    const QuadratureSpec& spec);

// Order-n Dyson term of texp (ordered simplex integral), n <= 4.
FlavorMatrix dyson_term(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                        int n, const QuadratureSpec& spec, cplx factor = 1.0);

// s^{N+1}/(N+1)! e^s with s the sampled sup of the spectral norm of A_j xi^j.
double texp_truncation_bound(const VectorFlavorField& a, const FourVector& x,
                             const FourVector& y, int N, cplx factor = 1.0);

// Ordered exponentials along the line z(l) = x + l (y - x) with checkpoints
// every 1/8 in l, so that Te(x -> z) and Te(z -> y) cost one short ODE
// segment each. Immutable after construction and safe to share across threads.
class ChordPropagator {
 public:
  ChordPropagator(const VectorFlavorField& a, const FourVector& x, const FourVector& y,
                  double lam_lo, double lam_hi, const QuadratureSpec& spec, cplx factor = -kI);

  // Te(z(l1) -> z(l2)), integrated directly.
  FlavorMatrix between(double l1, double l2) const;
  // Te(x -> z(l)).
  FlavorMatrix from_start(double lam) const;
  // Te(z(l) -> y).
  FlavorMatrix to_end(double lam) const;
  // Te(x -> y).
  const FlavorMatrix& full() const { return full_; }

 private:
  int nearest(double lam) const;
  double grid(int c) const { return (c + first_) * step_; }

  const VectorFlavorField* a_;
  FourVector x_, xi_;
  cplx factor_;
  OdeTolerance tol_;
  bool trivial_;
  int n_;
  double step_ = 0.125;
  int first_ = 0;  // grid index of entry 0
  std::vector<FlavorMatrix> from_x_;  // Te(x -> z(grid(c)))
  std::vector<FlavorMatrix> to_y_;    // Te(z(grid(c)) -> y)
  FlavorMatrix full_;
};

// -i A_{L,k} f + d_k f + i f A_{R,k} at z (lower index k).
FlavorMatrix covariant_link_derivative(const VectorFlavorField& a_l, const VectorFlavorField& a_r,
                                       const CompositeField& f, const FourVector& z, int k);

// Te_i(A_L; x -> z) (-i A_{L,k} f + d_k f + i f A_{R,k})(z) Te_i(A_R; z -> y).
FlavorMatrix hat_derivative_sandwich(const VectorFlavorField& a_l, const VectorFlavorField& a_r,
                                     const CompositeField& f, const FourVector& x,
                                     const FourVector& z, const FourVector& y, int k,
                                     const QuadratureSpec& spec);

}  // namespace lce
