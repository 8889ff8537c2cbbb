#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "lightcone/minkowski.hpp"

namespace lce {

using cplx = std::complex<double>;
using SpinorMatrix = Eigen::Matrix4cd;
using FlavorMatrix = Eigen::MatrixXcd;
// 4n x 4n, spinor-major: entry (a*n + i, b*n + j) = S(a,b) * F(i,j).
using BlockMatrix = Eigen::MatrixXcd;

// Four flavor matrices indexed by a Lorentz index.
using FlavorVector = std::array<FlavorMatrix, 4>;
// Rank-2 Lorentz tensor of flavor matrices, e.g. F^{jk}.
using FlavorTensor = std::array<FlavorVector, 4>;

inline constexpr cplx kI{0.0, 1.0};

enum class Side { L, R };

inline Side other(Side s) { return s == Side::L ? Side::R : Side::L; }
inline const char* to_string(Side s) { return s == Side::L ? "L" : "R"; }

// Dirac representation.
const SpinorMatrix& gamma(int j);
const SpinorMatrix& rho();
const SpinorMatrix& chiral_projector(Side side);
SpinorMatrix sigma(int j, int k);

// v_j gamma^j with the index lowered by the metric.
SpinorMatrix slash(const FourVector& v);

FlavorVector zero_flavor_vector(int n);
FlavorTensor zero_flavor_tensor(int n);
FlavorVector lower(const FlavorVector& v);

BlockMatrix kron_embed(const SpinorMatrix& s, const FlavorMatrix& f);
BlockMatrix block_identity(int n);

// gamma^k (x) v_k for lower-index components v_k.
BlockMatrix gamma_upper_contract(const FlavorVector& v_lower);
// A-slash = gamma^j (x) A_j for upper-index components A^j.
BlockMatrix slash(const FlavorVector& a_upper);

// gamma^0 M^dagger gamma^0 with gamma^0 acting on the spinor factor.
BlockMatrix dirac_adjoint(const BlockMatrix& m);

// Flavor matrices E_l = eps_{ijkl} F^{ij} xi^k, one per l.
FlavorVector epsilon_contract(const FlavorTensor& f, const FourVector& xi,
                              EpsilonConvention conv = EpsilonConvention::upper_0123_positive);
// eps_{ijkl} F^{ij} xi^k rho gamma^l, summed.
BlockMatrix epsilon_pseudo_term(const FlavorTensor& f, const FourVector& xi,
                                EpsilonConvention conv = EpsilonConvention::upper_0123_positive);

int flavor_dim(const BlockMatrix& m);
double max_abs(const Eigen::MatrixXcd& m);

}  // namespace lce
