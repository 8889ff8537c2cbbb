#include "lightcone/spin_algebra.hpp"

#include "lightcone/errors.hpp"

namespace lce {

namespace {

std::array<SpinorMatrix, 4> make_gammas() {
  const cplx i = kI;
  std::array<SpinorMatrix, 4> g;
  g[0] << 1, 0, 0, 0,
          0, 1, 0, 0,
          0, 0, -1, 0,
          0, 0, 0, -1;
  g[1] << 0, 0, 0, 1,
          0, 0, 1, 0,
          0, -1, 0, 0,
          -1, 0, 0, 0;
  g[2] << 0, 0, 0, -i,
          0, 0, i, 0,
          0, i, 0, 0,
          -i, 0, 0, 0;
  g[3] << 0, 0, 1, 0,
          0, 0, 0, -1,
          -1, 0, 0, 0,
          0, 1, 0, 0;
  return g;
}

const std::array<SpinorMatrix, 4>& gammas() {
  static const std::array<SpinorMatrix, 4> g = make_gammas();
  return g;
}

}  // namespace

const SpinorMatrix& gamma(int j) {
  if (j < 0 || j > 3) throw DimensionError("gamma index out of range");
  return gammas()[static_cast<std::size_t>(j)];
}

const SpinorMatrix& rho() {
  static const SpinorMatrix r = kI * gamma(0) * gamma(1) * gamma(2) * gamma(3);
  return r;
}

const SpinorMatrix& chiral_projector(Side side) {
  static const SpinorMatrix left = 0.5 * (SpinorMatrix::Identity() - rho());
  static const SpinorMatrix right = 0.5 * (SpinorMatrix::Identity() + rho());
  return side == Side::L ? left : right;
}

SpinorMatrix sigma(int j, int k) {
  return 0.5 * kI * (gamma(j) * gamma(k) - gamma(k) * gamma(j));
}

SpinorMatrix slash(const FourVector& v) {
  SpinorMatrix s = SpinorMatrix::Zero();
  for (int j = 0; j < 4; ++j) s += (kMetric[j] * v[j]) * gamma(j);
  return s;
}

FlavorVector zero_flavor_vector(int n) {
  FlavorVector v;
  for (auto& m : v) m = FlavorMatrix::Zero(n, n);
  return v;
}

FlavorTensor zero_flavor_tensor(int n) {
  FlavorTensor t;
  for (auto& row : t) row = zero_flavor_vector(n);
  return t;
}

FlavorVector lower(const FlavorVector& v) {
  FlavorVector out = v;
  for (int j = 1; j < 4; ++j) out[j] = -v[j];
  return out;
}

BlockMatrix kron_embed(const SpinorMatrix& s, const FlavorMatrix& f) {
  if (f.rows() != f.cols() || f.rows() == 0)
    throw DimensionError("kron_embed: flavor matrix must be square and non-empty");
  const Eigen::Index n = f.rows();
  BlockMatrix out(4 * n, 4 * n);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out.block(a * n, b * n, n, n) = s(a, b) * f;
  return out;
}

BlockMatrix block_identity(int n) { return BlockMatrix::Identity(4 * n, 4 * n); }

BlockMatrix gamma_upper_contract(const FlavorVector& v_lower) {
  const Eigen::Index n = v_lower[0].rows();
  BlockMatrix out = BlockMatrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < 4; ++k) out += kron_embed(gamma(k), v_lower[k]);
  return out;
}

BlockMatrix slash(const FlavorVector& a_upper) { return gamma_upper_contract(lower(a_upper)); }

int flavor_dim(const BlockMatrix& m) {
  if (m.rows() != m.cols() || m.rows() % 4 != 0 || m.rows() == 0)
    throw DimensionError("block matrix must be 4n x 4n");
  return static_cast<int>(m.rows() / 4);
}

BlockMatrix dirac_adjoint(const BlockMatrix& m) {
  const int n = flavor_dim(m);
  const BlockMatrix g0 = kron_embed(gamma(0), FlavorMatrix::Identity(n, n));
  return g0 * m.adjoint() * g0;
}

FlavorVector epsilon_contract(const FlavorTensor& f, const FourVector& xi,
                              EpsilonConvention conv) {
  const Eigen::Index n = f[0][0].rows();
  FlavorVector e;
  for (int l = 0; l < 4; ++l) {
    e[l] = FlavorMatrix::Zero(n, n);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          const int s = levi_civita_lower(i, j, k, l, conv);
          if (s != 0 && xi[k] != 0.0) e[l] += (s * xi[k]) * f[i][j];
        }
  }
  return e;
}

BlockMatrix epsilon_pseudo_term(const FlavorTensor& f, const FourVector& xi,
                                EpsilonConvention conv) {
  const FlavorVector e = epsilon_contract(f, xi, conv);
  const Eigen::Index n = e[0].rows();
  BlockMatrix out = BlockMatrix::Zero(4 * n, 4 * n);
  for (int l = 0; l < 4; ++l) out += kron_embed(rho() * gamma(l), e[l]);
  return out;
}

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace lce
