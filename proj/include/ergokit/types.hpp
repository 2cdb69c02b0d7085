// types.hpp — Hamiltonians, density matrices, spectral data, passive and Gibbs states.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ergokit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Shared numerical tolerances. Values are contractual: changing them changes
// which inputs are accepted and when divergences report an infinite value.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double psd = 1e-10;            // eigenvalues in [-psd, 0) are clipped to 0
inline constexpr double unitary = 1e-10;
inline constexpr double kraus = 1e-9;           // completeness identity
inline constexpr double support = 1e-14;        // eigenvalue floor for logs and powers
inline constexpr double support_weight = 1e-12; // rho-weight that turns a support hole infinite
inline constexpr double passive_order = 1e-12;
inline constexpr double degeneracy = 1e-12;     // energy levels closer than this are one level
}  // namespace tol

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Inverse temperature, with a distinct symbolic infinity (never a large float).
struct Beta {
  double value = 0.0;
  bool infinite = false;

  static Beta finite(double b) { return Beta{b, false}; }
  static Beta inf() { return Beta{0.0, true}; }
};

// Reference frame for all energies: dimension, nondecreasing eigenvalues and an
// optional eigenbasis (k-th column is |eps_k>). Defaults to the computational basis.
class Hamiltonian {
 public:
  explicit Hamiltonian(RealVector eigenvalues);
  Hamiltonian(RealVector eigenvalues, Matrix basis);

  int dim() const { return static_cast<int>(eps_.size()); }
  const RealVector& eigenvalues() const { return eps_; }
  bool has_custom_basis() const { return custom_basis_; }
  const Matrix& basis() const { return basis_; }

  Matrix matrix() const;  // U diag(eps) U^dag
  double span() const { return eps_(eps_.size() - 1) - eps_(0); }

  // Contiguous index ranges [first, last) of equal energy (tolerance tol::degeneracy).
  std::vector<std::pair<int, int>> level_blocks() const;
  int ground_degeneracy() const { return level_blocks().front().second; }

 private:
  RealVector eps_;
  Matrix basis_;
  bool custom_basis_ = false;
};

// A validated d x d state: Hermitian within 1e-10, unit trace within 1e-10,
// smallest eigenvalue >= -1e-10. Eigenvalues in [-1e-10, 0) are clipped to 0
// and the state renormalized; anything more negative is rejected.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// Eigendecomposition of a state, populations sorted nonincreasing with the
// matching orthonormal vectors as columns.
struct SpectralDecomposition {
  RealVector populations;
  Matrix vectors;
};

// Populations of a passive state, nonincreasing in the energy ordering of
// whichever Hamiltonian it is used with.
class PassiveState {
 public:
  explicit PassiveState(RealVector populations);

  int dim() const { return static_cast<int>(p_.size()); }
  const RealVector& populations() const { return p_; }
  DensityMatrix to_density(const Hamiltonian& h) const;

 private:
  RealVector p_;
};

// Gibbs state e^{-beta H}/Z; for infinite beta, the uniform mixture over the
// ground eigenspace.
class GibbsState {
 public:
  GibbsState(Beta beta, RealVector populations);

  int dim() const { return static_cast<int>(p_.size()); }
  Beta beta() const { return beta_; }
  const RealVector& populations() const { return p_; }
  PassiveState as_passive() const { return PassiveState(p_); }
  DensityMatrix to_density(const Hamiltonian& h) const;

 private:
  Beta beta_;
  RealVector p_;
};

// Builds sum_k p_k |eps_k><eps_k| in the basis of h.
DensityMatrix state_from_populations(const Hamiltonian& h, const RealVector& p);

}  // namespace ergokit
