#include "ergokit/types.hpp"

#include <cmath>

namespace ergokit {

namespace {

void check_basis_unitary(const Matrix& u, int d) {
  if (u.rows() != d || u.cols() != d) {
    throw std::invalid_argument("Hamiltonian: basis must be d x d");
  }
  Matrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  if (max_abs(g) > tol::unitary) {
    throw std::invalid_argument("Hamiltonian: basis is not unitary");
  }
}

}  // namespace

Hamiltonian::Hamiltonian(RealVector eigenvalues) : eps_(std::move(eigenvalues)) {
  if (eps_.size() == 0) throw std::invalid_argument("Hamiltonian: dimension must be positive");
  for (int k = 0; k + 1 < eps_.size(); ++k) {
    if (eps_(k) > eps_(k + 1)) {
      throw std::invalid_argument("Hamiltonian: eigenvalues must be nondecreasing");
    }
  }
  basis_ = Matrix::Identity(eps_.size(), eps_.size());
}

Hamiltonian::Hamiltonian(RealVector eigenvalues, Matrix basis)
    : Hamiltonian(std::move(eigenvalues)) {
  check_basis_unitary(basis, dim());
  basis_ = std::move(basis);
  custom_basis_ = true;
}

Matrix Hamiltonian::matrix() const {
  if (!custom_basis_) return eps_.cast<Complex>().asDiagonal();
  return basis_ * eps_.cast<Complex>().asDiagonal() * basis_.adjoint();
}

std::vector<std::pair<int, int>> Hamiltonian::level_blocks() const {
  std::vector<std::pair<int, int>> blocks;
  int first = 0;
  for (int k = 1; k <= dim(); ++k) {
    if (k == dim() || eps_(k) - eps_(first) > tol::degeneracy) {
      blocks.emplace_back(first, k);
      first = k;
    }
  }
  return blocks;
}

DensityMatrix::DensityMatrix(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
  }
  if (max_abs(m - m.adjoint()) > tol::hermitian) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  Matrix h = 0.5 * (m + m.adjoint());
  double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("DensityMatrix: eigendecomposition failed");
  }
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol::psd) {
    throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }
  if (lo < 0.0) {
    RealVector lam = es.eigenvalues().cwiseMax(0.0);
    h = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    tr = h.trace().real();
  }
  m_ = h / tr;
}

PassiveState::PassiveState(RealVector populations) : p_(std::move(populations)) {
  if (p_.size() == 0) throw std::invalid_argument("PassiveState: empty populations");
  double sum = 0.0;
  for (int k = 0; k < p_.size(); ++k) {
    if (k > 0 && p_(k) > p_(k - 1) + tol::passive_order) {
      throw std::invalid_argument("PassiveState: populations must be nonincreasing");
    }
    if (p_(k) < -tol::psd) throw std::invalid_argument("PassiveState: negative population");
    sum += p_(k);
  }
  if (std::abs(sum - 1.0) > tol::trace) {
    throw std::invalid_argument("PassiveState: populations must sum to 1");
  }
  p_ = (p_.cwiseMax(0.0) / sum).eval();
}

DensityMatrix PassiveState::to_density(const Hamiltonian& h) const {
  return state_from_populations(h, p_);
}

GibbsState::GibbsState(Beta beta, RealVector populations)
    : beta_(beta), p_(std::move(populations)) {
  if (!beta_.infinite && !(beta_.value >= 0.0)) {
    throw std::invalid_argument("GibbsState: beta must be nonnegative");
  }
  PassiveState check(p_);  // nonincreasing, normalized
  p_ = check.populations();
}

DensityMatrix GibbsState::to_density(const Hamiltonian& h) const {
  return state_from_populations(h, p_);
}

DensityMatrix state_from_populations(const Hamiltonian& h, const RealVector& p) {
  if (p.size() != h.dim()) {
    throw std::invalid_argument("state_from_populations: dimension mismatch");
  }
  Matrix diag = p.cast<Complex>().asDiagonal();
  if (!h.has_custom_basis()) return DensityMatrix(diag);
  return DensityMatrix(h.basis() * diag * h.basis().adjoint());
}

}  // namespace ergokit
