// helpers.hpp — shared builders and independent oracles for the test suites.

#pragma once

#include "ergokit/channels.hpp"
#include "ergokit/spectra.hpp"
#include "ergokit/types.hpp"
#include "ergokit/workfn.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>
#include <vector>

namespace ergotest {

using ergokit::Complex;
using ergokit::DensityMatrix;
using ergokit::Hamiltonian;
using ergokit::Matrix;
using ergokit::RealVector;

inline Hamiltonian make_h(std::initializer_list<double> eps) {
  RealVector v(static_cast<int>(eps.size()));
  int i = 0;
  for (double e : eps) v(i++) = e;
  return Hamiltonian(v);
}

inline DensityMatrix diag_state(std::initializer_list<double> pops) {
  RealVector v(static_cast<int>(pops.size()));
  int i = 0;
  for (double p : pops) v(i++) = p;
  Matrix m = v.cast<Complex>().asDiagonal();
  return DensityMatrix(m);
}

// 1/2 (|a> + |b>)(<a| + <b|) in dimension d.
inline DensityMatrix coherent_pair(int d, int a, int b) {
  Matrix m = Matrix::Zero(d, d);
  m(a, a) = m(b, b) = m(a, b) = m(b, a) = 0.5;
  return DensityMatrix(m);
}

// Dense-matrix ergotropy oracle: E(rho) - sum_k r_k eps_k with both spectra
// sorted independently of the library path.
inline double ergotropy_oracle(const RealVector& eps_sorted, const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  RealVector r = es.eigenvalues();
  std::sort(r.data(), r.data() + r.size(), std::greater<double>());
  Matrix hmat = eps_sorted.cast<Complex>().asDiagonal();
  double e = (hmat * rho).trace().real();
  double pe = 0.0;
  for (int k = 0; k < r.size(); ++k) pe += r(k) * eps_sorted(k);
  return e - pe;
}

// Brute-force n-copy ergotropy by materializing rho^(x)n and H_total.
inline double ncopy_oracle(const Hamiltonian& h, const DensityMatrix& rho, int n) {
  Matrix big = rho.matrix();
  Matrix hm = h.matrix();
  Matrix htot = hm;
  for (int i = 1; i < n; ++i) {
    const Matrix id_big = Matrix::Identity(big.rows(), big.cols());
    htot = Eigen::kroneckerProduct(htot, Matrix::Identity(h.dim(), h.dim())).eval();
    htot += Eigen::kroneckerProduct(id_big, hm).eval();
    big = Eigen::kroneckerProduct(big, rho.matrix()).eval();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> er(big);
  RealVector r = er.eigenvalues();
  std::sort(r.data(), r.data() + r.size(), std::greater<double>());
  Eigen::SelfAdjointEigenSolver<Matrix> eh(htot);
  RealVector eps = eh.eigenvalues();  // ascending
  double e = (htot * big).trace().real();
  double pe = 0.0;
  for (int k = 0; k < r.size(); ++k) pe += r(k) * eps(k);
  return e - pe;
}

// Classical relative entropy of populations against a Gibbs spectrum.
inline double classical_rel_entropy(const RealVector& p, const RealVector& q) {
  double s = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) > 0.0) s += p(k) * (std::log(p(k)) - std::log(q(k)));
  }
  return s;
}

inline bool choi_is_psd(const ergokit::KrausChannel& ch, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(ergokit::choi_matrix(ch));
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace ergotest
