#include "ergokit/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ergokit {

namespace {

// Fix the global phase of an eigenvector so lexicographic comparisons are
// well defined: the largest-magnitude entry is made real and nonnegative.
Vector phase_fixed(const Vector& v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best + 1e-15) {
      best = std::abs(v(i));
      imax = i;
    }
  }
  if (best <= 0.0) return v;
  Complex ph = v(imax) / std::abs(v(imax));
  return v / ph;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

Matrix to_energy_basis(const Hamiltonian& h, const Matrix& m) {
  if (m.rows() != h.dim() || m.cols() != h.dim()) {
    throw std::invalid_argument("to_energy_basis: dimension mismatch");
  }
  if (!h.has_custom_basis()) return m;
  return h.basis().adjoint() * m * h.basis();
}

Matrix from_energy_basis(const Hamiltonian& h, const Matrix& m) {
  if (m.rows() != h.dim() || m.cols() != h.dim()) {
    throw std::invalid_argument("from_energy_basis: dimension mismatch");
  }
  if (!h.has_custom_basis()) return m;
  return h.basis() * m * h.basis().adjoint();
}

SpectralDecomposition spectral(const DensityMatrix& rho) {
  const int d = rho.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral: eigensolver failed");

  std::vector<Vector> vecs(d);
  for (int k = 0; k < d; ++k) vecs[k] = phase_fixed(es.eigenvectors().col(k));

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (es.eigenvalues()(i) != es.eigenvalues()(j)) {
      return es.eigenvalues()(i) > es.eigenvalues()(j);
    }
    return lex_less(vecs[i], vecs[j]);
  });

  SpectralDecomposition out;
  out.populations.resize(d);
  out.vectors.resize(d, d);
  for (int k = 0; k < d; ++k) {
    out.populations(k) = std::max(0.0, es.eigenvalues()(order[k]));
    out.vectors.col(k) = vecs[order[k]];
  }
  return out;
}

double energy(const Hamiltonian& h, const DensityMatrix& rho) {
  Matrix r = to_energy_basis(h, rho.matrix());
  double e = 0.0;
  for (int k = 0; k < h.dim(); ++k) e += h.eigenvalues()(k) * r(k, k).real();
  return e;
}

double entropy_of(const RealVector& populations) {
  double s = 0.0;
  for (int k = 0; k < populations.size(); ++k) {
    const double p = populations(k);
    if (p > 0.0) s -= p * std::log(p);
  }
  const double cap = std::log(static_cast<double>(populations.size()));
  return std::min(std::max(s, 0.0), cap);
}

double entropy(const DensityMatrix& rho) { return entropy_of(spectral(rho).populations); }

GibbsState gibbs(const Hamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("gibbs: beta must be finite and nonnegative");
  }
  const RealVector& eps = h.eigenvalues();
  RealVector w = (-(beta * (eps.array() - eps(0)))).exp();
  return GibbsState(Beta::finite(beta), w / w.sum());
}

GibbsState gibbs_ground(const Hamiltonian& h) {
  const int g = h.ground_degeneracy();
  RealVector p = RealVector::Zero(h.dim());
  p.head(g).setConstant(1.0 / g);
  return GibbsState(Beta::inf(), p);
}

GibbsState gibbs(const Hamiltonian& h, Beta beta) {
  return beta.infinite ? gibbs_ground(h) : gibbs(h, beta.value);
}

double log_partition(const Hamiltonian& h, double beta) {
  const RealVector& eps = h.eigenvalues();
  const double zshift = (-(beta * (eps.array() - eps(0)))).exp().sum();
  return std::log(zshift) - beta * eps(0);
}

double gibbs_energy(const Hamiltonian& h, double beta) {
  const RealVector& eps = h.eigenvalues();
  RealVector w = (-(beta * (eps.array() - eps(0)))).exp();
  const double z = w.sum();
  double e = 0.0;
  for (int k = 0; k < eps.size(); ++k) e += (eps(k) - eps(0)) * w(k);
  return eps(0) + e / z;
}

double gibbs_entropy(const Hamiltonian& h, double beta) {
  // S = beta (E - eps_1) + ln Z', with energies shifted by the ground level.
  const double e_shifted = gibbs_energy(h, beta) - h.eigenvalues()(0);
  const double lnz_shifted = log_partition(h, beta) + beta * h.eigenvalues()(0);
  return std::min(std::max(beta * e_shifted + lnz_shifted, 0.0),
                  std::log(static_cast<double>(h.dim())));
}

PassiveState passive_rearrangement(const Hamiltonian& h, const DensityMatrix& rho) {
  if (rho.dim() != h.dim()) {
    throw std::invalid_argument("passive_rearrangement: dimension mismatch");
  }
  return PassiveState(spectral(rho).populations);
}

bool is_passive(const Hamiltonian& h, const DensityMatrix& rho, double tol) {
  return passivity_violation(h, rho) <= tol;
}

double passivity_violation(const Hamiltonian& h, const DensityMatrix& rho) {
  const Matrix r = to_energy_basis(h, rho.matrix());
  const auto blocks = h.level_blocks();

  double worst = 0.0;
  // Coherence between distinct energy levels (population transfer under H).
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      for (int i = blocks[a].first; i < blocks[a].second; ++i) {
        for (int j = blocks[b].first; j < blocks[b].second; ++j) {
          worst = std::max(worst, std::abs(r(i, j)));
        }
      }
    }
  }
  // Populations nonincreasing across levels; within a degenerate level any
  // ordering is allowed, so compare block eigenvalue ranges.
  double prev_min = std::numeric_limits<double>::infinity();
  for (const auto& [first, last] : blocks) {
    const int n = last - first;
    double bmin, bmax;
    if (n == 1) {
      bmin = bmax = r(first, first).real();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(r.block(first, first, n, n));
      bmin = es.eigenvalues().minCoeff();
      bmax = es.eigenvalues().maxCoeff();
    }
    worst = std::max(worst, bmax - prev_min);
    prev_min = bmin;
  }
  return worst;
}

Matrix extraction_unitary(const Hamiltonian& h, const DensityMatrix& rho) {
  if (rho.dim() != h.dim()) {
    throw std::invalid_argument("extraction_unitary: dimension mismatch");
  }
  const SpectralDecomposition sd = spectral(rho);
  return h.basis() * sd.vectors.adjoint();
}

StateMeasure parse_measure(const std::string& tag) {
  if (tag == "hilbert-schmidt") return StateMeasure::HilbertSchmidt;
  if (tag == "haar-pure") return StateMeasure::HaarPure;
  throw std::invalid_argument("unknown state measure: " + tag);
}

DensityMatrix random_state(int d, StateMeasure measure, std::mt19937_64& rng) {
  if (d < 2) throw std::invalid_argument("random_state: d must be at least 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (measure == StateMeasure::HaarPure) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    return DensityMatrix(v * v.adjoint());
  }
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Matrix m = g * g.adjoint();
  return DensityMatrix(m / m.trace().real());
}

DensityMatrix random_state(int d, StateMeasure measure, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_state(d, measure, rng);
}

PassiveState random_passive(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector p(d);
  for (int i = 0; i < d; ++i) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    p(i) = -std::log(u);
  }
  p /= p.sum();
  std::sort(p.data(), p.data() + d, std::greater<double>());
  return PassiveState(p);
}

PassiveState random_passive(const Hamiltonian& h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_passive(h.dim(), rng);
}

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    q.col(k) *= std::abs(rkk) > 0.0 ? rkk / std::abs(rkk) : Complex(1.0, 0.0);
  }
  return q;
}

DensityMatrix project_to_state(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const double tr = lam.sum();
  if (tr <= 0.0) throw std::domain_error("project_to_state: matrix has no positive part");
  lam /= tr;
  return DensityMatrix(es.eigenvectors() * lam.cast<Complex>().asDiagonal() *
                       es.eigenvectors().adjoint());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair; stable across platforms.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ergokit
