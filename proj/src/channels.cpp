#include "ergokit/channels.hpp"

#include "ergokit/spectra.hpp"
#include "ergokit/workfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace ergokit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_square(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("KrausChannel: empty Kraus list");
  const auto d = kraus.front().rows();
  if (d == 0) throw std::invalid_argument("KrausChannel: zero-dimensional");
  for (const Matrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("KrausChannel: Kraus operators must be d x d");
    }
  }
}

}  // namespace

KrausChannel::KrausChannel(std::vector<Matrix> kraus, std::string label)
    : kraus_(std::move(kraus)), label_(std::move(label)) {
  check_square(kraus_);
  const int d = dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : kraus_) sum += k.adjoint() * k;
  sum -= Matrix::Identity(d, d);
  if (max_abs(sum) > tol::kraus) {
    throw std::invalid_argument("KrausChannel: completeness identity violated");
  }
}

Matrix apply_matrix(const KrausChannel& ch, const Matrix& m) {
  Matrix out = Matrix::Zero(ch.dim(), ch.dim());
  for (const Matrix& k : ch.kraus()) out += k * m * k.adjoint();
  return out;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.dim()) throw std::invalid_argument("apply: dimension mismatch");
  return DensityMatrix(apply_matrix(ch, rho.matrix()));
}

std::vector<SelectiveOutcome> selective_outcomes(const KrausChannel& ch,
                                                 const DensityMatrix& rho) {
  if (rho.dim() != ch.dim()) {
    throw std::invalid_argument("selective_outcomes: dimension mismatch");
  }
  std::vector<SelectiveOutcome> outcomes;
  for (const Matrix& k : ch.kraus()) {
    const Matrix m = k * rho.matrix() * k.adjoint();
    const double q = m.trace().real();
    if (q <= 1e-12) continue;
    outcomes.push_back({q, DensityMatrix(m / q)});
  }
  return outcomes;
}

bool is_unital(const KrausChannel& ch) {
  const int d = ch.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : ch.kraus()) sum += k * k.adjoint();
  sum -= Matrix::Identity(d, d);
  return max_abs(sum) <= tol::kraus;
}

Matrix choi_matrix(const KrausChannel& ch) {
  const int d = ch.dim();
  Matrix choi = Matrix::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      Matrix unit = Matrix::Zero(d, d);
      unit(k, l) = 1.0;
      const Matrix block = apply_matrix(ch, unit);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) choi(a * d + k, b * d + l) = block(a, b);
      }
    }
  }
  return choi;
}

KrausChannel dephasing(const Hamiltonian& h) {
  const int d = h.dim();
  std::vector<Matrix> kraus;
  kraus.reserve(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m) {
    Vector phases(d);
    for (int k = 0; k < d; ++k) {
      const double arg = 2.0 * kPi * m * k / d;
      phases(k) = norm * Complex(std::cos(arg), std::sin(arg));
    }
    Matrix z = phases.asDiagonal();
    kraus.push_back(from_energy_basis(h, z));
  }
  return KrausChannel(std::move(kraus), "dephasing");
}

KrausChannel partial_dephasing(const Hamiltonian& h, const Matrix& coeffs) {
  const int d = h.dim();
  if (coeffs.rows() != d || coeffs.cols() != d) {
    throw std::invalid_argument("partial_dephasing: coefficient matrix must be d x d");
  }
  if (max_abs(coeffs - coeffs.adjoint()) > tol::hermitian) {
    throw std::invalid_argument("partial_dephasing: coefficients must be Hermitian");
  }
  for (int k = 0; k < d; ++k) {
    if (std::abs(coeffs(k, k) - 1.0) > tol::hermitian) {
      throw std::invalid_argument("partial_dephasing: diagonal coefficients must be 1");
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(coeffs);
  if (es.eigenvalues().minCoeff() < -tol::psd) {
    throw std::invalid_argument(
        "partial_dephasing: coefficient matrix must be PSD (complete positivity)");
  }
  std::vector<Matrix> kraus;
  for (int m = 0; m < d; ++m) {
    const double lam = std::max(0.0, es.eigenvalues()(m));
    if (lam <= 0.0) continue;
    Vector diag = std::sqrt(lam) * es.eigenvectors().col(m);
    Matrix k = diag.asDiagonal();
    kraus.push_back(from_energy_basis(h, k));
  }
  return KrausChannel(std::move(kraus), "partial-dephasing");
}

KrausChannel lambda_beta_map(const Hamiltonian& h, double beta,
                             const DensityMatrix& sigma_prime) {
  const int d = h.dim();
  if (d < 2) throw std::invalid_argument("lambda_beta_map: needs d >= 2");
  if (sigma_prime.dim() != d) throw std::invalid_argument("lambda_beta_map: dimension mismatch");
  const Matrix gamma = gibbs(h, beta).to_density(h).matrix();
  const Matrix sigma_m =
      (static_cast<double>(d) / (d - 1)) * (gamma - sigma_prime.matrix() / d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_m);
  if (es.eigenvalues().minCoeff() < -tol::psd) {
    throw std::invalid_argument("lambda_beta_map: sigma = d/(d-1)(gamma - sigma'/d) is not PSD");
  }
  const DensityMatrix sigma = project_to_state(sigma_m);

  Vector psi = Vector::Constant(d, Complex(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
  psi = h.basis() * psi;

  // Measure-and-prepare Kraus set: sqrt(t_i) |t_i><f_j| per effect vector.
  std::vector<Matrix> kraus;
  auto add_prepare = [&](const DensityMatrix& target, const std::vector<Vector>& effect_vecs) {
    const SpectralDecomposition sd = spectral(target);
    for (int i = 0; i < d; ++i) {
      const double t = sd.populations(i);
      if (t <= 0.0) continue;
      for (const Vector& f : effect_vecs) {
        kraus.push_back(std::sqrt(t) * sd.vectors.col(i) * f.adjoint());
      }
    }
  };
  // Effect I - |psi><psi|: a deterministic orthonormal basis of the complement,
  // completing psi with computational vectors (dropping the one psi overlaps most).
  int drop = 0;
  for (int j = 1; j < d; ++j) {
    if (std::abs(psi(j)) > std::abs(psi(drop))) drop = j;
  }
  Matrix comp(d, d);
  comp.col(0) = psi;
  int col = 1;
  for (int j = 0; j < d; ++j) {
    if (j == drop) continue;
    comp.col(col) = Vector::Unit(d, j);
    ++col;
  }
  Eigen::HouseholderQR<Matrix> qr(comp);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  // Column 0 of q spans psi up to phase; the rest span the complement.
  std::vector<Vector> complement;
  for (int j = 1; j < d; ++j) complement.push_back(q.col(j));
  add_prepare(sigma, complement);
  add_prepare(sigma_prime, {psi});
  return KrausChannel(std::move(kraus), "lambda-beta");
}

KrausChannel thermalizing(const Hamiltonian& h, double beta) {
  const int d = h.dim();
  const RealVector p = gibbs(h, beta).populations();
  std::vector<Matrix> kraus;
  kraus.reserve(d * d);
  for (int i = 0; i < d; ++i) {
    if (p(i) <= 0.0) continue;
    for (int j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = std::sqrt(p(i));
      kraus.push_back(from_energy_basis(h, k));
    }
  }
  return KrausChannel(std::move(kraus), "thermalizing");
}

KrausChannel unitary_channel(const Matrix& u, std::string label) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw std::invalid_argument("unitary_channel: matrix must be square");
  }
  Matrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  if (max_abs(g) > tol::unitary) {
    throw std::invalid_argument("unitary_channel: matrix is not unitary");
  }
  return KrausChannel({u}, std::move(label));
}

KrausChannel mixture(const std::vector<KrausChannel>& channels, const RealVector& weights) {
  if (channels.empty() || weights.size() != static_cast<Eigen::Index>(channels.size())) {
    throw std::invalid_argument("mixture: weights must match channels");
  }
  double sum = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0) throw std::invalid_argument("mixture: negative weight");
    sum += weights(i);
  }
  if (std::abs(sum - 1.0) > tol::trace) {
    throw std::invalid_argument("mixture: weights must sum to 1");
  }
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].dim() != channels.front().dim()) {
      throw std::invalid_argument("mixture: dimension mismatch");
    }
    const double w = std::sqrt(weights(static_cast<Eigen::Index>(i)));
    for (const Matrix& k : channels[i].kraus()) kraus.push_back(w * k);
  }
  return KrausChannel(std::move(kraus), "mixture");
}

Matrix thermal_dilation_unitary(const Hamiltonian& h, const Hamiltonian& h_env,
                                double beta, std::uint64_t seed) {
  (void)beta;
  const int d = h.dim();
  const int de = h_env.dim();
  if (static_cast<long>(d) * de > 64) {
    throw std::invalid_argument("thermal_operation: total dimension exceeds 64");
  }
  const int n = d * de;

  // Total energies in the product energy basis, bucketed within 1e-9.
  std::vector<double> etot(n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < de; ++j) etot[i * de + j] = h.eigenvalues()(i) + h_env.eigenvalues()(j);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return etot[a] < etot[b]; });

  std::mt19937_64 rng(seed);
  Matrix v = Matrix::Zero(n, n);
  std::size_t first = 0;
  while (first < order.size()) {
    std::size_t last = first + 1;
    while (last < order.size() && etot[order[last]] - etot[order[first]] <= 1e-9) ++last;
    const int bs = static_cast<int>(last - first);
    const Matrix u = random_unitary(bs, rng);
    for (int a = 0; a < bs; ++a) {
      for (int b = 0; b < bs; ++b) v(order[first + a], order[first + b]) = u(a, b);
    }
    first = last;
  }

  // Back to the computational product basis.
  Matrix pbasis(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < de; ++j) {
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < de; ++b) {
          pbasis(a * de + b, i * de + j) = h.basis()(a, i) * h_env.basis()(b, j);
        }
      }
    }
  }
  return pbasis * v * pbasis.adjoint();
}

KrausChannel thermal_operation(const Hamiltonian& h, const Hamiltonian& h_env,
                               double beta, std::uint64_t seed) {
  const int d = h.dim();
  const int de = h_env.dim();
  const Matrix u_total = thermal_dilation_unitary(h, h_env, beta, seed);

  const RealVector q = gibbs(h_env, beta).populations();
  std::vector<Matrix> kraus;
  for (int m = 0; m < de; ++m) {
    const Vector em = h_env.basis().col(m);
    for (int j = 0; j < de; ++j) {
      if (q(j) <= 0.0) continue;
      const Vector ej = h_env.basis().col(j);
      Matrix k(d, d);
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) {
          Complex acc = 0.0;
          for (int p = 0; p < de; ++p) {
            for (int r = 0; r < de; ++r) {
              acc += std::conj(em(p)) * u_total(a * de + p, c * de + r) * ej(r);
            }
          }
          k(a, c) = acc;
        }
      }
      kraus.push_back(std::sqrt(q(j)) * k);
    }
  }
  return KrausChannel(std::move(kraus), "thermal-operation");
}

KrausChannel random_channel(int d, int kraus_rank, std::uint64_t seed) {
  if (d < 1 || kraus_rank < 1) {
    throw std::invalid_argument("random_channel: d and rank must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d * kraus_rank, d);
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d * kraus_rank, d);
  Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
  }
  std::vector<Matrix> kraus;
  kraus.reserve(kraus_rank);
  for (int i = 0; i < kraus_rank; ++i) kraus.push_back(q.middleRows(i * d, d));
  return KrausChannel(std::move(kraus), "random");
}

DensityMatrix apply_any(const AnyChannel& ch, const DensityMatrix& rho) {
  if (std::holds_alternative<KrausChannel>(ch)) {
    return apply(std::get<KrausChannel>(ch), rho);
  }
  return std::get<ChannelFamily>(ch).apply(rho);
}

const std::string& label_of(const AnyChannel& ch) {
  if (std::holds_alternative<KrausChannel>(ch)) return std::get<KrausChannel>(ch).label();
  return std::get<ChannelFamily>(ch).label();
}

ChannelFamily extraction_family(const Hamiltonian& h) {
  return ChannelFamily("extraction", [h](const DensityMatrix& rho) {
    return unitary_channel(extraction_unitary(h, rho), "extraction-unitary");
  });
}

ChannelFamily lambda_beta_tilde_family(const Hamiltonian& h, double offset) {
  if (offset < 0.0) {
    throw std::invalid_argument("lambda_beta_tilde_family: offset must be nonnegative");
  }
  return ChannelFamily("lambda-beta-tilde", [h, offset](const DensityMatrix& rho) {
    const BetaSolution sol = beta_of_state(h, rho);
    const double base = sol.beta.infinite ? 1e4 / std::max(h.span(), 1e-12) : sol.beta.value;
    return thermalizing(h, base + offset);
  });
}

}  // namespace ergokit
