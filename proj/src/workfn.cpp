#include "ergokit/workfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ergokit {

namespace {

constexpr double kBetaCross = 1e-10;  // entropy gap below which beta is infinite
constexpr int kBisectMax = 200;

double clip_nonneg(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

BetaSolution solve_beta_for_entropy(const Hamiltonian& h, double s) {
  const double span = h.span();
  if (span <= tol::degeneracy) {
    // Fully degenerate spectrum: every Gibbs state is I/d; report beta = 0.
    const double achieved = std::log(static_cast<double>(h.dim()));
    return {Beta::finite(0.0), achieved, std::abs(achieved - s)};
  }
  const double ln_ground = std::log(static_cast<double>(h.ground_degeneracy()));
  if (s <= ln_ground + kBetaCross) {
    return {Beta::inf(), ln_ground, std::abs(ln_ground - s)};
  }

  double lo = 0.0, hi = 1e4 / span;
  double flo = gibbs_entropy(h, lo) - s;
  double fhi = gibbs_entropy(h, hi) - s;
  if (flo <= 0.0) {
    // s >= ln d: the maximally mixed state already matches.
    return {Beta::finite(0.0), gibbs_entropy(h, 0.0), std::abs(flo)};
  }
  if (fhi >= 0.0) {
    return {Beta::finite(hi), gibbs_entropy(h, hi), std::abs(fhi)};
  }
  for (int it = 0; it < kBisectMax; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = gibbs_entropy(h, mid) - s;
    if (fm >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  const double beta = 0.5 * (lo + hi);
  const double achieved = gibbs_entropy(h, beta);
  return {Beta::finite(beta), achieved, std::abs(achieved - s)};
}

BetaSolution beta_of_state(const Hamiltonian& h, const DensityMatrix& rho) {
  if (rho.dim() != h.dim()) throw std::invalid_argument("beta_of_state: dimension mismatch");
  return solve_beta_for_entropy(h, entropy(rho));
}

double ergotropy(const Hamiltonian& h, const DensityMatrix& rho) {
  if (rho.dim() != h.dim()) throw std::invalid_argument("ergotropy: dimension mismatch");
  const RealVector r = spectral(rho).populations;
  double passive_energy = 0.0;
  for (int k = 0; k < h.dim(); ++k) passive_energy += r(k) * h.eigenvalues()(k);
  return clip_nonneg(energy(h, rho) - passive_energy);
}

double free_energy_of(const Hamiltonian& h, const RealVector& populations) {
  if (h.span() <= tol::degeneracy) return 0.0;  // constant energy, no work
  double e = 0.0;
  for (int k = 0; k < h.dim(); ++k) e += populations(k) * h.eigenvalues()(k);
  const BetaSolution sol = solve_beta_for_entropy(h, entropy_of(populations));
  const double e_gibbs = sol.beta.infinite ? h.eigenvalues()(0) : gibbs_energy(h, sol.beta.value);
  return clip_nonneg(e - e_gibbs);
}

double free_energy(const Hamiltonian& h, const DensityMatrix& rho) {
  if (rho.dim() != h.dim()) throw std::invalid_argument("free_energy: dimension mismatch");
  if (h.span() <= tol::degeneracy) return 0.0;
  const BetaSolution sol = beta_of_state(h, rho);
  const double e_gibbs = sol.beta.infinite ? h.eigenvalues()(0) : gibbs_energy(h, sol.beta.value);
  return clip_nonneg(energy(h, rho) - e_gibbs);
}

double coherent_ergotropy(const Hamiltonian& h, const DensityMatrix& rho) {
  Matrix r = to_energy_basis(h, rho.matrix());
  for (int i = 0; i < r.rows(); ++i) {
    for (int j = 0; j < r.cols(); ++j) {
      if (i != j) r(i, j) = 0.0;
    }
  }
  const DensityMatrix dephased(from_energy_basis(h, r));
  return clip_nonneg(ergotropy(h, rho) - ergotropy(h, dephased));
}

double ergotropy_ncopy(const Hamiltonian& h, const DensityMatrix& rho, int n,
                       std::int64_t cap) {
  if (n < 1) throw std::invalid_argument("ergotropy_ncopy: n must be positive");
  const int d = h.dim();
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > cap / d) throw std::invalid_argument("ergotropy_ncopy: d^n exceeds cap");
    total *= d;
  }

  const RealVector r = spectral(rho).populations;
  std::vector<long double> logr(d);
  for (int k = 0; k < d; ++k) {
    logr[k] = r(k) > 0.0 ? std::log(static_cast<long double>(r(k)))
                         : -std::numeric_limits<long double>::infinity();
  }

  // n-fold log-products and energy sums, expanded level by level.
  std::vector<long double> logp{0.0L};
  std::vector<double> esum{0.0};
  for (int step = 0; step < n; ++step) {
    std::vector<long double> lp;
    std::vector<double> es;
    lp.reserve(logp.size() * d);
    es.reserve(esum.size() * d);
    for (std::size_t i = 0; i < logp.size(); ++i) {
      for (int k = 0; k < d; ++k) {
        lp.push_back(logp[i] + logr[k]);
        es.push_back(esum[i] + h.eigenvalues()(k));
      }
    }
    logp.swap(lp);
    esum.swap(es);
  }

  std::sort(logp.begin(), logp.end(), std::greater<long double>());
  std::sort(esum.begin(), esum.end());

  long double passive_energy = 0.0L;
  for (std::size_t j = 0; j < logp.size(); ++j) {
    if (std::isinf(logp[j])) break;  // zero weight from here on
    passive_energy += std::exp(logp[j]) * static_cast<long double>(esum[j]);
  }
  const double total_energy = n * energy(h, rho);
  return clip_nonneg(total_energy - static_cast<double>(passive_energy));
}

double ergo_free_identity_gap(const Hamiltonian& h, const DensityMatrix& rho) {
  const RealVector p = passive_rearrangement(h, rho).populations();
  return ergotropy(h, rho) - free_energy(h, rho) + free_energy_of(h, p);
}

}  // namespace ergokit
