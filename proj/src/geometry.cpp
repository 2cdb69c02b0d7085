#include "ergokit/geometry.hpp"

#include "ergokit/spectra.hpp"
#include "optim_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ergokit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDenomFloor = 1e-12;
constexpr double kAlphaDispatch = 1e-7;  // powers degrade before this, logs take over

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

// <eps_k|rho^alpha|eps_k> for all k, eigenvalue floor 1e-14.
RealVector diag_of_power(const Hamiltonian& h, const DensityMatrix& rho, double alpha) {
  const SpectralDecomposition sd = spectral(rho);
  const Matrix ov = h.has_custom_basis() ? Matrix(h.basis().adjoint() * sd.vectors)
                                         : sd.vectors;  // (k,j) = <eps_k|r_j>
  RealVector out = RealVector::Zero(h.dim());
  for (int j = 0; j < h.dim(); ++j) {
    const double r = sd.populations(j);
    if (r < tol::support) continue;
    const double ra = std::pow(r, alpha);
    for (int k = 0; k < h.dim(); ++k) out(k) += ra * std::norm(ov(k, j));
  }
  return out;
}

RealVector energy_diagonal(const Hamiltonian& h, const DensityMatrix& rho) {
  const Matrix r = to_energy_basis(h, rho.matrix());
  return r.diagonal().real().cwiseMax(0.0);
}

struct GridRefineResult {
  double x;
  double value;
};

// 400-point log grid over [1e-4, 1e4]/span plus the beta = 0 endpoint, then
// golden-section refinement around the best bracket.
template <typename F>
GridRefineResult minimize_over_beta(F&& f, double span) {
  std::vector<double> grid;
  grid.push_back(0.0);
  const double lo = 1e-4 / span, hi = 1e4 / span;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  int best = 0;
  double fbest = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double fi = f(grid[i]);
    if (fi < fbest) {
      fbest = fi;
      best = static_cast<int>(i);
    }
  }
  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[best + 1 < static_cast<int>(grid.size()) ? best + 1 : best];
  auto [x, v] = detail::golden_min(f, a, b);
  if (fbest <= v) return {grid[best], fbest};
  return {x, v};
}

}  // namespace

Divergence relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  const SpectralDecomposition sr = spectral(rho);
  const SpectralDecomposition ss = spectral(sigma);

  double a = 0.0;
  for (int k = 0; k < rho.dim(); ++k) {
    const double r = sr.populations(k);
    if (r > 0.0) a += r * std::log(r);
  }
  double b = 0.0;
  for (int l = 0; l < sigma.dim(); ++l) {
    const Vector v = ss.vectors.col(l);
    const double w = std::max(0.0, (v.adjoint() * rho.matrix() * v)(0, 0).real());
    const double s = ss.populations(l);
    if (s < tol::support) {
      if (w > tol::support_weight) return {0.0, true};
      continue;
    }
    b += w * std::log(s);
  }
  return {std::max(0.0, a - b), false};
}

Divergence tsallis_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                              double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tsallis_divergence: alpha must be positive");
  if (std::abs(alpha - 1.0) < 1e-6) return relative_entropy(rho, sigma);
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("tsallis_divergence: dimension mismatch");
  }
  const SpectralDecomposition sr = spectral(rho);
  const SpectralDecomposition ss = spectral(sigma);
  const Matrix ov = sr.vectors.adjoint() * ss.vectors;  // (k,l) = <r_k|s_l>

  double trace = 0.0;
  for (int l = 0; l < sigma.dim(); ++l) {
    const double s = ss.populations(l);
    if (s < tol::support) {
      if (alpha > 1.0) {
        double w = 0.0;
        for (int k = 0; k < rho.dim(); ++k) w += sr.populations(k) * std::norm(ov(k, l));
        if (w > tol::support_weight) return {0.0, true};
      }
      continue;
    }
    double inner = 0.0;
    for (int k = 0; k < rho.dim(); ++k) {
      const double r = sr.populations(k);
      if (r < tol::support) continue;
      inner += std::pow(r, alpha) * std::norm(ov(k, l));
    }
    trace += std::pow(s, 1.0 - alpha) * inner;
  }
  return {std::max(0.0, (trace - 1.0) / (alpha - 1.0)), false};
}

double noneq_temperature(const Hamiltonian& h, const PassiveState& p,
                         const DensityMatrix& rho) {
  if (p.dim() != h.dim() || rho.dim() != h.dim()) {
    throw std::invalid_argument("noneq_temperature: dimension mismatch");
  }
  const double erg = ergotropy(h, rho);
  if (erg <= 1e-12) throw std::domain_error("noneq_temperature: rho is passive");
  if (p.populations().minCoeff() < tol::support) {
    throw std::domain_error("noneq_temperature: P is rank deficient");
  }
  const RealVector r = spectral(rho).populations;
  const RealVector a = energy_diagonal(h, rho);
  double denom = 0.0;
  for (int k = 0; k < h.dim(); ++k) denom += std::log(p.populations()(k)) * (r(k) - a(k));
  return erg / denom;
}

double noneq_temperature_general(const Hamiltonian& h, const DensityMatrix& p_state,
                                 const DensityMatrix& rho) {
  const double erg = ergotropy(h, rho);
  if (erg <= 1e-12) throw std::domain_error("noneq_temperature: rho is passive");
  const SpectralDecomposition sp = spectral(p_state);
  if (sp.populations.minCoeff() < tol::support) {
    throw std::domain_error("noneq_temperature: P is rank deficient");
  }
  RealVector loglam(sp.populations.size());
  for (int k = 0; k < sp.populations.size(); ++k) loglam(k) = std::log(sp.populations(k));
  const Matrix lnp = sp.vectors * loglam.cast<Complex>().asDiagonal() * sp.vectors.adjoint();
  const Matrix prho =
      state_from_populations(h, spectral(rho).populations).matrix();
  const double denom = ((prho - rho.matrix()) * lnp).trace().real();
  return erg / denom;
}

double tsallis_temperature_p(const Hamiltonian& h, const PassiveState& p,
                             const DensityMatrix& rho, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tsallis_temperature_p: alpha must be positive");
  if (std::abs(alpha - 1.0) < kAlphaDispatch) return noneq_temperature(h, p, rho);
  const double erg = ergotropy(h, rho);
  if (erg <= 1e-12) throw std::domain_error("tsallis_temperature_p: rho is passive");
  if (p.populations().minCoeff() < tol::support) {
    throw std::domain_error("tsallis_temperature_p: P is rank deficient");
  }
  const RealVector r = spectral(rho).populations;
  const RealVector rho_a = diag_of_power(h, rho, alpha);
  double denom = 0.0;
  for (int k = 0; k < h.dim(); ++k) {
    denom += std::pow(p.populations()(k), 1.0 - alpha) * (std::pow(r(k), alpha) - rho_a(k));
  }
  return (1.0 - alpha) * erg / denom;
}

double tsallis_temperature_cp(const Hamiltonian& h, const GibbsState& gamma,
                              const DensityMatrix& rho, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tsallis_temperature_cp: alpha must be positive");
  if (gamma.beta().infinite) {
    throw std::domain_error("tsallis_temperature_cp: gamma must have finite beta");
  }
  const double f = free_energy(h, rho);
  if (f <= 1e-12) throw std::domain_error("tsallis_temperature_cp: rho has no free energy");
  const RealVector g = gibbs(h, beta_of_state(h, rho).beta).populations();
  const RealVector& q = gamma.populations();
  if (std::abs(alpha - 1.0) < kAlphaDispatch) {
    const RealVector a = energy_diagonal(h, rho);
    double denom = 0.0;
    for (int k = 0; k < h.dim(); ++k) denom += safe_log(q(k)) * (g(k) - a(k));
    return f / denom;
  }
  const RealVector rho_a = diag_of_power(h, rho, alpha);
  double denom = 0.0;
  for (int k = 0; k < h.dim(); ++k) {
    denom += std::pow(q(k), 1.0 - alpha) * (std::pow(g(k), alpha) - rho_a(k));
  }
  return (1.0 - alpha) * f / denom;
}

double distance_to_free(const Hamiltonian& h, const DensityMatrix& rho,
                        const GibbsState& gamma) {
  if (gamma.beta().infinite || gamma.beta().value <= 0.0) {
    throw std::domain_error("distance_to_free: gamma must have 0 < beta < infinity");
  }
  const Divergence s = relative_entropy(rho, gamma.to_density(h));
  if (s.infinite) return kInf;
  return s.value / gamma.beta().value;
}

double distance_to_free(const Hamiltonian& h, const DensityMatrix& rho,
                        const PassiveState& p) {
  const double t = noneq_temperature(h, p, rho);
  const RealVector a = energy_diagonal(h, rho);
  double cross = 0.0;
  for (int k = 0; k < h.dim(); ++k) cross += a(k) * std::log(p.populations()(k));
  const double s = -entropy(rho) - cross;
  return t * s;
}

MonotoneResult monotone_Mcp(const Hamiltonian& h, const DensityMatrix& rho) {
  const double s = entropy(rho);
  const double e = energy(h, rho);
  const int d = h.dim();
  if (h.span() <= tol::degeneracy) {
    // Every Gibbs state is I/d.
    MonotoneResult out;
    out.value = std::max(0.0, std::log(static_cast<double>(d)) - s);
    out.minimizer = RealVector::Constant(d, 1.0 / d);
    out.beta = Beta::finite(0.0);
    out.method = "grid+local";
    return out;
  }
  auto objective = [&](double beta) { return -s + beta * e + log_partition(h, beta); };
  const GridRefineResult r = minimize_over_beta(objective, h.span());
  double beta_hat = r.x;
  double value = r.value;
  const double at_zero = objective(0.0);
  if (at_zero <= value) {
    beta_hat = 0.0;
    value = at_zero;
  }
  MonotoneResult out;
  out.value = std::max(0.0, value);
  out.minimizer = gibbs(h, beta_hat).populations();
  out.beta = Beta::finite(beta_hat);
  out.method = "grid+local";
  return out;
}

RealVector pav_nonincreasing(const RealVector& a) {
  struct Block {
    double sum;
    int count;
  };
  std::vector<Block> blocks;
  for (int i = 0; i < a.size(); ++i) {
    Block b{a(i), 1};
    while (!blocks.empty() &&
           blocks.back().sum * b.count <= b.sum * blocks.back().count) {
      b.sum += blocks.back().sum;
      b.count += blocks.back().count;
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  RealVector out(a.size());
  int i = 0;
  for (const Block& b : blocks) {
    for (int c = 0; c < b.count; ++c) out(i++) = b.sum / b.count;
  }
  return out;
}

RealVector project_ordered_simplex(const RealVector& x) {
  RealVector y = pav_nonincreasing(x);  // nonincreasing, sum preserved
  const int d = static_cast<int>(y.size());
  // Threshold projection onto the simplex; input sorted nonincreasing keeps order.
  double cum = 0.0;
  double tau = 0.0;
  for (int k = 0; k < d; ++k) {
    cum += y(k);
    const double t = (cum - 1.0) / (k + 1);
    if (y(k) - t > 0.0) tau = t;
  }
  return (y.array() - tau).cwiseMax(0.0);
}

MonotoneResult monotone_Mp(const Hamiltonian& h, const DensityMatrix& rho) {
  const RealVector a = energy_diagonal(h, rho);
  const RealVector pstar = pav_nonincreasing(a);
  double cross = 0.0;
  for (int k = 0; k < h.dim(); ++k) {
    if (a(k) > 0.0) cross += a(k) * std::log(pstar(k));
  }
  MonotoneResult out;
  out.value = std::max(0.0, -entropy(rho) - cross);
  out.minimizer = pstar;
  out.method = "pav";
  return out;
}

namespace {

// Precomputed per-state data for the family objectives; all evaluations are
// O(d) given these.
struct MpData {
  RealVector r;          // populations of P_rho
  RealVector ra;         // r^alpha
  RealVector a;          // energy-basis diagonal of rho
  RealVector rho_alpha;  // energy-basis diagonal of rho^alpha
  double s = 0.0;
  double erg = 0.0;
  double alpha = 1.0;
  double nu = 0.0;
  bool alpha_is_one = true;

  double operator()(const RealVector& p) const {
    const int d = static_cast<int>(p.size());
    if (!alpha_is_one && p.minCoeff() < tol::support) return kInf;
    double div, temp = 0.0;
    if (alpha_is_one) {
      double cross = 0.0, denom = 0.0;
      for (int k = 0; k < d; ++k) {
        const double lp = safe_log(p(k));
        cross += a(k) * lp;
        denom += lp * (r(k) - a(k));
      }
      div = std::max(0.0, -s - cross);
      if (nu > 0.0) {
        if (std::abs(denom) < kDenomFloor) return kInf;
        temp = erg / denom;
      }
    } else {
      double trace = 0.0, denom = 0.0;
      for (int k = 0; k < d; ++k) {
        const double pw = std::pow(p(k), 1.0 - alpha);
        trace += pw * rho_alpha(k);
        denom += pw * (ra(k) - rho_alpha(k));
      }
      div = std::max(0.0, (trace - 1.0) / (alpha - 1.0));
      if (nu > 0.0) {
        if (std::abs(denom) < kDenomFloor) return kInf;
        temp = (1.0 - alpha) * erg / denom;
      }
    }
    if (nu == 0.0) return div;
    if (temp <= 0.0) return kInf;  // sign-flipped denominator, not a candidate
    return std::pow(temp, nu) * div;
  }
};

// Projected descent with a forward-difference gradient; the projection is the
// ordered-simplex pass shared with the starts.
template <typename F>
std::pair<double, RealVector> descend(const F& f, RealVector p, int max_iters) {
  double fp = f(p);
  double step = 0.05;
  const int d = static_cast<int>(p.size());
  const double fd = 1e-7;
  for (int it = 0; it < max_iters; ++it) {
    if (!std::isfinite(fp)) break;
    RealVector grad(d);
    for (int k = 0; k < d; ++k) {
      RealVector q = p;
      q(k) += fd;
      const double fq = f(q);
      grad(k) = std::isfinite(fq) ? (fq - fp) / fd : 0.0;
    }
    const double gn = grad.norm();
    if (gn < 1e-14) break;
    const RealVector cand = project_ordered_simplex(p - (step / gn) * grad);
    const double fc = f(cand);
    if (fc < fp - 1e-15) {
      p = cand;
      fp = fc;
      step *= 1.2;
    } else {
      step *= 0.5;
      if (step < 1e-12) break;
    }
  }
  return {fp, p};
}

}  // namespace

MonotoneResult family_Mp(const Hamiltonian& h, const DensityMatrix& rho, double alpha,
                         double nu, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("family_Mp: alpha must be positive");
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("family_Mp: nu must be in [0,1]");

  MpData data;
  data.alpha = alpha;
  data.nu = nu;
  data.alpha_is_one = std::abs(alpha - 1.0) < kAlphaDispatch;
  data.r = spectral(rho).populations;
  data.a = energy_diagonal(h, rho);
  data.s = entropy(rho);
  data.erg = ergotropy(h, rho);
  if (nu > 0.0 && data.erg <= 1e-12) {
    throw std::domain_error("family_Mp: rho is passive, temperature undefined");
  }
  if (!data.alpha_is_one) {
    data.ra = data.r.array().pow(alpha);
    data.rho_alpha = diag_of_power(h, rho, alpha);
  }

  std::vector<RealVector> starts;
  starts.push_back(project_ordered_simplex(data.r));
  starts.push_back(project_ordered_simplex(pav_nonincreasing(data.a)));
  for (int i = 0; i < 20; ++i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    starts.push_back(random_passive(h.dim(), rng).populations());
  }

  double best = kInf;
  RealVector best_p = starts.front();
  for (const RealVector& s0 : starts) {
    const double f0 = data(s0);
    if (f0 < best) {
      best = f0;
      best_p = s0;
    }
    auto [fv, pv] = descend(data, s0, 500);
    if (fv < best) {
      best = fv;
      best_p = pv;
    }
  }
  MonotoneResult out;
  out.value = std::max(0.0, best);
  out.minimizer = best_p;
  out.method = "multistart";
  return out;
}

MonotoneResult family_Mcp(const Hamiltonian& h, const DensityMatrix& rho, double alpha,
                          double nu) {
  if (!(alpha > 0.0)) throw std::invalid_argument("family_Mcp: alpha must be positive");
  if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("family_Mcp: nu must be in [0,1]");

  const double f_rho = free_energy(h, rho);
  const BetaSolution bs = beta_of_state(h, rho);
  if (f_rho <= 1e-12) {
    // rho is itself (numerically) free: the minimum is 0 at gamma_rho.
    MonotoneResult out;
    out.value = 0.0;
    out.minimizer = gibbs(h, bs.beta).populations();
    out.beta = bs.beta;
    out.method = "grid+local";
    return out;
  }

  const bool alpha_is_one = std::abs(alpha - 1.0) < kAlphaDispatch;
  const double s = entropy(rho);
  const double e = energy(h, rho);
  const RealVector g = gibbs(h, bs.beta).populations();
  RealVector ga, rho_alpha;
  if (!alpha_is_one) {
    ga = g.array().pow(alpha);
    rho_alpha = diag_of_power(h, rho, alpha);
  }
  const RealVector& eps = h.eigenvalues();

  auto objective = [&](double beta) -> double {
    double div;
    RealVector q = (-(beta * (eps.array() - eps(0)))).exp();
    q /= q.sum();
    if (alpha_is_one) {
      div = std::max(0.0, -s + beta * e + log_partition(h, beta));
    } else {
      double trace = 0.0;
      for (int k = 0; k < h.dim(); ++k) {
        trace += std::pow(q(k), 1.0 - alpha) * rho_alpha(k);
      }
      div = std::max(0.0, (trace - 1.0) / (alpha - 1.0));
    }
    if (nu == 0.0) return div;
    double temp;
    if (alpha_is_one) {
      if (beta <= 0.0) return kInf;
      temp = 1.0 / beta;  // T_cp,1(gamma_beta|rho) is the Gibbs temperature
    } else {
      double denom = 0.0;
      for (int k = 0; k < h.dim(); ++k) {
        denom += std::pow(q(k), 1.0 - alpha) * (ga(k) - rho_alpha(k));
      }
      if (std::abs(denom) < kDenomFloor) return kInf;
      temp = (1.0 - alpha) * f_rho / denom;
      if (temp <= 0.0) return kInf;
    }
    return std::pow(temp, nu) * div;
  };

  const GridRefineResult r = minimize_over_beta(objective, h.span());
  double beta_hat = r.x;
  double value = r.value;
  if (nu == 0.0) {
    const double at_zero = objective(0.0);
    if (at_zero <= value) {
      beta_hat = 0.0;
      value = at_zero;
    }
  }
  MonotoneResult out;
  out.value = std::max(0.0, value);
  out.minimizer = gibbs(h, beta_hat).populations();
  out.beta = Beta::finite(beta_hat);
  out.method = "grid+local";
  return out;
}

}  // namespace ergokit
