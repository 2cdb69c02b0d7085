// certify.hpp — statistical classification of channels against the
// free-operation conditions of the completely-passive and passive theories.

#pragma once

#include "ergokit/channels.hpp"
#include "ergokit/geometry.hpp"
#include "ergokit/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ergokit {

// Pass means "no counterexample in the stated trials/starts"; a fail verdict
// carries a counterexample whose margin exceeds 10x the check tolerance and
// that re-verifies from the record alone.
struct CounterexampleRecord {
  std::optional<DensityMatrix> state;
  std::optional<RealVector> free_populations;
  std::optional<double> beta;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::int64_t index = -1;  // trial or grid index (lowest violating)
};

struct ConditionVerdict {
  std::string condition;  // F.i | F.ii | F.iii | E.i | E.ii | E.iii | strongF | strongE | Ocp-necessary-for-Op
  bool pass = true;
  std::int64_t trials = 0;
  std::optional<CounterexampleRecord> counterexample;
  std::string note;
};

// Best lower bound found for eta_Lambda(gamma) by multistart ascent of
// F(Lambda(rho))/S(rho||gamma), states inside the exclusion ball excluded and
// the boundary probed at S(rho||gamma) in {1e-6, 1e-5, 1e-4}.
struct EtaEstimate {
  double gamma_beta = 0.0;
  double eta = 0.0;
  double t_out = 0.0;        // fitted temperature of Lambda(gamma)
  double fit_residual = 0.0; // trace-distance residual of the Gibbs fit
  bool flagged = false;      // Lambda(gamma) did not fit a finite-temperature Gibbs state
  DensityMatrix argmax_state;
  int starts = 0;
};

// Nearest Gibbs state in trace distance, beta >= 0 (golden section over a grid).
struct GibbsFit {
  double beta = 0.0;
  double residual = 0.0;
};
GibbsFit fit_gibbs(const Hamiltonian& h, const DensityMatrix& rho);

// Falsification sampler: 50% Hilbert-Schmidt, 25% Haar-pure, 25% Gibbs plus
// a sigma = 0.05 Gaussian perturbation reprojected onto valid states.
DensityMatrix sample_state_mixed(const Hamiltonian& h, std::mt19937_64& rng);

// (F,i): Lambda(gamma_beta) fits a Gibbs state for each grid beta.
ConditionVerdict check_Fi(const AnyChannel& ch, const Hamiltonian& h,
                          const std::vector<double>& beta_grid, double tol);

// (F,ii): F(Lambda(rho)) <= F(rho) over sampled states.
ConditionVerdict check_Fii(const AnyChannel& ch, const Hamiltonian& h,
                           std::int64_t trials, std::uint64_t seed, double tol);

EtaEstimate estimate_eta_cp(const AnyChannel& ch, const Hamiltonian& h, double beta,
                            int starts, std::uint64_t seed);

// (F,iii): eta(gamma) T(Lambda(gamma)) <= T(gamma) on the grid, within a
// relative tolerance absorbing the eta-estimation error. Requires (F,i).
ConditionVerdict check_Fiii(const AnyChannel& ch, const Hamiltonian& h,
                            const std::vector<double>& beta_grid, int starts,
                            std::uint64_t seed, double rel_tol = 0.03);

// (E,i): images of random passive states stay passive.
ConditionVerdict check_Ei(const AnyChannel& ch, const Hamiltonian& h,
                          std::int64_t trials, std::uint64_t seed, double tol);

// (E,ii): ergotropy does not increase over sampled states.
ConditionVerdict check_Eii(const AnyChannel& ch, const Hamiltonian& h,
                           std::int64_t trials, std::uint64_t seed, double tol);

// Pointwise (E,iii) data at one (P, rho) pair; domain violations are skips.
struct EtaPPointwise {
  bool skipped = false;
  std::string reason;
  double eta = 0.0;
  double lhs = 0.0;  // eta * T(Lambda(P)|Lambda(rho)) = E(Lambda(rho))/S(rho||P)
  double rhs = 0.0;  // T(P|rho)
  bool e2_bound_ok = true;
};
EtaPPointwise eta_p_pointwise(const AnyChannel& ch, const Hamiltonian& h,
                              const PassiveState& p, const DensityMatrix& rho,
                              double tol);

enum class Theory { CompletelyPassive, Passive };

// Strong monotonicity sum_i q_i M(sigma_i) <= M(rho) from the channel's
// declared Kraus set; the note reports whether the free-outcome sufficient
// condition (outcomes of the free state stay free, temperatures nonincreasing)
// applied.
ConditionVerdict strong_mono_check(const KrausChannel& ch, const Hamiltonian& h,
                                   const DensityMatrix& rho, Theory theory, double tol);

// Necessary condition for an O_cp member to lie in O_p:
// eta(gamma) T(Lambda(gamma)) + delta(gamma) <= T(gamma) with delta evaluated
// at the eta witness. Requires (F,i) and (F,ii).
ConditionVerdict ocp_to_op_necessary(const AnyChannel& ch, const Hamiltonian& h,
                                     const std::vector<double>& beta_grid, int starts,
                                     std::uint64_t seed);

// |F(rho) - ergotropy(rho) - F(P_rho)| <= tol.
bool distance_decomposition_check(const Hamiltonian& h, const DensityMatrix& rho,
                                  double tol);

// Ergotropy convexity, Pi closure under mixing and (for d > 2) the mixture of
// two Gibbs states leaving C.
ConditionVerdict convexity_suite(const Hamiltonian& h, std::int64_t trials,
                                 std::uint64_t seed);

struct CertifyConfig {
  std::int64_t trials = 1000;
  std::uint64_t seed = 42;
  double tolerance = 1e-8;
  std::vector<double> beta_grid;  // empty -> default log grid
  int starts = 12;
};

std::vector<double> default_beta_grid(double lo = 0.05, double hi = 20.0, int points = 8,
                                      bool log_spaced = true);

struct ClassificationReport {
  std::string channel;
  std::string theory;  // "cp" | "p"
  std::vector<ConditionVerdict> verdicts;
  std::vector<EtaEstimate> eta;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
};

ClassificationReport classify(const AnyChannel& ch, const Hamiltonian& h, Theory theory,
                              const CertifyConfig& config);

// Number of worker threads for trial loops: ERGOKIT_THREADS caps it, results
// are aggregated by trial index and independent of the thread count.
int certify_thread_count();

}  // namespace ergokit
