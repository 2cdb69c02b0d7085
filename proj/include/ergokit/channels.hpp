// channels.hpp — CPTP maps: construction, validation, application, and
// selective (Kraus-resolved) outcomes.

#pragma once

#include "ergokit/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace ergokit {

// A CPTP map given by a nonempty Kraus list with sum K^dag K = I within 1e-9.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus, std::string label = "");

  int dim() const { return static_cast<int>(kraus_.front().rows()); }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const std::string& label() const { return label_; }

 private:
  std::vector<Matrix> kraus_;
  std::string label_;
};

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);

// Channel action on an arbitrary matrix (no state validation); used for the
// Choi construction and for effects of subnormalized inputs.
Matrix apply_matrix(const KrausChannel& ch, const Matrix& m);

struct SelectiveOutcome {
  double probability = 0.0;
  DensityMatrix post_state;
};

// Outcomes with probability above 1e-12; their mixture reconstructs apply().
std::vector<SelectiveOutcome> selective_outcomes(const KrausChannel& ch,
                                                 const DensityMatrix& rho);

bool is_unital(const KrausChannel& ch);

// Choi matrix built from the channel action on matrix units; PSD iff the map
// is completely positive (independent of the Kraus presentation).
Matrix choi_matrix(const KrausChannel& ch);

// Removes energy-basis off-diagonals. Realized as the uniform mixture of the
// d diagonal phase unitaries Z_m, whose selective outcomes keep Gibbs states
// Gibbs (the projector presentation would not).
KrausChannel dephasing(const Hamiltonian& h);

// Entrywise multiplication of rho (energy basis) by coeffs. The coefficient
// matrix must be Hermitian with unit diagonal and PSD, which is exactly
// complete positivity for a Schur multiplier.
KrausChannel partial_dephasing(const Hamiltonian& h, const Matrix& coeffs);

// Lambda_beta(rho) = Tr{(I - |psi><psi|) rho} sigma + <psi|rho|psi> sigma',
// with |psi> the uniform superposition of energy states and
// sigma = d/(d-1) (gamma_beta - sigma'/d), which must be PSD.
// Sends every energy-incoherent state to gamma_beta.
KrausChannel lambda_beta_map(const Hamiltonian& h, double beta,
                             const DensityMatrix& sigma_prime);

// Constant map rho -> gamma_beta (Lambda_beta with sigma' = gamma_beta).
KrausChannel thermalizing(const Hamiltonian& h, double beta);

KrausChannel unitary_channel(const Matrix& u, std::string label = "unitary");

// Convex combination: union of sqrt(w_i)-scaled Kraus operators.
KrausChannel mixture(const std::vector<KrausChannel>& channels, const RealVector& weights);

// Tr_E{U rho x gamma_beta^E U^dag} with U Haar-random inside each total-energy
// eigenspace, so [U, H + H_E] = 0 and the system Gibbs state is preserved.
KrausChannel thermal_operation(const Hamiltonian& h, const Hamiltonian& h_env,
                               double beta, std::uint64_t seed);

// The dilation unitary used by thermal_operation for the same seed.
Matrix thermal_dilation_unitary(const Hamiltonian& h, const Hamiltonian& h_env,
                                double beta, std::uint64_t seed);

// Stinespring construction from a Haar-random isometry.
KrausChannel random_channel(int d, int kraus_rank, std::uint64_t seed);

// A state-dependent rule rho -> KrausChannel. Maps whose Kraus operators
// depend on the input through beta(rho) are not linear, so they are kept as
// families and the certifier applies the matched channel to each sampled state.
class ChannelFamily {
 public:
  using Rule = std::function<KrausChannel(const DensityMatrix&)>;

  ChannelFamily(std::string label, Rule rule)
      : label_(std::move(label)), rule_(std::move(rule)) {}

  const std::string& label() const { return label_; }
  KrausChannel at(const DensityMatrix& rho) const { return rule_(rho); }
  DensityMatrix apply(const DensityMatrix& rho) const { return ergokit::apply(rule_(rho), rho); }

 private:
  std::string label_;
  Rule rule_;
};

using AnyChannel = std::variant<KrausChannel, ChannelFamily>;

DensityMatrix apply_any(const AnyChannel& ch, const DensityMatrix& rho);
const std::string& label_of(const AnyChannel& ch);

// rho -> unitary channel of the extraction unitary U_rho (free in the passive theory).
ChannelFamily extraction_family(const Hamiltonian& h);

// rho -> thermalizing map at beta(rho) + offset, offset >= 0; free in the
// completely-passive theory since it never lowers beta on C.
ChannelFamily lambda_beta_tilde_family(const Hamiltonian& h, double offset);

}  // namespace ergokit
