// geometry.hpp — divergences, nonequilibrium temperatures, the distance to the
// free sets, and the monotones M_cp, M_p and their Tsallis families.

#pragma once

#include "ergokit/types.hpp"
#include "ergokit/workfn.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ergokit {

struct Divergence {
  double value = 0.0;
  bool infinite = false;
};

// Tr{rho (ln rho - ln sigma)}; infinite when a sigma eigenvalue below 1e-14
// carries rho-weight above 1e-12.
Divergence relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// (Tr{rho^alpha sigma^(1-alpha)} - 1)/(alpha - 1); |alpha - 1| < 1e-6 dispatches
// to the relative entropy, alpha <= 0 is rejected.
Divergence tsallis_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                              double alpha);

// T(P|rho) = ergotropy(rho) / Tr{(P_rho - rho) ln P}. Signed; requires a
// non-passive rho and a full-rank P. Reduces to 1/beta on Gibbs arguments.
double noneq_temperature(const Hamiltonian& h, const PassiveState& p,
                         const DensityMatrix& rho);

// Same functional with an arbitrary full-rank state in place of the diagonal P.
double noneq_temperature_general(const Hamiltonian& h, const DensityMatrix& p_state,
                                 const DensityMatrix& rho);

// T_alpha(P|rho) = (1-alpha) ergotropy(rho) / Tr{(P_rho^alpha - rho^alpha) P^(1-alpha)}.
double tsallis_temperature_p(const Hamiltonian& h, const PassiveState& p,
                             const DensityMatrix& rho, double alpha);

// T_cp,alpha(gamma|rho) = (1-alpha) F(rho) / Tr{(gamma_rho^alpha - rho^alpha) gamma^(1-alpha)}.
double tsallis_temperature_cp(const Hamiltonian& h, const GibbsState& gamma,
                              const DensityMatrix& rho, double alpha);

// D(rho, gamma) = T(gamma) S(rho||gamma) for 0 < beta < infinity;
// D(rho, P) = T(P|rho) S(rho||P) on the domain of noneq_temperature.
double distance_to_free(const Hamiltonian& h, const DensityMatrix& rho,
                        const GibbsState& gamma);
double distance_to_free(const Hamiltonian& h, const DensityMatrix& rho,
                        const PassiveState& p);

struct MonotoneResult {
  double value = 0.0;
  RealVector minimizer;       // populations of the minimizing free state
  std::optional<Beta> beta;   // set when the minimization ran over C
  std::string method;         // "closed-form" | "pav" | "grid+local" | "multistart"
};

// min_{gamma in C} S(rho||gamma) by a 400-point log grid plus golden-section
// refinement; beta-hat = 0 is an admissible boundary solution.
MonotoneResult monotone_Mcp(const Hamiltonian& h, const DensityMatrix& rho);

// min over nonincreasing simplex vectors of S(rho||P), solved exactly by
// pool-adjacent-violators on the energy-basis diagonal of rho.
MonotoneResult monotone_Mp(const Hamiltonian& h, const DensityMatrix& rho);

// M_{p,alpha nu} = min_{P in Pi} T_alpha^nu(P|rho) S_alpha(rho||P), nu in [0,1].
// Multistart projected descent: P_rho, the PAV minimizer and 20 random passive
// starts; candidates with tiny or sign-flipped temperature denominators are
// discarded.
MonotoneResult family_Mp(const Hamiltonian& h, const DensityMatrix& rho, double alpha,
                         double nu, std::uint64_t seed = 0);

// M_{cp,alpha nu} = min_{gamma in C} T_cp,alpha^nu S_alpha, one-dimensional in beta.
MonotoneResult family_Mcp(const Hamiltonian& h, const DensityMatrix& rho, double alpha,
                          double nu);

// Arithmetic-mean pool-adjacent-violators for the nonincreasing constraint.
RealVector pav_nonincreasing(const RealVector& a);

// Euclidean-style projection onto {p nonincreasing, sum p = 1, p >= 0}:
// isotonic pass followed by the sorted-simplex threshold.
RealVector project_ordered_simplex(const RealVector& x);

}  // namespace ergokit
