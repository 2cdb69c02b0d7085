// workfn.hpp — ergotropy, free energy with the entropy-matching beta solver,
// coherent ergotropy and the combinatorial n-copy ergotropy.

#pragma once

#include "ergokit/spectra.hpp"
#include "ergokit/types.hpp"

#include <cstdint>

namespace ergokit {

struct BetaSolution {
  Beta beta;
  double achieved_entropy = 0.0;
  double residual = 0.0;  // |S(gamma_beta) - S(rho)|
};

// Solves S(gamma_beta) = s by bisection (S is strictly decreasing in beta).
// Returns the infinite tag when s <= ln(ground degeneracy) + 1e-10; a fully
// degenerate spectrum reports beta = 0 by convention.
BetaSolution solve_beta_for_entropy(const Hamiltonian& h, double s);

BetaSolution beta_of_state(const Hamiltonian& h, const DensityMatrix& rho);

// E(rho) - E(P_rho), clipped to zero from fp noise.
double ergotropy(const Hamiltonian& h, const DensityMatrix& rho);

// E(rho) - E(gamma_rho) with gamma_rho the entropy-matched Gibbs state.
double free_energy(const Hamiltonian& h, const DensityMatrix& rho);

// Classical free energy of a population vector in the energy basis.
double free_energy_of(const Hamiltonian& h, const RealVector& populations);

// ergotropy(rho) - ergotropy(dephased rho), nonnegative.
double coherent_ergotropy(const Hamiltonian& h, const DensityMatrix& rho);

// Ergotropy of rho^{tensor n} under H_total = sum_i H_i, computed from sorted
// n-fold spectrum products paired with sorted n-fold energy sums. Never builds
// a d^n x d^n matrix; throws when d^n exceeds the cap.
double ergotropy_ncopy(const Hamiltonian& h, const DensityMatrix& rho, int n,
                       std::int64_t cap = 2000000);

// E(rho) - F(rho) + F(P_rho); contract |gap| <= 1e-8.
double ergo_free_identity_gap(const Hamiltonian& h, const DensityMatrix& rho);

}  // namespace ergokit
