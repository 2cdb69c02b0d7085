// spectra.hpp — spectral decompositions, Gibbs and passive constructions, state sampling.

#pragma once

#include "ergokit/types.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace ergokit {

// U^dag rho U and back; identity transforms when h uses the computational basis.
Matrix to_energy_basis(const Hamiltonian& h, const Matrix& m);
Matrix from_energy_basis(const Hamiltonian& h, const Matrix& m);

// Populations sorted nonincreasing; degenerate eigenvalues in a deterministic
// order (eigenvalue desc, then lexicographic order of the phase-fixed vectors).
SpectralDecomposition spectral(const DensityMatrix& rho);

double energy(const Hamiltonian& h, const DensityMatrix& rho);  // Tr{H rho}

// Von Neumann entropy -sum r ln r with 0 ln 0 = 0; result clipped to [0, ln d].
double entropy(const DensityMatrix& rho);
double entropy_of(const RealVector& populations);  // classical counterpart

GibbsState gibbs(const Hamiltonian& h, double beta);
GibbsState gibbs(const Hamiltonian& h, Beta beta);
GibbsState gibbs_ground(const Hamiltonian& h);  // beta = infinity

double gibbs_energy(const Hamiltonian& h, double beta);
double gibbs_entropy(const Hamiltonian& h, double beta);
double log_partition(const Hamiltonian& h, double beta);  // ln Tr e^{-beta H}

// k-th largest eigenvalue of rho placed on the k-th lowest energy level.
PassiveState passive_rearrangement(const Hamiltonian& h, const DensityMatrix& rho);

// True iff rho commutes with H within tol and populations are nonincreasing
// across distinct energy levels; degenerate levels are unconstrained among
// themselves (checked through the eigenvalues of each level block).
bool is_passive(const Hamiltonian& h, const DensityMatrix& rho, double tol);

// Continuous passivity defect: max of inter-level coherence and level-order violation.
double passivity_violation(const Hamiltonian& h, const DensityMatrix& rho);

// U_rho = sum_k |eps_k><r_k| (all phases zero): U rho U^dag is the passive rearrangement.
Matrix extraction_unitary(const Hamiltonian& h, const DensityMatrix& rho);

enum class StateMeasure { HilbertSchmidt, HaarPure };
StateMeasure parse_measure(const std::string& tag);

DensityMatrix random_state(int d, StateMeasure measure, std::mt19937_64& rng);
DensityMatrix random_state(int d, StateMeasure measure, std::uint64_t seed);

// Flat Dirichlet sample over the simplex, sorted nonincreasing.
PassiveState random_passive(int d, std::mt19937_64& rng);
PassiveState random_passive(const Hamiltonian& h, std::uint64_t seed);

// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
Matrix random_unitary(int d, std::mt19937_64& rng);

// Hermitize, clip negative eigenvalues to zero and renormalize; used to project
// perturbed matrices back onto valid states.
DensityMatrix project_to_state(const Matrix& m);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ergokit
