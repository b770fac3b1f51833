// Two-fermion entanglement machinery: canonical (Slater) decomposition of
// antisymmetric amplitudes, one-particle reductions and their entropy, the
// ensemble optimizer for entanglement of formation, separability verdicts,
// entanglement witnesses, and the antisymmetrized two-particle density of a
// determinantal state.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qgreen/numerics.hpp"

namespace qgreen::fermion {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::Seed;

// Lexicographic basis e_i ^ e_j, i < j, of the antisymmetric pair space.
std::size_t pair_dim(std::size_t d);
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t d);
std::pair<std::size_t, std::size_t> pair_unindex(std::size_t idx, std::size_t d);

// w = sum_ij A_ij e_i ^ e_j with A antisymmetric and sum_ij |A_ij|^2 = 1.
// The unit pair-basis vector is psi_(ij) = sqrt(2) A_ij for i < j.
class TwoFermionPureState {
  public:
    explicit TwoFermionPureState(ComplexMatrix amplitude);

    static TwoFermionPureState from_pair_vector(std::size_t d, std::vector<Complex> psi);
    static TwoFermionPureState slater(std::size_t d, std::size_t i, std::size_t j);

    std::size_t dim() const { return amplitude_.rows(); }
    const ComplexMatrix& amplitude() const { return amplitude_; }
    std::vector<Complex> pair_vector() const;

  private:
    ComplexMatrix amplitude_;
};

struct ModePair {
    std::vector<Complex> u;
    std::vector<Complex> v;
};

// Canonical form A = sum_i z_i (u_i v_i^T - v_i u_i^T), coefficients ordered
// by descending |z|, all modes mutually orthonormal. 2 sum |z_i|^2 = 1.
struct SlaterDecomposition {
    std::vector<Complex> coefficients;
    std::vector<ModePair> mode_pairs;
    std::size_t slater_rank = 0;  // count of |z_i| > 1e-10
};

SlaterDecomposition slater_decompose(const TwoFermionPureState& psi);

// rho_1 = A A^dagger; trace 1, eigenvalues {|z_i|^2} doubly degenerate.
ComplexMatrix one_particle_rdm(const TwoFermionPureState& psi);

// von Neumann entropy (nats) of the one-particle reduction; >= ln 2 with
// equality exactly on single Slater determinants.
double pure_state_entanglement(const TwoFermionPureState& psi);

// Hermitian PSD trace-1 operator on the pair space.
class TwoFermionMixedState {
  public:
    TwoFermionMixedState(std::size_t d, ComplexMatrix rho);

    static TwoFermionMixedState from_pure(const TwoFermionPureState& psi);
    static TwoFermionMixedState mixture(
        const std::vector<std::pair<double, TwoFermionPureState>>& components);

    std::size_t dim() const { return d_; }
    std::size_t pair_dimension() const { return rho_.rows(); }
    const ComplexMatrix& rho() const { return rho_; }

  private:
    std::size_t d_;
    ComplexMatrix rho_;
};

struct EnsembleDecomposition {
    std::vector<double> probabilities;
    std::vector<TwoFermionPureState> states;
};

// Rebuild sum_k v_k |psi_k><psi_k| for reconstruction checks.
ComplexMatrix ensemble_density(const EnsembleDecomposition& ensemble, std::size_t d);

struct EofOptions {
    std::size_t ensemble_size = 0;  // 0 selects the default rank^2
    std::size_t restarts = 16;
    std::size_t max_iters = 4000;
    double tol = 1e-8;
    Seed seed{1};
};

struct EofResult {
    double value = 0.0;  // upper bound on E_f, gap controlled by convergence
    EnsembleDecomposition decomposition;
    bool converged = false;
    std::size_t best_restart = 0;
};

// Minimizes sum_k v_k S(rdm(psi_k)) over ensembles generated by column
// isometries applied to the eigen-ensemble (every candidate reconstructs rho
// by construction). Projected gradient descent with step halving and a polar
// retraction; restart 0 is the eigen-ensemble itself, the rest are seeded
// random isometries.
EofResult entanglement_of_formation(const TwoFermionMixedState& rho, const EofOptions& opts = {});

enum class SeparabilityVerdict { separable, entangled, inconclusive };

struct SeparabilityReport {
    SeparabilityVerdict verdict = SeparabilityVerdict::inconclusive;
    double eof_value = 0.0;
    EnsembleDecomposition certificate;
    double max_member_defect = 0.0;  // largest subleading Slater weight among members
    bool converged = false;
};

// separable: optimized value within tol of ln 2 and every certificate member
// has Slater weight above tol only in its leading coefficient. entangled:
// converged value above ln 2 + tol. Otherwise inconclusive.
SeparabilityReport is_fermionic_separable(const TwoFermionMixedState& rho, double tol,
                                          const EofOptions& opts = {});

// W = c I - |psi><psi| with c the largest Slater weight 2 |z_1|^2 of psi.
// c equals the maximal overlap of psi with any Slater determinant; the
// constructor validates that claim by randomized search with power-iteration
// polish and rejects if the search beats c by more than 1e-6.
struct Witness {
    std::size_t d = 0;
    ComplexMatrix w;
    double slater_bound = 0.0;  // c
    double search_max = 0.0;    // best Slater overlap found during validation
};

Witness slater_witness(const TwoFermionPureState& psi, Seed seed = Seed{0x5EED});

double witness_expectation(const Witness& w, const TwoFermionMixedState& rho);
double witness_expectation(const Witness& w, const TwoFermionPureState& psi);

// Seeded generators for sweeps: a normalized Ginibre antisymmetric amplitude,
// and the antisymmetrized pair of two random orthonormal modes.
TwoFermionPureState random_pure_state(Seed seed, std::size_t d);
TwoFermionPureState random_slater_state(Seed seed, std::size_t d);

// Antisymmetrized pair density of a rank-N determinantal state:
// Gamma[(ij),(kl)] = P_ik P_jl - P_il P_jk, normalized to trace 1. The input
// may carry any positive scale; it is rescaled to trace N and must then be
// idempotent within 1e-8.
TwoFermionMixedState hf_two_rdm(const ComplexMatrix& rho1, std::size_t n_particles);

}  // namespace qgreen::fermion
