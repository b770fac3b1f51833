// Orbital-basis lesser Green functions at equal times, their antisymmetrized
// two-particle products, the separable-form constructor, and the bridge to
// the fermion module's separability machinery.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qgreen/fermion.hpp"
#include "qgreen/numerics.hpp"
#include "qgreen/wigner.hpp"

namespace qgreen::greenfn {

using numerics::Complex;
using numerics::ComplexMatrix;
using wigner::TimeGrid;

// -iG^<(i t; j t') in a d-orbital basis, carried as the t = 0 occupation
// matrix plus orbital energies; two-time values reconstruct through the
// phases exp(-i e_i t + i e_j t'). Equal-time slices are Hermitian, PSD,
// trace N.
class OneParticleGLesser {
  public:
    OneParticleGLesser(TimeGrid times, std::vector<double> energies, ComplexMatrix occupation,
                       std::size_t n_particles);

    // projector onto the listed orbitals, expressed in a rotated mode basis
    // when modes is given (modes columns are the occupied one-particle states)
    static OneParticleGLesser determinantal(TimeGrid times, std::vector<double> energies,
                                            const std::vector<std::size_t>& occupied);
    static OneParticleGLesser determinantal_modes(TimeGrid times, std::vector<double> energies,
                                                  const ComplexMatrix& modes,
                                                  std::size_t n_occupied);

    std::size_t dim() const { return occupation_.rows(); }
    std::size_t particles() const { return n_particles_; }
    const TimeGrid& times() const { return times_; }
    const std::vector<double>& energies() const { return energies_; }

    ComplexMatrix slice(std::size_t a) const;                    // equal-time, trace N
    ComplexMatrix two_time(std::size_t a, std::size_t b) const;  // phase-reconstructed

  private:
    TimeGrid times_;
    std::vector<double> energies_;
    ComplexMatrix occupation_;
    std::size_t n_particles_;
};

// Equal-time slice; dividing by N yields a trace-1 one-particle density.
ComplexMatrix equal_time_density(const OneParticleGLesser& g, std::size_t a);

struct SeparableComponent {
    double weight = 0.0;
    OneParticleGLesser g1;
    OneParticleGLesser g2;
};

// Per-time Hermitian matrices on the antisymmetric pair space. Physical
// normalization (trace N(N-1) for the HF construction) is kept; conversion
// to trace 1 happens once, inside g2_entanglement_test.
class TwoParticleGLesser {
  public:
    TwoParticleGLesser(std::size_t d, TimeGrid times, std::vector<ComplexMatrix> slices,
                       std::vector<SeparableComponent> components, std::size_t n_particles);

    std::size_t dim() const { return d_; }
    const TimeGrid& times() const { return times_; }
    const ComplexMatrix& slice(std::size_t a) const;
    std::size_t slice_count() const { return slices_.size(); }
    // retained separability certificate; empty for hf_g2 output
    const std::vector<SeparableComponent>& components() const { return components_; }
    std::size_t particles() const { return n_particles_; }  // 0 when not meaningful

  private:
    std::size_t d_;
    TimeGrid times_;
    std::vector<ComplexMatrix> slices_;
    std::vector<SeparableComponent> components_;
    std::size_t n_particles_;
};

// Antisymmetrized pair product a ^ b on the lexicographic pair basis:
// (a^b)[(ij),(kl)] = a_ik b_jl + b_ik a_jl - a_il b_jk - b_il a_jk.
// For a = b this is twice the minor form, giving trace N(N-1) for a rank-N
// projector.
ComplexMatrix pair_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Per-time antisymmetrized square of a determinantal one-particle Green
// function. Rejects inputs whose slices are not rank-N projectors.
TwoParticleGLesser hf_g2(const OneParticleGLesser& g);

// sum_k v_k G1_k ^ G2_k per time slice; weights must sum to 1 within 1e-12.
// The component list is retained as the separability certificate.
TwoParticleGLesser separable_g2_construct(const std::vector<SeparableComponent>& components);

struct G2EntanglementReport {
    fermion::SeparabilityReport separability;
    double slice_trace = 0.0;      // before normalization
    double min_eigenvalue = 0.0;   // of the normalized slice
    std::optional<double> witness_value;  // set when entangled and rank >= 2
};

// Normalizes the chosen slice to trace 1, maps it onto the fermion module,
// and reports the separability verdict, the E_f estimate and, when
// entangled, a witness expectation built from the slice's top eigenstate.
G2EntanglementReport g2_entanglement_test(const TwoParticleGLesser& g2, std::size_t a, double tol,
                                          const fermion::EofOptions& opts = {});

}  // namespace qgreen::greenfn
