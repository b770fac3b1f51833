#include "qgreen/greenfn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace qgreen::greenfn {

using fermion::pair_dim;
using fermion::pair_unindex;

OneParticleGLesser::OneParticleGLesser(TimeGrid times, std::vector<double> energies,
                                       ComplexMatrix occupation, std::size_t n_particles)
    : times_(times),
      energies_(std::move(energies)),
      occupation_(std::move(occupation)),
      n_particles_(n_particles) {
    const std::size_t d = occupation_.rows();
    if (d < 2 || occupation_.cols() != d) {
        throw std::invalid_argument("OneParticleGLesser: occupation must be square, d >= 2");
    }
    if (energies_.size() != d) {
        throw std::invalid_argument("OneParticleGLesser: need one energy per orbital");
    }
    if (occupation_.hermiticity_defect() > 1e-9) {
        throw std::invalid_argument("OneParticleGLesser: occupation not Hermitian within 1e-9");
    }
    if (!numerics::hermitian_psd_within(occupation_, 1e-9)) {
        throw std::invalid_argument("OneParticleGLesser: occupation not PSD within 1e-9");
    }
    const double tr = occupation_.trace().real();
    if (std::abs(tr - static_cast<double>(n_particles_)) > 1e-8) {
        throw std::invalid_argument("OneParticleGLesser: trace " + std::to_string(tr) +
                                    " does not equal the particle number " +
                                    std::to_string(n_particles_));
    }
}

OneParticleGLesser OneParticleGLesser::determinantal(TimeGrid times, std::vector<double> energies,
                                                     const std::vector<std::size_t>& occupied) {
    const std::size_t d = energies.size();
    ComplexMatrix occ(d, d);
    for (std::size_t o : occupied) {
        if (o >= d) throw std::invalid_argument("determinantal: orbital index out of range");
        occ(o, o) = 1.0;
    }
    return OneParticleGLesser(times, std::move(energies), std::move(occ), occupied.size());
}

OneParticleGLesser OneParticleGLesser::determinantal_modes(TimeGrid times,
                                                           std::vector<double> energies,
                                                           const ComplexMatrix& modes,
                                                           std::size_t n_occupied) {
    const std::size_t d = energies.size();
    if (modes.rows() != d || modes.cols() < n_occupied) {
        throw std::invalid_argument("determinantal_modes: mode matrix shape mismatch");
    }
    ComplexMatrix occ(d, d);
    for (std::size_t c = 0; c < n_occupied; ++c)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                occ(i, j) += modes(i, c) * std::conj(modes(j, c));
    // enforce exact Hermiticity against roundoff
    for (std::size_t i = 0; i < d; ++i) {
        occ(i, i) = Complex{occ(i, i).real(), 0.0};
        for (std::size_t j = i + 1; j < d; ++j) {
            const Complex avg = 0.5 * (occ(i, j) + std::conj(occ(j, i)));
            occ(i, j) = avg;
            occ(j, i) = std::conj(avg);
        }
    }
    return OneParticleGLesser(times, std::move(energies), std::move(occ), n_occupied);
}

ComplexMatrix OneParticleGLesser::two_time(std::size_t a, std::size_t b) const {
    if (a >= times_.n_t || b >= times_.n_t) {
        throw std::invalid_argument("OneParticleGLesser: time index out of range");
    }
    const std::size_t d = dim();
    const double ta = times_.t(a);
    const double tb = times_.t(b);
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double phase = -energies_[i] * ta + energies_[j] * tb;
            out(i, j) = occupation_(i, j) * Complex{std::cos(phase), std::sin(phase)};
        }
    }
    return out;
}

ComplexMatrix OneParticleGLesser::slice(std::size_t a) const { return two_time(a, a); }

ComplexMatrix equal_time_density(const OneParticleGLesser& g, std::size_t a) {
    return g.slice(a);
}

TwoParticleGLesser::TwoParticleGLesser(std::size_t d, TimeGrid times,
                                       std::vector<ComplexMatrix> slices,
                                       std::vector<SeparableComponent> components,
                                       std::size_t n_particles)
    : d_(d),
      times_(times),
      slices_(std::move(slices)),
      components_(std::move(components)),
      n_particles_(n_particles) {
    if (slices_.size() != times_.n_t) {
        throw std::invalid_argument("TwoParticleGLesser: one slice per time point required");
    }
    const std::size_t dim = pair_dim(d_);
    for (const auto& s : slices_) {
        if (s.rows() != dim || s.cols() != dim) {
            throw std::invalid_argument("TwoParticleGLesser: slice does not match pair space");
        }
        if (s.hermiticity_defect() > 1e-9) {
            throw std::invalid_argument("TwoParticleGLesser: slice not Hermitian within 1e-9");
        }
    }
}

const ComplexMatrix& TwoParticleGLesser::slice(std::size_t a) const {
    if (a >= slices_.size()) {
        throw std::invalid_argument("TwoParticleGLesser: time index out of range");
    }
    return slices_[a];
}

ComplexMatrix pair_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t d = a.rows();
    if (a.cols() != d || b.rows() != d || b.cols() != d) {
        throw std::invalid_argument("pair_product: operands must be square and equal-sized");
    }
    const std::size_t dim = pair_dim(d);
    ComplexMatrix out(dim, dim);
    for (std::size_t row = 0; row < dim; ++row) {
        const auto [i, j] = pair_unindex(row, d);
        for (std::size_t col = 0; col < dim; ++col) {
            const auto [k, l] = pair_unindex(col, d);
            out(row, col) = a(i, k) * b(j, l) + b(i, k) * a(j, l) - a(i, l) * b(j, k) -
                            b(i, l) * a(j, k);
        }
    }
    return out;
}

TwoParticleGLesser hf_g2(const OneParticleGLesser& g) {
    const std::size_t n = g.particles();
    std::vector<ComplexMatrix> slices;
    slices.reserve(g.times().n_t);
    for (std::size_t a = 0; a < g.times().n_t; ++a) {
        const ComplexMatrix s = g.slice(a);
        const ComplexMatrix s2 = s * s;
        double defect = 0.0;
        for (std::size_t i = 0; i < s.rows(); ++i)
            for (std::size_t j = 0; j < s.cols(); ++j)
                defect = std::max(defect, std::abs(s2(i, j) - s(i, j)));
        if (defect > 1e-8) {
            throw std::invalid_argument(
                "hf_g2: slice " + std::to_string(a) +
                " is not an idempotent rank-N projector (defect " + std::to_string(defect) + ")");
        }
        slices.push_back(pair_product(s, s));  // trace N(N-1)
    }
    return TwoParticleGLesser(g.dim(), g.times(), std::move(slices), {}, n);
}

TwoParticleGLesser separable_g2_construct(const std::vector<SeparableComponent>& components) {
    if (components.empty()) {
        throw std::invalid_argument("separable_g2_construct: empty component list");
    }
    const std::size_t d = components.front().g1.dim();
    const TimeGrid times = components.front().g1.times();
    double total = 0.0;
    for (const auto& comp : components) {
        if (comp.weight <= 0.0) {
            throw std::invalid_argument("separable_g2_construct: weights must be positive");
        }
        if (comp.g1.dim() != d || comp.g2.dim() != d) {
            throw std::invalid_argument("separable_g2_construct: components differ in dimension");
        }
        if (!(comp.g1.times() == times) || !(comp.g2.times() == times)) {
            throw std::invalid_argument("separable_g2_construct: components differ in time grid");
        }
        total += comp.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("separable_g2_construct: weights sum to " +
                                    std::to_string(total) + ", expected 1 within 1e-12");
    }

    const std::size_t dim = pair_dim(d);
    std::vector<ComplexMatrix> slices;
    slices.reserve(times.n_t);
    for (std::size_t a = 0; a < times.n_t; ++a) {
        ComplexMatrix acc(dim, dim);
        for (const auto& comp : components) {
            ComplexMatrix term = pair_product(comp.g1.slice(a), comp.g2.slice(a));
            term *= Complex{comp.weight, 0.0};
            acc += term;
        }
        slices.push_back(std::move(acc));
    }
    return TwoParticleGLesser(d, times, std::move(slices), components, 0);
}

G2EntanglementReport g2_entanglement_test(const TwoParticleGLesser& g2, std::size_t a, double tol,
                                          const fermion::EofOptions& opts) {
    const ComplexMatrix& raw = g2.slice(a);
    const double trace = raw.trace().real();
    if (trace <= 0.0) {
        throw std::invalid_argument("g2_entanglement_test: slice has nonpositive trace");
    }
    ComplexMatrix normalized = raw;
    normalized *= Complex{1.0 / trace, 0.0};
    // exact Hermitian cleanup before the strict mixed-state validation
    const std::size_t dim = normalized.rows();
    for (std::size_t r = 0; r < dim; ++r) {
        normalized(r, r) = Complex{normalized(r, r).real(), 0.0};
        for (std::size_t c = r + 1; c < dim; ++c) {
            const Complex avg = 0.5 * (normalized(r, c) + std::conj(normalized(c, r)));
            normalized(r, c) = avg;
            normalized(c, r) = std::conj(avg);
        }
    }

    const auto eig = numerics::hermitian_eig(normalized);
    const double min_eig = eig.eigenvalues.front();
    if (min_eig < -tol) {
        throw std::invalid_argument("g2_entanglement_test: slice not PSD within tolerance, "
                                    "min eigenvalue " +
                                    std::to_string(min_eig));
    }
    // clip the tiny negative tail so the strict type validation passes
    ComplexMatrix cleaned(dim, dim);
    double clipped_trace = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        const double q = std::max(eig.eigenvalues[c], 0.0);
        clipped_trace += q;
    }
    for (std::size_t c = 0; c < dim; ++c) {
        const double q = std::max(eig.eigenvalues[c], 0.0) / clipped_trace;
        if (q == 0.0) continue;
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t s = 0; s < dim; ++s)
                cleaned(r, s) += q * eig.eigenvectors(r, c) * std::conj(eig.eigenvectors(s, c));
    }
    for (std::size_t r = 0; r < dim; ++r) {
        cleaned(r, r) = Complex{cleaned(r, r).real(), 0.0};
        for (std::size_t c = r + 1; c < dim; ++c) {
            const Complex avg = 0.5 * (cleaned(r, c) + std::conj(cleaned(c, r)));
            cleaned(r, c) = avg;
            cleaned(c, r) = std::conj(avg);
        }
    }

    const fermion::TwoFermionMixedState rho(g2.dim(), std::move(cleaned));
    G2EntanglementReport report;
    report.slice_trace = trace;
    report.min_eigenvalue = min_eig;
    report.separability = fermion::is_fermionic_separable(rho, tol, opts);

    if (report.separability.verdict == fermion::SeparabilityVerdict::entangled) {
        // witness from the dominant eigenstate of the slice, when witnessable
        std::vector<Complex> top(dim);
        for (std::size_t r = 0; r < dim; ++r) top[r] = eig.eigenvectors(r, dim - 1);
        const auto top_state = fermion::TwoFermionPureState::from_pair_vector(g2.dim(), top);
        if (fermion::slater_decompose(top_state).slater_rank >= 2) {
            const auto witness = fermion::slater_witness(top_state);
            report.witness_value = fermion::witness_expectation(witness, rho);
        }
    }
    return report;
}

}  // namespace qgreen::greenfn
