#include "qgreen/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qgreen::fermion {

using numerics::EigResult;
using numerics::hermitian_eig;
using numerics::Rng;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLn2 = 0.69314718055994530942;

double norm2_of(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& z : v) s += std::norm(z);
    return s;
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace

std::size_t pair_dim(std::size_t d) { return d * (d - 1) / 2; }

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t d) {
    if (i >= j || j >= d) {
        throw std::invalid_argument("pair_index: need i < j < d");
    }
    return i * d - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> pair_unindex(std::size_t idx, std::size_t d) {
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const std::size_t row = d - 1 - i;
        if (idx < row) return {i, idx + i + 1};
        idx -= row;
    }
    throw std::invalid_argument("pair_unindex: index out of range");
}

TwoFermionPureState::TwoFermionPureState(ComplexMatrix amplitude)
    : amplitude_(std::move(amplitude)) {
    const std::size_t d = amplitude_.rows();
    if (d < 2 || amplitude_.cols() != d) {
        throw std::invalid_argument("TwoFermionPureState: amplitude must be square, d >= 2");
    }
    double antisym_defect = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j)
            antisym_defect =
                std::max(antisym_defect, std::abs(amplitude_(i, j) + amplitude_(j, i)));
    if (antisym_defect > 1e-12) {
        throw std::invalid_argument("TwoFermionPureState: antisymmetry defect " +
                                    std::to_string(antisym_defect) + " exceeds 1e-12");
    }
    double norm = 0.0;
    for (const Complex& z : amplitude_.data()) norm += std::norm(z);
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument("TwoFermionPureState: sum |A_ij|^2 = " + std::to_string(norm) +
                                    " is not 1 within 1e-10");
    }
}

TwoFermionPureState TwoFermionPureState::from_pair_vector(std::size_t d,
                                                          std::vector<Complex> psi) {
    if (psi.size() != pair_dim(d)) {
        throw std::invalid_argument("from_pair_vector: vector length does not match pair space");
    }
    const double norm = std::sqrt(norm2_of(psi));
    if (norm < 1e-12) {
        throw std::invalid_argument("from_pair_vector: zero vector");
    }
    ComplexMatrix a(d, d);
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const auto [i, j] = pair_unindex(idx, d);
        const Complex value = psi[idx] / norm * kInvSqrt2;
        a(i, j) = value;
        a(j, i) = -value;
    }
    return TwoFermionPureState(std::move(a));
}

TwoFermionPureState TwoFermionPureState::slater(std::size_t d, std::size_t i, std::size_t j) {
    std::vector<Complex> psi(pair_dim(d), Complex{0.0, 0.0});
    psi[pair_index(i, j, d)] = 1.0;
    return from_pair_vector(d, std::move(psi));
}

std::vector<Complex> TwoFermionPureState::pair_vector() const {
    const std::size_t d = dim();
    std::vector<Complex> psi(pair_dim(d));
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const auto [i, j] = pair_unindex(idx, d);
        psi[idx] = amplitude_(i, j) * std::sqrt(2.0);
    }
    return psi;
}

SlaterDecomposition slater_decompose(const TwoFermionPureState& psi) {
    const std::size_t d = psi.dim();
    const ComplexMatrix& a = psi.amplitude();
    const ComplexMatrix m = a * a.adjoint();
    const EigResult eig = hermitian_eig(m);

    const double lam_max = std::max(eig.eigenvalues.back(), 0.0);
    // below this an eigenvalue is indistinguishable from solver noise
    const double lam_floor = 1e-13 * std::max(lam_max, 1e-30);
    const double gap_tol = 1e-10 * std::max(1.0, lam_max);

    struct Block {
        Complex z;
        ModePair modes;
    };
    std::vector<Block> blocks;

    // walk eigenvalue groups from the top of the spectrum; chaining adjacent
    // gaps keeps degenerate partners together even at a tolerance boundary
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(d) - 1;
    while (hi >= 0) {
        std::ptrdiff_t lo = hi;
        while (lo > 0 && eig.eigenvalues[lo] - eig.eigenvalues[lo - 1] <= gap_tol) {
            --lo;
        }
        const double lam = eig.eigenvalues[hi];
        const std::size_t group = static_cast<std::size_t>(hi - lo + 1);
        if (lam > lam_floor) {
            if (group % 2 != 0) {
                throw std::runtime_error("slater_decompose: odd degeneracy group");
            }
            std::vector<std::vector<Complex>> basis(group, std::vector<Complex>(d));
            for (std::size_t c = 0; c < group; ++c)
                for (std::size_t i = 0; i < d; ++i)
                    basis[c][i] = eig.eigenvectors(i, static_cast<std::size_t>(lo) + c);

            while (!basis.empty()) {
                const std::vector<Complex> u = basis.front();
                // the partner direction: A conj(u) lies in the group span, orthogonal to u
                std::vector<Complex> v(d, Complex{0.0, 0.0});
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) v[i] += a(i, j) * std::conj(u[j]);
                const Complex uv = dot(u, v);
                for (std::size_t i = 0; i < d; ++i) v[i] -= uv * u[i];
                const double vnorm = std::sqrt(norm2_of(v));
                if (vnorm < 1e-8 * std::sqrt(lam)) {
                    throw std::runtime_error("slater_decompose: degenerate partner extraction");
                }
                for (Complex& z : v) z /= vnorm;

                Complex z{0.0, 0.0};
                for (std::size_t i = 0; i < d; ++i) {
                    Complex av{0.0, 0.0};
                    for (std::size_t j = 0; j < d; ++j) av += a(i, j) * std::conj(v[j]);
                    z += std::conj(u[i]) * av;
                }
                blocks.push_back({z, ModePair{u, v}});

                // deflate {u, v} out of the group basis, pivoting on the
                // largest residual
                std::vector<std::vector<Complex>> cand(basis.begin() + 1, basis.end());
                std::vector<std::vector<Complex>> next;
                const std::size_t want = cand.size() - 1;
                const std::vector<std::vector<Complex>> kept_dirs{u, v};
                while (next.size() < want) {
                    double best_norm2 = -1.0;
                    std::size_t best = 0;
                    std::vector<Complex> best_vec;
                    for (std::size_t c = 0; c < cand.size(); ++c) {
                        std::vector<Complex> r = cand[c];
                        for (const auto& dir : kept_dirs) {
                            const Complex ov = dot(dir, r);
                            for (std::size_t i = 0; i < d; ++i) r[i] -= ov * dir[i];
                        }
                        for (const auto& dir : next) {
                            const Complex ov = dot(dir, r);
                            for (std::size_t i = 0; i < d; ++i) r[i] -= ov * dir[i];
                        }
                        const double n2 = norm2_of(r);
                        if (n2 > best_norm2) {
                            best_norm2 = n2;
                            best = c;
                            best_vec = std::move(r);
                        }
                    }
                    if (best_norm2 < 1e-12) {
                        throw std::runtime_error("slater_decompose: group deflation failure");
                    }
                    const double inv = 1.0 / std::sqrt(best_norm2);
                    for (Complex& z2 : best_vec) z2 *= inv;
                    next.push_back(std::move(best_vec));
                    cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(best));
                }
                basis = std::move(next);
            }
        }
        hi = lo - 1;
    }

    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const Block& x, const Block& y) { return std::abs(x.z) > std::abs(y.z); });

    SlaterDecomposition out;
    for (auto& b : blocks) {
        if (std::abs(b.z) > 1e-10) ++out.slater_rank;
        out.coefficients.push_back(b.z);
        out.mode_pairs.push_back(std::move(b.modes));
    }
    return out;
}

ComplexMatrix one_particle_rdm(const TwoFermionPureState& psi) {
    return psi.amplitude() * psi.amplitude().adjoint();
}

double pure_state_entanglement(const TwoFermionPureState& psi) {
    const auto eig = hermitian_eig(one_particle_rdm(psi));
    double s = 0.0;
    for (double q : eig.eigenvalues) {
        if (q > 1e-15) s -= q * std::log(q);
    }
    return s;
}

TwoFermionMixedState::TwoFermionMixedState(std::size_t d, ComplexMatrix rho)
    : d_(d), rho_(std::move(rho)) {
    const std::size_t dim = pair_dim(d);
    if (d < 2 || rho_.rows() != dim || rho_.cols() != dim) {
        throw std::invalid_argument("TwoFermionMixedState: matrix does not match pair space");
    }
    if (rho_.hermiticity_defect() > 1e-10) {
        throw std::invalid_argument("TwoFermionMixedState: not Hermitian within 1e-10");
    }
    if (std::abs(rho_.trace().real() - 1.0) > 1e-10) {
        throw std::invalid_argument("TwoFermionMixedState: trace is not 1 within 1e-10");
    }
    if (!numerics::hermitian_psd_within(rho_, 1e-9)) {
        throw std::invalid_argument("TwoFermionMixedState: not PSD within 1e-9");
    }
}

TwoFermionMixedState TwoFermionMixedState::from_pure(const TwoFermionPureState& psi) {
    const auto vec = psi.pair_vector();
    const std::size_t dim = vec.size();
    ComplexMatrix rho(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) rho(r, c) = vec[r] * std::conj(vec[c]);
    return TwoFermionMixedState(psi.dim(), std::move(rho));
}

TwoFermionMixedState TwoFermionMixedState::mixture(
    const std::vector<std::pair<double, TwoFermionPureState>>& components) {
    if (components.empty()) {
        throw std::invalid_argument("TwoFermionMixedState::mixture: empty component list");
    }
    const std::size_t d = components.front().second.dim();
    const std::size_t dim = pair_dim(d);
    double total = 0.0;
    for (const auto& [w, psi] : components) {
        if (w < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
        if (psi.dim() != d) throw std::invalid_argument("mixture components differ in dimension");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("mixture weights sum to zero");
    ComplexMatrix rho(dim, dim);
    for (const auto& [w, psi] : components) {
        const auto vec = psi.pair_vector();
        const double weight = w / total;
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) rho(r, c) += weight * vec[r] * std::conj(vec[c]);
    }
    return TwoFermionMixedState(d, std::move(rho));
}

ComplexMatrix ensemble_density(const EnsembleDecomposition& ensemble, std::size_t d) {
    const std::size_t dim = pair_dim(d);
    ComplexMatrix rho(dim, dim);
    for (std::size_t k = 0; k < ensemble.states.size(); ++k) {
        const auto vec = ensemble.states[k].pair_vector();
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                rho(r, c) += ensemble.probabilities[k] * vec[r] * std::conj(vec[c]);
    }
    return rho;
}

namespace {

ComplexMatrix pair_vector_to_amplitude(std::span<const Complex> psi, std::size_t d) {
    ComplexMatrix a(d, d);
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
        const auto [i, j] = pair_unindex(idx, d);
        a(i, j) = psi[idx] * kInvSqrt2;
        a(j, i) = -a(i, j);
    }
    return a;
}

struct MemberEval {
    double contribution = 0.0;  // v * S(rho/v) for the unnormalized member
    double v = 0.0;
    std::vector<Complex> grad;  // wrt conj(psi_tilde)
};

MemberEval evaluate_member(std::span<const Complex> psi_tilde, std::size_t d, bool want_grad) {
    MemberEval out;
    out.v = norm2_of(psi_tilde);
    if (out.v < 1e-16) {
        if (want_grad) out.grad.assign(psi_tilde.size(), Complex{0.0, 0.0});
        return out;
    }
    const ComplexMatrix a = pair_vector_to_amplitude(psi_tilde, d);
    const ComplexMatrix rho = a * a.adjoint();
    const EigResult eig = hermitian_eig(rho);

    const double log_v = std::log(out.v);
    for (double q : eig.eigenvalues) {
        if (q > 1e-18) out.contribution -= q * std::log(q);
    }
    out.contribution += out.v * log_v;

    if (!want_grad) return out;

    // d(v S(rho/v)) = -tr[(ln rho - ln v) d rho]; with rho = A A^dagger the
    // gradient wrt conj(A) is -(ln rho - ln v) A. Eigenvalues near zero only
    // enter multiplied by their eigenprojection of A, which scales as
    // sqrt(q), so clamping the log is stable.
    ComplexMatrix l(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        const double q = std::max(eig.eigenvalues[c], 1e-30);
        const double weight = std::log(q) - log_v;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                l(i, j) += weight * eig.eigenvectors(i, c) * std::conj(eig.eigenvectors(j, c));
    }
    const ComplexMatrix ga = l * a;
    out.grad.resize(psi_tilde.size());
    for (std::size_t idx = 0; idx < psi_tilde.size(); ++idx) {
        const auto [i, j] = pair_unindex(idx, d);
        out.grad[idx] = -(ga(i, j) - ga(j, i)) * kInvSqrt2;
    }
    return out;
}

// T <- T (T^dagger T)^(-1/2); false when the step collapsed columns.
bool polar_project(ComplexMatrix& t) {
    const ComplexMatrix gram = t.adjoint() * t;
    const EigResult eig = hermitian_eig(gram);
    if (eig.eigenvalues.front() < 1e-14) return false;
    const std::size_t r = gram.rows();
    ComplexMatrix inv_sqrt(r, r);
    for (std::size_t c = 0; c < r; ++c) {
        const double w = 1.0 / std::sqrt(eig.eigenvalues[c]);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                inv_sqrt(i, j) += w * eig.eigenvectors(i, c) * std::conj(eig.eigenvectors(j, c));
    }
    t = t * inv_sqrt;
    return true;
}

ComplexMatrix random_isometry(std::size_t m, std::size_t r, Rng& rng) {
    ComplexMatrix t(m, r);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) t(i, j) = rng.complex_normal();
    for (std::size_t c = 0; c < r; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            Complex ov{0.0, 0.0};
            for (std::size_t i = 0; i < m; ++i) ov += std::conj(t(i, prev)) * t(i, c);
            for (std::size_t i = 0; i < m; ++i) t(i, c) -= ov * t(i, prev);
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) n2 += std::norm(t(i, c));
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < m; ++i) t(i, c) *= inv;
    }
    return t;
}

struct Objective {
    std::size_t d = 0;
    std::size_t big_m = 0;
    std::size_t rank = 0;
    std::vector<std::vector<Complex>> roots;  // chi_r = sqrt(mu_r) phi_r

    std::vector<Complex> member(const ComplexMatrix& t, std::size_t k) const {
        std::vector<Complex> psi(roots.front().size(), Complex{0.0, 0.0});
        for (std::size_t r = 0; r < rank; ++r) {
            const Complex w = t(k, r);
            if (w == Complex{0.0, 0.0}) continue;
            for (std::size_t x = 0; x < psi.size(); ++x) psi[x] += w * roots[r][x];
        }
        return psi;
    }

    double value(const ComplexMatrix& t) const {
        double f = 0.0;
        for (std::size_t k = 0; k < big_m; ++k) {
            f += evaluate_member(member(t, k), d, false).contribution;
        }
        return f;
    }

    double value_and_grad(const ComplexMatrix& t, ComplexMatrix& grad) const {
        grad = ComplexMatrix(big_m, rank);
        double f = 0.0;
        for (std::size_t k = 0; k < big_m; ++k) {
            const auto psi = member(t, k);
            const MemberEval eval = evaluate_member(psi, d, true);
            f += eval.contribution;
            for (std::size_t r = 0; r < rank; ++r) {
                grad(k, r) = dot(roots[r], eval.grad);
            }
        }
        return f;
    }
};

}  // namespace

EofResult entanglement_of_formation(const TwoFermionMixedState& rho, const EofOptions& opts) {
    const std::size_t d = rho.dim();
    const EigResult eig = hermitian_eig(rho.rho());

    Objective obj;
    obj.d = d;
    for (std::size_t c = 0; c < eig.eigenvalues.size(); ++c) {
        const double mu = eig.eigenvalues[c];
        if (mu > 1e-12) {
            std::vector<Complex> chi(rho.pair_dimension());
            const double scale = std::sqrt(mu);
            for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = scale * eig.eigenvectors(i, c);
            obj.roots.push_back(std::move(chi));
        }
    }
    obj.rank = obj.roots.size();
    if (obj.rank == 0) {
        throw std::invalid_argument("entanglement_of_formation: state has no spectral weight");
    }
    obj.big_m = opts.ensemble_size == 0 ? obj.rank * obj.rank : opts.ensemble_size;
    if (obj.big_m < obj.rank) {
        throw std::invalid_argument("entanglement_of_formation: ensemble size " +
                                    std::to_string(obj.big_m) + " is below rank " +
                                    std::to_string(obj.rank));
    }

    Rng base(opts.seed);
    EofResult best;
    best.value = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < std::max<std::size_t>(opts.restarts, 1); ++restart) {
        ComplexMatrix t(obj.big_m, obj.rank);
        if (restart == 0) {
            for (std::size_t r = 0; r < obj.rank; ++r) t(r, r) = 1.0;  // eigen-ensemble
        } else {
            Rng stream = base.substream(restart);
            t = random_isometry(obj.big_m, obj.rank, stream);
        }

        ComplexMatrix grad;
        double f = obj.value_and_grad(t, grad);
        double step = 1.0;
        bool converged = false;
        for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
            bool accepted = false;
            double f_new = f;
            ComplexMatrix t_new;
            while (step > 1e-13) {
                t_new = t;
                for (std::size_t k = 0; k < obj.big_m; ++k)
                    for (std::size_t r = 0; r < obj.rank; ++r) t_new(k, r) -= step * grad(k, r);
                if (polar_project(t_new)) {
                    f_new = obj.value(t_new);
                    if (f_new < f) {
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted) {
                converged = true;  // no descent at numerical precision
                break;
            }
            const double decrease = f - f_new;
            t = std::move(t_new);
            f = obj.value_and_grad(t, grad);
            step = std::min(step * 2.0, 1.0);
            if (decrease < opts.tol) {
                converged = true;
                break;
            }
        }

        if (f < best.value) {
            best.value = f;
            best.converged = converged;
            best.best_restart = restart;
            best.decomposition = EnsembleDecomposition{};
            for (std::size_t k = 0; k < obj.big_m; ++k) {
                auto psi = obj.member(t, k);
                const double v = norm2_of(psi);
                if (v < 1e-12) continue;
                best.decomposition.probabilities.push_back(v);
                best.decomposition.states.push_back(
                    TwoFermionPureState::from_pair_vector(d, std::move(psi)));
            }
        }
    }
    return best;
}

SeparabilityReport is_fermionic_separable(const TwoFermionMixedState& rho, double tol,
                                          const EofOptions& opts) {
    const EofResult eof = entanglement_of_formation(rho, opts);
    SeparabilityReport report;
    report.eof_value = eof.value;
    report.certificate = eof.decomposition;
    report.converged = eof.converged;

    for (const auto& member : eof.decomposition.states) {
        const auto dec = slater_decompose(member);
        double subleading = 0.0;
        for (std::size_t i = 1; i < dec.coefficients.size(); ++i)
            subleading += 2.0 * std::norm(dec.coefficients[i]);
        report.max_member_defect = std::max(report.max_member_defect, subleading);
    }

    if (!eof.converged) {
        report.verdict = SeparabilityVerdict::inconclusive;
    } else if (eof.value <= kLn2 + tol) {
        report.verdict = report.max_member_defect <= tol ? SeparabilityVerdict::separable
                                                         : SeparabilityVerdict::inconclusive;
    } else {
        report.verdict = SeparabilityVerdict::entangled;
    }
    return report;
}

namespace {

// |<S_uv | psi>|^2 = 2 |conj(u)^T A conj(v)|^2 for orthonormal u, v.
double slater_overlap(const ComplexMatrix& a, std::span<const Complex> u,
                      std::span<const Complex> v) {
    Complex s{0.0, 0.0};
    const std::size_t d = a.rows();
    for (std::size_t i = 0; i < d; ++i) {
        Complex row{0.0, 0.0};
        for (std::size_t j = 0; j < d; ++j) row += a(i, j) * std::conj(v[j]);
        s += std::conj(u[i]) * row;
    }
    return 2.0 * std::norm(s);
}

void orthonormalize_pair(std::vector<Complex>& u, std::vector<Complex>& v) {
    const double nu = std::sqrt(norm2_of(u));
    for (Complex& z : u) z /= nu;
    const Complex ov = dot(u, v);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] -= ov * u[i];
    const double nv = std::sqrt(norm2_of(v));
    for (Complex& z : v) z /= nv;
}

}  // namespace

Witness slater_witness(const TwoFermionPureState& psi, Seed seed) {
    const auto dec = slater_decompose(psi);
    if (dec.slater_rank < 2) {
        throw std::invalid_argument("slater_witness: state has Slater rank 1, nothing to witness");
    }
    const double c = 2.0 * std::norm(dec.coefficients.front());

    const std::size_t d = psi.dim();
    const ComplexMatrix& a = psi.amplitude();
    Rng rng(seed);
    double search_max = 0.0;

    const auto polish = [&](std::vector<Complex> u, std::vector<Complex> v) {
        orthonormalize_pair(u, v);
        for (int iter = 0; iter < 40; ++iter) {
            // alternating ascent toward the top singular pair:
            // v <- A^T conj(u), u <- A conj(v); the composition is a power
            // step of A A^dagger
            std::vector<Complex> vn(d, Complex{0.0, 0.0});
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t i = 0; i < d; ++i) vn[j] += a(i, j) * std::conj(u[i]);
            std::vector<Complex> un(d, Complex{0.0, 0.0});
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) un[i] += a(i, j) * std::conj(vn[j]);
            const double nu = std::sqrt(norm2_of(un));
            const double nv = std::sqrt(norm2_of(vn));
            if (nu < 1e-30 || nv < 1e-30) break;
            for (Complex& z : un) z /= nu;
            for (Complex& z : vn) z /= nv;
            u = un;
            v = vn;
        }
        orthonormalize_pair(u, v);
        search_max = std::max(search_max, slater_overlap(a, u, v));
    };

    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<Complex> u(d), v(d);
        for (std::size_t i = 0; i < d; ++i) {
            u[i] = rng.complex_normal();
            v[i] = rng.complex_normal();
        }
        orthonormalize_pair(u, v);
        search_max = std::max(search_max, slater_overlap(a, u, v));
        if (trial < 8) polish(u, v);
    }

    if (search_max > c + 1e-6) {
        throw std::runtime_error("slater_witness: randomized search found Slater overlap " +
                                 std::to_string(search_max) + " above the bound " +
                                 std::to_string(c));
    }

    const auto vec = psi.pair_vector();
    const std::size_t dim = vec.size();
    ComplexMatrix w(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t col = 0; col < dim; ++col) w(r, col) = -vec[r] * std::conj(vec[col]);
        w(r, r) += c;
    }
    return Witness{d, std::move(w), c, search_max};
}

double witness_expectation(const Witness& w, const TwoFermionMixedState& rho) {
    if (rho.pair_dimension() != w.w.rows()) {
        throw std::invalid_argument("witness_expectation: dimension mismatch");
    }
    Complex tr{0.0, 0.0};
    const std::size_t dim = w.w.rows();
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) tr += w.w(r, c) * rho.rho()(c, r);
    return tr.real();
}

double witness_expectation(const Witness& w, const TwoFermionPureState& psi) {
    return witness_expectation(w, TwoFermionMixedState::from_pure(psi));
}

TwoFermionPureState random_pure_state(Seed seed, std::size_t d) {
    Rng rng(seed);
    ComplexMatrix a(d, d);
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const Complex z = rng.complex_normal();
            a(i, j) = z;
            a(j, i) = -z;
            norm += 2.0 * std::norm(z);
        }
    }
    a *= Complex{1.0 / std::sqrt(norm), 0.0};
    return TwoFermionPureState(std::move(a));
}

TwoFermionPureState random_slater_state(Seed seed, std::size_t d) {
    Rng rng(seed);
    std::vector<Complex> u(d), v(d);
    for (std::size_t i = 0; i < d; ++i) {
        u[i] = rng.complex_normal();
        v[i] = rng.complex_normal();
    }
    orthonormalize_pair(u, v);
    ComplexMatrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            a(i, j) = (u[i] * v[j] - v[i] * u[j]) * kInvSqrt2;
    return TwoFermionPureState(std::move(a));
}

TwoFermionMixedState hf_two_rdm(const ComplexMatrix& rho1, std::size_t n_particles) {
    const std::size_t d = rho1.rows();
    if (rho1.cols() != d) {
        throw std::invalid_argument("hf_two_rdm: matrix must be square");
    }
    if (n_particles < 2 || n_particles > d) {
        throw std::invalid_argument("hf_two_rdm: need 2 <= N <= d");
    }
    if (rho1.hermiticity_defect() > 1e-10) {
        throw std::invalid_argument("hf_two_rdm: input not Hermitian within 1e-10");
    }
    const double tr = rho1.trace().real();
    if (tr <= 0.0) {
        throw std::invalid_argument("hf_two_rdm: input has nonpositive trace");
    }
    // accept any positive multiple of the projector (trace N or trace 1)
    ComplexMatrix p = rho1;
    p *= Complex{static_cast<double>(n_particles) / tr, 0.0};
    const ComplexMatrix p2 = p * p;
    double idem_defect = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            idem_defect = std::max(idem_defect, std::abs(p2(i, j) - p(i, j)));
    if (idem_defect > 1e-8) {
        throw std::invalid_argument(
            "hf_two_rdm: input is not an idempotent rank-N projector within 1e-8 "
            "(only determinantal states are in scope); defect " +
            std::to_string(idem_defect));
    }

    const std::size_t dim = pair_dim(d);
    ComplexMatrix gamma(dim, dim);
    for (std::size_t row = 0; row < dim; ++row) {
        const auto [i, j] = pair_unindex(row, d);
        for (std::size_t col = 0; col < dim; ++col) {
            const auto [k, l] = pair_unindex(col, d);
            gamma(row, col) = p(i, k) * p(j, l) - p(i, l) * p(j, k);
        }
    }
    const double norm = gamma.trace().real();
    gamma *= Complex{1.0 / norm, 0.0};
    // clean roundoff so the strict mixed-state validation passes
    for (std::size_t r = 0; r < dim; ++r) {
        gamma(r, r) = Complex{gamma(r, r).real(), 0.0};
        for (std::size_t c = r + 1; c < dim; ++c) {
            const Complex avg = 0.5 * (gamma(r, c) + std::conj(gamma(c, r)));
            gamma(r, c) = avg;
            gamma(c, r) = std::conj(avg);
        }
    }
    return TwoFermionMixedState(d, std::move(gamma));
}

}  // namespace qgreen::fermion
