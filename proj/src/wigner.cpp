#include "qgreen/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace qgreen::wigner {

using numerics::fft_1d_inplace;
using numerics::FftDirection;
using numerics::is_power_of_two;
using numerics::kPi;

namespace {

// FFT array index <-> signed frequency/offset index
inline std::ptrdiff_t signed_index(std::size_t idx, std::size_t size) {
    return idx < size / 2 ? static_cast<std::ptrdiff_t>(idx)
                          : static_cast<std::ptrdiff_t>(idx) - static_cast<std::ptrdiff_t>(size);
}

inline std::size_t wrap(std::ptrdiff_t idx, std::size_t size) {
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(size);
    std::ptrdiff_t r = idx % s;
    if (r < 0) r += s;
    return static_cast<std::size_t>(r);
}

// Unnormalized FFT with exp(+2 pi i j k / n) kernel.
void fft_plus_unnormalized(std::span<Complex> data) {
    fft_1d_inplace(data, FftDirection::inverse);
    const double n = static_cast<double>(data.size());
    for (Complex& z : data) z *= n;
}

}  // namespace

TimeGrid::TimeGrid(double t_min_, double t_max_, std::size_t n_t_)
    : t_min(t_min_), t_max(t_max_), n_t(n_t_) {
    if (!(t_max > t_min)) {
        throw std::invalid_argument("TimeGrid: t_max must exceed t_min");
    }
    if (n_t < 4 || !is_power_of_two(n_t)) {
        throw std::invalid_argument("TimeGrid: n_t must be a power of two, n_t >= 4 (got " +
                                    std::to_string(n_t) + ")");
    }
}

DensityMatrix1P::DensityMatrix1P(Grid1D grid, ComplexMatrix rho, bool check_psd)
    : grid_(grid), rho_(std::move(rho)) {
    if (rho_.rows() != grid_.n || rho_.cols() != grid_.n) {
        throw std::invalid_argument("DensityMatrix1P: matrix shape does not match grid");
    }
    const double defect = rho_.hermiticity_defect();
    if (defect > 1e-10) {
        throw std::invalid_argument("DensityMatrix1P: not Hermitian within 1e-10 (defect " +
                                    std::to_string(defect) + ")");
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < grid_.n; ++i) tr += rho_(i, i).real();
    tr *= dx();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw std::invalid_argument("DensityMatrix1P: trace " + std::to_string(tr) +
                                    " is not 1 within 1e-8");
    }
    if (check_psd) {
        ComplexMatrix scaled = rho_;
        scaled *= Complex{dx(), 0.0};
        if (!numerics::hermitian_psd_within(scaled, 1e-9)) {
            throw std::invalid_argument("DensityMatrix1P: not positive semidefinite within 1e-9");
        }
    }
}

LesserGreenFunction::LesserGreenFunction(Grid1D grid, TimeGrid times, std::vector<Complex> g)
    : grid_(grid), times_(times), g_(std::move(g)) {
    const std::size_t N = dim();
    if (g_.size() != N * N) {
        throw std::invalid_argument("LesserGreenFunction: array size does not match grids");
    }
    double herm_defect = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = r; c < N; ++c) {
            herm_defect = std::max(herm_defect, std::abs(g_[r * N + c] - std::conj(g_[c * N + r])));
        }
    }
    if (herm_defect > 1e-10) {
        throw std::invalid_argument("LesserGreenFunction: combined-index Hermiticity defect " +
                                    std::to_string(herm_defect) + " exceeds 1e-10");
    }
    for (std::size_t a = 0; a < times_.n_t; ++a) {
        for (std::size_t i = 0; i < grid_.n; ++i) {
            const Complex d = at(i, a, i, a);
            if (std::abs(d.imag()) > 1e-10 || d.real() < -1e-10) {
                throw std::invalid_argument(
                    "LesserGreenFunction: equal-time diagonal must be real and nonnegative");
            }
        }
    }
}

LesserGreenFunction LesserGreenFunction::zero(Grid1D grid, TimeGrid times) {
    const std::size_t N = grid.n * times.n_t;
    return LesserGreenFunction(grid, times, std::vector<Complex>(N * N, Complex{0.0, 0.0}));
}

ComplexMatrix LesserGreenFunction::equal_time_slice(std::size_t a) const {
    if (a >= times_.n_t) {
        throw std::invalid_argument("equal_time_slice: time index out of range");
    }
    ComplexMatrix slice(grid_.n, grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
        for (std::size_t j = 0; j < grid_.n; ++j) slice(i, j) = at(i, a, j, a);
    return slice;
}

WignerFunction wigner_transform(const DensityMatrix1P& rho) {
    const std::size_t n = rho.grid().n;
    const double dx = rho.dx();

    WignerFunction out{rho.grid(), {}, {}, 0.0};
    out.p_values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.p_values[k] = kPi * (static_cast<double>(k) - static_cast<double>(n) / 2.0) /
                          (static_cast<double>(n) * dx);
    }
    out.w.assign(n * n, 0.0);

    const double prefactor = dx / kPi;
    std::vector<Complex> f(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t mm = 0; mm < n; ++mm) {
            const std::ptrdiff_t m = signed_index(mm, n);
            const std::ptrdiff_t u = static_cast<std::ptrdiff_t>(j) + m;
            const std::ptrdiff_t v = static_cast<std::ptrdiff_t>(j) - m;
            if (u >= 0 && u < static_cast<std::ptrdiff_t>(n) && v >= 0 &&
                v < static_cast<std::ptrdiff_t>(n)) {
                f[mm] = rho.rho()(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
            } else {
                f[mm] = Complex{0.0, 0.0};
            }
        }
        fft_1d_inplace(f, FftDirection::forward);
        for (std::size_t kk = 0; kk < n; ++kk) {
            const std::size_t k_out = (kk + n / 2) % n;
            out.w[j * n + k_out] = prefactor * f[kk].real();
            out.imag_residue = std::max(out.imag_residue, prefactor * std::abs(f[kk].imag()));
        }
    }
    return out;
}

Gwd gwd_transform(const LesserGreenFunction& g) {
    const std::size_t n = g.grid().n;
    const std::size_t nt = g.times().n_t;
    const double dx = g.grid().dx();
    const double dt = g.times().dt();

    Gwd out{g.grid(), g.times(), {}, {}, {}, 0.0};
    out.k_values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.k_values[k] = kPi * (static_cast<double>(k) - static_cast<double>(n) / 2.0) /
                          (static_cast<double>(n) * dx);
    }
    out.omega_values.resize(nt);
    for (std::size_t w = 0; w < nt; ++w) {
        out.omega_values[w] = kPi * (static_cast<double>(w) - static_cast<double>(nt) / 2.0) /
                              (static_cast<double>(nt) * dt);
    }
    out.data.assign(n * nt * n * nt, 0.0);

    const double prefactor = (dx / kPi) * (dt / kPi);
    std::vector<Complex> f(n * nt);  // [mm*nt + ss]
    std::vector<Complex> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t b = 0; b < nt; ++b) {
            for (std::size_t mm = 0; mm < n; ++mm) {
                const std::ptrdiff_t m = signed_index(mm, n);
                const std::ptrdiff_t u = static_cast<std::ptrdiff_t>(j) + m;
                const std::ptrdiff_t v = static_cast<std::ptrdiff_t>(j) - m;
                if (u < 0 || u >= static_cast<std::ptrdiff_t>(n) || v < 0 ||
                    v >= static_cast<std::ptrdiff_t>(n)) {
                    std::fill(f.begin() + static_cast<std::ptrdiff_t>(mm * nt),
                              f.begin() + static_cast<std::ptrdiff_t>((mm + 1) * nt),
                              Complex{0.0, 0.0});
                    continue;
                }
                for (std::size_t ss = 0; ss < nt; ++ss) {
                    const std::ptrdiff_t s = signed_index(ss, nt);
                    const std::size_t a1 = wrap(static_cast<std::ptrdiff_t>(b) + s, nt);
                    const std::size_t a2 = wrap(static_cast<std::ptrdiff_t>(b) - s, nt);
                    f[mm * nt + ss] =
                        g.at(static_cast<std::size_t>(u), a1, static_cast<std::size_t>(v), a2);
                }
            }
            // +i Omega tau along the time offset, -i k r along the spatial one
            for (std::size_t mm = 0; mm < n; ++mm) {
                fft_plus_unnormalized(std::span<Complex>(f).subspan(mm * nt, nt));
            }
            for (std::size_t ss = 0; ss < nt; ++ss) {
                for (std::size_t mm = 0; mm < n; ++mm) col[mm] = f[mm * nt + ss];
                fft_1d_inplace(col, FftDirection::forward);
                for (std::size_t mm = 0; mm < n; ++mm) f[mm * nt + ss] = col[mm];
            }
            for (std::size_t kk = 0; kk < n; ++kk) {
                const std::size_t k_out = (kk + n / 2) % n;
                for (std::size_t ww = 0; ww < nt; ++ww) {
                    const std::size_t w_out = (ww + nt / 2) % nt;
                    const Complex val = f[kk * nt + ww];
                    out.data[out.index(k_out, w_out, j, b)] = prefactor * val.real();
                    out.imag_residue =
                        std::max(out.imag_residue, prefactor * std::abs(val.imag()));
                }
            }
        }
    }
    return out;
}

// Convention constants for the two overlap identities, frozen against the
// direct-trace oracle. Derivation for the spatial axis: with
//   W[j][k] = (dx/pi) sum_m rho[j+m][j-m] exp(-2 pi i k m / n),
// the k-sum of W_A[j][k] W_B[j][k] collapses to n * delta_{m+m',0} (the
// wrap term m = m' = -n/2 always references an out-of-range pair and
// vanishes), and (j, m) -> (j+m, j-m) is a bijection onto index pairs of
// even sum. For kernels that decay at the edges and carry no content at the
// grid's Nyquist frequency, the even-sum half equals half the full sum, so
//   sum_{jk} W_A W_B dx dp = (1 / 2 pi) tr(rho_A rho_B) dx^2-discretized.
// A periodic time axis changes the count: (b, s) -> (b+s, b-s) mod n_t is
// two-to-one onto even-sum time pairs, which halves the constant for that
// axis. Hence 2*pi for one spatial axis and (2*pi) * pi for space-time.
constexpr double kOverlapSpace = 2.0 * kPi;
constexpr double kOverlapSpaceTime = 2.0 * kPi * kPi;

OverlapTrace overlap_trace(const DensityMatrix1P& a, const DensityMatrix1P& b) {
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("overlap_trace: operands live on different grids");
    }
    const std::size_t n = a.grid().n;
    const double dx = a.dx();

    Complex lhs_c{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lhs_c += a.rho()(i, j) * b.rho()(j, i);
    const double lhs = lhs_c.real() * dx * dx;

    const WignerFunction wa = wigner_transform(a);
    const WignerFunction wb = wigner_transform(b);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < wa.w.size(); ++idx) sum += wa.w[idx] * wb.w[idx];
    const double rhs = kOverlapSpace * sum * dx * wa.dp();

    OverlapTrace result{lhs, rhs, 0.0};
    result.discrepancy = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-12);
    return result;
}

OverlapTrace overlap_trace(const LesserGreenFunction& a, const LesserGreenFunction& b) {
    if (!(a.grid() == b.grid()) || !(a.times() == b.times())) {
        throw std::invalid_argument("overlap_trace: operands live on different grids");
    }
    const std::size_t N = a.dim();
    const double cell = a.grid().dx() * a.times().dt();

    Complex lhs_c{0.0, 0.0};
    const auto ga = a.data();
    const auto gb = b.data();
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) lhs_c += ga[r * N + c] * gb[c * N + r];
    const double lhs = lhs_c.real() * cell * cell;

    const Gwd wa = gwd_transform(a);
    const Gwd wb = gwd_transform(b);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < wa.data.size(); ++idx) sum += wa.data[idx] * wb.data[idx];
    const double rhs =
        kOverlapSpaceTime * sum * wa.dk() * wa.domega() * a.grid().dx() * a.times().dt();

    OverlapTrace result{lhs, rhs, 0.0};
    result.discrepancy = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-12);
    return result;
}

namespace {

NegativityReport scan_negativity(std::span<const double> values, double cell_weight,
                                 double tolerance) {
    NegativityReport report;
    report.tolerance = tolerance;
    if (values.empty()) return report;
    std::size_t argmin = 0;
    double min_value = values[0];
    std::size_t below = 0;
    double mass = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < min_value) {
            min_value = values[i];
            argmin = i;
        }
        if (values[i] < -tolerance) {
            ++below;
            mass += -values[i] * cell_weight;
        }
    }
    report.min_value = min_value;
    report.negative_fraction = static_cast<double>(below) / static_cast<double>(values.size());
    report.negative_mass = mass;
    report.argmin_index = {argmin};
    return report;
}

}  // namespace

NegativityReport negativity_report(const WignerFunction& w, double tolerance) {
    NegativityReport report = scan_negativity(w.w, w.grid.dx() * w.dp(), tolerance);
    const std::size_t flat = report.argmin_index[0];
    const std::size_t n = w.grid.n;
    const std::size_t j = flat / n;
    const std::size_t k = flat % n;
    report.argmin_index = {j, k};
    report.argmin = {w.grid.x(j), w.p_values[k]};
    return report;
}

NegativityReport negativity_report(const Gwd& g, double tolerance) {
    NegativityReport report =
        scan_negativity(g.data, g.dk() * g.domega() * g.space.dx() * g.times.dt(), tolerance);
    std::size_t flat = report.argmin_index[0];
    const std::size_t nt = g.times.n_t;
    const std::size_t n = g.space.n;
    const std::size_t b = flat % nt;
    flat /= nt;
    const std::size_t j = flat % n;
    flat /= n;
    const std::size_t w = flat % nt;
    const std::size_t k = flat / nt;
    report.argmin_index = {k, w, j, b};
    report.argmin = {g.k_values[k], g.omega_values[w], g.space.x(j), g.times.t(b)};
    return report;
}

std::vector<double> oscillator_orbital(const Grid1D& grid, unsigned m) {
    const std::size_t n = grid.n;
    std::vector<double> prev(n), curr(n), next(n);
    const double norm0 = std::pow(kPi, -0.25);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        curr[i] = norm0 * std::exp(-0.5 * x * x);
    }
    if (m == 0) return curr;
    for (std::size_t i = 0; i < n; ++i) prev[i] = 0.0;
    for (unsigned level = 0; level < m; ++level) {
        const double a = std::sqrt(2.0 / (level + 1.0));
        const double b = std::sqrt(static_cast<double>(level) / (level + 1.0));
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = a * grid.x(i) * curr[i] - b * prev[i];
        }
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    return curr;
}

namespace {

constexpr double kEdgeDecay = 1e-10;

void check_edge_decay(const std::vector<Complex>& psi, const char* what) {
    const double edge = std::max(std::abs(psi.front()), std::abs(psi.back()));
    if (edge >= kEdgeDecay) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", edge);
        throw std::invalid_argument(std::string(what) + ": amplitude " + buf +
                                    " at the grid edge exceeds 1e-10; widen the grid");
    }
}

std::vector<Complex> pure_amplitude(const Grid1D& grid, const PureSpec& spec) {
    const std::size_t n = grid.n;
    std::vector<Complex> psi(n, Complex{0.0, 0.0});
    if (const auto* fock = std::get_if<FockSpec>(&spec)) {
        const auto orbital = oscillator_orbital(grid, fock->level);
        for (std::size_t i = 0; i < n; ++i) psi[i] = orbital[i];
    } else if (const auto* gauss = std::get_if<GaussianSpec>(&spec)) {
        if (!(gauss->width > 0.0)) {
            throw std::invalid_argument("oscillator_state_factory: gaussian width must be positive");
        }
        const double norm = std::pow(kPi * gauss->width * gauss->width, -0.25);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (grid.x(i) - gauss->center) / gauss->width;
            psi[i] = norm * std::exp(-0.5 * u * u);
        }
    } else {
        const auto& super = std::get<SuperpositionSpec>(spec);
        if (super.amplitudes.empty()) {
            throw std::invalid_argument("oscillator_state_factory: empty superposition");
        }
        for (const auto& [level, amp] : super.amplitudes) {
            const auto orbital = oscillator_orbital(grid, level);
            for (std::size_t i = 0; i < n; ++i) psi[i] += amp * orbital[i];
        }
    }
    double norm2 = 0.0;
    for (const Complex& z : psi) norm2 += std::norm(z);
    norm2 *= grid.dx();
    if (norm2 < 1e-12) {
        throw std::invalid_argument("oscillator_state_factory: state is not normalizable");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& z : psi) z *= inv;
    check_edge_decay(psi, "oscillator_state_factory");
    return psi;
}

ComplexMatrix projector_of(const std::vector<Complex>& psi) {
    const std::size_t n = psi.size();
    ComplexMatrix rho(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
    return rho;
}

DensityMatrix1P finalize_density(const Grid1D& grid, ComplexMatrix rho) {
    double tr = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) tr += rho(i, i).real();
    tr *= grid.dx();
    rho *= Complex{1.0 / tr, 0.0};
    return DensityMatrix1P(grid, std::move(rho));
}

}  // namespace

DensityMatrix1P oscillator_state_factory(const Grid1D& grid, const StateSpec& spec) {
    if (const auto* mixture = std::get_if<MixtureSpec>(&spec)) {
        if (mixture->components.empty()) {
            throw std::invalid_argument("oscillator_state_factory: empty mixture");
        }
        double total = 0.0;
        for (const auto& [weight, pure] : mixture->components) {
            if (weight < 0.0) {
                throw std::invalid_argument("oscillator_state_factory: mixture weights must be >= 0");
            }
            total += weight;
        }
        if (total <= 0.0) {
            throw std::invalid_argument("oscillator_state_factory: mixture weights sum to zero");
        }
        ComplexMatrix rho(grid.n, grid.n);
        for (const auto& [weight, pure] : mixture->components) {
            if (weight == 0.0) continue;
            const auto psi = pure_amplitude(grid, pure);
            ComplexMatrix proj = projector_of(psi);
            proj *= Complex{weight / total, 0.0};
            rho += proj;
        }
        return finalize_density(grid, std::move(rho));
    }
    if (const auto* fock = std::get_if<FockSpec>(&spec)) {
        return finalize_density(grid, projector_of(pure_amplitude(grid, PureSpec{*fock})));
    }
    if (const auto* gauss = std::get_if<GaussianSpec>(&spec)) {
        return finalize_density(grid, projector_of(pure_amplitude(grid, PureSpec{*gauss})));
    }
    const auto& super = std::get<SuperpositionSpec>(spec);
    return finalize_density(grid, projector_of(pure_amplitude(grid, PureSpec{super})));
}

DensityMatrix1P state_from_orbital_density(const Grid1D& grid, const ComplexMatrix& orbital_rho) {
    if (orbital_rho.rows() != orbital_rho.cols()) {
        throw std::invalid_argument("state_from_orbital_density: matrix must be square");
    }
    if (orbital_rho.hermiticity_defect() > 1e-10) {
        throw std::invalid_argument("state_from_orbital_density: orbital density not Hermitian");
    }
    if (!numerics::hermitian_psd_within(orbital_rho, 1e-9)) {
        throw std::invalid_argument("state_from_orbital_density: orbital density not PSD");
    }
    const std::size_t m_count = orbital_rho.rows();
    const std::size_t n = grid.n;

    std::vector<std::vector<Complex>> orbitals(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto phi = oscillator_orbital(grid, static_cast<unsigned>(m));
        orbitals[m].assign(phi.begin(), phi.end());
        check_edge_decay(orbitals[m], "state_from_orbital_density");
    }

    ComplexMatrix rho(n, n);
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t mp = 0; mp < m_count; ++mp) {
            const Complex c = orbital_rho(m, mp);
            if (std::abs(c) < 1e-16) continue;
            for (std::size_t i = 0; i < n; ++i) {
                const Complex ci = c * orbitals[m][i];
                for (std::size_t j = 0; j < n; ++j) {
                    rho(i, j) += ci * std::conj(orbitals[mp][j]);
                }
            }
        }
    }
    return finalize_density(grid, std::move(rho));
}

LesserGreenFunction toy_g_lesser(const Grid1D& grid, const TimeGrid& times,
                                 const std::vector<std::pair<unsigned, Complex>>& occupation) {
    if (occupation.empty()) {
        throw std::invalid_argument("toy_g_lesser: empty occupation list");
    }
    const std::size_t n = grid.n;
    const std::size_t nt = times.n_t;

    std::vector<std::vector<Complex>> orbitals;
    std::vector<double> energies;
    std::vector<Complex> amps;
    for (const auto& [level, amp] : occupation) {
        const auto phi = oscillator_orbital(grid, level);
        orbitals.emplace_back(phi.begin(), phi.end());
        check_edge_decay(orbitals.back(), "toy_g_lesser");
        energies.push_back(static_cast<double>(level) + 0.5);
        amps.push_back(amp);
    }

    // Normalize against the grid Gram matrix so the equal-time trace is 1.
    Complex gram{0.0, 0.0};
    for (std::size_t p = 0; p < amps.size(); ++p) {
        for (std::size_t q = 0; q < amps.size(); ++q) {
            Complex overlap{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i)
                overlap += orbitals[p][i] * std::conj(orbitals[q][i]);
            gram += std::conj(amps[q]) * amps[p] * overlap * grid.dx();
        }
    }
    if (gram.real() < 1e-12) {
        throw std::invalid_argument("toy_g_lesser: amplitudes are not normalizable");
    }
    const double inv = 1.0 / std::sqrt(gram.real());

    const std::size_t N = n * nt;
    std::vector<Complex> xi(N);
    for (std::size_t a = 0; a < nt; ++a) {
        const double t = times.t(a);
        for (std::size_t i = 0; i < n; ++i) {
            Complex val{0.0, 0.0};
            for (std::size_t p = 0; p < amps.size(); ++p) {
                const double phase = -energies[p] * t;
                val += amps[p] * orbitals[p][i] * Complex{std::cos(phase), std::sin(phase)};
            }
            xi[a * n + i] = inv * val;
        }
    }

    std::vector<Complex> g(N * N);
    for (std::size_t r = 0; r < N; ++r) {
        const Complex xr = xi[r];
        for (std::size_t c = 0; c < N; ++c) g[r * N + c] = xr * std::conj(xi[c]);
    }
    return LesserGreenFunction(grid, times, std::move(g));
}

}  // namespace qgreen::wigner
