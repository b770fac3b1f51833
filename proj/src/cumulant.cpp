#include "qgreen/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace qgreen::cumulant {

using numerics::fft_1d_inplace;
using numerics::FftDirection;
using numerics::kPi;

CumulantVector::CumulantVector(std::vector<double> kappa) : kappa_(std::move(kappa)) {
    const std::size_t n = kappa_.size();
    if (n < 1) {
        throw std::invalid_argument("CumulantVector: at least kappa_1 is required");
    }
    if (n >= 2 && !(kappa_[1] > 0.0)) {
        throw std::invalid_argument(
            "CumulantVector: kappa_2 = " + std::to_string(kappa_[1]) +
            " must be positive; otherwise |phi| is not integrable and the negativity "
            "cannot be demonstrated by quadrature");
    }
    if (n >= 4 && n % 2 == 0 && !(kappa_[n - 1] < 0.0)) {
        throw std::invalid_argument(
            "CumulantVector: kappa_" + std::to_string(n) + " = " + std::to_string(kappa_[n - 1]) +
            " is the highest even cumulant and must be negative; otherwise |phi| diverges "
            "and quadrature cannot demonstrate the truncation negativity");
    }
}

Complex characteristic_function_at(const CumulantVector& kappa, double t) {
    // log phi = sum_j kappa_j (it)^j / j!
    Complex log_phi{0.0, 0.0};
    Complex it_pow{1.0, 0.0};
    const Complex it{0.0, t};
    double factorial = 1.0;
    for (std::size_t j = 1; j <= kappa.order(); ++j) {
        it_pow *= it;
        factorial *= static_cast<double>(j);
        log_phi += kappa.kappa(j) * it_pow / factorial;
    }
    if (log_phi.real() > 700.0) {
        throw std::domain_error("characteristic_function: |phi| overflows at t = " +
                                std::to_string(t));
    }
    return std::exp(log_phi);
}

std::vector<Complex> characteristic_function(const CumulantVector& kappa,
                                             std::span<const double> t_grid) {
    std::vector<Complex> phi(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        phi[i] = characteristic_function_at(kappa, t_grid[i]);
    }
    return phi;
}

namespace {

constexpr double kTailBound = 1e-12;

std::string format_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace

TruncatedDensity truncated_density(const CumulantVector& kappa, const Grid1D& x_grid,
                                   double t_extent) {
    if (!(t_extent > 0.0)) {
        throw std::invalid_argument("truncated_density: t_extent must be positive");
    }
    const std::size_t n = x_grid.n;
    const double dx = x_grid.dx();
    const double t_cover = kPi / dx;
    if (t_extent > t_cover) {
        throw std::invalid_argument("truncated_density: requested t_extent " +
                                    format_sci(t_extent) + " exceeds the grid coverage pi/dx = " +
                                    format_sci(t_cover) + "; refine the x grid");
    }
    const double tail_requested = std::abs(characteristic_function_at(kappa, t_extent));
    if (tail_requested >= kTailBound) {
        throw std::invalid_argument("truncated_density: |phi(t_extent)| = " +
                                    format_sci(tail_requested) +
                                    " fails the tail bound 1e-12; enlarge t_extent");
    }
    const double tail_cover = std::abs(characteristic_function_at(kappa, t_cover));
    if (tail_cover >= kTailBound) {
        throw std::invalid_argument("truncated_density: |phi| at the grid coverage pi/dx is " +
                                    format_sci(tail_cover) + ", above the 1e-12 tail bound");
    }

    // p(x_j) = (dt/2pi) sum_l phi(t_l) exp(-i t_l x_min) exp(-2 pi i l j / n)
    const double dt = 2.0 * kPi / (static_cast<double>(n) * dx);
    std::vector<Complex> f(n);
    for (std::size_t ll = 0; ll < n; ++ll) {
        const double l_signed =
            static_cast<double>(ll < n / 2 ? static_cast<std::ptrdiff_t>(ll)
                                           : static_cast<std::ptrdiff_t>(ll) -
                                                 static_cast<std::ptrdiff_t>(n));
        const double t = l_signed * dt;
        const double phase = -t * x_grid.x_min;
        f[ll] = characteristic_function_at(kappa, t) * Complex{std::cos(phase), std::sin(phase)};
    }
    fft_1d_inplace(f, FftDirection::forward);

    TruncatedDensity out{x_grid, {}, 0.0, 0.0, 0.0, 0.0, t_extent};
    out.p.resize(n);
    const double scale = dt / (2.0 * kPi);
    double min_value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Complex v = scale * f[j];
        out.p[j] = v.real();
        out.imag_residue = std::max(out.imag_residue, std::abs(v.imag()));
        out.total_mass += v.real() * dx;
        if (v.real() < 0.0) out.negative_mass += -v.real() * dx;
        min_value = std::min(min_value, v.real());
    }
    out.min_value = min_value;
    if (out.imag_residue >= 1e-8) {
        throw std::runtime_error("truncated_density: imaginary residue " +
                                 format_sci(out.imag_residue) + " exceeds 1e-8");
    }
    return out;
}

double adaptive_t_extent(const CumulantVector& kappa) {
    constexpr double target = 1e-13;
    double hi = 1.0;
    int guard = 0;
    while (std::abs(characteristic_function_at(kappa, hi)) >= target) {
        hi *= 2.0;
        if (++guard > 60) {
            throw std::runtime_error("adaptive_t_extent: |phi| does not decay below 1e-13");
        }
    }
    double lo = hi / 2.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(characteristic_function_at(kappa, mid)) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

Grid1D default_grid(const CumulantVector& kappa) {
    const double center = kappa.kappa(1);
    const double spread = kappa.order() >= 2 ? std::sqrt(kappa.kappa(2)) : 1.0;
    return Grid1D(center - 12.0 * spread, center + 12.0 * spread, 1024);
}

std::vector<ScanRow> marcinkiewicz_scan(std::span<const double> kappa3_values,
                                        const CumulantVector& base, const Grid1D& x_grid,
                                        double t_extent) {
    if (base.order() != 2) {
        throw std::invalid_argument("marcinkiewicz_scan: base must have exactly kappa_1, kappa_2");
    }
    std::vector<ScanRow> rows;
    rows.reserve(kappa3_values.size());
    for (double k3 : kappa3_values) {
        const CumulantVector kappa({base.kappa(1), base.kappa(2), k3});
        const auto density = truncated_density(kappa, x_grid, t_extent);
        rows.push_back({k3, density.min_value, density.negative_mass});
    }
    std::sort(rows.begin(), rows.end(),
              [](const ScanRow& a, const ScanRow& b) { return a.kappa3 < b.kappa3; });
    return rows;
}

}  // namespace qgreen::cumulant
