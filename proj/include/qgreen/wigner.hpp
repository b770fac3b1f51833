// Wigner transforms of one-particle density matrices, the generalized
// phase-space transform of two-time lesser Green functions, the trace
// identity connecting direct and phase-space overlaps, and negativity
// certification of the resulting distributions.
#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "qgreen/numerics.hpp"

namespace qgreen::wigner {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::Grid1D;

// Uniform time grid t_a = t_min + a*dt, right endpoint exclusive.
struct TimeGrid {
    double t_min;
    double t_max;
    std::size_t n_t;

    TimeGrid(double t_min_, double t_max_, std::size_t n_t_);

    double dt() const { return (t_max - t_min) / static_cast<double>(n_t); }
    double t(std::size_t a) const { return t_min + dt() * static_cast<double>(a); }

    bool operator==(const TimeGrid& other) const = default;
};

// Discretized rho(x_i, x_j), Hermitian, positive semidefinite, with the
// trace convention sum_i rho(i,i) dx = 1.
class DensityMatrix1P {
  public:
    // check_psd runs a Cholesky positivity test (min eigenvalue of rho*dx
    // above -1e-9); Hermiticity and normalization are always checked.
    DensityMatrix1P(Grid1D grid, ComplexMatrix rho, bool check_psd = true);

    const Grid1D& grid() const { return grid_; }
    const ComplexMatrix& rho() const { return rho_; }
    double dx() const { return grid_.dx(); }

  private:
    Grid1D grid_;
    ComplexMatrix rho_;
};

// Discretized -iG^<(x_i t_a; x_j t_b) on a space-time grid, stored as the
// full matrix over the combined index (i, a). Row/column flattening is
// flat(i, a) = a*n + i.
class LesserGreenFunction {
  public:
    LesserGreenFunction(Grid1D grid, TimeGrid times, std::vector<Complex> g);

    static LesserGreenFunction zero(Grid1D grid, TimeGrid times);

    const Grid1D& grid() const { return grid_; }
    const TimeGrid& times() const { return times_; }

    std::size_t flat(std::size_t i, std::size_t a) const { return a * grid_.n + i; }
    const Complex& at(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
        return g_[flat(i, a) * dim() + flat(j, b)];
    }
    std::size_t dim() const { return grid_.n * times_.n_t; }
    std::span<const Complex> data() const { return g_; }

    // Equal-time slice as an n x n matrix (times dx it integrates to 1).
    ComplexMatrix equal_time_slice(std::size_t a) const;

  private:
    Grid1D grid_;
    TimeGrid times_;
    std::vector<Complex> g_;
};

// Real W(x, p). Momentum grid p_k = pi*(k - n/2)/(n*dx), ascending.
struct WignerFunction {
    Grid1D grid;                  // position axis
    std::vector<double> p_values;
    std::vector<double> w;        // row-major [j*n + k]
    double imag_residue = 0.0;    // max |Im| discarded when taking the real part

    double value(std::size_t j, std::size_t k) const { return w[j * grid.n + k]; }
    double dp() const { return p_values[1] - p_values[0]; }
};

// Real g^<(k, Omega, R, T) with axes in that order.
struct Gwd {
    Grid1D space;                  // R axis
    TimeGrid times;                // T axis
    std::vector<double> k_values;  // ascending, spacing pi/(n*dx)
    std::vector<double> omega_values;  // ascending, spacing pi/(n_t*dt)
    std::vector<double> data;      // row-major [((k*n_t + w)*n + j)*n_t + b]
    double imag_residue = 0.0;

    std::size_t index(std::size_t k, std::size_t w, std::size_t j, std::size_t b) const {
        return ((k * times.n_t + w) * space.n + j) * times.n_t + b;
    }
    double value(std::size_t k, std::size_t w, std::size_t j, std::size_t b) const {
        return data[index(k, w, j, b)];
    }
    double dk() const { return k_values[1] - k_values[0]; }
    double domega() const { return omega_values[1] - omega_values[0]; }
};

struct NegativityReport {
    double min_value = 0.0;
    std::vector<double> argmin;       // physical coordinates: (x, p) or (k, Omega, R, T)
    std::vector<std::size_t> argmin_index;
    double negative_fraction = 0.0;   // fraction of grid points below -tolerance
    double negative_mass = 0.0;       // quadrature-weighted integral of the part below -tolerance
    double tolerance = 0.0;
};

// W[j][k] = (dx/pi) * sum_m exp(-2 i p_k m dx) rho[j+m][j-m], out-of-range
// offsets contributing zero. The prefactor makes the momentum marginal
// sum_k W dp equal rho(x, x) exactly, hence sum W dx dp = tr(rho).
WignerFunction wigner_transform(const DensityMatrix1P& rho);

// Same offset rule applied to both relative coordinates of the two-time
// kernel, with exponents exp(+i Omega tau - i k r). Spatial out-of-range
// offsets contribute zero; the time axis is treated as periodic, so callers
// must sample a full period of their dynamics (toy_g_lesser defaults do).
Gwd gwd_transform(const LesserGreenFunction& g);

struct OverlapTrace {
    double lhs = 0.0;          // direct discretized trace of the product
    double rhs = 0.0;          // phase-space integral of the Wigner product
    double discrepancy = 0.0;  // |lhs - rhs| / max(|lhs|, 1e-12)
};

// Trace identity, one spatial axis: tr(rho_A rho_B) = 2*pi * sum W_A W_B dx dp.
OverlapTrace overlap_trace(const DensityMatrix1P& a, const DensityMatrix1P& b);
// Space-time version with the periodic time axis: the frozen constant is
// 2*pi^2 (see the derivation note in the implementation).
OverlapTrace overlap_trace(const LesserGreenFunction& a, const LesserGreenFunction& b);

NegativityReport negativity_report(const WignerFunction& w, double tolerance);
NegativityReport negativity_report(const Gwd& g, double tolerance);

// --- oscillator test states ---------------------------------------------

struct FockSpec {
    unsigned level = 0;
};
struct GaussianSpec {
    double center = 0.0;
    double width = 1.0;
};
struct SuperpositionSpec {
    std::vector<std::pair<unsigned, Complex>> amplitudes;  // (orbital, amplitude)
};
using PureSpec = std::variant<FockSpec, GaussianSpec, SuperpositionSpec>;
struct MixtureSpec {
    std::vector<std::pair<double, PureSpec>> components;  // (weight, state)
};
using StateSpec = std::variant<FockSpec, GaussianSpec, SuperpositionSpec, MixtureSpec>;

// Normalized oscillator eigenfunction phi_m on the grid (Hermite recurrence).
std::vector<double> oscillator_orbital(const Grid1D& grid, unsigned m);

// Builds a valid DensityMatrix1P from the spec. Rejects non-normalizable
// specs and states that fail to decay below 1e-10 at the grid edges.
DensityMatrix1P oscillator_state_factory(const Grid1D& grid, const StateSpec& spec);

// rho(x, x') = sum_{m m'} C[m][m'] phi_m(x) conj(phi_m'(x')) for a Hermitian
// PSD orbital-space density C; the smooth-mixed-state source used by the
// trace-identity sweeps.
DensityMatrix1P state_from_orbital_density(const Grid1D& grid, const ComplexMatrix& orbital_rho);

// One particle in a superposition of oscillator orbitals evolving with
// E_m = m + 1/2: g[(i,a),(j,b)] = xi(i,a) conj(xi(j,b)) with
// xi(i,a) = sum_m c_m phi_m(x_i) exp(-i E_m t_a).
LesserGreenFunction toy_g_lesser(const Grid1D& grid, const TimeGrid& times,
                                 const std::vector<std::pair<unsigned, Complex>>& occupation);

}  // namespace qgreen::wigner
