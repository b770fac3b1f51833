// Densities reconstructed from truncated cumulant generating functions.
// Truncation beyond second order forces regions of negative probability;
// this module quantifies that mechanism on one real variable.
#pragma once

#include <vector>

#include "qgreen/numerics.hpp"

namespace qgreen::cumulant {

using numerics::Complex;
using numerics::Grid1D;

// kappa_1 .. kappa_n with the integrability restrictions: kappa_2 > 0 when
// n >= 2, and the highest cumulant negative when it is even and >= 4.
// Divergent-|phi| vectors are rejected because quadrature cannot demonstrate
// anything about them, even though the underlying theorem still covers them.
class CumulantVector {
  public:
    explicit CumulantVector(std::vector<double> kappa);

    std::size_t order() const { return kappa_.size(); }
    // 1-based: kappa(1) is the mean cumulant
    double kappa(std::size_t j) const { return kappa_.at(j - 1); }
    const std::vector<double>& coefficients() const { return kappa_; }

  private:
    std::vector<double> kappa_;
};

// phi(t) = exp(sum_j kappa_j (it)^j / j!), evaluated pointwise.
std::vector<Complex> characteristic_function(const CumulantVector& kappa,
                                             std::span<const double> t_grid);
Complex characteristic_function_at(const CumulantVector& kappa, double t);

struct TruncatedDensity {
    Grid1D x_grid;
    std::vector<double> p;
    double negative_mass = 0.0;   // sum of max(0, -p) dx
    double total_mass = 0.0;      // sum of p dx; phi(0) = 1 forces 1
    double min_value = 0.0;
    double imag_residue = 0.0;    // max |Im| discarded when taking the real part
    double t_extent = 0.0;        // integration half-width actually used
};

// p(x) = (1/2pi) int phi(t) exp(-i t x) dt on the FFT grid conjugate to
// x_grid (t spacing 2 pi / (n dx), coverage pi/dx). t_extent is the coverage
// the caller requires: it must fit inside pi/dx and the tails |phi| at both
// t_extent and pi/dx must be below 1e-12, otherwise the call is rejected
// with the measured tail magnitude.
TruncatedDensity truncated_density(const CumulantVector& kappa, const Grid1D& x_grid,
                                   double t_extent);

// Smallest t with |phi| below 1e-13, found by doubling then bisection.
double adaptive_t_extent(const CumulantVector& kappa);

// x in [kappa_1 - 12 sqrt(kappa_2), kappa_1 + 12 sqrt(kappa_2)], n = 1024.
Grid1D default_grid(const CumulantVector& kappa);

struct ScanRow {
    double kappa3 = 0.0;
    double min_value = 0.0;
    double negative_mass = 0.0;
};

// One truncated_density per kappa_3 appended to the degree-2 base; rows
// sorted by kappa_3.
std::vector<ScanRow> marcinkiewicz_scan(std::span<const double> kappa3_values,
                                        const CumulantVector& base, const Grid1D& x_grid,
                                        double t_extent);

}  // namespace qgreen::cumulant
