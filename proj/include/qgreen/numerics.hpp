// Self-contained numerical kernels shared by every other component:
// radix-2 FFT, Hermitian eigendecomposition, seeded randomness.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qgreen::numerics {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(std::size_t n);

// Uniform spatial grid x_i = x_min + i*dx, i = 0..n-1. The right endpoint
// x_max is exclusive, so dx = (x_max - x_min)/n and the grid is FFT-ready.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t n;

    Grid1D(double x_min_, double x_max_, std::size_t n_);

    double dx() const { return (x_max - x_min) / static_cast<double>(n); }
    double x(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
    std::vector<double> points() const;

    bool operator==(const Grid1D& other) const = default;
};

// Dense row-major complex matrix. Small dimensions only (<= a few hundred);
// everything in this project fits that budget.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Complex> data() { return data_; }
    std::span<const Complex> data() const { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    // max |m - m†| over entries
    double hermiticity_defect() const;
    bool is_hermitian(double tol) const { return rows_ == cols_ && hermiticity_defect() <= tol; }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scalar, ComplexMatrix m);

enum class FftDirection { forward, inverse };

// In-place radix-2 FFT. Forward is the unnormalized DFT
// X_k = sum_j x_j exp(-2 pi i j k / n); inverse carries the 1/n factor.
// Throws std::invalid_argument unless the length is a power of two.
void fft_1d_inplace(std::span<Complex> data, FftDirection direction);
std::vector<Complex> fft_1d(std::vector<Complex> data, FftDirection direction);

struct EigResult {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // unitary, column i pairs with eigenvalues[i]
};

// Eigendecomposition of a Hermitian matrix via cyclic Jacobi sweeps on the
// embedded real-symmetric form [[Re m, -Im m], [Im m, Re m]].
// Rejects inputs whose hermiticity defect exceeds 1e-10.
EigResult hermitian_eig(const ComplexMatrix& m);

// True iff m + shift*I admits a Cholesky factorization, i.e. the Hermitian
// m has no eigenvalue below roughly -shift. O(n^3/3), much cheaper than a
// full eigendecomposition for large grids.
bool hermitian_psd_within(const ComplexMatrix& m, double shift);

struct Seed {
    std::uint64_t value = 0;
};

// Deterministic generator: xoshiro256++ state seeded through SplitMix64.
// All randomness in the project flows through explicit Seeds handed to this
// class; nothing reads ambient entropy. normal() is a Box-Muller transform
// consuming two uniforms per call, so streams are reproducible bit-for-bit
// on any platform.
class Rng {
  public:
    explicit Rng(Seed seed);

    std::uint64_t next_u64();
    double uniform01();  // [0, 1), 53-bit resolution
    double normal();     // standard normal
    Complex complex_normal();

    // Independent stream derived from (seed, index) via SplitMix64.
    Rng substream(std::uint64_t index) const;

    Seed seed() const { return seed_; }

  private:
    Seed seed_;
    std::array<std::uint64_t, 4> state_{};
};

enum class StateKind { pure, mixed };

// pure:  dim x 1 unit-norm complex vector.
// mixed: dim x dim density matrix G G† / tr(G G†) with Ginibre G.
ComplexMatrix random_state(Seed seed, std::size_t dim, StateKind kind);

// Haar-style unitary from Gram-Schmidt on a Ginibre matrix.
ComplexMatrix random_unitary(Seed seed, std::size_t dim);

}  // namespace qgreen::numerics
