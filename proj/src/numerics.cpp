#include "qgreen/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace qgreen::numerics {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double x_min_, double x_max_, std::size_t n_) : x_min(x_min_), x_max(x_max_), n(n_) {
    if (!(x_max > x_min)) {
        throw std::invalid_argument("Grid1D: x_max must exceed x_min");
    }
    if (n < 8 || !is_power_of_two(n)) {
        throw std::invalid_argument("Grid1D: n must be a power of two, n >= 8 (got " +
                                    std::to_string(n) + ")");
    }
}

std::vector<double> Grid1D::points() const {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = x(i);
    return pts;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_ * cols_; ++i) out.data_[i] = std::conj(data_[i]);
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::hermiticity_defect() const {
    if (rows_ != cols_) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("ComplexMatrix: shape mismatch in +=");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("ComplexMatrix: shape mismatch in -=");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (Complex& z : data_) z *= scalar;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("ComplexMatrix: shape mismatch in product");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex scalar, ComplexMatrix m) { return m *= scalar; }

namespace {

void bit_reverse_permute(std::span<Complex> data) {
    const std::size_t n = data.size();
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
}

}  // namespace

void fft_1d_inplace(std::span<Complex> data, FftDirection direction) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("fft_1d: length must be a power of two (got " +
                                    std::to_string(n) + ")");
    }
    if (n == 1) return;
    bit_reverse_permute(data);
    const double sign = direction == FftDirection::forward ? -1.0 : 1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * 2.0 * kPi / static_cast<double>(len);
        const Complex wlen{std::cos(angle), std::sin(angle)};
        for (std::size_t i = 0; i < n; i += len) {
            Complex w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = data[i + k];
                const Complex v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (direction == FftDirection::inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (Complex& z : data) z *= inv;
    }
}

std::vector<Complex> fft_1d(std::vector<Complex> data, FftDirection direction) {
    fft_1d_inplace(data, direction);
    return data;
}

namespace {

// Cyclic Jacobi on a dense real symmetric matrix; V accumulates rotations.
void real_symmetric_jacobi(std::vector<double>& a, std::vector<double>& v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = (i == j) ? 1.0 : 0.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
    if (scale == 0.0) return;
    const double stop = 1e-15 * scale;

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a[p * n + q]));
        if (off <= stop) return;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= stop * 1e-2) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
}

}  // namespace

EigResult hermitian_eig(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    }
    if (m.hermiticity_defect() > 1e-10) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian within 1e-10");
    }
    const std::size_t d = m.rows();
    const std::size_t N = 2 * d;

    // Embed H = A + iB as the real symmetric [[A, -B], [B, A]]. Its spectrum
    // is that of H with every eigenvalue doubled; a real eigenvector (u; v)
    // maps to the complex eigenvector u + iv.
    std::vector<double> a(N * N, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Complex hij = 0.5 * (m(i, j) + std::conj(m(j, i)));  // symmetrize roundoff
            a[i * N + j] = hij.real();
            a[i * N + (j + d)] = -hij.imag();
            a[(i + d) * N + j] = hij.imag();
            a[(i + d) * N + (j + d)] = hij.real();
        }
    }
    std::vector<double> v(N * N, 0.0);
    real_symmetric_jacobi(a, v, N);

    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> lam(N);
    for (std::size_t i = 0; i < N; ++i) lam[i] = a[i * N + i];
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lam[x] < lam[y]; });

    double lam_max = 0.0;
    for (double l : lam) lam_max = std::max(lam_max, std::abs(l));
    const double gap_tol = 1e-12 * std::max(1.0, lam_max);

    // Each embedded eigenvalue appears twice; extract one complex eigenvector
    // per pair by greedy Gram-Schmidt inside each degeneracy group. The
    // partner (v; -u) of a kept vector maps to i*(u+iv) and projects away.
    std::vector<std::vector<Complex>> kept;
    kept.reserve(d);
    std::size_t g0 = 0;
    while (g0 < N) {
        std::size_t g1 = g0 + 1;
        while (g1 < N && lam[order[g1]] - lam[order[g1 - 1]] <= gap_tol) ++g1;
        const std::size_t group = g1 - g0;
        const std::size_t want = group / 2;
        if (group % 2 != 0) {
            throw std::runtime_error("hermitian_eig: internal pairing failure");
        }

        std::vector<std::vector<Complex>> cand(group, std::vector<Complex>(d));
        for (std::size_t c = 0; c < group; ++c) {
            const std::size_t col = order[g0 + c];
            for (std::size_t i = 0; i < d; ++i)
                cand[c][i] = Complex{v[i * N + col], v[(i + d) * N + col]};
        }

        std::vector<std::vector<Complex>> accepted;
        while (accepted.size() < want) {
            // project out accepted directions, then take the largest residual
            double best_norm2 = -1.0;
            std::size_t best = 0;
            std::vector<Complex> best_vec;
            for (std::size_t c = 0; c < cand.size(); ++c) {
                std::vector<Complex> r = cand[c];
                for (const auto& u : accepted) {
                    Complex overlap{0.0, 0.0};
                    for (std::size_t i = 0; i < d; ++i) overlap += std::conj(u[i]) * r[i];
                    for (std::size_t i = 0; i < d; ++i) r[i] -= overlap * u[i];
                }
                double n2 = 0.0;
                for (const Complex& z : r) n2 += std::norm(z);
                if (n2 > best_norm2) {
                    best_norm2 = n2;
                    best = c;
                    best_vec = std::move(r);
                }
            }
            if (best_norm2 <= 1e-12) {
                throw std::runtime_error("hermitian_eig: internal extraction failure");
            }
            const double inv = 1.0 / std::sqrt(best_norm2);
            for (Complex& z : best_vec) z *= inv;
            accepted.push_back(std::move(best_vec));
            cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(best));
        }
        for (auto& u : accepted) kept.push_back(std::move(u));
        g0 = g1;
    }

    // Rayleigh quotients give cleaner eigenvalues than the paired duplicates.
    EigResult result;
    result.eigenvalues.resize(d);
    std::vector<std::pair<double, std::size_t>> final_order(d);
    for (std::size_t c = 0; c < d; ++c) {
        Complex q{0.0, 0.0};
        for (std::size_t i = 0; i < d; ++i) {
            Complex hz{0.0, 0.0};
            for (std::size_t j = 0; j < d; ++j) hz += m(i, j) * kept[c][j];
            q += std::conj(kept[c][i]) * hz;
        }
        final_order[c] = {q.real(), c};
    }
    std::stable_sort(final_order.begin(), final_order.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    result.eigenvectors = ComplexMatrix(d, d);
    for (std::size_t c = 0; c < d; ++c) {
        result.eigenvalues[c] = final_order[c].first;
        const auto& vec = kept[final_order[c].second];
        for (std::size_t i = 0; i < d; ++i) result.eigenvectors(i, c) = vec[i];
    }
    return result;
}

bool hermitian_psd_within(const ComplexMatrix& m, double shift) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermitian_psd_within: matrix must be square");
    }
    const std::size_t n = m.rows();
    std::vector<Complex> l(n * n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        double d = m(k, k).real() + shift;
        for (std::size_t j = 0; j < k; ++j) d -= std::norm(l[k * n + j]);
        if (!(d > 0.0)) return false;
        const double lkk = std::sqrt(d);
        l[k * n + k] = lkk;
        for (std::size_t i = k + 1; i < n; ++i) {
            Complex s = m(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= l[i * n + j] * std::conj(l[k * n + j]);
            l[i * n + k] = s / lkk;
        }
    }
    return true;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(Seed seed) : seed_(seed) {
    std::uint64_t s = seed.value;
    for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex{re, im} / std::sqrt(2.0);
}

Rng Rng::substream(std::uint64_t index) const {
    std::uint64_t x = seed_.value ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return Rng(Seed{splitmix64(x)});
}

ComplexMatrix random_state(Seed seed, std::size_t dim, StateKind kind) {
    if (dim < 1) {
        throw std::invalid_argument("random_state: dim must be >= 1");
    }
    Rng rng(seed);
    if (kind == StateKind::pure) {
        ComplexMatrix psi(dim, 1);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            psi(i, 0) = rng.complex_normal();
            norm2 += std::norm(psi(i, 0));
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < dim; ++i) psi(i, 0) *= inv;
        return psi;
    }
    ComplexMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    ComplexMatrix rho = g * g.adjoint();
    const double tr = rho.trace().real();
    rho *= Complex{1.0 / tr, 0.0};
    // Exact Hermiticity, not just roundoff-level.
    for (std::size_t i = 0; i < dim; ++i) {
        rho(i, i) = Complex{rho(i, i).real(), 0.0};
        for (std::size_t j = i + 1; j < dim; ++j) {
            const Complex avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            rho(i, j) = avg;
            rho(j, i) = std::conj(avg);
        }
    }
    return rho;
}

ComplexMatrix random_unitary(Seed seed, std::size_t dim) {
    Rng rng(seed);
    ComplexMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            Complex ov{0.0, 0.0};
            for (std::size_t i = 0; i < dim; ++i) ov += std::conj(g(i, p)) * g(i, c);
            for (std::size_t i = 0; i < dim; ++i) g(i, c) -= ov * g(i, p);
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) n2 += std::norm(g(i, c));
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < dim; ++i) g(i, c) *= inv;
    }
    return g;
}

}  // namespace qgreen::numerics
