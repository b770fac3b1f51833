#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qgreen/numerics.hpp"

using namespace qgreen::numerics;

namespace {

// Independent O(n^2) DFT, the oracle for the FFT path.
std::vector<Complex> dft_direct(const std::vector<Complex>& x, double sign) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * kPi * static_cast<double>(j * k) / static_cast<double>(n);
            out[k] += x[j] * Complex{std::cos(ang), std::sin(ang)};
        }
    }
    return out;
}

ComplexMatrix random_hermitian(Seed seed, std::size_t d) {
    Rng rng(seed);
    ComplexMatrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        h(i, i) = Complex{rng.normal(), 0.0};
        for (std::size_t j = i + 1; j < d; ++j) {
            const Complex z = rng.complex_normal();
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    }
    return h;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("grid validates its invariants") {
    CHECK_THROWS_AS(Grid1D(1.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 12), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 4), std::invalid_argument);
    const Grid1D g(-8.0, 8.0, 64);
    CHECK(g.dx() == doctest::Approx(0.25));
    CHECK(g.points().size() == 64);
    CHECK(g.x(0) == doctest::Approx(-8.0));
}

TEST_CASE("fft constant and impulse") {
    std::vector<Complex> ones{1.0, 1.0, 1.0, 1.0};
    auto f = fft_1d(ones, FftDirection::forward);
    CHECK(std::abs(f[0] - Complex{4.0, 0.0}) < 1e-14);
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(f[k]) < 1e-14);

    std::vector<Complex> delta{1.0, 0.0, 0.0, 0.0};
    auto d = fft_1d(delta, FftDirection::forward);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(d[k] - Complex{1.0, 0.0}) < 1e-14);
}

TEST_CASE("fft agrees with the direct DFT oracle and round-trips") {
    Rng rng(Seed{42});
    std::vector<Complex> x(64);
    for (auto& z : x) z = rng.complex_normal();

    const auto fast = fft_1d(x, FftDirection::forward);
    const auto slow = dft_direct(x, -1.0);
    double norm = 0.0;
    for (const auto& z : x) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(fast[k] - slow[k]) / norm < 1e-12);
    }

    const auto back = fft_1d(fast, FftDirection::inverse);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(back[k] - x[k]) / norm < 1e-12);
    }
}

TEST_CASE("fft rejects non-power-of-two lengths") {
    std::vector<Complex> x(12, Complex{1.0, 0.0});
    CHECK_THROWS_AS(fft_1d(x, FftDirection::forward), std::invalid_argument);
}

TEST_CASE("fft Parseval over 100 seeded inputs") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(Seed{1000 + s});
        std::vector<Complex> x(32);
        double time_sum = 0.0;
        for (auto& z : x) {
            z = rng.complex_normal();
            time_sum += std::norm(z);
        }
        const auto f = fft_1d(x, FftDirection::forward);
        double freq_sum = 0.0;
        for (const auto& z : f) freq_sum += std::norm(z);
        freq_sum /= static_cast<double>(x.size());
        CHECK(std::abs(time_sum - freq_sum) / time_sum < 1e-10);
    }
}

TEST_CASE("hermitian_eig identity and diagonal cases") {
    auto id = hermitian_eig(ComplexMatrix::identity(3));
    for (double lam : id.eigenvalues) CHECK(lam == doctest::Approx(1.0).epsilon(1e-12));

    ComplexMatrix d2(2, 2);
    d2(0, 0) = 2.0;
    d2(1, 1) = -1.0;
    auto r = hermitian_eig(d2);
    CHECK(r.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
    // eigenvector for -1 is e2, for 2 is e1 (up to phase)
    CHECK(std::abs(r.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(r.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstruction oracle on random 6x6") {
    const ComplexMatrix h = random_hermitian(Seed{7}, 6);
    const auto eig = hermitian_eig(h);

    ComplexMatrix lam(6, 6);
    for (std::size_t i = 0; i < 6; ++i) lam(i, i) = eig.eigenvalues[i];
    const ComplexMatrix rebuilt = eig.eigenvectors * lam * eig.eigenvectors.adjoint();
    CHECK((rebuilt - h).frobenius_norm() < 1e-9);

    const ComplexMatrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
    CHECK((gram - ComplexMatrix::identity(6)).frobenius_norm() < 1e-9);

    for (std::size_t i = 0; i + 1 < 6; ++i) CHECK(eig.eigenvalues[i] <= eig.eigenvalues[i + 1]);
}

TEST_CASE("hermitian_eig trace preservation over seeds") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ComplexMatrix h = random_hermitian(Seed{500 + s}, 8);
        const auto eig = hermitian_eig(h);
        double sum = 0.0;
        for (double lam : eig.eigenvalues) sum += lam;
        const double tr = h.trace().real();
        CHECK(std::abs(sum - tr) / std::max(1.0, std::abs(tr)) < 1e-10);
    }
}

TEST_CASE("hermitian_eig handles degenerate spectra") {
    // two-fold degenerate block plus a distinct eigenvalue
    ComplexMatrix h(4, 4);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    h(2, 2) = 3.0;
    h(3, 3) = 1.0;
    h(0, 1) = Complex{0.0, 0.5};
    h(1, 0) = Complex{0.0, -0.5};
    const auto eig = hermitian_eig(h);
    ComplexMatrix lam(4, 4);
    for (std::size_t i = 0; i < 4; ++i) lam(i, i) = eig.eigenvalues[i];
    CHECK((eig.eigenvectors * lam * eig.eigenvectors.adjoint() - h).frobenius_norm() < 1e-9);
    CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors - ComplexMatrix::identity(4)).frobenius_norm() <
          1e-9);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(m), std::invalid_argument);
}

TEST_CASE("random_state determinism") {
    const auto a = random_state(Seed{7}, 4, StateKind::pure);
    const auto b = random_state(Seed{7}, 4, StateKind::pure);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a(i, 0).real() == b(i, 0).real());
        CHECK(a(i, 0).imag() == b(i, 0).imag());
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) norm2 += std::norm(a(i, 0));
    CHECK(std::abs(norm2 - 1.0) < 1e-12);
}

TEST_CASE("random mixed state satisfies density-matrix axioms") {
    const auto rho = random_state(Seed{7}, 4, StateKind::mixed);
    CHECK(rho.hermiticity_defect() < 1e-14);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
    const auto eig = hermitian_eig(rho);
    double sum = 0.0;
    for (double lam : eig.eigenvalues) {
        CHECK(lam >= -1e-12);
        sum += lam;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("mixed-state purity Monte-Carlo sanity") {
    const std::size_t dim = 4;
    double mean_purity = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto rho = random_state(Seed{9000 + s}, dim, StateKind::mixed);
        mean_purity += (rho * rho).trace().real();
    }
    mean_purity /= 100.0;
    CHECK(mean_purity > 1.0 / static_cast<double>(dim));
    CHECK(mean_purity < 1.0);
}

TEST_CASE("substreams are independent and deterministic") {
    Rng base(Seed{123});
    Rng s1 = base.substream(0);
    Rng s2 = base.substream(1);
    Rng s1_again = Rng(Seed{123}).substream(0);
    CHECK(s1.next_u64() == s1_again.next_u64());
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_SUITE_END();
