#include <doctest.h>

#include <cmath>
#include <vector>

#include "qgreen/fermion.hpp"
#include "qgreen/greenfn.hpp"
#include "qgreen/numerics.hpp"

using namespace qgreen;
using namespace qgreen::greenfn;
using fermion::pair_dim;
using fermion::SeparabilityVerdict;
using fermion::TwoFermionPureState;
using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::kPi;
using numerics::Rng;
using numerics::Seed;
using wigner::TimeGrid;

namespace {

std::vector<double> oscillator_energies(std::size_t d) {
    std::vector<double> e(d);
    for (std::size_t i = 0; i < d; ++i) e[i] = static_cast<double>(i) + 0.5;
    return e;
}

}  // namespace

TEST_SUITE_BEGIN("greenfn");

TEST_CASE("equal-time density: projector slices keep trace and occupation bounds") {
    const TimeGrid times(0.0, 4.0 * kPi, 8);
    // occupied modes are rotated away from the energy eigenbasis, so slices
    // genuinely evolve in time
    const auto u = numerics::random_unitary(Seed{11}, 6);
    const auto g = OneParticleGLesser::determinantal_modes(times, oscillator_energies(6), u, 2);

    for (std::size_t a = 0; a < times.n_t; ++a) {
        const auto slice = equal_time_density(g, a);
        CHECK(std::abs(slice.trace().real() - 2.0) < 1e-8);
        const auto eig = numerics::hermitian_eig(slice);
        for (double q : eig.eigenvalues) {
            CHECK(q >= -1e-9);
            CHECK(q <= 1.0 + 1e-9);
        }
    }
    CHECK_THROWS_AS(equal_time_density(g, times.n_t), std::invalid_argument);

    // the slices really move
    const auto s0 = g.slice(0);
    const auto s3 = g.slice(3);
    CHECK((s0 - s3).max_abs() > 1e-3);
}

TEST_CASE("one-particle type validates trace against the particle number") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    ComplexMatrix occ(4, 4);
    occ(0, 0) = 1.0;
    occ(1, 1) = 1.0;
    CHECK_THROWS_AS(OneParticleGLesser(times, oscillator_energies(4), occ, 3),
                    std::invalid_argument);
    CHECK_NOTHROW(OneParticleGLesser(times, oscillator_energies(4), occ, 2));
}

TEST_CASE("hf_g2: N=2 slices normalize to the pure slater projector") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto g = OneParticleGLesser::determinantal(times, oscillator_energies(4), {0, 1});
    const auto g2 = hf_g2(g);

    for (std::size_t a = 0; a < times.n_t; ++a) {
        CHECK(std::abs(g2.slice(a).trace().real() - 2.0) < 1e-8);  // N(N-1)
    }
    ComplexMatrix normalized = g2.slice(0);
    normalized *= Complex{0.5, 0.0};
    const auto slater_proj =
        fermion::TwoFermionMixedState::from_pure(TwoFermionPureState::slater(4, 0, 1));
    CHECK((normalized - slater_proj.rho()).max_abs() < 1e-10);
}

TEST_CASE("hf_g2 rejects non-determinantal occupations") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    ComplexMatrix occ(4, 4);
    occ(0, 0) = 1.0;
    occ(1, 1) = 0.6;
    occ(2, 2) = 0.4;
    const OneParticleGLesser g(times, oscillator_energies(4), occ, 2);
    CHECK_THROWS_WITH_AS(hf_g2(g), doctest::Contains("idempotent"), std::invalid_argument);
}

TEST_CASE("hf_g2 equals hf_two_rdm of the same slice across the modules") {
    const TimeGrid times(0.0, 4.0 * kPi, 8);
    const auto u = numerics::random_unitary(Seed{21}, 6);
    const auto g = OneParticleGLesser::determinantal_modes(times, oscillator_energies(6), u, 3);
    const auto g2 = hf_g2(g);

    for (std::size_t a : {std::size_t{0}, std::size_t{5}}) {
        // feed the trace-1 form of the slice; the constructor rescales it
        ComplexMatrix density = equal_time_density(g, a);
        density *= Complex{1.0 / 3.0, 0.0};
        const auto direct = fermion::hf_two_rdm(density, 3);
        ComplexMatrix normalized = g2.slice(a);
        normalized *= Complex{1.0 / normalized.trace().real(), 0.0};
        CHECK((normalized - direct.rho()).max_abs() < 1e-10);
    }
}

TEST_CASE("separable construct: single rank-1 pair matches normalized hf_g2") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto e = oscillator_energies(4);
    const auto g_pair = OneParticleGLesser::determinantal(times, e, {0, 1});
    const auto g1 = OneParticleGLesser::determinantal(times, e, {0});
    const auto g2_comp = OneParticleGLesser::determinantal(times, e, {1});

    const auto built = separable_g2_construct({{1.0, g1, g2_comp}});
    const auto hf = hf_g2(g_pair);
    REQUIRE(built.components().size() == 1);

    for (std::size_t a = 0; a < times.n_t; ++a) {
        ComplexMatrix lhs = built.slice(a);
        lhs *= Complex{1.0 / lhs.trace().real(), 0.0};
        ComplexMatrix rhs = hf.slice(a);
        rhs *= Complex{1.0 / rhs.trace().real(), 0.0};
        CHECK((lhs - rhs).max_abs() < 1e-10);
    }
}

TEST_CASE("separable construct: orthogonal-support pairs give the uniform mixture") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto e = oscillator_energies(6);
    const auto a1 = OneParticleGLesser::determinantal(times, e, {0});
    const auto b1 = OneParticleGLesser::determinantal(times, e, {1});
    const auto a2 = OneParticleGLesser::determinantal(times, e, {2});
    const auto b2 = OneParticleGLesser::determinantal(times, e, {3});

    const auto built = separable_g2_construct({{0.5, a1, b1}, {0.5, a2, b2}});
    ComplexMatrix normalized = built.slice(0);
    normalized *= Complex{1.0 / normalized.trace().real(), 0.0};

    const auto expected = fermion::TwoFermionMixedState::mixture(
        {{0.5, TwoFermionPureState::slater(6, 0, 1)}, {0.5, TwoFermionPureState::slater(6, 2, 3)}});
    CHECK((normalized - expected.rho()).max_abs() < 1e-10);
}

TEST_CASE("separable construct: trace is the weighted sum of component traces") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto e = oscillator_energies(5);
    const auto g1 = OneParticleGLesser::determinantal(times, e, {0, 2});
    const auto g2 = OneParticleGLesser::determinantal(times, e, {1});
    const auto g3 = OneParticleGLesser::determinantal(times, e, {3});

    const std::vector<SeparableComponent> comps = {{0.25, g1, g2}, {0.75, g2, g3}};
    const auto built = separable_g2_construct(comps);
    for (std::size_t a = 0; a < times.n_t; ++a) {
        double expected = 0.0;
        for (const auto& comp : comps) {
            expected +=
                comp.weight * pair_product(comp.g1.slice(a), comp.g2.slice(a)).trace().real();
        }
        CHECK(std::abs(built.slice(a).trace().real() - expected) < 1e-8);
    }
}

TEST_CASE("separable construct validates the weight sum") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto e = oscillator_energies(4);
    const auto g1 = OneParticleGLesser::determinantal(times, e, {0});
    const auto g2 = OneParticleGLesser::determinantal(times, e, {1});
    CHECK_THROWS_WITH_AS(separable_g2_construct({{0.7, g1, g2}}), doctest::Contains("sum"),
                         std::invalid_argument);
}

TEST_CASE("g2 entanglement test: hf output is separable at every time index") {
    const TimeGrid times(0.0, 4.0 * kPi, 8);
    const auto u = numerics::random_unitary(Seed{31}, 6);
    const auto g = OneParticleGLesser::determinantal_modes(times, oscillator_energies(6), u, 2);
    const auto g2 = hf_g2(g);
    for (std::size_t a = 0; a < times.n_t; ++a) {
        const auto report = g2_entanglement_test(g2, a, 5e-3);
        CHECK(report.separability.verdict == SeparabilityVerdict::separable);
        CHECK(std::abs(report.slice_trace - 2.0) < 1e-8);
    }
}

TEST_CASE("g2 entanglement test: separable construct accepted with certificate") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const auto e = oscillator_energies(6);
    const auto built = separable_g2_construct({
        {0.5, OneParticleGLesser::determinantal(times, e, {0}),
         OneParticleGLesser::determinantal(times, e, {1})},
        {0.5, OneParticleGLesser::determinantal(times, e, {2}),
         OneParticleGLesser::determinantal(times, e, {3})},
    });
    CHECK(built.components().size() == 2);
    const auto report = g2_entanglement_test(built, 0, 5e-3);
    CHECK(report.separability.verdict == SeparabilityVerdict::separable);
}

TEST_CASE("g2 entanglement test: entangled slice flagged with witness value") {
    // slice proportional to the projector on (e0^e1 + e2^e3)/sqrt(2)
    std::vector<Complex> v(pair_dim(4), Complex{0.0, 0.0});
    v[fermion::pair_index(0, 1, 4)] = 1.0 / std::sqrt(2.0);
    v[fermion::pair_index(2, 3, 4)] = 1.0 / std::sqrt(2.0);
    const auto psi = TwoFermionPureState::from_pair_vector(4, v);
    const auto proj = fermion::TwoFermionMixedState::from_pure(psi);

    const TimeGrid times(0.0, 4.0 * kPi, 4);
    ComplexMatrix scaled = proj.rho();
    scaled *= Complex{2.0, 0.0};  // physical normalization is arbitrary here
    std::vector<ComplexMatrix> slices(times.n_t, scaled);
    const TwoParticleGLesser g2(4, times, std::move(slices), {}, 2);

    const auto report = g2_entanglement_test(g2, 1, 5e-3);
    CHECK(report.separability.verdict == SeparabilityVerdict::entangled);
    CHECK(report.separability.eof_value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-2));
    REQUIRE(report.witness_value.has_value());
    CHECK(*report.witness_value == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("g2 entanglement test rejects slices that are not PSD") {
    const TimeGrid times(0.0, 4.0 * kPi, 4);
    const std::size_t dim = pair_dim(4);
    ComplexMatrix indefinite(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) indefinite(r, r) = 1.0;
    indefinite(0, 0) = -0.5;
    std::vector<ComplexMatrix> slices(times.n_t, indefinite);
    const TwoParticleGLesser g2(4, times, std::move(slices), {}, 2);
    CHECK_THROWS_WITH_AS(g2_entanglement_test(g2, 0, 5e-3), doctest::Contains("min eigenvalue"),
                         std::invalid_argument);
}

TEST_CASE("time covariance: verdict identical across all time indices") {
    const TimeGrid times(0.0, 4.0 * kPi, 8);
    const auto u = numerics::random_unitary(Seed{41}, 5);
    const auto g = OneParticleGLesser::determinantal_modes(times, oscillator_energies(5), u, 2);
    const auto g2 = hf_g2(g);
    std::vector<SeparabilityVerdict> verdicts;
    for (std::size_t a = 0; a < times.n_t; ++a) {
        verdicts.push_back(g2_entanglement_test(g2, a, 5e-3).separability.verdict);
    }
    for (const auto v : verdicts) CHECK(v == verdicts.front());
}

TEST_SUITE_END();
