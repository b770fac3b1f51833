#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qgreen/serialize.hpp"

using namespace qgreen;
using namespace qgreen::serialize;
using numerics::Complex;
using numerics::Seed;

TEST_SUITE_BEGIN("serialize");

TEST_CASE("doubles are formatted as shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1.25e-300, 3.141592653589793}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("csv quoting follows RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("with\nnewline") == "\"with\nnewline\"");

    CsvWriter csv({"a", "b"});
    csv.add_row({"1", "x,y"});
    CHECK(csv.str() == "a,b\n1,\"x,y\"\n");
    CHECK_THROWS_AS(csv.add_row({"only-one"}), std::invalid_argument);
}

TEST_CASE("pure state json round trip") {
    const auto psi = fermion::random_pure_state(Seed{3}, 5);
    const auto j = to_json(psi);
    CHECK(j.at("basis") == "antisym-lex");
    CHECK(j.at("kind") == "pure");
    const auto back = pure_state_from_json(j);
    CHECK((back.amplitude() - psi.amplitude()).max_abs() < 1e-15);
}

TEST_CASE("mixed state json round trip") {
    const auto rho = fermion::TwoFermionMixedState::mixture(
        {{0.3, fermion::random_slater_state(Seed{4}, 4)},
         {0.7, fermion::random_slater_state(Seed{5}, 4)}});
    const auto j = to_json(rho);
    const auto back = mixed_state_from_json(j);
    CHECK((back.rho() - rho.rho()).max_abs() < 1e-15);
}

TEST_CASE("state json rejects malformed input") {
    nlohmann::json bad = {{"d", 4}, {"basis", "other"}, {"entries", nlohmann::json::array()}};
    CHECK_THROWS_AS(pure_state_from_json(bad), std::invalid_argument);
    nlohmann::json missing = {{"d", 4}};
    CHECK_THROWS_AS(mixed_state_from_json(missing), std::invalid_argument);
}

TEST_CASE("two-particle green function json carries times and slices") {
    const wigner::TimeGrid times(0.0, 4.0 * numerics::kPi, 4);
    std::vector<double> energies = {0.5, 1.5, 2.5, 3.5};
    const auto g = greenfn::OneParticleGLesser::determinantal(times, energies, {0, 1});
    const auto g2 = greenfn::hf_g2(g);
    const auto j = to_json(g2);
    CHECK(j.at("times").size() == 4);
    CHECK(j.at("slices").size() == 4);
    CHECK(j.at("kind") == "g2-lesser");
}

TEST_CASE("gwd slice csv has one row per (k, omega) cell") {
    const numerics::Grid1D grid(-8.0, 8.0, 16);
    const wigner::TimeGrid times(0.0, 4.0 * numerics::kPi, 8);
    const auto g = wigner::toy_g_lesser(grid, times, {{0, Complex{1.0, 0.0}}});
    const auto gwd = wigner::gwd_transform(g);
    const auto csv = to_csv(gwd, 8, 3);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 1 + 16 * 8);
}

TEST_CASE("atomic writes produce the full file") {
    const auto dir = std::filesystem::temp_directory_path() / "qgreen_serialize_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "payload\n");
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == "payload\n");
    std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
