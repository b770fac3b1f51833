// CSV and JSON serialization: RFC-4180 quoting with shortest round-trip
// float formatting, the antisym-lex JSON schema for two-fermion states, and
// the per-slice extension for two-particle Green functions.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgreen/cumulant.hpp"
#include "qgreen/fermion.hpp"
#include "qgreen/greenfn.hpp"
#include "qgreen/wigner.hpp"

namespace qgreen::serialize {

// shortest decimal that round-trips to the same double
std::string format_double(double value);

// RFC-4180: quote when the cell holds a comma, quote, or newline
std::string csv_escape(const std::string& cell);

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::vector<std::string>& header() { return header_; }
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// write-then-rename so readers never observe partial files
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// --- two-fermion states, schema {d, basis: "antisym-lex", kind, entries} ---
// pure entries: [i, j, re, im] with i < j, the amplitudes A_ij
// mixed entries: [r, c, re, im] with pair indices r, c

nlohmann::json to_json(const fermion::TwoFermionPureState& psi);
nlohmann::json to_json(const fermion::TwoFermionMixedState& rho);
fermion::TwoFermionPureState pure_state_from_json(const nlohmann::json& j);
fermion::TwoFermionMixedState mixed_state_from_json(const nlohmann::json& j);

// mirrors the mixed-state format with a "times" array and per-slice entries
nlohmann::json to_json(const greenfn::TwoParticleGLesser& g2);

// --- plot-ready CSV tables ---
std::string to_csv(const wigner::WignerFunction& w);
std::string to_csv(const cumulant::TruncatedDensity& density);
std::string to_csv(std::span<const cumulant::ScanRow> rows);
// the (k, Omega) plane of the four-axis array at fixed (R, T) indices
std::string to_csv(const wigner::Gwd& g, std::size_t j, std::size_t b);

}  // namespace qgreen::serialize
