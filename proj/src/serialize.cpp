#include "qgreen/serialize.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace qgreen::serialize {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw std::invalid_argument("CsvWriter: row width does not match header");
    }
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
    std::string out;
    const auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(cells[i]);
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& row : rows_) emit(row);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) {
            throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

constexpr const char* kBasisName = "antisym-lex";

void require_schema(const nlohmann::json& j, const char* kind) {
    if (!j.contains("d") || !j.contains("basis") || !j.contains("entries")) {
        throw std::invalid_argument("state json: missing d/basis/entries");
    }
    if (j.at("basis").get<std::string>() != kBasisName) {
        throw std::invalid_argument("state json: unsupported basis " +
                                    j.at("basis").get<std::string>());
    }
    if (j.contains("kind") && j.at("kind").get<std::string>() != kind) {
        throw std::invalid_argument("state json: expected kind " + std::string(kind));
    }
}

}  // namespace

nlohmann::json to_json(const fermion::TwoFermionPureState& psi) {
    nlohmann::json entries = nlohmann::json::array();
    const std::size_t d = psi.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const auto z = psi.amplitude()(i, j);
            if (z == numerics::Complex{0.0, 0.0}) continue;
            entries.push_back({i, j, z.real(), z.imag()});
        }
    }
    return nlohmann::json{
        {"d", d}, {"basis", kBasisName}, {"kind", "pure"}, {"entries", entries}};
}

nlohmann::json to_json(const fermion::TwoFermionMixedState& rho) {
    nlohmann::json entries = nlohmann::json::array();
    const std::size_t dim = rho.pair_dimension();
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const auto z = rho.rho()(r, c);
            if (z == numerics::Complex{0.0, 0.0}) continue;
            entries.push_back({r, c, z.real(), z.imag()});
        }
    }
    return nlohmann::json{
        {"d", rho.dim()}, {"basis", kBasisName}, {"kind", "mixed"}, {"entries", entries}};
}

fermion::TwoFermionPureState pure_state_from_json(const nlohmann::json& j) {
    require_schema(j, "pure");
    const std::size_t d = j.at("d").get<std::size_t>();
    numerics::ComplexMatrix a(d, d);
    for (const auto& entry : j.at("entries")) {
        const std::size_t i = entry.at(0).get<std::size_t>();
        const std::size_t k = entry.at(1).get<std::size_t>();
        if (i >= k || k >= d) {
            throw std::invalid_argument("pure state json: entries must satisfy i < j < d");
        }
        const numerics::Complex z{entry.at(2).get<double>(), entry.at(3).get<double>()};
        a(i, k) = z;
        a(k, i) = -z;
    }
    return fermion::TwoFermionPureState(std::move(a));
}

fermion::TwoFermionMixedState mixed_state_from_json(const nlohmann::json& j) {
    require_schema(j, "mixed");
    const std::size_t d = j.at("d").get<std::size_t>();
    const std::size_t dim = fermion::pair_dim(d);
    numerics::ComplexMatrix rho(dim, dim);
    for (const auto& entry : j.at("entries")) {
        const std::size_t r = entry.at(0).get<std::size_t>();
        const std::size_t c = entry.at(1).get<std::size_t>();
        if (r >= dim || c >= dim) {
            throw std::invalid_argument("mixed state json: pair index out of range");
        }
        rho(r, c) = numerics::Complex{entry.at(2).get<double>(), entry.at(3).get<double>()};
    }
    return fermion::TwoFermionMixedState(d, std::move(rho));
}

nlohmann::json to_json(const greenfn::TwoParticleGLesser& g2) {
    nlohmann::json times = nlohmann::json::array();
    for (std::size_t a = 0; a < g2.times().n_t; ++a) times.push_back(g2.times().t(a));

    nlohmann::json slices = nlohmann::json::array();
    for (std::size_t a = 0; a < g2.slice_count(); ++a) {
        nlohmann::json entries = nlohmann::json::array();
        const auto& s = g2.slice(a);
        for (std::size_t r = 0; r < s.rows(); ++r) {
            for (std::size_t c = 0; c < s.cols(); ++c) {
                const auto z = s(r, c);
                if (z == numerics::Complex{0.0, 0.0}) continue;
                entries.push_back({r, c, z.real(), z.imag()});
            }
        }
        slices.push_back({{"t_index", a}, {"entries", entries}});
    }
    return nlohmann::json{{"d", g2.dim()},
                          {"basis", kBasisName},
                          {"kind", "g2-lesser"},
                          {"times", times},
                          {"slices", slices}};
}

std::string to_csv(const wigner::WignerFunction& w) {
    CsvWriter csv({"x", "p", "w"});
    const std::size_t n = w.grid.n;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            csv.add_row({format_double(w.grid.x(j)), format_double(w.p_values[k]),
                         format_double(w.value(j, k))});
        }
    }
    return csv.str();
}

std::string to_csv(const cumulant::TruncatedDensity& density) {
    CsvWriter csv({"x", "p"});
    for (std::size_t j = 0; j < density.x_grid.n; ++j) {
        csv.add_row({format_double(density.x_grid.x(j)), format_double(density.p[j])});
    }
    return csv.str();
}

std::string to_csv(std::span<const cumulant::ScanRow> rows) {
    CsvWriter csv({"kappa3", "min_value", "negative_mass"});
    for (const auto& row : rows) {
        csv.add_row({format_double(row.kappa3), format_double(row.min_value),
                     format_double(row.negative_mass)});
    }
    return csv.str();
}

std::string to_csv(const wigner::Gwd& g, std::size_t j, std::size_t b) {
    CsvWriter csv({"k", "omega", "g"});
    for (std::size_t k = 0; k < g.space.n; ++k) {
        for (std::size_t w = 0; w < g.times.n_t; ++w) {
            csv.add_row({format_double(g.k_values[k]), format_double(g.omega_values[w]),
                         format_double(g.value(k, w, j, b))});
        }
    }
    return csv.str();
}

}  // namespace qgreen::serialize
