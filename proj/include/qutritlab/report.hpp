#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qutritlab/linalg.hpp"

namespace qutritlab {

inline constexpr const char* kVersion = "0.1.0";

struct RunReport {
    std::string experiment;
    std::string config_hash;
    std::vector<std::string> manifest;
    nlohmann::json summary = nlohmann::json::object();
};

// Leading comment block carried by every emitted CSV.
std::string csv_header(const std::string& experiment, const std::string& hash);
// Same provenance block as an XML comment for SVG outputs.
std::string svg_header(const std::string& experiment, const std::string& hash);

// Deterministic number formatting shared by all text outputs.
std::string format_double(double v);

nlohmann::json matrix_to_json(const Matrix& m);  // complex entries as [re, im]
Matrix matrix_from_json(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const std::string& experiment,
                     const std::string& hash, const nlohmann::json& payload);
void write_report(const std::filesystem::path& dir, const RunReport& report);

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    bool scatter = false;
};

// Minimal line/scatter rendering straight from the data arrays.
std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<SvgSeries>& series);

}  // namespace qutritlab
