#include "qutritlab/report.hpp"

#include <cmath>
#include <fstream>

namespace qutritlab {

std::string csv_header(const std::string& experiment, const std::string& hash) {
    std::string out;
    out += "# experiment: " + experiment + "\n";
    out += "# config_hash: " + hash + "\n";
    out += std::string("# qutritlab_version: ") + kVersion + "\n";
    return out;
}

std::string svg_header(const std::string& experiment, const std::string& hash) {
    return "<!-- experiment: " + experiment + " config_hash: " + hash +
           " qutritlab_version: " + kVersion + " -->\n";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    if (rows == 0) return Matrix(0, 0);
    const auto cols = j.at(0).size();
    Matrix m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t c = 0; c < cols; ++c) {
            const auto& entry = j.at(i).at(c);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return m;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << content;
}

void write_json_file(const std::filesystem::path& path, const std::string& experiment,
                     const std::string& hash, const nlohmann::json& payload) {
    nlohmann::json doc;
    doc["meta"] = {{"experiment", experiment},
                   {"config_hash", hash},
                   {"qutritlab_version", kVersion}};
    doc["data"] = payload;
    write_text_file(path, doc.dump(2) + "\n");
}

void write_report(const std::filesystem::path& dir, const RunReport& report) {
    nlohmann::json doc;
    doc["experiment"] = report.experiment;
    doc["config_hash"] = report.config_hash;
    doc["manifest"] = report.manifest;
    doc["summary"] = report.summary;
    doc["qutritlab_version"] = kVersion;
    write_text_file(dir / "report.json", doc.dump(2) + "\n");
}

namespace {

struct Bounds {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
};

Bounds data_bounds(const std::vector<SvgSeries>& series) {
    Bounds b;
    bool first = true;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                b.xmin = b.xmax = s.x[i];
                b.ymin = b.ymax = s.y[i];
                first = false;
            } else {
                b.xmin = std::min(b.xmin, s.x[i]);
                b.xmax = std::max(b.xmax, s.x[i]);
                b.ymin = std::min(b.ymin, s.y[i]);
                b.ymax = std::max(b.ymax, s.y[i]);
            }
        }
    }
    if (b.xmax - b.xmin < 1e-12) b.xmax = b.xmin + 1.0;
    if (b.ymax - b.ymin < 1e-12) b.ymax = b.ymin + 1.0;
    return b;
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<SvgSeries>& series) {
    const double width = 640.0, height = 420.0;
    const double ml = 64.0, mr = 18.0, mt = 32.0, mb = 48.0;
    Bounds b = data_bounds(series);
    auto px = [&](double x) {
        return ml + (x - b.xmin) / (b.xmax - b.xmin) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (y - b.ymin) / (b.ymax - b.ymin) * (height - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
           "font-family=\"sans-serif\">" + title + "</text>\n";
    // axes
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(height - mb) +
           "\" x2=\"" + format_double(width - mr) + "\" y2=\"" +
           format_double(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) +
           "\" x2=\"" + format_double(ml) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = b.xmin + k * (b.xmax - b.xmin) / 4.0;
        double yv = b.ymin + k * (b.ymax - b.ymin) / 4.0;
        svg += "<text x=\"" + format_double(px(xv)) + "\" y=\"" +
               format_double(height - mb + 18.0) +
               "\" text-anchor=\"middle\" font-size=\"10\" "
               "font-family=\"sans-serif\">" + format_double(xv) + "</text>\n";
        svg += "<text x=\"" + format_double(ml - 6.0) + "\" y=\"" +
               format_double(py(yv) + 3.0) +
               "\" text-anchor=\"end\" font-size=\"10\" "
               "font-family=\"sans-serif\">" + format_double(yv) + "</text>\n";
    }
    svg += "<text x=\"" + format_double((ml + width - mr) / 2.0) + "\" y=\"" +
           format_double(height - 10.0) +
           "\" text-anchor=\"middle\" font-size=\"12\" "
           "font-family=\"sans-serif\">" + xlabel + "</text>\n";
    svg += "<text x=\"14\" y=\"" + format_double((mt + height - mb) / 2.0) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 14 " + format_double((mt + height - mb) / 2.0) +
           ")\">" + ylabel + "</text>\n";

    for (const auto& s : series) {
        if (s.scatter) {
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + format_double(px(s.x[i])) + "\" cy=\"" +
                       format_double(py(s.y[i])) + "\" r=\"2.4\" fill=\"" + s.color +
                       "\"/>\n";
            }
        } else {
            std::string points;
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                points += format_double(px(s.x[i])) + "," + format_double(py(s.y[i])) +
                          " ";
            }
            svg += "<polyline fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace qutritlab
