#include "qwalk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace qwalk::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void atomic_write(const fs::path& path, std::string_view content) {
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json read_json(const fs::path& path) {
    const std::string text = read_file(path);
    return nlohmann::json::parse(text);
}

void write_json(const fs::path& path, const nlohmann::json& value) {
    atomic_write(path, value.dump(2) + "\n");
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

} // namespace

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    if (static_cast<Eigen::Index>(row_labels.size()) != values.rows() ||
        static_cast<Eigen::Index>(col_labels.size()) != values.cols())
        throw std::invalid_argument("label count does not match matrix shape");
    std::string out;
    for (const auto& label : col_labels) {
        out += ',';
        out += csv_escape(label);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out += csv_escape(row_labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out += ',';
            out += format_double(values(i, j));
        }
        out += '\n';
    }
    atomic_write(path, out);
}

void write_counts_csv(const fs::path& path,
                      const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
                      const std::vector<std::string>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != counts.rows())
        throw std::invalid_argument("label count does not match matrix shape");
    std::string out;
    for (const auto& label : labels) {
        out += ',';
        out += csv_escape(label);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
        out += csv_escape(labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            out += ',';
            out += std::to_string(counts(i, j));
        }
        out += '\n';
    }
    atomic_write(path, out);
}

LabeledMatrix read_matrix_csv(const fs::path& path) {
    const std::string text = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
    const std::size_t width = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != width) throw std::runtime_error("ragged CSV rows: " + path.string());

    double probe = 0.0;
    const bool labeled = !parse_double(rows[0][0], probe) || rows[0][0].empty();

    LabeledMatrix result;
    std::size_t row0 = 0, col0 = 0;
    if (labeled) {
        row0 = col0 = 1;
        if (rows.size() < 2 || width < 2)
            throw std::runtime_error("labeled CSV needs at least one data row/column: " + path.string());
        for (std::size_t j = 1; j < width; ++j) result.col_labels.push_back(rows[0][j]);
        for (std::size_t i = 1; i < rows.size(); ++i) result.row_labels.push_back(rows[i][0]);
    }
    const auto nrows = static_cast<Eigen::Index>(rows.size() - row0);
    const auto ncols = static_cast<Eigen::Index>(width - col0);
    result.values.resize(nrows, ncols);
    for (Eigen::Index i = 0; i < nrows; ++i) {
        for (Eigen::Index j = 0; j < ncols; ++j) {
            const std::string& cell = rows[static_cast<std::size_t>(i) + row0][static_cast<std::size_t>(j) + col0];
            double v = 0.0;
            if (!parse_double(cell, v))
                throw std::runtime_error("non-numeric CSV cell '" + cell + "' in " + path.string());
            result.values(i, j) = v;
        }
    }
    return result;
}

void write_pgm16(const fs::path& path, const Eigen::MatrixXd& values,
                 double scale_max, int cell_px, std::string_view comment) {
    if (scale_max <= 0.0) throw std::invalid_argument("scale_max must be positive");
    if (cell_px < 1) throw std::invalid_argument("cell size must be >= 1");
    const Eigen::Index rows = values.rows(), cols = values.cols();
    std::string out = "P5\n";
    if (!comment.empty()) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    out += std::to_string(cols * cell_px) + " " + std::to_string(rows * cell_px) + "\n65535\n";
    for (Eigen::Index i = 0; i < rows; ++i) {
        std::string scanline;
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = values(i, j) / scale_max;
            v = std::min(std::max(v, 0.0), 1.0);
            const auto level = static_cast<std::uint16_t>(std::lround(v * 65535.0));
            const char hi = static_cast<char>(level >> 8);
            const char lo = static_cast<char>(level & 0xFF);
            for (int k = 0; k < cell_px; ++k) {
                scanline += hi;
                scanline += lo;
            }
        }
        for (int k = 0; k < cell_px; ++k) out += scanline;
    }
    atomic_write(path, out);
}

} // namespace qwalk::io
