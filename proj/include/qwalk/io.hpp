#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qwalk::io {

/// Shortest-ish round-trip decimal form ("%.17g"), used everywhere a double
/// is serialized so repeated runs stay byte-identical.
std::string format_double(double value);

/// Write content to path via a temp file + rename in the same directory.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// Matrix CSV with a label header row and a label column.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels);
void write_counts_csv(const std::filesystem::path& path,
                      const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
                      const std::vector<std::string>& labels);

struct LabeledMatrix {
    std::vector<std::string> row_labels; // empty when the file had no labels
    std::vector<std::string> col_labels;
    Eigen::MatrixXd values;
};

/// Read a rectangular numeric CSV; a non-numeric first row/column is treated
/// as labels. Throws std::runtime_error on ragged rows or non-numeric cells.
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

/// 16-bit binary PGM (big-endian samples). Values are clipped to
/// [0, scale_max] and mapped linearly onto [0, 65535]; the comment line is
/// embedded in the header.
void write_pgm16(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                 double scale_max, int cell_px, std::string_view comment);

} // namespace qwalk::io
