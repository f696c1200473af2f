#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "dqls/matrix_store.hpp"

namespace dqls {

/// Reads `i j value` triples, one per line. Blank lines and `#` comments are skipped.
std::vector<MatrixEntry> parse_coordinate_stream(std::istream &in);

/// Reads a dense matrix, one row per line, values separated by commas.
Eigen::MatrixXd parse_dense_csv(std::istream &in);

/// Loads `.csv` files as dense CSV and anything else as a coordinate stream.
MatrixStore load_matrix(const std::filesystem::path &path);

void write_coordinate_stream(std::ostream &out, const Eigen::MatrixXd &matrix);
void write_dense_csv(std::ostream &out, const Eigen::MatrixXd &matrix);

/// Reads a vector from whitespace- or comma-separated values.
Eigen::VectorXd parse_vector(std::istream &in);

} // namespace dqls
