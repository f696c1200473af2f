#include "dqls/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

std::string_view strip_comment(std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
}

double parse_real(std::string_view token, std::size_t line_no) {
    std::string copy(token);
    char *end = nullptr;
    const double value = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size()) {
        throw ParseError(line_no, "'" + copy + "' is not a real number");
    }
    if (!std::isfinite(value)) {
        throw ParseError(line_no, "value '" + copy + "' is not finite");
    }
    return value;
}

std::size_t parse_index(std::string_view token, std::size_t line_no) {
    std::size_t value = 0;
    const auto *end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(line_no, "'" + std::string(token) + "' is not a non-negative index");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, std::string_view separators) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto start = text.find_first_not_of(separators, pos);
        if (start == std::string_view::npos) {
            break;
        }
        const auto stop = text.find_first_of(separators, start);
        tokens.push_back(text.substr(start, stop == std::string_view::npos ? text.size() - start : stop - start));
        if (stop == std::string_view::npos) {
            break;
        }
        pos = stop;
    }
    return tokens;
}

} // namespace

std::vector<MatrixEntry> parse_coordinate_stream(std::istream &in) {
    std::vector<MatrixEntry> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = strip_comment(line);
        if (body.empty()) {
            continue;
        }
        const auto tokens = split(body, " \t");
        if (tokens.size() != 3) {
            throw ParseError(line_no, "expected 'i j value', got " + std::to_string(tokens.size()) + " fields");
        }
        records.push_back({parse_index(tokens[0], line_no), parse_index(tokens[1], line_no),
                           parse_real(tokens[2], line_no)});
    }
    return records;
}

Eigen::MatrixXd parse_dense_csv(std::istream &in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = strip_comment(line);
        if (body.empty()) {
            continue;
        }
        std::vector<double> row;
        for (const auto field : split(body, ",")) {
            row.push_back(parse_real(strip_comment(field), line_no));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(line_no, "row has " + std::to_string(row.size()) + " columns, expected " +
                                          std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ValidationError("dense CSV contains no rows");
    }
    Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return matrix;
}

MatrixStore load_matrix(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open matrix file " + path.string());
    }
    if (path.extension() == ".csv") {
        return MatrixStore::from_dense(parse_dense_csv(in));
    }
    const auto records = parse_coordinate_stream(in);
    return ingest_stream(records);
}

void write_coordinate_stream(std::ostream &out, const Eigen::MatrixXd &matrix) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            out << i << ' ' << j << ' ' << matrix(i, j) << '\n';
        }
    }
}

void write_dense_csv(std::ostream &out, const Eigen::MatrixXd &matrix) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            out << (j == 0 ? "" : ",") << matrix(i, j);
        }
        out << '\n';
    }
}

Eigen::VectorXd parse_vector(std::istream &in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (const auto token : split(strip_comment(line), " \t,")) {
            values.push_back(parse_real(token, line_no));
        }
    }
    if (values.empty()) {
        throw ValidationError("vector input is empty");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

} // namespace dqls
