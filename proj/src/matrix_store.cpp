#include "dqls/matrix_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

std::size_t ceil_log2(std::size_t value) {
    return value <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(value - 1));
}

} // namespace

SumTree::SumTree(std::size_t leaves)
    : leaves_(leaves), capacity_(std::bit_ceil(std::max<std::size_t>(leaves, 1))),
      depth_(ceil_log2(capacity_)), nodes_(2 * capacity_, 0.0) {
    if (leaves == 0) {
        throw ValidationError("sum tree needs at least one leaf");
    }
}

std::size_t SumTree::set(std::size_t leaf, double value) {
    std::size_t node = capacity_ + leaf;
    nodes_[node] = value;
    std::size_t touched = 1;
    // Recompute rather than add a delta so parents stay exactly equal to the child sum.
    for (node >>= 1; node >= 1; node >>= 1) {
        nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
        ++touched;
    }
    return touched;
}

bool SumTree::consistent(double rel_tol) const {
    for (std::size_t node = capacity_ - 1; node >= 1; --node) {
        const double sum = nodes_[2 * node] + nodes_[2 * node + 1];
        if (std::abs(nodes_[node] - sum) > rel_tol * std::max(1.0, std::abs(sum))) {
            return false;
        }
    }
    return true;
}

MatrixStore::MatrixStore(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), signs_(rows * cols, 1), norm_tree_(std::max<std::size_t>(rows, 1)) {
    if (rows == 0 || cols == 0) {
        throw ValidationError("matrix dimensions must be positive");
    }
    row_trees_.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        row_trees_.emplace_back(cols);
    }
}

MatrixStore MatrixStore::from_dense(const Eigen::MatrixXd &matrix) {
    MatrixStore store(static_cast<std::size_t>(matrix.rows()), static_cast<std::size_t>(matrix.cols()));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            if (matrix(i, j) != 0.0) {
                store.store_entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j), matrix(i, j));
            }
        }
    }
    return store;
}

void MatrixStore::store_entry(std::size_t row, std::size_t col, double value) {
    if (row >= rows_ || col >= cols_) {
        throw IndexError("entry (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") outside a " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                         " matrix");
    }
    if (!std::isfinite(value)) {
        throw ValidationError("entry (" + std::to_string(row) + ", " + std::to_string(col) +
                              ") is not finite");
    }
    signs_[row * cols_ + col] = std::signbit(value) && value != 0.0 ? -1 : 1;
    std::size_t touched = row_trees_[row].set(col, value * value);
    touched += norm_tree_.set(row, row_trees_[row].root());
    ++update_count_;
    touched_nodes_ += touched;
    last_touched_ = touched;
}

double MatrixStore::entry(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) {
        throw IndexError("entry index out of range");
    }
    return signs_[row * cols_ + col] * std::sqrt(row_trees_[row].leaf(col));
}

double MatrixStore::row_norm_squared(std::size_t row) const {
    if (row >= rows_) {
        throw IndexError("row index " + std::to_string(row) + " out of range");
    }
    return row_trees_[row].root();
}

double MatrixStore::frobenius_norm() const { return std::sqrt(frobenius_squared()); }

QuantumState MatrixStore::row_state(std::size_t row) const {
    const double norm_sq = row_norm_squared(row);
    if (norm_sq <= 0.0) {
        throw DegenerateError("row " + std::to_string(row) + " is zero; its row state is undefined");
    }
    const double norm = std::sqrt(norm_sq);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(cols_));
    for (std::size_t j = 0; j < cols_; ++j) {
        amps(static_cast<Eigen::Index>(j)) = entry(row, j) / norm;
    }
    return QuantumState::normalized(std::move(amps));
}

QuantumState MatrixStore::norm_vector_state() const {
    const double frob_sq = frobenius_squared();
    if (frob_sq <= 0.0) {
        throw DegenerateError("matrix is zero; the row-norm state is undefined");
    }
    const double frob = std::sqrt(frob_sq);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(rows_));
    for (std::size_t i = 0; i < rows_; ++i) {
        amps(static_cast<Eigen::Index>(i)) = std::sqrt(norm_tree_.leaf(i)) / frob;
    }
    return QuantumState::normalized(std::move(amps));
}

Eigen::MatrixXd MatrixStore::to_dense() const {
    Eigen::MatrixXd dense(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(i, j);
        }
    }
    return dense;
}

std::size_t MatrixStore::max_touched_per_update() const noexcept {
    return ceil_log2(cols_) + ceil_log2(rows_) + 2;
}

bool MatrixStore::consistent(double rel_tol) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        const SumTree &tree = row_trees_[i];
        if (!tree.consistent(rel_tol)) {
            return false;
        }
        const double root = tree.root();
        if (std::abs(norm_tree_.leaf(i) - root) > rel_tol * std::max(1.0, root)) {
            return false;
        }
    }
    return norm_tree_.consistent(rel_tol);
}

MatrixStore ingest_stream(std::span<const MatrixEntry> records) {
    if (records.empty()) {
        throw ValidationError("empty coordinate stream");
    }
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto &r : records) {
        rows = std::max(rows, r.row + 1);
        cols = std::max(cols, r.col + 1);
    }
    return ingest_stream(records, rows, cols);
}

MatrixStore ingest_stream(std::span<const MatrixEntry> records, std::size_t rows, std::size_t cols) {
    MatrixStore store(rows, cols);
    for (const auto &r : records) {
        store.store_entry(r.row, r.col, r.value);
    }
    return store;
}

} // namespace dqls
