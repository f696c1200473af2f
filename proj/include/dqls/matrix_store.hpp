#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dqls/quantum_state.hpp"

namespace dqls {

/// One `(row, col, value)` record of a coordinate stream.
struct MatrixEntry {
    std::size_t row;
    std::size_t col;
    double value;
};

/**
 * @brief Complete binary tree of partial sums over a fixed number of leaves.
 *
 * The leaf count is padded to the next power of two; padding leaves are zero.
 * Nodes are stored heap-style with the root at index 1, so `set` touches
 * exactly `log2(capacity) + 1` nodes.
 */
class SumTree {
  public:
    explicit SumTree(std::size_t leaves);

    /// Writes a leaf and recomputes every ancestor. Returns the number of nodes written.
    std::size_t set(std::size_t leaf, double value);

    [[nodiscard]] double leaf(std::size_t leaf) const { return nodes_[capacity_ + leaf]; }
    [[nodiscard]] double root() const { return nodes_[1]; }
    [[nodiscard]] std::size_t leaves() const noexcept { return leaves_; }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    /// Nodes on a leaf-to-root path.
    [[nodiscard]] std::size_t path_length() const noexcept { return depth_ + 1; }

    /// Heap-indexed node access (1 = root).
    [[nodiscard]] double node(std::size_t index) const { return nodes_.at(index); }

    /// True when every internal node equals the sum of its children within `rel_tol`.
    [[nodiscard]] bool consistent(double rel_tol) const;

  private:
    std::size_t leaves_;
    std::size_t capacity_;
    std::size_t depth_;
    std::vector<double> nodes_;
};

/**
 * @brief Amplitude store over a real m x n matrix.
 *
 * One SumTree per row holds |A_ij|^2 at leaf j together with a sign bit, and a
 * further tree over rows holds the squared row norms. Entries may arrive in any
 * order; a repeated (i, j) overwrites the previous value.
 */
class MatrixStore {
  public:
    MatrixStore(std::size_t rows, std::size_t cols);

    static MatrixStore from_dense(const Eigen::MatrixXd &matrix);

    void store_entry(std::size_t row, std::size_t col, double value);

    /// |i, A_i> restricted to the column register: amplitude j is A_ij / ||A_i||.
    [[nodiscard]] QuantumState row_state(std::size_t row) const;
    /// Row-norm state: amplitude i is ||A_i|| / ||A||_F.
    [[nodiscard]] QuantumState norm_vector_state() const;

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    /// sign * sqrt(leaf)
    [[nodiscard]] double entry(std::size_t row, std::size_t col) const;
    [[nodiscard]] double row_norm_squared(std::size_t row) const;
    [[nodiscard]] double frobenius_squared() const { return norm_tree_.root(); }
    [[nodiscard]] double frobenius_norm() const;

    [[nodiscard]] Eigen::MatrixXd to_dense() const;

    [[nodiscard]] const SumTree &row_tree(std::size_t row) const { return row_trees_.at(row); }
    [[nodiscard]] const SumTree &norm_tree() const noexcept { return norm_tree_; }

    [[nodiscard]] std::uint64_t update_count() const noexcept { return update_count_; }
    /// Cumulative tree nodes written across all updates.
    [[nodiscard]] std::uint64_t touched_nodes() const noexcept { return touched_nodes_; }
    [[nodiscard]] std::size_t last_touched_nodes() const noexcept { return last_touched_; }
    /// ceil(log2 n) + ceil(log2 m) + 2
    [[nodiscard]] std::size_t max_touched_per_update() const noexcept;

    [[nodiscard]] bool consistent(double rel_tol = 1e-12) const;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<SumTree> row_trees_;
    std::vector<std::int8_t> signs_;
    SumTree norm_tree_;
    std::uint64_t update_count_ = 0;
    std::uint64_t touched_nodes_ = 0;
    std::size_t last_touched_ = 0;
};

/// Builds a store from records; dimensions are inferred from the largest indices.
MatrixStore ingest_stream(std::span<const MatrixEntry> records);
/// Builds a store of fixed shape; records outside it raise IndexError.
MatrixStore ingest_stream(std::span<const MatrixEntry> records, std::size_t rows, std::size_t cols);

} // namespace dqls
