#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "dqls/errors.hpp"
#include "dqls/matrix_store.hpp"

using Catch::Approx;
using dqls::MatrixEntry;
using dqls::MatrixStore;

namespace {

std::size_t ceil_log2(std::size_t x) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < x) {
        ++bits;
    }
    return bits;
}

bool same_trees(const MatrixStore &a, const MatrixStore &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t node = 1; node < 2 * a.row_tree(i).capacity(); ++node) {
            if (a.row_tree(i).node(node) != b.row_tree(i).node(node)) {
                return false;
            }
        }
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a.entry(i, j) != b.entry(i, j)) {
                return false;
            }
        }
    }
    return a.norm_tree().root() == b.norm_tree().root();
}

} // namespace

TEST_CASE("store_entry sums squares into both trees", "[matrix_store]") {
    MatrixStore store(2, 2);
    store.store_entry(0, 0, 3.0);
    store.store_entry(0, 1, 4.0);
    CHECK(store.row_tree(0).root() == 25.0);
    CHECK(store.norm_tree().root() == 25.0);
}

TEST_CASE("storing a zero leaves every root at zero", "[matrix_store]") {
    MatrixStore store(2, 2);
    store.store_entry(0, 0, 0.0);
    CHECK(store.row_tree(0).root() == 0.0);
    CHECK(store.row_tree(1).root() == 0.0);
    CHECK(store.norm_tree().root() == 0.0);
}

TEST_CASE("a repeated entry overwrites", "[matrix_store]") {
    MatrixStore store(2, 2);
    store.store_entry(0, 0, 5.0);
    store.store_entry(0, 0, 1.0);
    CHECK(store.row_tree(0).root() == 1.0);
    CHECK(store.frobenius_squared() == 1.0);
    store.store_entry(0, 0, -2.0);
    CHECK(store.entry(0, 0) == -2.0);
}

TEST_CASE("store_entry rejects bad input", "[matrix_store]") {
    MatrixStore store(2, 3);
    CHECK_THROWS_AS(store.store_entry(2, 0, 1.0), dqls::IndexError);
    CHECK_THROWS_AS(store.store_entry(0, 3, 1.0), dqls::IndexError);
    CHECK_THROWS_AS(store.store_entry(0, 0, std::numeric_limits<double>::quiet_NaN()), dqls::ValidationError);
    CHECK_THROWS_AS(store.store_entry(0, 0, std::numeric_limits<double>::infinity()), dqls::ValidationError);
    CHECK_THROWS_AS(MatrixStore(0, 2), dqls::ValidationError);
}

TEST_CASE("row_state normalizes a row and keeps signs", "[matrix_store]") {
    const MatrixStore identity = MatrixStore::from_dense(Eigen::MatrixXd::Identity(2, 2));
    CHECK(identity.row_state(0).amplitude(0) == dqls::Complex(1.0, 0.0));
    CHECK(identity.row_state(0).amplitude(1) == dqls::Complex(0.0, 0.0));

    MatrixStore store(2, 2);
    store.store_entry(0, 0, 3.0);
    store.store_entry(0, 1, 4.0);
    store.store_entry(1, 0, -1.0);
    store.store_entry(1, 1, 1.0);
    CHECK(store.row_state(0).amplitude(0).real() == Approx(0.6));
    CHECK(store.row_state(0).amplitude(1).real() == Approx(0.8));
    CHECK(store.row_state(1).amplitude(0).real() == Approx(-1.0 / std::sqrt(2.0)));
    CHECK(store.row_state(1).amplitude(1).real() == Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("row_state of a zero row is degenerate", "[matrix_store]") {
    MatrixStore store(2, 2);
    store.store_entry(0, 0, 1.0);
    CHECK_THROWS_AS(store.row_state(1), dqls::DegenerateError);
}

TEST_CASE("norm_vector_state holds row norms over the Frobenius norm", "[matrix_store]") {
    const auto identity = MatrixStore::from_dense(Eigen::MatrixXd::Identity(2, 2)).norm_vector_state();
    CHECK(identity.amplitude(0).real() == Approx(1.0 / std::sqrt(2.0)));
    CHECK(identity.amplitude(1).real() == Approx(1.0 / std::sqrt(2.0)));

    const auto diag = MatrixStore::from_dense(Eigen::Vector2d(1.0, 0.5).asDiagonal()).norm_vector_state();
    CHECK(diag.amplitude(0).real() == Approx(1.0 / std::sqrt(1.25)));
    CHECK(diag.amplitude(1).real() == Approx(0.5 / std::sqrt(1.25)));

    MatrixStore single(3, 3);
    single.store_entry(1, 2, -7.0);
    const auto one = single.norm_vector_state();
    CHECK(one.amplitude(1).real() == Approx(1.0));
    CHECK(one.amplitude(0).real() == 0.0);

    CHECK_THROWS_AS(MatrixStore(2, 2).norm_vector_state(), dqls::DegenerateError);
}

TEST_CASE("ingest_stream is order independent with last write winning", "[matrix_store]") {
    const std::vector<MatrixEntry> forward{{0, 0, 1.0}, {1, 1, 1.0}};
    const std::vector<MatrixEntry> backward{{1, 1, 1.0}, {0, 0, 1.0}};
    CHECK(same_trees(dqls::ingest_stream(forward), dqls::ingest_stream(backward)));

    const std::vector<MatrixEntry> dup{{0, 0, 2.0}, {0, 0, 3.0}};
    const MatrixStore store = dqls::ingest_stream(dup);
    CHECK(store.row_tree(0).leaf(0) == 9.0);
    CHECK(store.entry(0, 0) == 3.0);

    const std::vector<MatrixEntry> oob{{0, 0, 1.0}, {5, 0, 1.0}};
    CHECK_THROWS_AS(dqls::ingest_stream(oob, 2, 2), dqls::IndexError);
}

TEST_CASE("a dense random stream reproduces the Frobenius norm", "[matrix_store]") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(4, 4);
    std::vector<MatrixEntry> records;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal(rng);
            records.push_back({i, j, a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        }
    }
    std::shuffle(records.begin(), records.end(), rng);
    const MatrixStore store = dqls::ingest_stream(records);
    CHECK(std::abs(store.frobenius_squared() - a.squaredNorm()) <= 1e-12 * a.squaredNorm());
    CHECK((store.to_dense() - a).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("internal nodes stay consistent under random interleavings", "[matrix_store][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng() % 9;
        const std::size_t n = 1 + rng() % 9;
        std::vector<MatrixEntry> records;
        for (int k = 0; k < 60; ++k) {
            records.push_back({rng() % m, rng() % n, value(rng)});
        }
        MatrixStore store(m, n);
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        const std::size_t path = ceil_log2(n) + ceil_log2(m) + 2;
        for (const auto &r : records) {
            store.store_entry(r.row, r.col, r.value);
            expected(static_cast<Eigen::Index>(r.row), static_cast<Eigen::Index>(r.col)) = r.value;
            REQUIRE(store.last_touched_nodes() == path);
        }
        REQUIRE(store.consistent(1e-12));
        REQUIRE((store.to_dense() - expected).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(store.touched_nodes() == path * records.size());
        CHECK(store.update_count() == records.size());
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(store.row_tree(i).root() == Approx(expected.row(static_cast<Eigen::Index>(i)).squaredNorm()));
            if (store.row_norm_squared(i) > 0.0) {
                CHECK(std::abs(store.row_state(i).amplitudes().norm() - 1.0) <= 1e-12);
            }
        }
        if (store.frobenius_squared() > 0.0) {
            CHECK(std::abs(store.norm_vector_state().amplitudes().norm() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("integer-scaled leaves give exact partial sums", "[matrix_store]") {
    dqls::SumTree tree(5);
    CHECK(tree.capacity() == 8);
    CHECK(tree.path_length() == 4);
    for (std::size_t leaf = 0; leaf < 5; ++leaf) {
        CHECK(tree.set(leaf, static_cast<double>(leaf + 1)) == 4);
    }
    CHECK(tree.root() == 15.0);
    CHECK(tree.node(2) == 10.0);
    CHECK(tree.node(3) == 5.0);
    CHECK(tree.consistent(0.0));
}
