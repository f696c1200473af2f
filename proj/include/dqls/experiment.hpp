#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dqls/linear_solver.hpp"

namespace dqls {

/**
 * Generator families. All place |lambda| deterministically between 1/kappa
 * and 1; everything but `diagonal` is rotated by a seeded Haar orthogonal
 * matrix.
 *
 * - random_symmetric: magnitudes evenly spaced from 1 to 1/kappa, alternating signs
 * - random_psd: the same magnitudes, all positive
 * - diagonal: the same magnitudes on the diagonal, no rotation
 * - rank_one: (1/kappa) I plus a rank-one spike lifting one eigenvalue to 1
 */
enum class MatrixFamily { random_symmetric, random_psd, diagonal, rank_one };

MatrixFamily parse_family(std::string_view name);
std::string_view to_string(MatrixFamily family);

/// Eigenvalues the generator places, in descending |lambda|.
Eigen::VectorXd family_eigenvalues(MatrixFamily family, std::size_t n, double kappa);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(std::size_t n, Rng &rng);

/// Standard normal deviates by Box-Muller on uniform01.
Eigen::VectorXd gaussian_vector(std::size_t n, Rng &rng);

Eigen::MatrixXd generate_matrix(MatrixFamily family, std::size_t n, double kappa, std::uint64_t seed);

/// One point of the precision grid: either epsilon drives t, or t is fixed.
struct PrecisionSetting {
    double epsilon = 0.05;
    int bits = 0; ///< 0: derived from epsilon
};

struct ExperimentSpec {
    std::optional<std::filesystem::path> matrix_file; ///< overrides family and dimensions
    MatrixFamily family = MatrixFamily::random_symmetric;
    std::vector<std::size_t> dimensions{4};
    std::vector<double> kappas{4.0};
    std::vector<double> epsilons;
    std::vector<double> deltas; ///< converted to t with bits_for_precision
    std::vector<int> t_bits;
    std::size_t repeats = 1;
    std::size_t shots = 0; ///< >0 adds a sampled post-selection frequency column
    std::uint64_t seed = 0;
    std::optional<Eigen::VectorXd> b;
    SolverConfig base;
    unsigned threads = 1;
    std::optional<std::filesystem::path> csv_out;
    std::optional<std::filesystem::path> summary_out;

    /// Epsilon, delta and t grids flattened in that order.
    [[nodiscard]] std::vector<PrecisionSetting> precision_grid() const;
    /// Throws ValidationError on empty grids or out-of-range values.
    void validate() const;
};

ExperimentSpec experiment_spec_from_json(const nlohmann::json &doc);

/// Seed of repeat r; the same matrix is reused across every other grid axis.
std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat);

struct SweepRow {
    std::size_t n = 0;
    double kappa = 0.0;
    double frobenius_norm = 0.0;
    double spectral_norm = 0.0;
    int bits = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double distance = 0.0;
    double post_selection_probability = 0.0;
    std::uint64_t walk_applications = 0;
    std::uint64_t seed = 0;
    double sampled_post_selection = -1.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// Fit on log(x), log(y); pairs with a non-positive coordinate are dropped.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct SweepResult {
    std::vector<SweepRow> rows;
    nlohmann::json summary;
};

/// Runs every (n, kappa, precision, repeat) cell; rows come back in that nested order.
SweepResult run_sweep(const ExperimentSpec &spec);

std::string sweep_csv(const std::vector<SweepRow> &rows, bool with_sampled_column);

/// Runs the sweep and writes the CSV and summary files it names.
SweepResult run_sweep_to_files(const ExperimentSpec &spec);

} // namespace dqls
