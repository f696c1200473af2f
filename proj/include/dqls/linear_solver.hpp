#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dqls/filters.hpp"
#include "dqls/matrix_store.hpp"
#include "dqls/phase_estimation.hpp"
#include "dqls/qsve.hpp"
#include "dqls/quantum_state.hpp"
#include "dqls/spectral_oracle.hpp"

namespace dqls {

/**
 * Sign-recovery parameterization.
 *
 * `corrected` shifts by mu = 1/kappa and budgets 1/(4 kappa) of absolute
 * error per estimate. `paper_faithful` shifts by mu = 4/kappa with a budget of
 * 1/kappa; it misclassifies exact eigenvalues in (-2/kappa, -1/kappa].
 */
enum class SolverMode { corrected, paper_faithful };

SolverMode parse_solver_mode(std::string_view name);
std::string_view to_string(SolverMode mode);
QsveBackend parse_backend(std::string_view name);
std::string_view to_string(QsveBackend backend);

/// Default cap on amplitudes held by one simulation, n^2 * 2^t.
inline constexpr std::size_t kDefaultMemoryGuard = std::size_t{1} << 20;

/// Zero fields are resolved from the matrix and mode at solve time.
struct SolverConfig {
    double kappa = 0.0;   ///< 0: use the oracle condition number
    double mu = 0.0;      ///< 0: 1/kappa (corrected) or 4/kappa (paper-faithful)
    double epsilon = 0.05;
    double gamma = 0.0;   ///< 0: 1/(2 kappa)
    int bits = 0;         ///< 0: derived from delta
    SolverMode mode = SolverMode::corrected;
    FilterKind filter = FilterKind::invert_only;
    RampShape ramp = RampShape::circular;
    QsveBackend backend = QsveBackend::exact_spectral;
    int repetitions = 15; ///< median-of-r per eigenvalue estimate
    double c_slack = 0.5; ///< delta = c_slack * grid spacing
    double lipschitz_c = std::numbers::pi / 2.0;
    bool normalize = true;
    std::uint64_t seed = 0;
    std::size_t memory_guard = kDefaultMemoryGuard;
};

/// The guard from the DQLS_MEMORY_GUARD environment variable, else the default.
std::size_t memory_guard_from_env();

struct ResolvedParameters {
    double kappa = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    double sign_budget = 0.0; ///< allowed absolute error per eigenvalue estimate for sign recovery
    double delta = 0.0;
    int bits = 0;
    double scale = 1.0; ///< A was divided by this before solving
    double frobenius = 0.0;
    double shifted_frobenius = 0.0;
    double spectral_norm = 0.0;
};

/// f_i = 1 (negative) iff |lambda_bar| > |lambda_bar + mu|.
std::vector<bool> recover_signs(std::span<const double> estimates, std::span<const double> shifted_estimates);
/// Per-shot flags from two sampled QSVE outputs that share their component draws.
std::vector<bool> recover_signs(const QsveOutput &estimates, const QsveOutput &shifted_estimates);

/**
 * @brief Pre-measurement state after the conditional rotation.
 *
 * Component i carries beta_i |v_i> (h_NO |NO> + h_WC |WC> + h_IC |IC>). Joint
 * amplitudes are indexed `flag * r + i` with flag WC = 0, NO = 1, IC = 2.
 */
struct RotatedState {
    Eigen::MatrixXd basis; ///< n x r, columns v_i
    Eigen::VectorXcd beta;
    std::vector<double> lambda_hat;
    std::vector<RotationAmplitudes> rotation;

    static constexpr std::size_t kWellConditioned = 0;
    static constexpr std::size_t kNoInversion = 1;
    static constexpr std::size_t kIllConditioned = 2;

    [[nodiscard]] Eigen::VectorXcd amplitudes() const;
};

RotatedState conditional_rotation(const Eigen::MatrixXd &basis, const Eigen::VectorXcd &beta,
                                  std::span<const double> lambda_hat, const FilterFunctions &filter);

struct PostSelection {
    QuantumState state;
    double probability = 0.0;
    double repetitions_raw = 0.0;       ///< 1 / p
    double repetitions_amplified = 0.0; ///< 1 / sqrt(p)
};

/// Keeps the WC branch. Throws DegenerateError when p < 1e-15.
PostSelection post_select(const RotatedState &rotated);

/// Measures the full joint state `shots` times and counts WC outcomes.
std::size_t sample_post_selection(const RotatedState &rotated, std::size_t shots, Rng &rng);

struct SignDecision {
    double lambda_true = 0.0;
    double lambda_hat = 0.0;
    double estimate = 0.0;         ///< |lambda| estimate from the A pass
    double shifted_estimate = 0.0; ///< |lambda + mu| estimate from the shifted pass
    bool flag = false;             ///< true: recovered sign is negative
    bool correct = false;
};

struct SolveReport {
    SolverConfig config;
    ResolvedParameters parameters;
    QuantumState output_state;
    QuantumState true_state;
    double fidelity = 0.0;
    double distance = 0.0;
    double post_selection_probability = 0.0;
    double repetitions_raw = 0.0;
    double repetitions_amplified = 0.0;
    std::uint64_t walk_applications = 0;
    std::vector<SignDecision> signs;
    RotatedState rotated;
};

struct NormalizedMatrix {
    Eigen::MatrixXd matrix;
    double scale = 1.0;
};

/// Divides a symmetric matrix by its spectral norm so that max |lambda| = 1.
NormalizedMatrix spectrum_normalize(const Eigen::MatrixXd &matrix);

ResolvedParameters resolve_parameters(const SpectralDecomposition &spec, const SolverConfig &config,
                                      double scale);

SolveReport solve(const MatrixStore &store, const Eigen::VectorXd &b, const SolverConfig &config);

/// Uniform vector (1, ..., 1) / sqrt(n).
Eigen::VectorXd uniform_rhs(Eigen::Index n);

} // namespace dqls
