#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dqls/matrix_store.hpp"
#include "dqls/phase_estimation.hpp"
#include "dqls/spectral_oracle.hpp"

namespace dqls {

enum class QsveMode { coherent, sampled };

/// How the phase register statistics are produced.
enum class QsveBackend {
    exact_spectral, ///< closed-form kernel per eigenphase, no statevector
    statevector,    ///< full phase estimation circuit on the dense walk
};

struct QsveOptions {
    int bits = 8;
    QsveMode mode = QsveMode::coherent;
    QsveBackend backend = QsveBackend::exact_spectral;
    std::size_t shots = 0;
    /// Each shot reports the median of this many independent estimates (odd).
    int repetitions = 1;
    std::uint64_t seed = 0;
    /// Coherent statevector runs also simulate the uncompute step when it fits in this many amplitude-ops.
    double uncompute_budget = 5e8;
};

/**
 * @brief One right singular vector of the input expansion.
 *
 * `outcome_probs[k]` is the probability of phase outcome k. The singular value
 * register only sees |theta|, so outcomes k and 2^t - k are merged into
 * register value s = min(k, 2^t - k).
 */
struct QsveComponent {
    Eigen::Index index = 0;
    double sigma = 0.0;
    double theta = 0.0;
    Complex alpha{0.0, 0.0};
    double weight = 0.0; ///< |alpha|^2
    Eigen::VectorXd v;
    double omega_plus_sq = 1.0;
    double omega_minus_sq = 0.0;
    std::vector<double> outcome_probs;

    /// Probability of each register value s in [0, 2^{t-1}].
    [[nodiscard]] std::vector<double> register_probs() const;
};

struct QsveShot {
    std::size_t component = 0;
    std::vector<std::size_t> registers; ///< register value of every repetition
    double sigma_bar = 0.0;             ///< median estimate
};

struct QsveOutput {
    std::vector<QsveComponent> components;
    double frobenius = 0.0;
    int bits = 0;
    QsveMode mode = QsveMode::coherent;
    QsveBackend backend = QsveBackend::exact_spectral;
    std::uint64_t walk_applications = 0;
    std::vector<QsveShot> shots;

    /// Probability that the uncompute step returns the workspace to |0>|range(N)>;
    /// NaN when it was not simulated.
    double uncompute_fidelity = std::numeric_limits<double>::quiet_NaN();
    /// Clean-workspace projection, index s * n + j over (register value, input coordinate).
    Eigen::VectorXcd coherent_state;

    [[nodiscard]] std::size_t register_size() const { return grid_size(bits) / 2 + 1; }
    /// ||A||_F cos(theta_k / 2) for phase outcome k.
    [[nodiscard]] double sigma_bar(std::size_t k) const;
    /// ||A||_F cos(pi s / 2^t) for register value s.
    [[nodiscard]] double register_sigma(std::size_t s) const;
};

/// Right singular system used to expand inputs: eigenbasis for symmetric matrices, SVD otherwise.
SingularSystem input_basis(const MatrixStore &store);

QsveOutput qsve_run(const MatrixStore &store, const Eigen::VectorXcd &input, const QsveOptions &options);
/// Uses a caller-supplied singular system (shared by both passes of the solver).
QsveOutput qsve_run(const MatrixStore &store, const SingularSystem &basis, const Eigen::VectorXcd &input,
                    const QsveOptions &options);

/// Median-of-`repetitions` estimate for every component, one stream of uniforms from `rng`.
std::vector<double> sample_component_estimates(const QsveOutput &output, Rng &rng, int repetitions);

struct QsveAudit {
    double tolerance = 0.0;          ///< delta * ||A||_F
    std::vector<double> mass_within; ///< per component, P(|sigma_bar - sigma| <= tolerance)
    double min_mass = 1.0;
    double weighted_mass = 0.0;
    double sampled_failure_rate = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t walk_applications = 0;
    double inverse_delta = 0.0;
};

QsveAudit qsve_error_audit(const QsveOutput &output, const SingularSystem &oracle, double delta);

} // namespace dqls
