#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dqls/quantum_state.hpp"
#include "dqls/walk_operator.hpp"

namespace dqls {

/// Ancilla width accepted by the statevector simulator.
inline constexpr int kMaxAncillaBits = 14;
/// Unitarity tolerance, max-entry of U^dagger U - I.
inline constexpr double kUnitaryTolerance = 1e-12;

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits; identical on every platform.
double uniform01(Rng &rng);
/// Independent stream seed for `counter` under `master` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);
/// Inverse-CDF draw: smallest index whose cumulative probability exceeds `u`.
std::size_t sample_index(std::span<const double> probs, double u);
/// Lower median for even counts.
double median_of(std::vector<double> values);

[[nodiscard]] inline std::size_t grid_size(int bits) { return std::size_t{1} << bits; }
/// 2 pi / 2^t
double grid_spacing(int bits);
/// Phase for outcome k; k >= 2^{t-1} maps to the negative branch, result in [-pi, pi).
double grid_phase(std::size_t k, int bits);
/// t = ceil(log2(2 pi c_slack / delta)), at least 1.
int bits_for_precision(double delta, double c_slack);

/// |sin(N x / 2) / (N sin(x / 2))|^2, the single-run outcome probability at phase offset x.
double fejer_kernel(double offset, std::size_t grid);

/// Exact t-bit outcome distribution for one eigenphase.
std::vector<double> outcome_distribution(double phase, int bits);

/**
 * @brief Phase estimation on a dense unitary.
 *
 * Holds U^{2^l} for l = 0..t-1, computed by repeated squaring. `run` applies
 * the Hadamard layer, the controlled powers and the inverse Fourier transform
 * to |0>|input>; the result is laid out ancilla-major.
 */
class PhaseEstimator {
  public:
    PhaseEstimator(const Eigen::MatrixXcd &unitary, int bits);

    [[nodiscard]] QuantumState run(const QuantumState &input) const;
    /// Inverse circuit on a joint (ancilla x system) state.
    [[nodiscard]] Eigen::VectorXcd run_inverse(const Eigen::VectorXcd &joint) const;

    [[nodiscard]] int bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t system_dim() const noexcept { return system_dim_; }
    /// Sum of 2^l over the controlled powers, i.e. 2^t - 1.
    [[nodiscard]] std::uint64_t applications_per_run() const noexcept { return (std::uint64_t{1} << bits_) - 1; }

  private:
    void controlled_powers(Eigen::VectorXcd &joint, bool inverse) const;

    int bits_;
    std::size_t system_dim_;
    std::vector<Eigen::MatrixXcd> powers_;
};

QuantumState qpe_statevector(const Eigen::MatrixXcd &unitary, const QuantumState &input, int bits);
/// Same circuit on a walk; records 2^t - 1 walk applications.
QuantumState qpe_statevector(WalkUnitary &walk, const QuantumState &input, int bits);

/// Closed-form outcome statistics for a superposition of eigencomponents.
struct PhaseEstimateDistribution {
    int bits = 0;
    std::vector<double> weights;
    std::vector<std::vector<double>> components; ///< per component, probability of each k

    [[nodiscard]] std::size_t size() const noexcept { return components.size(); }
    [[nodiscard]] double phase(std::size_t k) const { return grid_phase(k, bits); }
    /// sum_j weight_j * P_j(k)
    [[nodiscard]] std::vector<double> marginal() const;
};

PhaseEstimateDistribution qpe_exact_spectral(std::span<const double> phases, std::span<const double> weights,
                                             int bits);

/// Total variation distance between two distributions of the same length.
double total_variation(std::span<const double> p, std::span<const double> q);

/**
 * Worst case over the position of the true phase between grid points of the
 * probability that one run lands more than `steps` grid spacings away.
 */
double outcome_tail(int bits, double steps);
/// P(at least (r + 1) / 2 of r runs fail) when each fails with probability p.
double median_failure_bound(double p, int repetitions);

struct PhaseErrorBound {
    int bits = 0;
    int repetitions = 1;
    double c_slack = 0.0;
    double grid_spacing = 0.0;
    double delta = 0.0;                   ///< c_slack * grid spacing
    double nearest_bin_probability = 0.0; ///< worst case, single run
    double two_bin_probability = 0.0;     ///< worst case, single run
    double single_run_tail = 0.0;         ///< P(|error| >= one grid spacing), worst case
    double median_tail = 0.0;             ///< same event for the median of `repetitions` runs
};

PhaseErrorBound phase_error_bound(int bits, int repetitions, double c_slack);

} // namespace dqls
