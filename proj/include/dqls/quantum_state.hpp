#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace dqls {

using Complex = std::complex<double>;

/// Tolerance on the unit-norm invariant of a QuantumState.
inline constexpr double kNormTolerance = 1e-10;

/**
 * @brief Normalized complex amplitude vector.
 *
 * The basis is either a bare system register or an ancilla register tensored
 * with a system register. Joint indices are laid out ancilla-major:
 * `index = ancilla * system_dim + system`.
 */
class QuantumState {
  public:
    /// The one-dimensional state (1).
    QuantumState() : amplitudes_(Eigen::VectorXcd::Ones(1)), ancilla_dim_(1) {}

    /// Takes ownership of already-normalized amplitudes; throws ValidationError otherwise.
    explicit QuantumState(Eigen::VectorXcd amplitudes, std::size_t ancilla_dim = 1);

    /// Rescales `amplitudes` to unit norm. Throws ValidationError on a zero vector.
    static QuantumState normalized(Eigen::VectorXcd amplitudes, std::size_t ancilla_dim = 1);
    static QuantumState normalized(const Eigen::VectorXd &amplitudes);

    /// Computational basis state |index>.
    static QuantumState basis(std::size_t dim, std::size_t index);

    [[nodiscard]] const Eigen::VectorXcd &amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(amplitudes_.size());
    }
    [[nodiscard]] std::size_t ancilla_dim() const noexcept { return ancilla_dim_; }
    [[nodiscard]] std::size_t system_dim() const noexcept { return dim() / ancilla_dim_; }

    [[nodiscard]] Complex amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }
    [[nodiscard]] Complex amplitude(std::size_t ancilla, std::size_t system) const {
        return amplitude(ancilla * system_dim() + system);
    }

    /// Block of system amplitudes attached to one ancilla value.
    [[nodiscard]] Eigen::VectorXcd system_block(std::size_t ancilla) const;

    /// Probability of each ancilla value, summed over the system register.
    [[nodiscard]] Eigen::VectorXd ancilla_marginal() const;

    /// <this|other>
    [[nodiscard]] Complex inner(const QuantumState &other) const;
    /// |<this|other>|^2
    [[nodiscard]] double fidelity(const QuantumState &other) const;
    /// Euclidean distance between the two amplitude vectors.
    [[nodiscard]] double distance(const QuantumState &other) const;

  private:
    Eigen::VectorXcd amplitudes_;
    std::size_t ancilla_dim_;
};

} // namespace dqls
