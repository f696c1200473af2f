#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dqls/matrix_store.hpp"
#include "dqls/spectral_oracle.hpp"

namespace dqls {

/**
 * @brief The two isometries whose product factors A / ||A||_F.
 *
 * Both act on an mn-dimensional space indexed as `i * n + j`. Column i of the
 * row isometry is |i, A_i>; column j of the norm isometry is |A_F, j>.
 */
struct IsometryPair {
    Eigen::MatrixXd row_isometry;  ///< mn x m
    Eigen::MatrixXd norm_isometry; ///< mn x n
    double frobenius = 0.0;

    [[nodiscard]] Eigen::Index rows() const noexcept { return row_isometry.cols(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return norm_isometry.cols(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return row_isometry.rows(); }
};

/// Zero rows get a basis row state. Throws DegenerateError for the zero matrix.
IsometryPair build_isometries(const MatrixStore &store);

/**
 * @brief W = (2 M M^T - I)(2 N N^T - I), materialized densely.
 *
 * Each instance owns its application counter; solves that run concurrently
 * use separate instances.
 */
class WalkUnitary {
  public:
    explicit WalkUnitary(IsometryPair isometries);

    [[nodiscard]] const Eigen::MatrixXd &matrix() const noexcept { return walk_; }
    [[nodiscard]] const IsometryPair &isometries() const noexcept { return isometries_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return walk_.rows(); }

    /// W |state>; counts one application.
    Eigen::VectorXcd apply(const Eigen::VectorXcd &state);

    /// Adds `count` applications performed on this walk's behalf (e.g. controlled powers).
    void record_applications(std::uint64_t count) noexcept { applications_ += count; }
    [[nodiscard]] std::uint64_t applications() const noexcept { return applications_; }

    /// max |W^T W - I|
    [[nodiscard]] double orthogonality_error() const;

  private:
    IsometryPair isometries_;
    Eigen::MatrixXd walk_;
    std::uint64_t applications_ = 0;
};

WalkUnitary build_walk(IsometryPair isometries);

/// Phases of the eigenvalues of a real orthogonal (or complex unitary) matrix, in (-pi, pi].
std::vector<double> eigenphases(const Eigen::MatrixXd &unitary);
std::vector<double> eigenphases(const Eigen::MatrixXcd &unitary);

/// Smallest distance between two angles on the circle.
double circular_distance(double a, double b);

/// Pairing of one nonzero singular value with its rotation plane.
struct WalkAngle {
    Eigen::Index component = 0;
    double sigma = 0.0;
    double theta = 0.0;          ///< 2 arccos(sigma / ||A||_F)
    double theta_measured = 0.0; ///< matched numerical eigenphase (positive branch)
    /// max over the matched pair of |cos(phase / 2) - sigma / ||A||_F|
    double cos_half_residual = 0.0;
    /// |<Nv|W|Nv> - (2 sigma^2 / ||A||_F^2 - 1)|
    double cos_theta_residual = 0.0;
    /// || W Nv - ((2 sigma / ||A||_F) Mu - Nv) ||
    double rotation_residual = 0.0;
    /// Weights of |Nv> on the e^{+i theta} and e^{-i theta} eigenvectors of the plane.
    double omega_plus_sq = 1.0;
    double omega_minus_sq = 0.0;
};

struct WalkAngleReport {
    std::vector<WalkAngle> angles;
    std::vector<Eigen::Index> zero_singular; ///< components skipped because sigma = 0
    std::vector<double> eigenphases;         ///< full numerical spectrum of W
};

/// Eigenphase matching uses this guard; anything farther is a structural mismatch.
inline constexpr double kPhaseMatchGuard = 1e-6;

/**
 * @brief Matches every nonzero singular value to an eigenphase pair of W.
 *
 * Throws StructuralMismatchError when a predicted phase has no numerical
 * eigenphase within kPhaseMatchGuard.
 */
WalkAngleReport walk_angles(const WalkUnitary &walk, const SingularSystem &system);
WalkAngleReport walk_angles(const WalkUnitary &walk, const SpectralDecomposition &spec);

/// W restricted to span{M u_i, N v_i : sigma_i > 0}.
struct RestrictedWalk {
    Eigen::MatrixXd basis;   ///< orthonormal columns spanning the planes
    Eigen::MatrixXd block;   ///< basis^T W basis
    double leakage = 0.0;    ///< || (I - P) W basis ||, zero when the span is invariant
    std::vector<double> eigenphases;
};

RestrictedWalk restrict_to_planes(const WalkUnitary &walk, const SingularSystem &system);

} // namespace dqls
