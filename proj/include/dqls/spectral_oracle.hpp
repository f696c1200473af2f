#pragma once

#include <Eigen/Dense>

#include "dqls/quantum_state.hpp"

namespace dqls {

/// Eigenvalues below this fraction of max|lambda| count as zero for the condition number.
inline constexpr double kZeroEigenvalueRatio = 1e-14;
/// Symmetry tolerance accepted by `decompose`.
inline constexpr double kSymmetryTolerance = 1e-12;

/**
 * @brief Exact eigendecomposition of a real symmetric matrix.
 *
 * Eigenpairs are sorted by descending |lambda|. Each eigenvector is signed so
 * that its largest-magnitude component is positive.
 */
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors; ///< column i pairs with eigenvalues(i)
    Eigen::VectorXd singular_values;
    double kappa = 0.0; ///< infinity for singular matrices

    [[nodiscard]] Eigen::Index size() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] double spectral_norm() const;
    [[nodiscard]] Eigen::MatrixXd reconstruct() const;
};

/**
 * @brief Singular triplets A = sum_i sigma_i u_i v_i^T.
 *
 * For symmetric input built from a SpectralDecomposition, v_i = s_i and
 * u_i = sign(lambda_i) s_i, so the triplet of every eigenpair is well defined
 * even when +lambda and -lambda share a singular value.
 */
struct SingularSystem {
    Eigen::VectorXd sigma;
    Eigen::MatrixXd u; ///< m x r
    Eigen::MatrixXd v; ///< n x r
};

SpectralDecomposition decompose(const Eigen::MatrixXd &matrix);

double condition_number(const Eigen::VectorXd &eigenvalues);

SingularSystem singular_system(const SpectralDecomposition &spec);
/// Thin SVD of a general real matrix, sigma descending.
SingularSystem singular_system(const Eigen::MatrixXd &matrix);

/// [[0, A], [A^T, 0]]
Eigen::MatrixXd hermitian_dilation(const Eigen::MatrixXd &matrix);

/// Normalized A^{-1} b. Throws SingularMatrixError when A is not invertible.
QuantumState true_solution(const Eigen::MatrixXd &matrix, const Eigen::VectorXd &b);
QuantumState true_solution(const SpectralDecomposition &spec, const Eigen::VectorXd &b);

bool is_symmetric(const Eigen::MatrixXd &matrix, double tol = kSymmetryTolerance);

} // namespace dqls
