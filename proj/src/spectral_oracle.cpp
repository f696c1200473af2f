#include "dqls/spectral_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> vec) {
    Eigen::Index arg = 0;
    vec.cwiseAbs().maxCoeff(&arg);
    if (vec(arg) < 0.0) {
        vec = -vec;
    }
}

} // namespace

bool is_symmetric(const Eigen::MatrixXd &matrix, double tol) {
    if (matrix.rows() != matrix.cols()) {
        return false;
    }
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double condition_number(const Eigen::VectorXd &eigenvalues) {
    if (eigenvalues.size() == 0) {
        throw ValidationError("condition number of an empty spectrum");
    }
    const Eigen::VectorXd mags = eigenvalues.cwiseAbs();
    const double largest = mags.maxCoeff();
    if (largest == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double smallest = mags.minCoeff();
    if (smallest <= kZeroEigenvalueRatio * largest) {
        return std::numeric_limits<double>::infinity();
    }
    return largest / smallest;
}

double SpectralDecomposition::spectral_norm() const {
    return singular_values.size() == 0 ? 0.0 : singular_values.maxCoeff();
}

Eigen::MatrixXd SpectralDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

SpectralDecomposition decompose(const Eigen::MatrixXd &matrix) {
    if (matrix.size() == 0) {
        throw ValidationError("cannot decompose an empty matrix");
    }
    if (!is_symmetric(matrix)) {
        throw ValidationError("matrix is not symmetric within tolerance");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success) {
        throw StructuralMismatchError("symmetric eigensolver did not converge");
    }
    const Eigen::Index n = matrix.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto &values = solver.eigenvalues();
    // Ties in |lambda| are broken by putting the positive eigenvalue first.
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(values(a)) != std::abs(values(b))) {
            return std::abs(values(a)) > std::abs(values(b));
        }
        return values(a) > values(b);
    });

    SpectralDecomposition spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        spec.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        spec.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
        fix_sign(spec.eigenvectors.col(k));
    }
    spec.singular_values = spec.eigenvalues.cwiseAbs();
    spec.kappa = condition_number(spec.eigenvalues);
    return spec;
}

SingularSystem singular_system(const SpectralDecomposition &spec) {
    SingularSystem sys;
    sys.sigma = spec.singular_values;
    sys.v = spec.eigenvectors;
    sys.u = spec.eigenvectors;
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        if (spec.eigenvalues(k) < 0.0) {
            sys.u.col(k) = -sys.u.col(k);
        }
    }
    return sys;
}

SingularSystem singular_system(const Eigen::MatrixXd &matrix) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

Eigen::MatrixXd hermitian_dilation(const Eigen::MatrixXd &matrix) {
    const Eigen::Index m = matrix.rows();
    const Eigen::Index n = matrix.cols();
    Eigen::MatrixXd dilated = Eigen::MatrixXd::Zero(m + n, m + n);
    dilated.topRightCorner(m, n) = matrix;
    dilated.bottomLeftCorner(n, m) = matrix.transpose();
    return dilated;
}

QuantumState true_solution(const SpectralDecomposition &spec, const Eigen::VectorXd &b) {
    if (b.size() != spec.size()) {
        throw ValidationError("right-hand side has the wrong dimension");
    }
    if (b.norm() == 0.0) {
        throw ValidationError("right-hand side is zero");
    }
    if (!std::isfinite(spec.kappa)) {
        throw SingularMatrixError("matrix is singular; A^{-1} b is undefined");
    }
    const Eigen::VectorXd coeffs =
        (spec.eigenvectors.transpose() * b).cwiseQuotient(spec.eigenvalues);
    return QuantumState::normalized(Eigen::VectorXd(spec.eigenvectors * coeffs));
}

QuantumState true_solution(const Eigen::MatrixXd &matrix, const Eigen::VectorXd &b) {
    return true_solution(decompose(matrix), b);
}

} // namespace dqls
