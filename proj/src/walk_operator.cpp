#include "dqls/walk_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

/// Zero singular values are detected relative to ||A||_F.
constexpr double kZeroSigmaRatio = 1e-12;

Eigen::MatrixXd reflection(const Eigen::MatrixXd &isometry) {
    const Eigen::Index dim = isometry.rows();
    return 2.0 * isometry * isometry.transpose() - Eigen::MatrixXd::Identity(dim, dim);
}

std::vector<double> phases_of(const Eigen::VectorXcd &eigenvalues) {
    std::vector<double> phases(static_cast<std::size_t>(eigenvalues.size()));
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        phases[static_cast<std::size_t>(k)] = std::arg(eigenvalues(k));
    }
    std::sort(phases.begin(), phases.end());
    return phases;
}

/// Claims the unmatched phase nearest to `target`; returns its value.
double claim_nearest(std::vector<double> &phases, std::vector<bool> &used, double target,
                     Eigen::Index component) {
    std::size_t best = phases.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < phases.size(); ++k) {
        if (used[k]) {
            continue;
        }
        const double dist = circular_distance(phases[k], target);
        if (dist < best_dist) {
            best_dist = dist;
            best = k;
        }
    }
    if (best == phases.size() || best_dist > kPhaseMatchGuard) {
        throw StructuralMismatchError("no eigenphase of W within " + std::to_string(kPhaseMatchGuard) +
                                      " of predicted phase " + std::to_string(target) +
                                      " for component " + std::to_string(component));
    }
    used[best] = true;
    return phases[best];
}

} // namespace

IsometryPair build_isometries(const MatrixStore &store) {
    const auto m = static_cast<Eigen::Index>(store.rows());
    const auto n = static_cast<Eigen::Index>(store.cols());
    const double frob = store.frobenius_norm();
    if (frob == 0.0) {
        throw DegenerateError("matrix is zero; the walk isometries are undefined");
    }

    IsometryPair iso;
    iso.frobenius = frob;
    iso.row_isometry = Eigen::MatrixXd::Zero(m * n, m);
    iso.norm_isometry = Eigen::MatrixXd::Zero(m * n, n);
    const QuantumState norms = store.norm_vector_state();
    for (Eigen::Index i = 0; i < m; ++i) {
        // A zero row carries no weight in the norm state, so any unit vector completes M.
        const QuantumState row = store.row_norm_squared(static_cast<std::size_t>(i)) == 0.0
                                     ? QuantumState::basis(static_cast<std::size_t>(n), static_cast<std::size_t>(i % n))
                                     : store.row_state(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            iso.row_isometry(i * n + j, i) = row.amplitude(static_cast<std::size_t>(j)).real();
            iso.norm_isometry(i * n + j, j) = norms.amplitude(static_cast<std::size_t>(i)).real();
        }
    }
    return iso;
}

WalkUnitary::WalkUnitary(IsometryPair isometries)
    : isometries_(std::move(isometries)),
      walk_(reflection(isometries_.row_isometry) * reflection(isometries_.norm_isometry)) {}

Eigen::VectorXcd WalkUnitary::apply(const Eigen::VectorXcd &state) {
    if (state.size() != walk_.rows()) {
        throw ValidationError("state dimension does not match the walk");
    }
    ++applications_;
    return walk_.cast<Complex>() * state;
}

double WalkUnitary::orthogonality_error() const {
    const Eigen::Index dim = walk_.rows();
    return (walk_.transpose() * walk_ - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

WalkUnitary build_walk(IsometryPair isometries) { return WalkUnitary(std::move(isometries)); }

std::vector<double> eigenphases(const Eigen::MatrixXd &unitary) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(unitary, false);
    if (solver.info() != Eigen::Success) {
        throw StructuralMismatchError("eigensolver did not converge on the walk unitary");
    }
    return phases_of(solver.eigenvalues());
}

std::vector<double> eigenphases(const Eigen::MatrixXcd &unitary) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(unitary, false);
    if (solver.info() != Eigen::Success) {
        throw StructuralMismatchError("eigensolver did not converge on the unitary");
    }
    return phases_of(solver.eigenvalues());
}

double circular_distance(double a, double b) {
    const double diff = std::remainder(a - b, 2.0 * std::numbers::pi);
    return std::abs(diff);
}

WalkAngleReport walk_angles(const WalkUnitary &walk, const SingularSystem &system) {
    const IsometryPair &iso = walk.isometries();
    const double frob = iso.frobenius;
    if (!(frob > 0.0)) {
        throw DegenerateError("walk angles need a nonzero matrix");
    }
    if (system.v.rows() != iso.cols() || system.u.rows() != iso.rows()) {
        throw ValidationError("singular system does not match the walk dimensions");
    }

    WalkAngleReport report;
    report.eigenphases = eigenphases(walk.matrix());
    std::vector<double> pool = report.eigenphases;
    std::vector<bool> used(pool.size(), false);
    const Eigen::MatrixXd &w = walk.matrix();

    for (Eigen::Index k = 0; k < system.sigma.size(); ++k) {
        const double sigma = system.sigma(k);
        if (sigma <= kZeroSigmaRatio * frob) {
            report.zero_singular.push_back(k);
            continue;
        }
        const double ratio = std::clamp(sigma / frob, 0.0, 1.0);
        const Eigen::VectorXd nv = iso.norm_isometry * system.v.col(k);
        const Eigen::VectorXd mu = iso.row_isometry * system.u.col(k);
        const Eigen::VectorXd w_nv = w * nv;

        WalkAngle angle;
        angle.component = k;
        angle.sigma = sigma;
        angle.theta = 2.0 * std::acos(ratio);
        angle.cos_theta_residual = std::abs(nv.dot(w_nv) - (2.0 * ratio * ratio - 1.0));
        angle.rotation_residual = (w_nv - (2.0 * ratio * mu - nv)).norm();

        const double plus = claim_nearest(pool, used, angle.theta, k);
        angle.theta_measured = std::abs(plus);
        angle.cos_half_residual = std::abs(std::cos(plus / 2.0) - ratio);
        const double half_sin = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
        if (angle.theta > kPhaseMatchGuard) {
            const double minus = claim_nearest(pool, used, -angle.theta, k);
            angle.cos_half_residual =
                std::max(angle.cos_half_residual, std::abs(std::cos(minus / 2.0) - ratio));

            // Orthonormal plane basis {Nv, (Mu - cos(theta/2) Nv) / sin(theta/2)}.
            Eigen::MatrixXd plane(nv.size(), 2);
            plane.col(0) = nv;
            plane.col(1) = (mu - ratio * nv) / half_sin;
            const Eigen::MatrixXd block = plane.transpose() * w * plane;
            const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(block.cast<Complex>());
            const Eigen::MatrixXcd vecs = solver.eigenvectors();
            const Eigen::VectorXcd omega = vecs.adjoint() * Eigen::Vector2cd(1.0, 0.0);
            const bool first_is_plus = std::arg(solver.eigenvalues()(0)) >= 0.0;
            angle.omega_plus_sq = std::norm(omega(first_is_plus ? 0 : 1));
            angle.omega_minus_sq = std::norm(omega(first_is_plus ? 1 : 0));
        }
        report.angles.push_back(angle);
    }
    return report;
}

WalkAngleReport walk_angles(const WalkUnitary &walk, const SpectralDecomposition &spec) {
    return walk_angles(walk, singular_system(spec));
}

RestrictedWalk restrict_to_planes(const WalkUnitary &walk, const SingularSystem &system) {
    const IsometryPair &iso = walk.isometries();
    const double frob = iso.frobenius;
    std::vector<Eigen::VectorXd> spanning;
    for (Eigen::Index k = 0; k < system.sigma.size(); ++k) {
        if (system.sigma(k) <= kZeroSigmaRatio * frob) {
            continue;
        }
        spanning.emplace_back(iso.row_isometry * system.u.col(k));
        spanning.emplace_back(iso.norm_isometry * system.v.col(k));
    }
    RestrictedWalk out;
    if (spanning.empty()) {
        return out;
    }
    Eigen::MatrixXd stacked(iso.dim(), static_cast<Eigen::Index>(spanning.size()));
    for (std::size_t c = 0; c < spanning.size(); ++c) {
        stacked.col(static_cast<Eigen::Index>(c)) = spanning[c];
    }
    // Rank-revealing: the plane collapses to a line when sigma = ||A||_F.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > 1e-9) {
            ++rank;
        }
    }
    out.basis = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd &w = walk.matrix();
    const Eigen::MatrixXd image = w * out.basis;
    out.block = out.basis.transpose() * image;
    out.leakage = (image - out.basis * out.block).norm();
    out.eigenphases = eigenphases(out.block);
    return out;
}

} // namespace dqls
