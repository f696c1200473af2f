#include "dqls/qsve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dqls/errors.hpp"
#include "dqls/walk_operator.hpp"

namespace dqls {

namespace {

constexpr double kPi = std::numbers::pi;

/// Floating-point slack on the |sigma_bar - sigma| <= delta ||A||_F comparison.
constexpr double kAuditSlack = 1e-12;

void fill_from_kernel(QsveComponent &comp, int bits) {
    const std::vector<double> plus = outcome_distribution(comp.theta, bits);
    const std::vector<double> minus = outcome_distribution(-comp.theta, bits);
    comp.outcome_probs.resize(plus.size());
    for (std::size_t k = 0; k < plus.size(); ++k) {
        comp.outcome_probs[k] = comp.omega_plus_sq * plus[k] + comp.omega_minus_sq * minus[k];
    }
}

std::vector<QsveShot> draw_shots(const QsveOutput &out, const QsveOptions &options) {
    std::vector<double> weights;
    weights.reserve(out.components.size());
    for (const auto &c : out.components) {
        weights.push_back(c.weight);
    }
    std::vector<std::vector<double>> registers;
    registers.reserve(out.components.size());
    for (const auto &c : out.components) {
        registers.push_back(c.register_probs());
    }

    std::vector<QsveShot> shots(options.shots);
    for (std::size_t shot = 0; shot < options.shots; ++shot) {
        Rng rng(derive_seed(options.seed, shot));
        QsveShot &s = shots[shot];
        s.component = sample_index(weights, uniform01(rng));
        std::vector<double> estimates;
        for (int r = 0; r < options.repetitions; ++r) {
            const std::size_t reg = sample_index(registers[s.component], uniform01(rng));
            s.registers.push_back(reg);
            estimates.push_back(out.register_sigma(reg));
        }
        s.sigma_bar = median_of(std::move(estimates));
    }
    return shots;
}

/**
 * Copies the register value s = min(k, N - k) out of the phase register, runs
 * the inverse circuit on each branch and projects onto the clean workspace.
 */
void simulate_uncompute(QsveOutput &out, const PhaseEstimator &estimator, const QuantumState &joint,
                        const IsometryPair &iso) {
    const std::size_t grid = grid_size(out.bits);
    const auto sys = static_cast<Eigen::Index>(iso.dim());
    const Eigen::Index n = iso.cols();
    out.coherent_state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out.register_size()) * n);
    double clean = 0.0;
    for (std::size_t s = 0; s < out.register_size(); ++s) {
        Eigen::VectorXcd branch = Eigen::VectorXcd::Zero(joint.amplitudes().size());
        const std::size_t mirror = (grid - s) % grid;
        for (const std::size_t k : {s, mirror}) {
            branch.segment(static_cast<Eigen::Index>(k) * sys, sys) = joint.system_block(k);
        }
        const Eigen::VectorXcd restored = estimator.run_inverse(branch);
        const Eigen::VectorXcd projected = iso.norm_isometry.transpose().cast<Complex>() * restored.head(sys);
        out.coherent_state.segment(static_cast<Eigen::Index>(s) * n, n) = projected;
        clean += projected.squaredNorm();
    }
    out.uncompute_fidelity = clean;
}

} // namespace

std::vector<double> QsveComponent::register_probs() const {
    const std::size_t grid = outcome_probs.size();
    std::vector<double> reg(grid / 2 + 1, 0.0);
    for (std::size_t k = 0; k < grid; ++k) {
        reg[std::min(k, grid - k)] += outcome_probs[k];
    }
    return reg;
}

double QsveOutput::sigma_bar(std::size_t k) const { return frobenius * std::cos(grid_phase(k, bits) / 2.0); }

double QsveOutput::register_sigma(std::size_t s) const {
    return frobenius * std::cos(kPi * static_cast<double>(s) / static_cast<double>(grid_size(bits)));
}

SingularSystem input_basis(const MatrixStore &store) {
    const Eigen::MatrixXd dense = store.to_dense();
    if (is_symmetric(dense)) {
        return singular_system(decompose(dense));
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Index n = dense.cols();
    const Eigen::Index r = svd.singularValues().size();
    SingularSystem sys;
    sys.sigma = Eigen::VectorXd::Zero(n);
    sys.sigma.head(r) = svd.singularValues();
    sys.v = svd.matrixV();
    sys.u = Eigen::MatrixXd::Zero(dense.rows(), n);
    sys.u.leftCols(std::min(r, n)) = svd.matrixU().leftCols(std::min(r, n));
    return sys;
}

QsveOutput qsve_run(const MatrixStore &store, const Eigen::VectorXcd &input, const QsveOptions &options) {
    return qsve_run(store, input_basis(store), input, options);
}

QsveOutput qsve_run(const MatrixStore &store, const SingularSystem &basis, const Eigen::VectorXcd &input,
                    const QsveOptions &options) {
    const auto n = static_cast<Eigen::Index>(store.cols());
    if (input.size() != n) {
        throw ValidationError("input has dimension " + std::to_string(input.size()) + ", matrix has " +
                              std::to_string(n) + " columns");
    }
    if (basis.v.rows() != n || basis.v.cols() != basis.sigma.size()) {
        throw ValidationError("singular basis does not match the matrix");
    }
    if (options.repetitions < 1 || options.repetitions % 2 == 0) {
        throw ValidationError("repetitions must be a positive odd number");
    }
    if (options.bits < 1 || options.bits > kMaxAncillaBits) {
        throw ResourceError("ancilla width " + std::to_string(options.bits) + " outside [1, " +
                            std::to_string(kMaxAncillaBits) + "]");
    }
    const double input_norm = input.norm();
    if (!(input_norm > 0.0) || !std::isfinite(input_norm)) {
        throw ValidationError("QSVE input state is zero");
    }
    const Eigen::VectorXcd psi = input / input_norm;
    const double frob = store.frobenius_norm();
    if (frob == 0.0) {
        throw DegenerateError("matrix is zero; singular values cannot be estimated");
    }

    QsveOutput out;
    out.frobenius = frob;
    out.bits = options.bits;
    out.mode = options.mode;
    out.backend = options.backend;

    const Eigen::VectorXcd alpha = basis.v.transpose().cast<Complex>() * psi;
    double total_weight = 0.0;
    for (Eigen::Index i = 0; i < basis.sigma.size(); ++i) {
        QsveComponent comp;
        comp.index = i;
        comp.sigma = basis.sigma(i);
        comp.theta = 2.0 * std::acos(std::clamp(comp.sigma / frob, 0.0, 1.0));
        comp.alpha = alpha(i);
        comp.weight = std::norm(alpha(i));
        comp.v = basis.v.col(i);
        if (comp.theta > kPhaseMatchGuard && comp.theta < kPi - kPhaseMatchGuard) {
            comp.omega_plus_sq = 0.5;
            comp.omega_minus_sq = 0.5;
        }
        total_weight += comp.weight;
        out.components.push_back(std::move(comp));
    }
    if (std::abs(total_weight - 1.0) > kNormTolerance) {
        throw ValidationError("input is not spanned by the singular basis");
    }

    if (options.backend == QsveBackend::exact_spectral) {
        for (auto &comp : out.components) {
            fill_from_kernel(comp, options.bits);
        }
        out.walk_applications = (std::uint64_t{1} << options.bits) - 1;
    } else {
        WalkUnitary walk = build_walk(build_isometries(store));
        const IsometryPair &iso = walk.isometries();
        const WalkAngleReport angles = walk_angles(walk, basis);
        for (const auto &a : angles.angles) {
            auto &comp = out.components[static_cast<std::size_t>(a.component)];
            comp.omega_plus_sq = a.omega_plus_sq;
            comp.omega_minus_sq = a.omega_minus_sq;
        }

        const PhaseEstimator estimator(walk.matrix().cast<Complex>(), options.bits);
        const Eigen::MatrixXcd embed = iso.norm_isometry.cast<Complex>();
        const QuantumState joint = estimator.run(QuantumState::normalized(Eigen::VectorXcd(embed * psi)));
        walk.record_applications(estimator.applications_per_run());

        // Per-component statistics come from separate runs on |N v_i>; these are
        // analysis only and are not charged to the walk counter.
        for (auto &comp : out.components) {
            const Eigen::VectorXcd nv = embed * comp.v.cast<Complex>();
            const Eigen::VectorXd marginal = estimator.run(QuantumState::normalized(nv)).ancilla_marginal();
            comp.outcome_probs.assign(marginal.data(), marginal.data() + marginal.size());
        }

        if (options.mode == QsveMode::coherent) {
            const auto grid = static_cast<double>(grid_size(options.bits));
            const auto dim = static_cast<double>(iso.dim());
            const double cost =
                (grid / 2.0 + 1.0) * (grid * dim * options.bits + options.bits * grid / 2.0 * dim * dim);
            if (cost <= options.uncompute_budget) {
                simulate_uncompute(out, estimator, joint, iso);
            }
        }
        out.walk_applications = walk.applications();
    }

    if (options.mode == QsveMode::sampled) {
        out.shots = draw_shots(out, options);
    }
    return out;
}

std::vector<double> sample_component_estimates(const QsveOutput &output, Rng &rng, int repetitions) {
    if (repetitions < 1 || repetitions % 2 == 0) {
        throw ValidationError("repetitions must be a positive odd number");
    }
    std::vector<double> estimates;
    estimates.reserve(output.components.size());
    for (const auto &comp : output.components) {
        const std::vector<double> reg = comp.register_probs();
        std::vector<double> draws;
        draws.reserve(static_cast<std::size_t>(repetitions));
        for (int r = 0; r < repetitions; ++r) {
            draws.push_back(output.register_sigma(sample_index(reg, uniform01(rng))));
        }
        estimates.push_back(median_of(std::move(draws)));
    }
    return estimates;
}

QsveAudit qsve_error_audit(const QsveOutput &output, const SingularSystem &oracle, double delta) {
    if (static_cast<std::size_t>(oracle.sigma.size()) != output.components.size()) {
        throw ValidationError("oracle and QSVE output have different component counts");
    }
    if (!(delta > 0.0)) {
        throw ValidationError("audit precision must be positive");
    }
    QsveAudit audit;
    audit.tolerance = delta * output.frobenius;
    audit.walk_applications = output.walk_applications;
    audit.inverse_delta = 1.0 / delta;
    for (std::size_t i = 0; i < output.components.size(); ++i) {
        const double sigma = oracle.sigma(static_cast<Eigen::Index>(i));
        const std::vector<double> reg = output.components[i].register_probs();
        double mass = 0.0;
        for (std::size_t s = 0; s < reg.size(); ++s) {
            if (std::abs(output.register_sigma(s) - sigma) <= audit.tolerance + kAuditSlack) {
                mass += reg[s];
            }
        }
        audit.mass_within.push_back(mass);
        audit.min_mass = std::min(audit.min_mass, mass);
        audit.weighted_mass += output.components[i].weight * mass;
    }
    if (!output.shots.empty()) {
        std::size_t failures = 0;
        for (const auto &shot : output.shots) {
            const double sigma = oracle.sigma(static_cast<Eigen::Index>(shot.component));
            if (std::abs(shot.sigma_bar - sigma) > audit.tolerance + kAuditSlack) {
                ++failures;
            }
        }
        audit.sampled_failure_rate = static_cast<double>(failures) / static_cast<double>(output.shots.size());
    }
    return audit;
}

} // namespace dqls
