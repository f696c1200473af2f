#include "dqls/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

constexpr double kMinPostSelection = 1e-15;
/// Relative slack when checking eigenvalues against [1/kappa, 1].
constexpr double kRangeSlack = 1e-9;

SingularSystem shifted_system(const SpectralDecomposition &spec, double mu) {
    SingularSystem sys;
    const Eigen::VectorXd shifted = spec.eigenvalues.array() + mu;
    sys.sigma = shifted.cwiseAbs();
    sys.v = spec.eigenvectors;
    sys.u = spec.eigenvectors;
    for (Eigen::Index k = 0; k < shifted.size(); ++k) {
        if (shifted(k) < 0.0) {
            sys.u.col(k) = -sys.u.col(k);
        }
    }
    return sys;
}

} // namespace

SolverMode parse_solver_mode(std::string_view name) {
    if (name == "corrected") {
        return SolverMode::corrected;
    }
    if (name == "paper-faithful") {
        return SolverMode::paper_faithful;
    }
    throw ValidationError("unknown mode '" + std::string(name) + "' (expected corrected or paper-faithful)");
}

std::string_view to_string(SolverMode mode) {
    return mode == SolverMode::corrected ? "corrected" : "paper-faithful";
}

QsveBackend parse_backend(std::string_view name) {
    if (name == "exact-spectral") {
        return QsveBackend::exact_spectral;
    }
    if (name == "statevector") {
        return QsveBackend::statevector;
    }
    throw ValidationError("unknown backend '" + std::string(name) + "' (expected exact-spectral or statevector)");
}

std::string_view to_string(QsveBackend backend) {
    return backend == QsveBackend::exact_spectral ? "exact-spectral" : "statevector";
}

std::size_t memory_guard_from_env() {
    const char *value = std::getenv("DQLS_MEMORY_GUARD");
    if (value == nullptr || *value == '\0') {
        return kDefaultMemoryGuard;
    }
    char *end = nullptr;
    const unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end == value || *end != '\0' || parsed == 0) {
        throw ValidationError(std::string("DQLS_MEMORY_GUARD must be a positive integer, got '") + value + "'");
    }
    return static_cast<std::size_t>(parsed);
}

std::vector<bool> recover_signs(std::span<const double> estimates, std::span<const double> shifted_estimates) {
    if (estimates.size() != shifted_estimates.size()) {
        throw ValidationError("sign recovery needs one shifted estimate per component");
    }
    std::vector<bool> flags(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        flags[i] = std::abs(estimates[i]) > std::abs(shifted_estimates[i]);
    }
    return flags;
}

std::vector<bool> recover_signs(const QsveOutput &estimates, const QsveOutput &shifted_estimates) {
    if (estimates.components.size() != shifted_estimates.components.size() ||
        estimates.shots.size() != shifted_estimates.shots.size()) {
        throw ValidationError("QSVE outputs cover different components or shot counts");
    }
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t s = 0; s < estimates.shots.size(); ++s) {
        if (estimates.shots[s].component != shifted_estimates.shots[s].component) {
            throw ValidationError("shot " + std::to_string(s) + " measured different components in the two passes");
        }
        a.push_back(estimates.shots[s].sigma_bar);
        b.push_back(shifted_estimates.shots[s].sigma_bar);
    }
    return recover_signs(a, b);
}

Eigen::VectorXcd RotatedState::amplitudes() const {
    const auto r = static_cast<Eigen::Index>(rotation.size());
    Eigen::VectorXcd amps(3 * r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto &h = rotation[static_cast<std::size_t>(i)];
        amps(static_cast<Eigen::Index>(kWellConditioned) * r + i) = beta(i) * h.wc;
        amps(static_cast<Eigen::Index>(kNoInversion) * r + i) = beta(i) * h.no;
        amps(static_cast<Eigen::Index>(kIllConditioned) * r + i) = beta(i) * h.ic;
    }
    return amps;
}

RotatedState conditional_rotation(const Eigen::MatrixXd &basis, const Eigen::VectorXcd &beta,
                                  std::span<const double> lambda_hat, const FilterFunctions &filter) {
    if (basis.cols() != beta.size() || static_cast<std::size_t>(beta.size()) != lambda_hat.size()) {
        throw ValidationError("rotation needs one eigenvalue estimate per component");
    }
    RotatedState rotated;
    rotated.basis = basis;
    rotated.beta = beta;
    rotated.lambda_hat.assign(lambda_hat.begin(), lambda_hat.end());
    for (std::size_t i = 0; i < lambda_hat.size(); ++i) {
        if (std::norm(beta(static_cast<Eigen::Index>(i))) == 0.0) {
            // Unpopulated component: no rotation is applied, so gamma is not constrained by it.
            rotated.rotation.push_back({});
            continue;
        }
        rotated.rotation.push_back(filter.h(lambda_hat[i]));
    }
    return rotated;
}

PostSelection post_select(const RotatedState &rotated) {
    const auto r = static_cast<Eigen::Index>(rotated.rotation.size());
    Eigen::VectorXcd coeffs(r);
    double probability = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
        const double f = rotated.rotation[static_cast<std::size_t>(i)].wc;
        coeffs(i) = rotated.beta(i) * f;
        probability += std::norm(rotated.beta(i)) * f * f;
    }
    if (probability < kMinPostSelection) {
        throw DegenerateError("post-selection probability " + std::to_string(probability) +
                              " is below 1e-15; the input lies in the ill-conditioned subspace");
    }
    const Eigen::VectorXcd system = rotated.basis.cast<Complex>() * coeffs;
    PostSelection out;
    out.state = QuantumState::normalized(system);
    out.probability = probability;
    out.repetitions_raw = 1.0 / probability;
    out.repetitions_amplified = 1.0 / std::sqrt(probability);
    return out;
}

std::size_t sample_post_selection(const RotatedState &rotated, std::size_t shots, Rng &rng) {
    const Eigen::VectorXcd amps = rotated.amplitudes();
    std::vector<double> probs(static_cast<std::size_t>(amps.size()));
    for (Eigen::Index k = 0; k < amps.size(); ++k) {
        probs[static_cast<std::size_t>(k)] = std::norm(amps(k));
    }
    const auto r = rotated.rotation.size();
    std::size_t hits = 0;
    for (std::size_t shot = 0; shot < shots; ++shot) {
        const std::size_t outcome = sample_index(probs, uniform01(rng));
        if (outcome / r == RotatedState::kWellConditioned) {
            ++hits;
        }
    }
    return hits;
}

NormalizedMatrix spectrum_normalize(const Eigen::MatrixXd &matrix) {
    const SpectralDecomposition spec = decompose(matrix);
    const double norm = spec.spectral_norm();
    if (norm == 0.0) {
        throw DegenerateError("cannot normalize the zero matrix");
    }
    return {matrix / norm, norm};
}

ResolvedParameters resolve_parameters(const SpectralDecomposition &spec, const SolverConfig &config,
                                      double scale) {
    if (!std::isfinite(spec.kappa)) {
        throw SingularMatrixError("matrix is singular (condition number is infinite)");
    }
    if (!(config.epsilon > 0.0)) {
        throw ValidationError("epsilon must be positive");
    }
    if (config.kappa != 0.0 && !(config.kappa >= 1.0)) {
        throw ValidationError("kappa must be at least 1");
    }
    if (config.mu < 0.0 || config.gamma < 0.0) {
        throw ValidationError("mu and gamma must be positive");
    }

    ResolvedParameters p;
    p.scale = scale;
    p.spectral_norm = spec.spectral_norm();
    p.kappa = config.kappa > 0.0 ? config.kappa : spec.kappa;
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        const double mag = std::abs(spec.eigenvalues(k));
        if (mag < (1.0 - kRangeSlack) / p.kappa || mag > 1.0 + kRangeSlack) {
            std::ostringstream msg;
            msg << "eigenvalue " << spec.eigenvalues(k) << " lies outside [-1, -1/kappa] U [1/kappa, 1] with kappa = "
                << p.kappa;
            throw ValidationError(msg.str());
        }
    }
    const bool corrected = config.mode == SolverMode::corrected;
    p.mu = config.mu > 0.0 ? config.mu : (corrected ? 1.0 : 4.0) / p.kappa;
    p.gamma = config.gamma > 0.0 ? config.gamma : 0.5 / p.kappa;
    p.epsilon = config.epsilon;
    p.sign_budget = corrected ? 0.25 / p.kappa : 1.0 / p.kappa;

    const Eigen::Index n = spec.size();
    const Eigen::MatrixXd a = spec.reconstruct();
    p.frobenius = a.norm();
    p.shifted_frobenius = (a + p.mu * Eigen::MatrixXd::Identity(n, n)).norm();
    const double widest = std::max(p.frobenius, p.shifted_frobenius);

    if (config.bits > 0) {
        p.bits = config.bits;
        p.delta = config.c_slack * grid_spacing(config.bits);
    } else {
        p.delta = std::min(config.epsilon / (config.lipschitz_c * p.kappa * p.frobenius), p.sign_budget / widest);
        p.bits = bits_for_precision(p.delta, config.c_slack);
    }
    return p;
}

Eigen::VectorXd uniform_rhs(Eigen::Index n) {
    return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

SolveReport solve(const MatrixStore &store, const Eigen::VectorXd &b, const SolverConfig &config) {
    const Eigen::MatrixXd raw = store.to_dense();
    if (!is_symmetric(raw)) {
        throw ValidationError("the solver needs a symmetric matrix; lift general systems with hermitian_dilation");
    }
    if (b.size() != raw.rows()) {
        throw ValidationError("right-hand side has dimension " + std::to_string(b.size()) + ", matrix is " +
                              std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
    }
    if (!(b.norm() > 0.0)) {
        throw ValidationError("right-hand side is zero");
    }

    NormalizedMatrix normalized{raw, 1.0};
    if (config.normalize) {
        normalized = spectrum_normalize(raw);
    }
    const SpectralDecomposition spec = decompose(normalized.matrix);
    const ResolvedParameters params = resolve_parameters(spec, config, normalized.scale);

    const auto n = static_cast<std::size_t>(raw.rows());
    const std::size_t amplitudes = n * n * grid_size(std::min(params.bits, 62));
    if (params.bits > kMaxAncillaBits || amplitudes > config.memory_guard) {
        throw ResourceError("solve needs n^2 * 2^t = " + std::to_string(n) + "^2 * 2^" + std::to_string(params.bits) +
                            " amplitudes, above the guard of " + std::to_string(config.memory_guard) +
                            "; raise epsilon, lower kappa, or set DQLS_MEMORY_GUARD");
    }

    const Eigen::VectorXd rhs = b / b.norm();
    const SingularSystem basis = singular_system(spec);
    const SingularSystem shifted = shifted_system(spec, params.mu);
    const MatrixStore store_a = MatrixStore::from_dense(normalized.matrix);
    const MatrixStore store_shifted = MatrixStore::from_dense(
        normalized.matrix + params.mu * Eigen::MatrixXd::Identity(raw.rows(), raw.cols()));

    QsveOptions options;
    options.bits = params.bits;
    options.backend = config.backend;
    options.seed = config.seed;
    options.uncompute_budget = 0.0;
    const Eigen::VectorXcd input = rhs.cast<Complex>();
    const QsveOutput est_a = qsve_run(store_a, basis, input, options);
    const QsveOutput est_shifted = qsve_run(store_shifted, shifted, input, options);

    // Both passes draw from the same stream so each component sees correlated estimates.
    Rng rng(derive_seed(config.seed, 0));
    Rng rng_shifted = rng;
    const std::vector<double> abs_a = sample_component_estimates(est_a, rng, config.repetitions);
    const std::vector<double> abs_shifted = sample_component_estimates(est_shifted, rng_shifted, config.repetitions);
    const std::vector<bool> flags = recover_signs(abs_a, abs_shifted);

    std::vector<double> lambda_hat(abs_a.size());
    for (std::size_t i = 0; i < abs_a.size(); ++i) {
        lambda_hat[i] = flags[i] ? -abs_a[i] : abs_a[i];
    }

    const FilterFunctions filter(params.kappa, params.gamma, config.filter, config.ramp);
    const Eigen::VectorXcd beta = spec.eigenvectors.transpose().cast<Complex>() * input;
    RotatedState rotated = conditional_rotation(spec.eigenvectors, beta, lambda_hat, filter);
    const PostSelection selected = post_select(rotated);

    SolveReport report;
    report.config = config;
    report.parameters = params;
    report.output_state = selected.state;
    report.true_state = true_solution(spec, rhs);
    report.fidelity = report.output_state.fidelity(report.true_state);
    report.distance = report.output_state.distance(report.true_state);
    report.post_selection_probability = selected.probability;
    report.repetitions_raw = selected.repetitions_raw;
    report.repetitions_amplified = selected.repetitions_amplified;
    report.walk_applications = est_a.walk_applications + est_shifted.walk_applications;
    for (std::size_t i = 0; i < lambda_hat.size(); ++i) {
        SignDecision d;
        d.lambda_true = spec.eigenvalues(static_cast<Eigen::Index>(i));
        d.lambda_hat = lambda_hat[i];
        d.estimate = abs_a[i];
        d.shifted_estimate = abs_shifted[i];
        d.flag = flags[i];
        d.correct = flags[i] == (d.lambda_true < 0.0);
        report.signs.push_back(d);
    }
    report.rotated = std::move(rotated);
    return report;
}

} // namespace dqls
