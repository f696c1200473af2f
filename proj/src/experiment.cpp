#include "dqls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "dqls/errors.hpp"
#include "dqls/matrix_io.hpp"
#include "dqls/phase_estimation.hpp"

namespace dqls {

namespace {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

struct Cell {
    std::size_t n = 0;
    double kappa = 0.0;
    PrecisionSetting precision;
    std::size_t repeat = 0;
};

void write_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << text;
}

} // namespace

MatrixFamily parse_family(std::string_view name) {
    if (name == "random-symmetric") {
        return MatrixFamily::random_symmetric;
    }
    if (name == "random-psd") {
        return MatrixFamily::random_psd;
    }
    if (name == "diagonal") {
        return MatrixFamily::diagonal;
    }
    if (name == "rank-one") {
        return MatrixFamily::rank_one;
    }
    throw ValidationError("unknown matrix family '" + std::string(name) +
                          "' (expected random-symmetric, random-psd, diagonal or rank-one)");
}

std::string_view to_string(MatrixFamily family) {
    switch (family) {
    case MatrixFamily::random_symmetric:
        return "random-symmetric";
    case MatrixFamily::random_psd:
        return "random-psd";
    case MatrixFamily::diagonal:
        return "diagonal";
    case MatrixFamily::rank_one:
        return "rank-one";
    }
    return "unknown";
}

Eigen::VectorXd family_eigenvalues(MatrixFamily family, std::size_t n, double kappa) {
    if (n == 0) {
        throw ValidationError("matrix dimension must be at least 1");
    }
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw ValidationError("target condition number must be finite and at least 1");
    }
    if (n == 1 && kappa != 1.0) {
        throw ValidationError("a 1x1 matrix only has condition number 1");
    }
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::VectorXd lambda(size);
    if (family == MatrixFamily::rank_one) {
        lambda.setConstant(1.0 / kappa);
        lambda(0) = 1.0;
        return lambda;
    }
    for (Eigen::Index k = 0; k < size; ++k) {
        const double t = size == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(size - 1);
        lambda(k) = 1.0 + t * (1.0 / kappa - 1.0);
    }
    lambda(size - 1) = 1.0 / kappa;
    if (family == MatrixFamily::random_symmetric) {
        for (Eigen::Index k = 1; k < size; k += 2) {
            lambda(k) = -lambda(k);
        }
    }
    return lambda;
}

Eigen::VectorXd gaussian_vector(std::size_t n, Rng &rng) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < out.size(); k += 2) {
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        out(k) = r * std::cos(2.0 * std::numbers::pi * u2);
        if (k + 1 < out.size()) {
            out(k + 1) = r * std::sin(2.0 * std::numbers::pi * u2);
        }
    }
    return out;
}

Eigen::MatrixXd random_orthogonal(std::size_t n, Rng &rng) {
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd g(size, size);
    for (Eigen::Index c = 0; c < size; ++c) {
        g.col(c) = gaussian_vector(n, rng);
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(size, size);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < size; ++c) {
        if (r(c, c) < 0.0) {
            q.col(c) = -q.col(c);
        }
    }
    return q;
}

Eigen::MatrixXd generate_matrix(MatrixFamily family, std::size_t n, double kappa, std::uint64_t seed) {
    const Eigen::VectorXd lambda = family_eigenvalues(family, n, kappa);
    if (family == MatrixFamily::diagonal) {
        return lambda.asDiagonal();
    }
    Rng rng(derive_seed(seed, 0x6d617472ULL));
    const Eigen::MatrixXd q = random_orthogonal(n, rng);
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

std::vector<PrecisionSetting> ExperimentSpec::precision_grid() const {
    std::vector<PrecisionSetting> grid;
    for (double e : epsilons) {
        grid.push_back({e, 0});
    }
    for (double d : deltas) {
        grid.push_back({base.epsilon, bits_for_precision(d, base.c_slack)});
    }
    for (int t : t_bits) {
        grid.push_back({base.epsilon, t});
    }
    return grid;
}

void ExperimentSpec::validate() const {
    if (!matrix_file && (dimensions.empty() || kappas.empty())) {
        throw ValidationError("sweep needs nonempty dimension and kappa grids");
    }
    if (epsilons.empty() && deltas.empty() && t_bits.empty()) {
        throw ValidationError("sweep needs at least one of the epsilon, delta or t grids");
    }
    if (repeats == 0) {
        throw ValidationError("repeats must be at least 1");
    }
    for (double e : epsilons) {
        if (!(e > 0.0)) {
            throw ValidationError("epsilon grid values must be positive");
        }
    }
    for (double d : deltas) {
        if (!(d > 0.0)) {
            throw ValidationError("delta grid values must be positive");
        }
    }
    for (int t : t_bits) {
        if (t < 1 || t > kMaxAncillaBits) {
            throw ValidationError("t grid values must lie in [1, " + std::to_string(kMaxAncillaBits) + "]");
        }
    }
    for (double k : kappas) {
        if (!(k >= 1.0)) {
            throw ValidationError("kappa grid values must be at least 1");
        }
    }
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json &doc) {
    ExperimentSpec spec;
    try {
        if (doc.contains("matrix")) {
            spec.matrix_file = doc.at("matrix").get<std::string>();
        }
        if (doc.contains("family")) {
            spec.family = parse_family(doc.at("family").get<std::string>());
        }
        if (doc.contains("dimensions")) {
            spec.dimensions = doc.at("dimensions").get<std::vector<std::size_t>>();
        }
        if (doc.contains("kappas")) {
            spec.kappas = doc.at("kappas").get<std::vector<double>>();
        }
        spec.epsilons = doc.value("epsilons", std::vector<double>{});
        spec.deltas = doc.value("deltas", std::vector<double>{});
        spec.t_bits = doc.value("t_bits", std::vector<int>{});
        spec.repeats = doc.value("repeats", std::size_t{1});
        spec.shots = doc.value("shots", std::size_t{0});
        spec.seed = doc.value("seed", std::uint64_t{0});
        spec.threads = doc.value("threads", 1U);
        if (doc.contains("b")) {
            const auto values = doc.at("b").get<std::vector<double>>();
            spec.b = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
        }
        if (doc.contains("mode")) {
            spec.base.mode = parse_solver_mode(doc.at("mode").get<std::string>());
        }
        if (doc.contains("backend")) {
            spec.base.backend = parse_backend(doc.at("backend").get<std::string>());
        }
        if (doc.contains("filter")) {
            spec.base.filter = parse_filter_kind(doc.at("filter").get<std::string>());
        }
        spec.base.repetitions = doc.value("repetitions", spec.base.repetitions);
        if (doc.contains("csv")) {
            spec.csv_out = doc.at("csv").get<std::string>();
        }
        if (doc.contains("summary")) {
            spec.summary_out = doc.at("summary").get<std::string>();
        }
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("experiment spec: ") + e.what());
    }
    spec.base.memory_guard = memory_guard_from_env();
    spec.validate();
    return spec;
}

std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat) {
    return repeat == 0 ? master : derive_seed(master, repeat);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("a line fit needs at least two paired points");
    }
    const auto count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) {
        throw ValidationError("a line fit needs at least two distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    fit.points = x.size();
    return fit;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
        if (x[k] > 0.0 && y[k] > 0.0) {
            lx.push_back(std::log(x[k]));
            ly.push_back(std::log(y[k]));
        }
    }
    return fit_line(lx, ly);
}

SweepResult run_sweep(const ExperimentSpec &spec) {
    spec.validate();
    std::optional<Eigen::MatrixXd> fixed;
    std::vector<std::size_t> dims = spec.dimensions;
    std::vector<double> kappas = spec.kappas;
    if (spec.matrix_file) {
        fixed = load_matrix(*spec.matrix_file).to_dense();
        dims = {static_cast<std::size_t>(fixed->rows())};
        kappas = {0.0};
    }

    std::vector<Cell> cells;
    for (std::size_t n : dims) {
        for (double kappa : kappas) {
            for (const auto &p : spec.precision_grid()) {
                for (std::size_t r = 0; r < spec.repeats; ++r) {
                    cells.push_back({n, kappa, p, r});
                }
            }
        }
    }

    std::vector<SweepRow> rows(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
            const Cell &cell = cells[idx];
            try {
                const std::uint64_t seed = repeat_seed(spec.seed, cell.repeat);
                const Eigen::MatrixXd a =
                    fixed ? *fixed : generate_matrix(spec.family, cell.n, cell.kappa, seed);
                SolverConfig config = spec.base;
                config.kappa = cell.kappa;
                config.epsilon = cell.precision.epsilon;
                config.bits = cell.precision.bits;
                config.seed = seed;
                const Eigen::VectorXd b = spec.b ? *spec.b : uniform_rhs(a.rows());
                const SolveReport report = solve(MatrixStore::from_dense(a), b, config);

                SweepRow &row = rows[idx];
                row.n = cell.n;
                row.kappa = report.parameters.kappa;
                row.frobenius_norm = report.parameters.frobenius;
                row.spectral_norm = report.parameters.spectral_norm;
                row.bits = report.parameters.bits;
                row.delta = report.parameters.delta;
                row.epsilon = report.parameters.epsilon;
                row.distance = report.distance;
                row.post_selection_probability = report.post_selection_probability;
                row.walk_applications = report.walk_applications;
                row.seed = seed;
                if (spec.shots > 0) {
                    Rng rng(derive_seed(seed, 0x706f7374ULL));
                    row.sampled_post_selection =
                        static_cast<double>(sample_post_selection(report.rotated, spec.shots, rng)) /
                        static_cast<double>(spec.shots);
                }
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(spec.threads, static_cast<unsigned>(cells.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (const auto &err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }

    SweepResult result;
    result.rows = std::move(rows);
    std::vector<double> inv_delta;
    std::vector<double> walks;
    std::vector<double> scale;
    std::vector<double> dist;
    std::vector<double> ns;
    std::vector<double> frob;
    double max_ratio = 0.0;
    for (const auto &row : result.rows) {
        inv_delta.push_back(1.0 / row.delta);
        walks.push_back(static_cast<double>(row.walk_applications));
        const double bound = row.kappa * row.delta * row.frobenius_norm;
        scale.push_back(bound);
        dist.push_back(row.distance);
        ns.push_back(static_cast<double>(row.n));
        frob.push_back(row.frobenius_norm);
        max_ratio = std::max(max_ratio, row.distance / bound);
    }
    nlohmann::json fits = nlohmann::json::object();
    auto record = [&](const char *name, std::span<const double> x, std::span<const double> y) {
        try {
            const LinearFit fit = fit_loglog(x, y);
            fits[name] = {{"slope", fit.slope},
                          {"intercept", fit.intercept},
                          {"r_squared", fit.r_squared},
                          {"points", fit.points}};
        } catch (const ValidationError &) {
            fits[name] = nullptr;
        }
    };
    record("walk_applications_vs_inverse_delta", inv_delta, walks);
    record("distance_vs_kappa_delta_frobenius", scale, dist);
    record("frobenius_norm_vs_n", ns, frob);
    result.summary = {
        {"rows", result.rows.size()},
        {"family", spec.matrix_file ? std::string("file") : std::string(to_string(spec.family))},
        {"mode", std::string(to_string(spec.base.mode))},
        {"seed", spec.seed},
        {"fits", fits},
        {"max_distance_over_kappa_delta_frobenius", max_ratio},
    };
    return result;
}

std::string sweep_csv(const std::vector<SweepRow> &rows, bool with_sampled_column) {
    std::ostringstream out;
    out << "n,kappa,frobenius_norm,spectral_norm,t,delta,epsilon,distance,post_selection_probability,"
           "walk_applications,seed";
    if (with_sampled_column) {
        out << ",sampled_post_selection";
    }
    out << '\n';
    for (const auto &row : rows) {
        out << row.n << ',' << format_double(row.kappa) << ',' << format_double(row.frobenius_norm) << ','
            << format_double(row.spectral_norm) << ',' << row.bits << ',' << format_double(row.delta) << ','
            << format_double(row.epsilon) << ',' << format_double(row.distance) << ','
            << format_double(row.post_selection_probability) << ',' << row.walk_applications << ',' << row.seed;
        if (with_sampled_column) {
            out << ',' << format_double(row.sampled_post_selection);
        }
        out << '\n';
    }
    return out.str();
}

SweepResult run_sweep_to_files(const ExperimentSpec &spec) {
    SweepResult result = run_sweep(spec);
    if (spec.csv_out) {
        write_file(*spec.csv_out, sweep_csv(result.rows, spec.shots > 0));
    }
    if (spec.summary_out) {
        write_file(*spec.summary_out, result.summary.dump(2) + "\n");
    }
    return result;
}

} // namespace dqls
