#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dqls/errors.hpp"
#include "dqls/experiment.hpp"
#include "dqls/linear_solver.hpp"
#include "dqls/matrix_io.hpp"
#include "dqls/qsve.hpp"
#include "dqls/report_json.hpp"
#include "dqls/verification.hpp"

namespace {

struct MatrixSource {
    std::string path;
    std::string family;
    std::size_t n = 0;
    double kappa = 0.0;
    std::uint64_t seed = 0;

    void add_to(CLI::App *cmd) {
        cmd->add_option("--matrix", path, "coordinate stream (i j value) or dense .csv file");
        cmd->add_option("--family", family, "generator: random-symmetric, random-psd, diagonal, rank-one");
        cmd->add_option("--n", n, "generated dimension");
        cmd->add_option("--kappa", kappa, "condition number (generator target and solver range)");
        cmd->add_option("--seed", seed, "seed for the generator and the solver");
    }

    [[nodiscard]] dqls::MatrixStore load() const {
        if (!path.empty()) {
            return dqls::load_matrix(path);
        }
        if (family.empty()) {
            throw dqls::ValidationError("give --matrix or --family with --n");
        }
        if (n == 0) {
            throw dqls::ValidationError("--family needs --n");
        }
        const double target = kappa > 0.0 ? kappa : 1.0;
        return dqls::MatrixStore::from_dense(dqls::generate_matrix(dqls::parse_family(family), n, target, seed));
    }
};

Eigen::VectorXd load_rhs(const std::string &arg, Eigen::Index n) {
    if (arg.empty()) {
        return dqls::uniform_rhs(n);
    }
    Eigen::VectorXd b;
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        b = dqls::parse_vector(in);
    } else {
        std::istringstream in(arg);
        b = dqls::parse_vector(in);
    }
    if (b.size() != n) {
        throw dqls::ValidationError("--b has " + std::to_string(b.size()) + " entries, the matrix has " +
                                    std::to_string(n) + " rows");
    }
    return b;
}

void emit(const nlohmann::json &doc, const std::string &out) {
    if (out.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream file(out);
    if (!file) {
        throw dqls::ValidationError("cannot open " + out + " for writing");
    }
    file << doc.dump(2) << '\n';
}

template <typename T> std::vector<T> parse_list(const std::string &text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::istringstream one(item);
        T value{};
        if (!(one >> value) || !one.eof()) {
            throw dqls::ValidationError("cannot parse list entry '" + item + "'");
        }
        out.push_back(value);
    }
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulator for a Frobenius-norm quantum linear systems solver"};
    app.require_subcommand(1);

    // ingest
    auto *ingest = app.add_subcommand("ingest", "stream entries into the amplitude store and report its state");
    std::string ingest_path;
    std::string ingest_out;
    ingest->add_option("--matrix", ingest_path, "coordinate stream or dense .csv file")->required();
    ingest->add_option("--out", ingest_out, "write JSON here instead of stdout");

    // qsve
    auto *qsve = app.add_subcommand("qsve", "singular value estimation on one input state");
    MatrixSource qsve_src;
    qsve_src.add_to(qsve);
    std::string qsve_b;
    int qsve_bits = 8;
    std::string qsve_backend = "exact-spectral";
    std::size_t qsve_shots = 0;
    int qsve_reps = 15;
    std::string qsve_out;
    qsve->add_option("--b", qsve_b, "input vector: file or comma-separated values (default uniform)");
    qsve->add_option("--t-bits", qsve_bits, "phase register width");
    qsve->add_option("--backend", qsve_backend, "exact-spectral or statevector");
    qsve->add_option("--shots", qsve_shots, "sampled shots (0: coherent statistics only)");
    qsve->add_option("--repetitions", qsve_reps, "median-of-r per shot");
    qsve->add_option("--out", qsve_out, "write JSON here instead of stdout");

    // solve
    auto *solve_cmd = app.add_subcommand("solve", "run the full solver and compare with the exact solution");
    MatrixSource solve_src;
    solve_src.add_to(solve_cmd);
    std::string solve_b;
    dqls::SolverConfig config;
    std::string mode = "corrected";
    std::string filter = "invert-only";
    std::string ramp = "circular";
    std::string backend = "exact-spectral";
    std::string solve_out;
    solve_cmd->add_option("--b", solve_b, "right-hand side: file or comma-separated values (default uniform)");
    solve_cmd->add_option("--epsilon", config.epsilon, "target distance to the exact solution state");
    solve_cmd->add_option("--t-bits", config.bits, "fix the phase register width instead of deriving it");
    solve_cmd->add_option("--mode", mode, "corrected or paper-faithful");
    solve_cmd->add_option("--mu", config.mu, "sign-recovery shift (default from mode)");
    solve_cmd->add_option("--gamma", config.gamma, "rotation scale (default 1/(2 kappa))");
    solve_cmd->add_option("--filter", filter, "invert-only or full-fgh");
    solve_cmd->add_option("--ramp", ramp, "circular or half-cosine");
    solve_cmd->add_option("--backend", backend, "exact-spectral or statevector");
    solve_cmd->add_option("--repetitions", config.repetitions, "median-of-r per eigenvalue estimate");
    bool no_normalize = false;
    solve_cmd->add_flag("--no-normalize", no_normalize, "solve A as given instead of A / ||A||_2");
    solve_cmd->add_option("--out", solve_out, "write JSON here instead of stdout");

    // sweep
    auto *sweep = app.add_subcommand("sweep", "parameter sweep writing tidy CSV and a fit summary");
    std::string spec_path;
    std::string sweep_family = "random-symmetric";
    std::string sweep_matrix;
    std::string dims = "4";
    std::string kappas = "4";
    std::string epsilons;
    std::string deltas;
    std::string t_bits;
    std::size_t repeats = 1;
    std::size_t sweep_shots = 0;
    std::uint64_t sweep_seed = 0;
    unsigned threads = 1;
    std::string sweep_mode = "corrected";
    std::string sweep_out;
    std::string summary_out;
    sweep->add_option("--spec", spec_path, "JSON experiment spec (flags below are ignored when given)");
    sweep->add_option("--matrix", sweep_matrix, "fixed matrix file instead of a generator");
    sweep->add_option("--family", sweep_family, "generator family");
    sweep->add_option("--n", dims, "comma-separated dimensions");
    sweep->add_option("--kappa", kappas, "comma-separated condition numbers");
    sweep->add_option("--epsilon", epsilons, "comma-separated epsilon grid");
    sweep->add_option("--delta", deltas, "comma-separated delta grid");
    sweep->add_option("--t-bits", t_bits, "comma-separated t grid");
    sweep->add_option("--repeats", repeats, "seeded repeats per cell");
    sweep->add_option("--shots", sweep_shots, "sampled post-selection shots per row");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--threads", threads, "worker threads");
    sweep->add_option("--mode", sweep_mode, "corrected or paper-faithful");
    sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");
    sweep->add_option("--summary", summary_out, "summary JSON path");

    // verify
    auto *verify = app.add_subcommand("verify", "run the acceptance criteria and the invariant suite");
    std::uint64_t verify_seed = dqls::VerifyOptions{}.seed;
    verify->add_option("--seed", verify_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            const dqls::MatrixStore store = dqls::load_matrix(ingest_path);
            emit({{"rows", store.rows()},
                  {"cols", store.cols()},
                  {"updates", store.update_count()},
                  {"frobenius_norm", store.frobenius_norm()},
                  {"touched_nodes", store.touched_nodes()},
                  {"max_nodes_per_update", store.max_touched_per_update()},
                  {"consistent", store.consistent()}},
                 ingest_out);
        } else if (*qsve) {
            const dqls::MatrixStore store = qsve_src.load();
            const Eigen::VectorXd b = load_rhs(qsve_b, static_cast<Eigen::Index>(store.cols()));
            dqls::QsveOptions opts;
            opts.bits = qsve_bits;
            opts.backend = dqls::parse_backend(qsve_backend);
            opts.mode = qsve_shots > 0 ? dqls::QsveMode::sampled : dqls::QsveMode::coherent;
            opts.shots = qsve_shots;
            opts.repetitions = qsve_reps;
            opts.seed = qsve_src.seed;
            emit(dqls::to_json(dqls::qsve_run(store, b.cast<dqls::Complex>(), opts)), qsve_out);
        } else if (*solve_cmd) {
            const dqls::MatrixStore store = solve_src.load();
            const Eigen::VectorXd b = load_rhs(solve_b, static_cast<Eigen::Index>(store.rows()));
            config.kappa = solve_src.kappa;
            config.seed = solve_src.seed;
            config.mode = dqls::parse_solver_mode(mode);
            config.filter = dqls::parse_filter_kind(filter);
            config.ramp = dqls::parse_ramp_shape(ramp);
            config.normalize = !no_normalize;
            config.backend = dqls::parse_backend(backend);
            config.memory_guard = dqls::memory_guard_from_env();
            emit(dqls::to_json(dqls::solve(store, b, config)), solve_out);
        } else if (*sweep) {
            dqls::ExperimentSpec spec;
            if (!spec_path.empty()) {
                std::ifstream in(spec_path);
                if (!in) {
                    throw dqls::ValidationError("cannot read " + spec_path);
                }
                nlohmann::json doc;
                try {
                    doc = nlohmann::json::parse(in);
                } catch (const nlohmann::json::parse_error &e) {
                    throw dqls::ValidationError(std::string("experiment spec: ") + e.what());
                }
                spec = dqls::experiment_spec_from_json(doc);
            } else {
                if (!sweep_matrix.empty()) {
                    spec.matrix_file = sweep_matrix;
                }
                spec.family = dqls::parse_family(sweep_family);
                spec.dimensions = parse_list<std::size_t>(dims);
                spec.kappas = parse_list<double>(kappas);
                spec.epsilons = parse_list<double>(epsilons);
                spec.deltas = parse_list<double>(deltas);
                spec.t_bits = parse_list<int>(t_bits);
                spec.repeats = repeats;
                spec.shots = sweep_shots;
                spec.seed = sweep_seed;
                spec.threads = threads;
                spec.base.mode = dqls::parse_solver_mode(sweep_mode);
                spec.base.memory_guard = dqls::memory_guard_from_env();
                if (!sweep_out.empty()) {
                    spec.csv_out = sweep_out;
                }
                if (!summary_out.empty()) {
                    spec.summary_out = summary_out;
                }
            }
            const dqls::SweepResult result = dqls::run_sweep_to_files(spec);
            if (!spec.csv_out) {
                std::cout << dqls::sweep_csv(result.rows, spec.shots > 0);
            }
            if (!spec.summary_out) {
                std::cerr << result.summary.dump(2) << '\n';
            }
        } else if (*verify) {
            dqls::VerifyOptions options;
            options.seed = verify_seed;
            int failed = 0;
            auto print = [&](const std::vector<dqls::CheckResult> &results, const char *prefix) {
                int index = 1;
                for (const auto &r : results) {
                    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << prefix << index++ << " " << r.name << ": "
                              << r.detail << '\n';
                    failed += r.passed ? 0 : 1;
                }
            };
            print(dqls::acceptance_checks(options), "A");
            print(dqls::invariant_checks(options), "I");
            return failed == 0 ? 0 : 1;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return dqls::exit_code_for(e);
    }
    return 0;
}
