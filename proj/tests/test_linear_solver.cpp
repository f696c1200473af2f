#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"

#include "dqls/errors.hpp"
#include "dqls/experiment.hpp"
#include "dqls/linear_solver.hpp"
#include "dqls/report_json.hpp"

using Catch::Approx;
using dqls::Complex;
using dqls::MatrixStore;
using dqls::SolverConfig;

namespace {

dqls::SolveReport solve_dense(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, SolverConfig config = {}) {
    return dqls::solve(MatrixStore::from_dense(a), b, config);
}

} // namespace

TEST_CASE("sign flags compare the plain and shifted estimates", "[solver]") {
    const std::vector<double> est{0.5, 0.5, 0.2};
    const std::vector<double> shifted{1.0, 0.0, 0.45};
    const auto flags = dqls::recover_signs(est, shifted);
    CHECK(flags == std::vector<bool>{false, true, false});
    const std::vector<double> short_list{1.0};
    CHECK_THROWS_AS(dqls::recover_signs(est, short_list), dqls::ValidationError);
}

TEST_CASE("per-shot sign recovery on a symmetric pair", "[solver]") {
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.0, 0.0, -0.5;
    const auto spec = dqls::decompose(a);
    const auto basis = dqls::singular_system(spec);
    auto shifted_basis = basis;
    shifted_basis.sigma = (spec.eigenvalues.array() + 0.5).abs();
    dqls::QsveOptions opts;
    opts.mode = dqls::QsveMode::sampled;
    opts.bits = dqls::bits_for_precision(0.125 / std::sqrt(0.5), 0.5);
    opts.shots = 500;
    opts.repetitions = 15;
    opts.seed = 99;
    const Eigen::VectorXcd input = (Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0)).cast<Complex>();
    const auto est = dqls::qsve_run(MatrixStore::from_dense(a), basis, input, opts);
    const auto est_shift = dqls::qsve_run(
        MatrixStore::from_dense(a + 0.5 * Eigen::MatrixXd::Identity(2, 2)), shifted_basis, input, opts);
    const auto flags = dqls::recover_signs(est, est_shift);
    REQUIRE(flags.size() == 500);
    for (std::size_t s = 0; s < flags.size(); ++s) {
        const double lambda = spec.eigenvalues(static_cast<Eigen::Index>(est.shots[s].component));
        REQUIRE(flags[s] == (lambda < 0.0));
    }
}

TEST_CASE("post-selection probability equals sum of beta^2 f^2", "[solver]") {
    const dqls::FilterFunctions unit(1.0, 0.5);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const std::vector<double> ones{1.0, 1.0};
    const auto rotated = dqls::conditional_rotation(id, Eigen::Vector2cd(1.0, 0.0), ones, unit);
    CHECK(dqls::post_select(rotated).probability == Approx(0.25));
    CHECK(dqls::post_select(rotated).repetitions_raw == Approx(4.0));
    CHECK(dqls::post_select(rotated).repetitions_amplified == Approx(2.0));

    const dqls::FilterFunctions two(2.0, 0.25, dqls::FilterKind::invert_only);
    const std::vector<double> lambdas{1.0, 0.5};
    const Eigen::Vector2cd uniform = (Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0)).cast<Complex>();
    const auto diag = dqls::conditional_rotation(id, uniform, lambdas, two);
    CHECK(dqls::post_select(diag).probability == Approx(5.0 / 32.0));
    double total = 0.0;
    const Eigen::VectorXcd amps = diag.amplitudes();
    for (Eigen::Index k = 0; k < amps.size(); ++k) {
        total += std::norm(amps(k));
    }
    CHECK(total == Approx(1.0));

    const dqls::FilterFunctions full(4.0, 0.125);
    const std::vector<double> small{0.1, -0.05};
    const auto ill = dqls::conditional_rotation(id, uniform, small, full);
    CHECK_THROWS_AS(dqls::post_select(ill), dqls::DegenerateError);
}

TEST_CASE("sampled post-selection frequency tracks p", "[solver]") {
    const dqls::FilterFunctions two(2.0, 0.25, dqls::FilterKind::invert_only);
    const std::vector<double> lambdas{1.0, 0.5};
    const auto rotated = dqls::conditional_rotation(Eigen::MatrixXd::Identity(2, 2),
                                                    Eigen::Vector2cd(1.0, 1.0) / std::sqrt(2.0), lambdas, two);
    dqls::Rng rng(7);
    const std::size_t shots = 20000;
    const double freq = static_cast<double>(dqls::sample_post_selection(rotated, shots, rng)) / shots;
    const double p = 5.0 / 32.0;
    CHECK(std::abs(freq - p) < 4.0 * std::sqrt(p * (1.0 - p) / shots));
}

TEST_CASE("spectral normalization", "[solver]") {
    const auto two = dqls::spectrum_normalize(Eigen::Vector2d(2.0, 1.0).asDiagonal());
    CHECK(two.scale == Approx(2.0));
    CHECK(two.matrix(1, 1) == Approx(0.5));
    const auto same = dqls::spectrum_normalize(Eigen::Vector2d(1.0, -0.3).asDiagonal());
    CHECK(same.scale == Approx(1.0));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 5, 6.0, seed) * (seed + 0.3);
        const auto norm = dqls::spectrum_normalize(a);
        CHECK(dqls::decompose(norm.matrix).spectral_norm() == Approx(1.0).margin(1e-12));
    }
    CHECK_THROWS_AS(dqls::spectrum_normalize(Eigen::MatrixXd::Zero(2, 2)), dqls::DegenerateError);
}

TEST_CASE("solving the identity returns b", "[solver]") {
    const auto report = solve_dense(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.0));
    CHECK(report.fidelity == Approx(1.0));
    CHECK(report.distance < 1e-12);
    CHECK(report.post_selection_probability == Approx(0.25));
    CHECK(report.parameters.kappa == Approx(1.0));
    CHECK(report.parameters.mu == Approx(1.0));
}

TEST_CASE("solving an indefinite diagonal recovers both signs", "[solver]") {
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.0, 0.0, -0.5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SolverConfig config;
        config.seed = seed;
        const auto report = solve_dense(a, Eigen::Vector2d(1.0, 1.0), config);
        CHECK(report.distance < 0.05);
        for (const auto &sign : report.signs) {
            CHECK(sign.correct);
        }
    }
}

TEST_CASE("random well-conditioned systems meet the target", "[solver][property]") {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double kappa = 2.0 + static_cast<double>(seed % 7);
        const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 4, kappa, seed);
        dqls::Rng rng(seed + 1000);
        SolverConfig config;
        config.epsilon = 0.05;
        config.seed = seed;
        const auto report = solve_dense(a, dqls::gaussian_vector(4, rng), config);
        good += report.distance <= 0.05 ? 1 : 0;
    }
    CHECK(good >= 95);
}

TEST_CASE("distance and fidelity agree", "[solver][property]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 3, 3.0, seed);
        SolverConfig config;
        config.bits = 4 + static_cast<int>(seed % 4);
        config.seed = seed;
        const auto report = solve_dense(a, dqls::uniform_rhs(3), config);
        const double overlap = report.output_state.inner(report.true_state).real();
        CHECK(report.distance * report.distance == Approx(2.0 - 2.0 * overlap).margin(1e-12));
        CHECK(report.fidelity <= 1.0 + 1e-12);
    }
}

TEST_CASE("rescaling A or b leaves the output unchanged", "[solver][property]") {
    const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 4, 4.0, 3);
    const Eigen::VectorXd b = Eigen::Vector4d(0.3, -1.0, 0.2, 0.7);
    SolverConfig config;
    config.seed = 11;
    const auto base = solve_dense(a, b, config);
    const auto scaled_b = solve_dense(a, 3.7 * b, config);
    const auto scaled_a = solve_dense(5.0 * a, b, config);
    CHECK((base.output_state.amplitudes() - scaled_b.output_state.amplitudes()).norm() < 1e-12);
    CHECK((base.output_state.amplitudes() - scaled_a.output_state.amplitudes()).norm() < 1e-9);
    CHECK(scaled_a.parameters.scale == Approx(5.0));
    CHECK(base.post_selection_probability == Approx(scaled_b.post_selection_probability));
}

TEST_CASE("eigenvalues outside the kappa window are named", "[solver]") {
    SolverConfig config;
    config.normalize = false;
    config.kappa = 4.0;
    try {
        solve_dense(Eigen::Vector2d(1.0, 0.1).asDiagonal(), Eigen::Vector2d(1.0, 1.0), config);
        FAIL("expected a validation error");
    } catch (const dqls::ValidationError &e) {
        CHECK(std::string(e.what()).find("0.1") != std::string::npos);
    }
}

TEST_CASE("solver input validation", "[solver]") {
    Eigen::MatrixXd nonsym(2, 2);
    nonsym << 1.0, 0.2, 0.0, 1.0;
    CHECK_THROWS_AS(solve_dense(nonsym, Eigen::Vector2d(1.0, 0.0)), dqls::ValidationError);
    CHECK_THROWS_AS(solve_dense(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(1.0, 0.0, 0.0)),
                    dqls::ValidationError);
    CHECK_THROWS_AS(solve_dense(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d::Zero()), dqls::ValidationError);
    CHECK_THROWS_AS(solve_dense(Eigen::Vector2d(1.0, 0.0).asDiagonal(), Eigen::Vector2d(1.0, 1.0)),
                    dqls::SingularMatrixError);
    CHECK_THROWS_AS(dqls::parse_solver_mode("exact"), dqls::ValidationError);
    CHECK(dqls::parse_solver_mode("paper-faithful") == dqls::SolverMode::paper_faithful);
    CHECK(dqls::parse_backend("statevector") == dqls::QsveBackend::statevector);
}

TEST_CASE("the memory guard refuses oversized runs", "[solver]") {
    SolverConfig config;
    config.memory_guard = 64;
    CHECK_THROWS_AS(solve_dense(Eigen::MatrixXd::Identity(4, 4), dqls::uniform_rhs(4), config), dqls::ResourceError);

    ::setenv("DQLS_MEMORY_GUARD", "1234", 1);
    CHECK(dqls::memory_guard_from_env() == 1234);
    ::setenv("DQLS_MEMORY_GUARD", "lots", 1);
    CHECK_THROWS_AS(dqls::memory_guard_from_env(), dqls::ValidationError);
    ::unsetenv("DQLS_MEMORY_GUARD");
    CHECK(dqls::memory_guard_from_env() == dqls::kDefaultMemoryGuard);
}

TEST_CASE("the large shift misreads eigenvalues just below -1/kappa", "[solver]") {
    const Eigen::MatrixXd a = Eigen::Vector2d(1.0, -0.25).asDiagonal();
    SolverConfig faithful;
    faithful.kappa = 4.0;
    faithful.mode = dqls::SolverMode::paper_faithful;
    const auto bad = solve_dense(a, Eigen::Vector2d(1.0, 1.0), faithful);
    CHECK(bad.parameters.mu == Approx(1.0));
    bool misread = false;
    for (const auto &s : bad.signs) {
        if (s.lambda_true < 0.0) {
            misread = !s.correct;
        }
    }
    CHECK(misread);

    SolverConfig corrected;
    corrected.kappa = 4.0;
    const auto good = solve_dense(a, Eigen::Vector2d(1.0, 1.0), corrected);
    for (const auto &s : good.signs) {
        CHECK(s.correct);
    }
    CHECK(good.distance < bad.distance);
}

TEST_CASE("walk applications cover both estimation passes", "[solver]") {
    SolverConfig config;
    config.bits = 6;
    const auto report = solve_dense(Eigen::Vector2d(1.0, -0.5).asDiagonal(), Eigen::Vector2d(1.0, 1.0), config);
    CHECK(report.walk_applications == 2 * 63);
    config.backend = dqls::QsveBackend::statevector;
    const auto circuit = solve_dense(Eigen::Vector2d(1.0, -0.5).asDiagonal(), Eigen::Vector2d(1.0, 1.0), config);
    CHECK(circuit.walk_applications == 2 * 63);
    CHECK(circuit.distance == Approx(report.distance).margin(1e-9));
}

TEST_CASE("solve reports serialize with stable keys", "[solver]") {
    const auto report = solve_dense(Eigen::Vector2d(1.0, -0.5).asDiagonal(), Eigen::Vector2d(1.0, 1.0));
    const auto doc = dqls::to_json(report);
    for (const char *key : {"config", "parameters", "fidelity", "distance", "post_selection_probability",
                            "repetitions_raw", "repetitions_amplified", "walk_applications", "signs",
                            "output_state", "true_state"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["signs"].size() == 2);
    CHECK(doc["output_state"].size() == 2);
    CHECK(doc["output_state"][0].size() == 2);
    CHECK(doc["parameters"]["t_bits"].get<int>() == report.parameters.bits);
}
