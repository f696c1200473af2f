#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"

#include "dqls/errors.hpp"
#include "dqls/experiment.hpp"
#include "dqls/qsve.hpp"

using Catch::Approx;
using dqls::Complex;
using dqls::MatrixStore;
using dqls::QsveBackend;
using dqls::QsveMode;
using dqls::QsveOptions;

namespace {

constexpr double kPi = std::numbers::pi;

QsveOptions options(int bits, QsveBackend backend = QsveBackend::exact_spectral) {
    QsveOptions o;
    o.bits = bits;
    o.backend = backend;
    return o;
}

double expected_error(const dqls::QsveOutput &out, std::size_t i, double sigma) {
    const auto reg = out.components[i].register_probs();
    double e = 0.0;
    for (std::size_t s = 0; s < reg.size(); ++s) {
        e += reg[s] * std::abs(out.register_sigma(s) - sigma);
    }
    return e;
}

/// Largest expected circular phase error of a single run over offsets inside one grid cell.
double worst_expected_phase_error(int bits) {
    const double grid = dqls::grid_spacing(bits);
    double worst = 0.0;
    for (int step = 0; step <= 200; ++step) {
        const double theta = 1.0 + grid * step / 200.0;
        const auto dist = dqls::outcome_distribution(theta, bits);
        double e = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            e += dist[k] * dqls::circular_distance(dqls::grid_phase(k, bits), theta);
        }
        worst = std::max(worst, e);
    }
    return worst;
}

} // namespace

TEST_CASE("identity reads sigma = 1 from an on-grid phase", "[qsve]") {
    const auto store = MatrixStore::from_dense(Eigen::MatrixXd::Identity(2, 2));
    const auto out = dqls::qsve_run(store, Eigen::Vector2cd(1.0, 0.0), options(8));
    REQUIRE(out.components.size() == 2);
    for (const auto &comp : out.components) {
        if (comp.weight == 0.0) {
            continue;
        }
        const auto reg = comp.register_probs();
        const auto best = static_cast<std::size_t>(std::max_element(reg.begin(), reg.end()) - reg.begin());
        CHECK(reg[best] == Approx(1.0));
        CHECK(std::abs(out.register_sigma(best) - 1.0) <= 2.0 * kPi / 256.0 * std::sqrt(2.0));
        CHECK(out.register_sigma(best) == Approx(1.0));
    }
}

TEST_CASE("an eigenvector input concentrates near its singular value", "[qsve]") {
    const Eigen::MatrixXd a = Eigen::Vector2d(1.0, 0.5).asDiagonal();
    const double delta = 0.02;
    const auto out = dqls::qsve_run(MatrixStore::from_dense(a), Eigen::Vector2cd(0.0, 1.0),
                                    options(dqls::bits_for_precision(delta, 0.5)));
    const auto oracle = dqls::input_basis(MatrixStore::from_dense(a));
    const auto audit = dqls::qsve_error_audit(out, oracle, delta);
    for (std::size_t i = 0; i < out.components.size(); ++i) {
        if (out.components[i].sigma == Approx(0.5)) {
            CHECK(out.components[i].weight == Approx(1.0));
            CHECK(audit.mass_within[i] >= 8.0 / (kPi * kPi));
        }
    }
    CHECK(audit.weighted_mass >= 8.0 / (kPi * kPi));
}

TEST_CASE("a rank-one matrix on its singular vector reads the Frobenius norm exactly", "[qsve]") {
    const Eigen::Vector3d u = Eigen::Vector3d(1.0, 2.0, 2.0) / 3.0;
    const Eigen::MatrixXd a = 2.0 * u * u.transpose();
    for (auto backend : {QsveBackend::exact_spectral, QsveBackend::statevector}) {
        const auto out = dqls::qsve_run(MatrixStore::from_dense(a), u.cast<Complex>(), options(5, backend));
        const auto &top = *std::max_element(out.components.begin(), out.components.end(),
                                            [](const auto &x, const auto &y) { return x.weight < y.weight; });
        CHECK(top.weight == Approx(1.0));
        CHECK(top.register_probs()[0] == Approx(1.0));
        CHECK(out.register_sigma(0) == Approx(out.frobenius));
        CHECK(out.frobenius == Approx(2.0));
    }
}

TEST_CASE("weights sum to one and estimates stay in [0, F]", "[qsve][property]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd a =
            dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 2 + seed % 5, 3.0, seed);
        const auto out = dqls::qsve_run(MatrixStore::from_dense(a), dqls::uniform_rhs(a.rows()).cast<Complex>(),
                                        options(6));
        double total = 0.0;
        for (const auto &c : out.components) {
            total += c.weight;
            double mass = 0.0;
            for (double p : c.outcome_probs) {
                mass += p;
            }
            CHECK(mass == Approx(1.0).margin(1e-10));
        }
        CHECK(total == Approx(1.0).margin(1e-10));
        for (std::size_t s = 0; s < out.register_size(); ++s) {
            CHECK(out.register_sigma(s) >= 0.0);
            CHECK(out.register_sigma(s) <= out.frobenius);
        }
    }
}

TEST_CASE("walk applications grow as 2^t - 1", "[qsve]") {
    const auto store = MatrixStore::from_dense(Eigen::Vector2d(0.9, -0.4).asDiagonal());
    const Eigen::Vector2cd b(1.0, 1.0);
    CHECK(dqls::qsve_run(store, b, options(8, QsveBackend::statevector)).walk_applications == 255);
    CHECK(dqls::qsve_run(store, b, options(10, QsveBackend::statevector)).walk_applications == 1023);
    CHECK(dqls::qsve_run(store, b, options(10)).walk_applications == 1023);
}

TEST_CASE("both simulation paths give the same register distributions", "[qsve][property]") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const std::size_t n = 2 + seed % 2;
        const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, n, 2.5, seed);
        const auto store = MatrixStore::from_dense(a);
        const Eigen::VectorXcd b = dqls::uniform_rhs(static_cast<Eigen::Index>(n)).cast<Complex>();
        const int bits = 3 + static_cast<int>(seed % 4);
        const auto exact = dqls::qsve_run(store, b, options(bits));
        const auto circuit = dqls::qsve_run(store, b, options(bits, QsveBackend::statevector));
        REQUIRE(exact.components.size() == circuit.components.size());
        for (std::size_t i = 0; i < exact.components.size(); ++i) {
            CHECK(dqls::total_variation(exact.components[i].register_probs(),
                                        circuit.components[i].register_probs()) < 1e-9);
        }
    }
}

TEST_CASE("the audit counts mass within delta times F", "[qsve]") {
    const auto id = MatrixStore::from_dense(Eigen::MatrixXd::Identity(2, 2));
    const auto on_grid = dqls::qsve_run(id, Eigen::Vector2cd(1.0, 2.0), options(8));
    const auto audit = dqls::qsve_error_audit(on_grid, dqls::input_basis(id), 1e-6);
    CHECK(audit.min_mass == Approx(1.0));
    CHECK(audit.walk_applications == 255);

    const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 4, 4.0, 17);
    const auto store = MatrixStore::from_dense(a);
    const double delta = 0.02;
    const auto out = dqls::qsve_run(store, dqls::uniform_rhs(4).cast<Complex>(),
                                    options(dqls::bits_for_precision(delta, 0.5)));
    const auto random = dqls::qsve_error_audit(out, dqls::input_basis(store), delta);
    CHECK(random.min_mass >= 8.0 / (kPi * kPi));
}

TEST_CASE("uncompute leaves the workspace clean up to kernel leakage", "[qsve]") {
    Eigen::MatrixXd a(2, 2);
    a << 0.8, 0.3, 0.3, -0.4;
    const auto off = dqls::qsve_run(MatrixStore::from_dense(a), Eigen::Vector2cd(1.0, 0.5),
                                    options(4, QsveBackend::statevector));
    double collision = 0.0;
    for (const auto &c : off.components) {
        for (double p : c.register_probs()) {
            collision += c.weight * p * p;
        }
    }
    CHECK(off.uncompute_fidelity == Approx(collision).margin(1e-10));
    CHECK(off.uncompute_fidelity < 1.0);

    const auto on = dqls::qsve_run(MatrixStore::from_dense(Eigen::Vector2d(1.0, -1.0).asDiagonal()),
                                   Eigen::Vector2cd(0.6, 0.8), options(5, QsveBackend::statevector));
    CHECK(on.uncompute_fidelity == Approx(1.0).margin(1e-10));
}

TEST_CASE("the worst-case expected phase error shrinks with t", "[qsve][property]") {
    // Per-component expected error is not monotone in t: a phase close to the
    // t-bit grid can sit mid-cell on the (t+1)-bit grid. The envelope over
    // offsets is monotone, and every component stays under it.
    std::vector<double> envelope;
    for (int bits = 3; bits <= 10; ++bits) {
        envelope.push_back(worst_expected_phase_error(bits));
    }
    for (std::size_t k = 1; k < envelope.size(); ++k) {
        CHECK(envelope[k] < envelope[k - 1]);
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd a = dqls::generate_matrix(dqls::MatrixFamily::random_symmetric, 4, 3.0, seed);
        const auto store = MatrixStore::from_dense(a);
        const auto oracle = dqls::input_basis(store);
        for (int bits = 3; bits <= 10; ++bits) {
            const auto out = dqls::qsve_run(store, dqls::uniform_rhs(4).cast<Complex>(), options(bits));
            for (std::size_t i = 0; i < out.components.size(); ++i) {
                const double bound = 0.5 * out.frobenius * envelope[static_cast<std::size_t>(bits - 3)];
                CHECK(expected_error(out, i, oracle.sigma(static_cast<Eigen::Index>(i))) <= bound * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("sampled shots are reproducible from the seed", "[qsve]") {
    const auto store = MatrixStore::from_dense(Eigen::Vector3d(1.0, -0.6, 0.3).asDiagonal());
    QsveOptions o = options(6);
    o.mode = QsveMode::sampled;
    o.shots = 300;
    o.repetitions = 15;
    o.seed = 4;
    const Eigen::Vector3cd b(1.0, 1.0, 1.0);
    const auto first = dqls::qsve_run(store, b, o);
    const auto again = dqls::qsve_run(store, b, o);
    REQUIRE(first.shots.size() == 300);
    bool identical = true;
    for (std::size_t s = 0; s < first.shots.size(); ++s) {
        identical = identical && first.shots[s].component == again.shots[s].component &&
                    first.shots[s].sigma_bar == again.shots[s].sigma_bar;
        CHECK(first.shots[s].registers.size() == 15);
    }
    CHECK(identical);
    o.seed = 5;
    const auto other = dqls::qsve_run(store, b, o);
    bool differs = false;
    for (std::size_t s = 0; s < other.shots.size(); ++s) {
        differs = differs || other.shots[s].component != first.shots[s].component;
    }
    CHECK(differs);
}

TEST_CASE("qsve input validation", "[qsve]") {
    const auto store = MatrixStore::from_dense(Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(dqls::qsve_run(store, Eigen::Vector2cd::Zero(), options(4)), dqls::ValidationError);
    CHECK_THROWS_AS(dqls::qsve_run(store, Eigen::Vector3cd(1.0, 0.0, 0.0), options(4)), dqls::ValidationError);
    CHECK_THROWS_AS(dqls::qsve_run(MatrixStore(2, 2), Eigen::Vector2cd(1.0, 0.0), options(4)),
                    dqls::DegenerateError);
}

TEST_CASE("non-symmetric matrices expand inputs in the right singular basis", "[qsve]") {
    Eigen::MatrixXd a(2, 3);
    a << 1.0, 0.0, 2.0, 0.0, 3.0, 0.0;
    const auto store = MatrixStore::from_dense(a);
    const auto basis = dqls::input_basis(store);
    CHECK(basis.v.cols() == 3);
    const auto out = dqls::qsve_run(store, Eigen::Vector3cd(0.0, 1.0, 0.0), options(7));
    double weight_on_three = 0.0;
    for (const auto &c : out.components) {
        if (std::abs(c.sigma - 3.0) < 1e-12) {
            weight_on_three += c.weight;
        }
    }
    CHECK(weight_on_three == Approx(1.0));
}
