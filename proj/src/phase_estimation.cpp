#include "dqls/phase_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <unsupported/Eigen/FFT>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using RowMajorBlocks = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_bits(int bits) {
    if (bits < 1 || bits > kMaxAncillaBits) {
        throw ResourceError("ancilla width " + std::to_string(bits) + " outside [1, " +
                            std::to_string(kMaxAncillaBits) + "]");
    }
}

/// Applies the ancilla DFT column by column; `inverse` selects e^{+2 pi i xk / N}.
void ancilla_fourier(Eigen::VectorXcd &joint, std::size_t grid, std::size_t sys, bool inverse) {
    Eigen::Map<RowMajorBlocks> blocks(joint.data(), static_cast<Eigen::Index>(grid), static_cast<Eigen::Index>(sys));
    Eigen::FFT<double> fft;
    std::vector<Complex> in(grid);
    std::vector<Complex> out(grid);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid));
    for (Eigen::Index s = 0; s < blocks.cols(); ++s) {
        for (std::size_t x = 0; x < grid; ++x) {
            in[x] = blocks(static_cast<Eigen::Index>(x), s);
        }
        if (inverse) {
            fft.inv(out, in);
            // Eigen's inverse divides by N; the unitary transform divides by sqrt(N).
            for (auto &v : out) {
                v *= static_cast<double>(grid) * scale;
            }
        } else {
            fft.fwd(out, in);
            for (auto &v : out) {
                v *= scale;
            }
        }
        for (std::size_t k = 0; k < grid; ++k) {
            blocks(static_cast<Eigen::Index>(k), s) = out[k];
        }
    }
}

/// H on every ancilla bit.
void ancilla_hadamard(Eigen::VectorXcd &joint, std::size_t grid, std::size_t sys) {
    Eigen::Map<RowMajorBlocks> blocks(joint.data(), static_cast<Eigen::Index>(grid), static_cast<Eigen::Index>(sys));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t half = 1; half < grid; half <<= 1) {
        for (std::size_t base = 0; base < grid; base += 2 * half) {
            for (std::size_t x = base; x < base + half; ++x) {
                const auto lo = static_cast<Eigen::Index>(x);
                const auto hi = static_cast<Eigen::Index>(x + half);
                const Eigen::RowVectorXcd a = blocks.row(lo);
                const Eigen::RowVectorXcd b = blocks.row(hi);
                blocks.row(lo) = (a + b) * inv_sqrt2;
                blocks.row(hi) = (a - b) * inv_sqrt2;
            }
        }
    }
}

} // namespace

double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t sample_index(std::span<const double> probs, double u) {
    if (probs.empty()) {
        throw ValidationError("cannot sample from an empty distribution");
    }
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) {
            return k;
        }
    }
    // Rounding left u above the total; return the last index carrying mass.
    for (std::size_t k = probs.size(); k-- > 0;) {
        if (probs[k] > 0.0) {
            return k;
        }
    }
    return probs.size() - 1;
}

double median_of(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("median of an empty sample");
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

double grid_spacing(int bits) { return kTwoPi / static_cast<double>(grid_size(bits)); }

double grid_phase(std::size_t k, int bits) {
    const std::size_t grid = grid_size(bits);
    const auto signed_k = k >= grid / 2 ? static_cast<double>(k) - static_cast<double>(grid) : static_cast<double>(k);
    return kTwoPi * signed_k / static_cast<double>(grid);
}

int bits_for_precision(double delta, double c_slack) {
    if (!(delta > 0.0) || !(c_slack > 0.0)) {
        throw ValidationError("precision and slack must be positive");
    }
    return std::max(1, static_cast<int>(std::ceil(std::log2(kTwoPi * c_slack / delta) - 1e-12)));
}

double fejer_kernel(double offset, std::size_t grid) {
    const double x = std::remainder(offset, kTwoPi);
    const double denom = static_cast<double>(grid) * std::sin(x / 2.0);
    if (denom == 0.0) {
        return 1.0;
    }
    const double ratio = std::sin(static_cast<double>(grid) * x / 2.0) / denom;
    return ratio * ratio;
}

std::vector<double> outcome_distribution(double phase, int bits) {
    check_bits(bits);
    const std::size_t grid = grid_size(bits);
    std::vector<double> probs(grid);
    for (std::size_t k = 0; k < grid; ++k) {
        probs[k] = fejer_kernel(phase - kTwoPi * static_cast<double>(k) / static_cast<double>(grid), grid);
    }
    return probs;
}

PhaseEstimator::PhaseEstimator(const Eigen::MatrixXcd &unitary, int bits)
    : bits_(bits), system_dim_(static_cast<std::size_t>(unitary.rows())) {
    check_bits(bits);
    if (unitary.rows() != unitary.cols() || unitary.rows() == 0) {
        throw ValidationError("phase estimation needs a square unitary");
    }
    const Eigen::Index dim = unitary.rows();
    const double err = (unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (err > kUnitaryTolerance) {
        throw ValidationError("matrix is not unitary (max |U^dagger U - I| = " + std::to_string(err) + ")");
    }
    powers_.reserve(static_cast<std::size_t>(bits));
    powers_.push_back(unitary);
    for (int l = 1; l < bits; ++l) {
        powers_.push_back(powers_.back() * powers_.back());
    }
}

void PhaseEstimator::controlled_powers(Eigen::VectorXcd &joint, bool inverse) const {
    const std::size_t grid = grid_size(bits_);
    const auto sys = static_cast<Eigen::Index>(system_dim_);
    for (int step = 0; step < bits_; ++step) {
        const int l = inverse ? bits_ - 1 - step : step;
        const std::size_t mask = std::size_t{1} << l;
        const Eigen::MatrixXcd &power = powers_[static_cast<std::size_t>(l)];
        for (std::size_t x = 0; x < grid; ++x) {
            if ((x & mask) == 0) {
                continue;
            }
            auto block = joint.segment(static_cast<Eigen::Index>(x) * sys, sys);
            if (inverse) {
                block = (power.adjoint() * block).eval();
            } else {
                block = (power * block).eval();
            }
        }
    }
}

QuantumState PhaseEstimator::run(const QuantumState &input) const {
    if (input.dim() != system_dim_) {
        throw ValidationError("input state dimension " + std::to_string(input.dim()) +
                              " does not match unitary dimension " + std::to_string(system_dim_));
    }
    const std::size_t grid = grid_size(bits_);
    const auto sys = static_cast<Eigen::Index>(system_dim_);
    Eigen::VectorXcd joint(static_cast<Eigen::Index>(grid) * sys);
    const Eigen::VectorXcd spread = input.amplitudes() / std::sqrt(static_cast<double>(grid));
    for (std::size_t x = 0; x < grid; ++x) {
        joint.segment(static_cast<Eigen::Index>(x) * sys, sys) = spread;
    }
    controlled_powers(joint, false);
    ancilla_fourier(joint, grid, system_dim_, false);
    return QuantumState::normalized(std::move(joint), grid);
}

Eigen::VectorXcd PhaseEstimator::run_inverse(const Eigen::VectorXcd &joint) const {
    const std::size_t grid = grid_size(bits_);
    if (static_cast<std::size_t>(joint.size()) != grid * system_dim_) {
        throw ValidationError("joint state dimension does not match the phase register");
    }
    Eigen::VectorXcd out = joint;
    ancilla_fourier(out, grid, system_dim_, true);
    controlled_powers(out, true);
    ancilla_hadamard(out, grid, system_dim_);
    return out;
}

QuantumState qpe_statevector(const Eigen::MatrixXcd &unitary, const QuantumState &input, int bits) {
    return PhaseEstimator(unitary, bits).run(input);
}

QuantumState qpe_statevector(WalkUnitary &walk, const QuantumState &input, int bits) {
    const PhaseEstimator estimator(walk.matrix().cast<Complex>(), bits);
    QuantumState out = estimator.run(input);
    walk.record_applications(estimator.applications_per_run());
    return out;
}

std::vector<double> PhaseEstimateDistribution::marginal() const {
    std::vector<double> total(components.empty() ? 0 : components.front().size(), 0.0);
    for (std::size_t j = 0; j < components.size(); ++j) {
        for (std::size_t k = 0; k < total.size(); ++k) {
            total[k] += weights[j] * components[j][k];
        }
    }
    return total;
}

PhaseEstimateDistribution qpe_exact_spectral(std::span<const double> phases, std::span<const double> weights,
                                             int bits) {
    if (phases.size() != weights.size()) {
        throw ValidationError("one weight per eigenphase is required");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw ValidationError("eigencomponent weights must sum to 1");
    }
    PhaseEstimateDistribution dist;
    dist.bits = bits;
    dist.weights.assign(weights.begin(), weights.end());
    for (const double phase : phases) {
        dist.components.push_back(outcome_distribution(phase, bits));
    }
    return dist;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw ValidationError("distributions have different supports");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sum += std::abs(p[k] - q[k]);
    }
    return sum / 2.0;
}

double outcome_tail(int bits, double steps) {
    check_bits(bits);
    const std::size_t grid = grid_size(bits);
    const double spacing = grid_spacing(bits);
    constexpr int kOffsets = 2000;
    const auto reach = static_cast<long>(std::ceil(steps)) + 1;
    double worst = 0.0;
    for (int o = 0; o < kOffsets; ++o) {
        const double beta = static_cast<double>(o) / kOffsets;
        // Bins sit at integer positions; the true phase sits at beta.
        double inside = 0.0;
        for (long d = -reach; d <= reach + 1; ++d) {
            if (std::abs(static_cast<double>(d) - beta) <= steps) {
                inside += fejer_kernel((beta - static_cast<double>(d)) * spacing, grid);
            }
        }
        worst = std::max(worst, 1.0 - inside);
    }
    return std::clamp(worst, 0.0, 1.0);
}

double median_failure_bound(double p, int repetitions) {
    if (repetitions < 1 || repetitions % 2 == 0) {
        throw ValidationError("median amplification needs an odd repetition count");
    }
    double tail = 0.0;
    for (int j = (repetitions + 1) / 2; j <= repetitions; ++j) {
        const double log_binom = std::lgamma(repetitions + 1.0) - std::lgamma(j + 1.0) -
                                 std::lgamma(repetitions - j + 1.0);
        tail += std::exp(log_binom + j * std::log(std::max(p, 1e-300)) +
                         (repetitions - j) * std::log1p(-std::min(p, 1.0 - 1e-16)));
    }
    return std::min(tail, 1.0);
}

PhaseErrorBound phase_error_bound(int bits, int repetitions, double c_slack) {
    check_bits(bits);
    PhaseErrorBound bound;
    bound.bits = bits;
    bound.repetitions = repetitions;
    bound.c_slack = c_slack;
    bound.grid_spacing = grid_spacing(bits);
    bound.delta = c_slack * bound.grid_spacing;

    const std::size_t grid = grid_size(bits);
    constexpr int kOffsets = 2000;
    double nearest = 1.0;
    double two_bin = 1.0;
    for (int o = 0; o <= kOffsets / 2; ++o) {
        const double beta = static_cast<double>(o) / kOffsets;
        const double near_p = fejer_kernel(beta * bound.grid_spacing, grid);
        const double far_p = fejer_kernel((beta - 1.0) * bound.grid_spacing, grid);
        nearest = std::min(nearest, near_p);
        two_bin = std::min(two_bin, near_p + far_p);
    }
    bound.nearest_bin_probability = nearest;
    bound.two_bin_probability = two_bin;
    bound.single_run_tail = outcome_tail(bits, 1.0);
    bound.median_tail = median_failure_bound(bound.single_run_tail, repetitions);
    return bound;
}

} // namespace dqls
