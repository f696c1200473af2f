#include "dqls/quantum_state.hpp"

#include <cmath>
#include <string>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

void check_layout(Eigen::Index size, std::size_t ancilla_dim) {
    if (size == 0) {
        throw ValidationError("quantum state must have at least one amplitude");
    }
    if (ancilla_dim == 0 || static_cast<std::size_t>(size) % ancilla_dim != 0) {
        throw ValidationError("ancilla dimension " + std::to_string(ancilla_dim) +
                              " does not divide state dimension " + std::to_string(size));
    }
}

} // namespace

QuantumState::QuantumState(Eigen::VectorXcd amplitudes, std::size_t ancilla_dim)
    : amplitudes_(std::move(amplitudes)), ancilla_dim_(ancilla_dim) {
    check_layout(amplitudes_.size(), ancilla_dim_);
    const double norm = amplitudes_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
        throw ValidationError("quantum state is not normalized (norm " + std::to_string(norm) + ")");
    }
}

QuantumState QuantumState::normalized(Eigen::VectorXcd amplitudes, std::size_t ancilla_dim) {
    check_layout(amplitudes.size(), ancilla_dim);
    const double norm = amplitudes.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
        throw ValidationError("cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return QuantumState(std::move(amplitudes), ancilla_dim);
}

QuantumState QuantumState::normalized(const Eigen::VectorXd &amplitudes) {
    return normalized(Eigen::VectorXcd(amplitudes.cast<Complex>()));
}

QuantumState QuantumState::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw IndexError("basis index " + std::to_string(index) + " out of range for dimension " +
                         std::to_string(dim));
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    amps(static_cast<Eigen::Index>(index)) = 1.0;
    return QuantumState(std::move(amps));
}

Eigen::VectorXcd QuantumState::system_block(std::size_t ancilla) const {
    if (ancilla >= ancilla_dim_) {
        throw IndexError("ancilla value out of range");
    }
    const auto sys = static_cast<Eigen::Index>(system_dim());
    return amplitudes_.segment(static_cast<Eigen::Index>(ancilla) * sys, sys);
}

Eigen::VectorXd QuantumState::ancilla_marginal() const {
    const auto sys = static_cast<Eigen::Index>(system_dim());
    Eigen::VectorXd probs(static_cast<Eigen::Index>(ancilla_dim_));
    for (Eigen::Index a = 0; a < probs.size(); ++a) {
        probs(a) = amplitudes_.segment(a * sys, sys).squaredNorm();
    }
    return probs;
}

Complex QuantumState::inner(const QuantumState &other) const {
    if (other.dim() != dim()) {
        throw ValidationError("inner product of states with different dimensions");
    }
    return amplitudes_.dot(other.amplitudes_);
}

double QuantumState::fidelity(const QuantumState &other) const { return std::norm(inner(other)); }

double QuantumState::distance(const QuantumState &other) const {
    if (other.dim() != dim()) {
        throw ValidationError("distance between states with different dimensions");
    }
    return (amplitudes_ - other.amplitudes_).norm();
}

} // namespace dqls
