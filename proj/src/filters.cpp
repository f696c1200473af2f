#include "dqls/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dqls/errors.hpp"

namespace dqls {

namespace {

constexpr double kAmplitudeSlack = 1e-12;

} // namespace

FilterKind parse_filter_kind(std::string_view name) {
    if (name == "invert-only") {
        return FilterKind::invert_only;
    }
    if (name == "full-fgh") {
        return FilterKind::full_fgh;
    }
    throw ValidationError("unknown filter '" + std::string(name) + "' (expected invert-only or full-fgh)");
}

RampShape parse_ramp_shape(std::string_view name) {
    if (name == "circular") {
        return RampShape::circular;
    }
    if (name == "half-cosine") {
        return RampShape::half_cosine;
    }
    throw ValidationError("unknown ramp '" + std::string(name) + "' (expected circular or half-cosine)");
}

std::string_view to_string(FilterKind kind) {
    return kind == FilterKind::invert_only ? "invert-only" : "full-fgh";
}

std::string_view to_string(RampShape shape) {
    return shape == RampShape::circular ? "circular" : "half-cosine";
}

FilterFunctions::FilterFunctions(double kappa, double gamma, FilterKind kind, RampShape ramp)
    : kappa_(kappa), gamma_(gamma), kind_(kind), ramp_(ramp) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw ValidationError("condition number must be finite and at least 1");
    }
    if (!(gamma > 0.0)) {
        throw ValidationError("rotation scale gamma must be positive");
    }
}

double FilterFunctions::f(double lambda) const {
    if (kind_ == FilterKind::invert_only) {
        if (lambda == 0.0) {
            throw ConfigurationError("cannot invert a zero eigenvalue estimate");
        }
        return gamma_ / lambda;
    }
    const double mag = std::abs(lambda);
    const double sign = lambda < 0.0 ? -1.0 : 1.0;
    if (mag >= upper_breakpoint()) {
        return gamma_ / lambda;
    }
    if (mag <= lower_breakpoint()) {
        return 0.0;
    }
    const double s = std::sin(std::numbers::pi * (kappa_ * mag - 0.5));
    const double ramp = ramp_ == RampShape::circular ? s : s * s;
    return sign * gamma_ * kappa_ * ramp;
}

double FilterFunctions::g(double lambda) const {
    if (kind_ == FilterKind::invert_only) {
        return 0.0;
    }
    const double mag = std::abs(lambda);
    if (mag >= upper_breakpoint()) {
        return 0.0;
    }
    if (mag <= lower_breakpoint()) {
        return 0.5;
    }
    const double c = std::cos(std::numbers::pi * (kappa_ * mag - 0.5));
    return 0.5 * (ramp_ == RampShape::circular ? c : c * c);
}

RotationAmplitudes FilterFunctions::h(double lambda) const {
    RotationAmplitudes amps;
    amps.wc = f(lambda);
    amps.ic = g(lambda);
    const double used = amps.wc * amps.wc + amps.ic * amps.ic;
    if (used > 1.0 + kAmplitudeSlack) {
        throw ConfigurationError("rotation amplitude exceeds one at lambda = " + std::to_string(lambda) +
                                 " (gamma = " + std::to_string(gamma_) + " is too large)");
    }
    amps.no = std::sqrt(std::max(0.0, 1.0 - used));
    return amps;
}

} // namespace dqls
