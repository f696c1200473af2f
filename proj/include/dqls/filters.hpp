#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace dqls {

enum class FilterKind {
    invert_only, ///< f = gamma / lambda everywhere, g = 0
    full_fgh,    ///< invert on |lambda| >= 1/kappa, flag |lambda| <= 1/(2 kappa), ramp between
};

/// Interpolant used on the ramp 1/(2 kappa) < |lambda| < 1/kappa.
enum class RampShape {
    circular,    ///< f = gamma kappa sin(pi x), g = cos(pi x) / 2 with x = kappa |lambda| - 1/2
    half_cosine, ///< squared variant: sin^2 and cos^2
};

FilterKind parse_filter_kind(std::string_view name);
RampShape parse_ramp_shape(std::string_view name);
std::string_view to_string(FilterKind kind);
std::string_view to_string(RampShape shape);

/// Amplitudes on the NO (no inversion), WC (well conditioned) and IC (ill conditioned) flags.
struct RotationAmplitudes {
    double no = 1.0;
    double wc = 0.0;
    double ic = 0.0;

    [[nodiscard]] Eigen::Vector3d as_vector() const { return {no, wc, ic}; }
};

/**
 * @brief Filtered inversion profile.
 *
 * f is odd in lambda, so the sign of an eigenvalue lands on the WC amplitude;
 * g and the NO amplitude are even. f and g are continuous, with f = 0 for
 * |lambda| <= 1/(2 kappa) and g = 0 for |lambda| >= 1/kappa.
 */
class FilterFunctions {
  public:
    FilterFunctions(double kappa, double gamma, FilterKind kind = FilterKind::full_fgh,
                    RampShape ramp = RampShape::circular);

    [[nodiscard]] double f(double lambda) const;
    [[nodiscard]] double g(double lambda) const;
    /// Throws ConfigurationError when f^2 + g^2 exceeds one.
    [[nodiscard]] RotationAmplitudes h(double lambda) const;

    [[nodiscard]] double kappa() const noexcept { return kappa_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] FilterKind kind() const noexcept { return kind_; }
    [[nodiscard]] RampShape ramp() const noexcept { return ramp_; }
    [[nodiscard]] double lower_breakpoint() const noexcept { return 0.5 / kappa_; }
    [[nodiscard]] double upper_breakpoint() const noexcept { return 1.0 / kappa_; }

  private:
    double kappa_;
    double gamma_;
    FilterKind kind_;
    RampShape ramp_;
};

} // namespace dqls
