#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace httool {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) integration of `f` over the finite
/// interval [a,b], 0 <= a <= b. Panels are pre-split at every breakpoint
/// in (a,b) and at decade marks so that jumps, kinks and narrow features
/// are resolved before bisection starts. Requires a == b to return exactly 0.
///
/// Non-convergence within cfg.max_subdivisions is reported through
/// QuadratureResult::converged, not thrown. A NaN integrand value throws
/// EvaluationError naming the offending abscissa.
QuadratureResult integrate_finite(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  const QuadratureConfig& cfg);

/// Integration of `f` over [a, infinity), a > 0, via the rational
/// substitution z = a/(1-u), u in [0,1).
///
/// When `decay_exponent` p > 1 is supplied (meaning f(z) = O(z^-p)), the
/// interval is cut at a z_max where the analytic remainder bound
/// |f(z_max)| * z_max / (p-1) drops below abs_tol; the bound is folded into
/// the error estimate. Without a hint the integration doubles the upper
/// limit until two successive truncations differ by less than the
/// tolerance; failure to become Cauchy throws DivergenceError.
QuadratureResult integrate_tail(const Integrand& f, double a,
                                const QuadratureConfig& cfg,
                                std::optional<double> decay_exponent = std::nullopt,
                                std::span<const double> breakpoints = {});

/// Probes |f| at two large abscissae beyond `from` and returns a slightly
/// conservative power-decay exponent usable as an integrate_tail hint, or
/// nullopt when no reliable estimate exists (zero, non-finite or growing f).
std::optional<double> estimate_decay_exponent(const Integrand& f, double from);

} // namespace httool
