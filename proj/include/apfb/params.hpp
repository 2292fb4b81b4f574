#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace apfb {

/// Derived constants for the potential W(t) = (1/gamma) t^{-gamma}, t > 0.
/// All quantities are functions of gamma alone:
///   alpha   = 2/(gamma+2), the homogeneity of the one-dimensional profile
///   c0      = [alpha(1-alpha)]^{-1/(gamma+2)}, profile coefficient
///   s       = 2(alpha-1), exponent appearing in the slope expansion
///   c_gamma = (1-gamma/2) sqrt(gamma/2), perimeter rescaling factor
struct Params {
    double gamma;
    double alpha;
    double c0;
    double s;
    double c_gamma;
};

// gamma must lie in the open interval (0,2); alpha then lies in (1/2,1).
inline Params make_params(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 2.0))
        throw std::domain_error("make_params: gamma must lie in (0,2), got " +
                                std::to_string(gamma));
    Params p;
    p.gamma = gamma;
    p.alpha = 2.0 / (gamma + 2.0);
    p.c0 = std::pow(p.alpha * (1.0 - p.alpha), -1.0 / (gamma + 2.0));
    p.s = 2.0 * (p.alpha - 1.0);
    p.c_gamma = (1.0 - gamma / 2.0) * std::sqrt(gamma / 2.0);
    return p;
}

/// W(t) for t > 0; zero for t <= 0. Values below the positive underflow
/// threshold of t^{-gamma} report +infinity rather than a garbage finite value.
inline double potential_value(const Params& p, double t) {
    if (t <= 0.0) return 0.0;
    const double w = std::pow(t, -p.gamma) / p.gamma;
    if (!std::isfinite(w)) return std::numeric_limits<double>::infinity();
    return w;
}

} // namespace apfb
