#pragma once
// Shared oracles for the test suite.  Values marked "frozen" were computed
// from closed forms independent of the library (derivations in comments) and
// must not be regenerated from library output.

#include "apfb/params.hpp"
#include "apfb/presets.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Closed form for J(c0 x^alpha) on [0, L] in 1D.  Both halves integrate to
// (1/2) c0^2 alpha^2 L^{2a-1}/(2a-1) and (1/g) c0^{-g} L^{1-g a}/(1-g a);
// the c0 definition makes them equal, so the total is twice either:
//   J = c0^2 alpha^2 L^{2 alpha - 1} / (2 alpha - 1).
inline double halfline_energy(const apfb::Params& p, double L) {
    return p.c0 * p.c0 * p.alpha * p.alpha *
           std::pow(L, 2.0 * p.alpha - 1.0) / (2.0 * p.alpha - 1.0);
}

// Density of the same integrand at depth y > 0:
//   (1/2) c0^2 a^2 y^{2a-2} + (1/g) c0^{-g} y^{-g a}  (the two terms agree).
inline double halfline_density(const apfb::Params& p, double y) {
    return p.c0 * p.c0 * p.alpha * p.alpha * std::pow(y, 2.0 * p.alpha - 2.0);
}

// gamma = 1 constants, frozen:
//   c0   = (9/2)^{1/3}          = 1.6509636244473131
//   J on [0,1] = (4/3) c0^2     = 3.6342594275529338
//   Weiss constant = J / 2      = 1.8171297137764669
inline constexpr double kC0Gamma1 = 1.6509636244473131;
inline constexpr double kEnergyUnitGamma1 = 3.6342594275529338;
inline constexpr double kWeissGamma1 = 1.8171297137764669;

// Exact-rational identity check: for gamma = pn/pd, alpha = 2 pd/(pn + 2 pd)
// and the claim alpha - 2 = -alpha (gamma + 1) becomes, over the integers,
//   (2 pd - 2 (pn + 2 pd)) * (pd (pn + 2 pd)) == -2 pd (pn + pd) * (pn + 2 pd)
// after clearing the common denominator pd (pn + 2 pd).  Returns exact
// integer equality; no floating point involved.
inline bool alpha_shift_identity_rational(std::int64_t pn, std::int64_t pd) {
    const std::int64_t den = pn + 2 * pd;         // alpha = 2 pd / den
    const std::int64_t lhs_num = 2 * pd - 2 * den; // (alpha - 2) * den
    // -alpha (gamma+1) = -(2 pd / den) * ((pn + pd)/ pd) = -2 (pn + pd)/den
    const std::int64_t rhs_num = -2 * (pn + pd);
    return lhs_num == rhs_num;
}

inline std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a * std::pow(b / a, double(i) / (n - 1));
    return v;
}

// Smooth strictly positive 2D field on the grid of `tmpl`: a fixed-seed
// random low-order trigonometric polynomial, bounded away from zero.
inline apfb::ScalarField random_smooth_positive(const apfb::ScalarField& tmpl,
                                                std::mt19937& rng) {
    apfb::ScalarField f = tmpl;
    std::uniform_real_distribution<double> amp(-0.15, 0.15);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    double a[3], b[3], ph[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = amp(rng);
        b[k] = amp(rng);
        ph[k] = phase(rng);
    }
    for (int j = 0; j < f.dims[1]; ++j)
        for (int i = 0; i < f.dims[0]; ++i) {
            const double x = f.x(i), y = f.y(j);
            double v = 0.6;
            for (int k = 0; k < 3; ++k)
                v += a[k] * std::sin((k + 1) * 3.0 * x + ph[k]) +
                     b[k] * std::cos((k + 2) * 2.0 * y - ph[k]);
            f.at(i, j) = std::max(v, 0.05);
        }
    return f;
}

} // namespace oracle
