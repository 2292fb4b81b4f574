#pragma once
// Canonical field builders: exact profiles and comparator-style barriers used
// as Dirichlet data, solver seeds, and test oracles.

#include "apfb/field.hpp"
#include "apfb/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace apfb {

/// Flat one-dimensional solution evaluated at signed distance xn from the
/// vanish hyperplane: c0 (xn^+)^alpha.
inline double half_plane_value(const Params& p, double xn) {
    return xn > 0.0 ? p.c0 * std::pow(xn, p.alpha) : 0.0;
}

/// Radial comparator M ((|x - c| - r0)^+)^alpha: vanishes inside the ball of
/// radius r0, grows with the optimal exponent outside.  Supersolution-shaped;
/// the standard large-data initializer.
inline double radial_comparator_value(const Params& p, Point x, Point c,
                                      double r0, double M) {
    const double dx = x[0] - c[0], dy = x[1] - c[1];
    const double d = std::sqrt(dx * dx + dy * dy) - r0;
    return d > 0.0 ? M * std::pow(d, p.alpha) : 0.0;
}

/// 1D half-line solution on [x0, x0 + (n-1) h] vanishing at x = fb.
inline ScalarField preset_half_plane_1d(const Params& p, int n, double h,
                                        double x0, double fb = 0.0) {
    ScalarField f = make_grid_1d(n, h, x0);
    for (int i = 0; i < n; ++i) f.at(i) = half_plane_value(p, f.x(i) - fb);
    return f;
}

/// 2D half-plane solution vanishing on {x_n = fb}, x_n = second coordinate.
inline ScalarField preset_half_plane_2d(const Params& p, int nx, int ny,
                                        double h, Point org, double fb = 0.0) {
    ScalarField f = make_grid_2d(nx, ny, h, org);
    for (int j = 0; j < ny; ++j) {
        const double v = half_plane_value(p, f.y(j) - fb);
        for (int i = 0; i < nx; ++i) f.at(i, j) = v;
    }
    return f;
}

/// 2D radial comparator field (see radial_comparator_value).
inline ScalarField preset_radial_2d(const Params& p, int nx, int ny, double h,
                                    Point org, Point center, double r0,
                                    double M) {
    if (!(r0 >= 0.0) || !(M > 0.0))
        throw std::invalid_argument("preset_radial_2d: need r0 >= 0 and M > 0");
    ScalarField f = make_grid_2d(nx, ny, h, org);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            f.at(i, j) = radial_comparator_value(p, f.node(i, j), center, r0, M);
    return f;
}

/// Constant value on the Dirichlet ring, zero inside.  Dead-core experiments.
inline ScalarField preset_constant(int nx, int ny, double h, Point org,
                                   double delta, int ndim = 2) {
    if (!(delta >= 0.0))
        throw std::invalid_argument("preset_constant: negative boundary value");
    ScalarField f = ndim == 2 ? make_grid_2d(nx, ny, h, org)
                              : make_grid_1d(nx, h, org[0]);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (f.boundary_mask[k]) f.values[k] = delta;
    return f;
}

/// Copy Dirichlet values from src onto dst wherever dst is masked.
/// Grids must be congruent.
inline void apply_dirichlet(ScalarField& dst, const ScalarField& src) {
    if (dst.ndim != src.ndim || dst.dims != src.dims)
        throw std::invalid_argument("apply_dirichlet: grid shape mismatch");
    for (std::size_t k = 0; k < dst.values.size(); ++k)
        if (dst.boundary_mask[k]) dst.values[k] = src.values[k];
}

} // namespace apfb
