#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace apfb {

using Point = std::array<double, 2>; // [1] unused in 1D

/// Nonnegative scalar field sampled on a uniform node grid.
/// 1D: dims = {n, 1}, nodes x_i = origin[0] + i h.
/// 2D: dims = {nx, ny}, nodes (origin[0] + i h, origin[1] + j h), row-major
/// storage with i fastest.
/// boundary_mask marks Dirichlet nodes; their values are held fixed by the
/// solver and carry the boundary data.
struct ScalarField {
    int ndim = 1;
    std::array<int, 2> dims{0, 1};
    double h = 0.0;
    Point origin{0.0, 0.0};
    std::vector<double> values;
    std::vector<std::uint8_t> boundary_mask;

    std::size_t size() const { return values.size(); }
    std::size_t idx(int i, int j = 0) const {
        assert(i >= 0 && i < dims[0] && j >= 0 && j < dims[1]);
        return static_cast<std::size_t>(j) * dims[0] + i;
    }
    double& at(int i, int j = 0) { return values[idx(i, j)]; }
    double at(int i, int j = 0) const { return values[idx(i, j)]; }
    bool fixed(int i, int j = 0) const { return boundary_mask[idx(i, j)] != 0; }

    double x(int i) const { return origin[0] + h * i; }
    double y(int j) const { return origin[1] + h * j; }
    Point node(int i, int j = 0) const { return {x(i), y(j)}; }

    /// Physical box covered by the grid (node hull).
    Point box_lo() const { return origin; }
    Point box_hi() const {
        return {origin[0] + h * (dims[0] - 1),
                ndim == 2 ? origin[1] + h * (dims[1] - 1) : 0.0};
    }
};

inline ScalarField make_grid_1d(int n, double h, double x0) {
    if (n < 2 || !(h > 0.0)) throw std::invalid_argument("make_grid_1d: bad grid");
    ScalarField f;
    f.ndim = 1;
    f.dims = {n, 1};
    f.h = h;
    f.origin = {x0, 0.0};
    f.values.assign(static_cast<std::size_t>(n), 0.0);
    f.boundary_mask.assign(static_cast<std::size_t>(n), 0);
    f.boundary_mask.front() = 1;
    f.boundary_mask.back() = 1;
    return f;
}

inline ScalarField make_grid_2d(int nx, int ny, double h, Point org) {
    if (nx < 2 || ny < 2 || !(h > 0.0))
        throw std::invalid_argument("make_grid_2d: bad grid");
    ScalarField f;
    f.ndim = 2;
    f.dims = {nx, ny};
    f.h = h;
    f.origin = org;
    f.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    f.boundary_mask.assign(f.values.size(), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1)
                f.boundary_mask[f.idx(i, j)] = 1;
    return f;
}

/// Bilinear (linear in 1D) interpolation. Points must lie inside the node
/// hull up to a relative slack of a few ulps; outside requests throw.
inline double interpolate(const ScalarField& f, Point p) {
    const double eps = 1e-12 * (1.0 + std::abs(p[0]) + std::abs(p[1]));
    auto locate = [&](double c, double o, int n) {
        double t = (c - o) / f.h;
        if (t < 0.0) {
            if (t < -eps / f.h) throw std::domain_error("interpolate: point outside grid");
            t = 0.0;
        }
        if (t > n - 1) {
            if (t > n - 1 + eps / f.h) throw std::domain_error("interpolate: point outside grid");
            t = n - 1;
        }
        int i = static_cast<int>(t);
        if (i > n - 2) i = n - 2;
        return std::pair<int, double>(i, t - i);
    };
    auto [i, fx] = locate(p[0], f.origin[0], f.dims[0]);
    if (f.ndim == 1)
        return (1.0 - fx) * f.at(i) + fx * f.at(i + 1);
    auto [j, fy] = locate(p[1], f.origin[1], f.dims[1]);
    const double v00 = f.at(i, j), v10 = f.at(i + 1, j);
    const double v01 = f.at(i, j + 1), v11 = f.at(i + 1, j + 1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) +
           fy * ((1.0 - fx) * v01 + fx * v11);
}

/// Integration / analysis region: everything, an axis box, or a ball.
struct Region {
    enum class Kind { All, Box, Ball } kind = Kind::All;
    Point lo{0, 0}, hi{0, 0}; // Box
    Point center{0, 0};       // Ball
    double radius = 0.0;

    static Region all() { return Region{}; }
    static Region box(Point lo, Point hi) {
        Region r;
        r.kind = Kind::Box;
        r.lo = lo;
        r.hi = hi;
        return r;
    }
    static Region ball(Point c, double rad) {
        Region r;
        r.kind = Kind::Ball;
        r.center = c;
        r.radius = rad;
        return r;
    }

    bool contains(int ndim, Point p) const {
        switch (kind) {
        case Kind::All: return true;
        case Kind::Box:
            if (p[0] < lo[0] || p[0] > hi[0]) return false;
            return ndim == 1 || (p[1] >= lo[1] && p[1] <= hi[1]);
        case Kind::Ball: {
            const double dx = p[0] - center[0];
            const double dy = ndim == 2 ? p[1] - center[1] : 0.0;
            return dx * dx + dy * dy <= radius * radius;
        }
        }
        return false;
    }
};

/// Fixed-order pairwise tree reduction; summation order is independent of
/// any parallel fill of `terms`, so totals are reproducible bit-for-bit.
inline double pairwise_sum(std::vector<double>& terms) {
    if (terms.empty()) return 0.0;
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t m = 0;
        for (std::size_t k = 0; k + 1 < n; k += 2) terms[m++] = terms[k] + terms[k + 1];
        if (n % 2) terms[m++] = terms[n - 1];
        n = m;
    }
    return terms[0];
}

} // namespace apfb
