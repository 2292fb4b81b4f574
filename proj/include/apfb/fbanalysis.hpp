#pragma once
// Free boundary extraction and radius-indexed diagnostics: growth exponents,
// the Weiss-type monotone quantity, blow-up convergence, flatness, and the
// Lipschitz bound on u^2.

#include "apfb/energy.hpp"
#include "apfb/field.hpp"
#include "apfb/numerics.hpp"
#include "apfb/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace apfb {

struct FBCell {
    int i = 0, j = 0;
};

struct FreeBoundary {
    std::vector<FBCell> cells;   // cells with positive and zero corners mixed
    std::vector<Point> points;   // subgrid interface points on edges
    std::vector<Point> normals;  // unit, pointing into the positive phase
};

namespace detail {

// Vanish point along an edge (positions 0 and h), value va > 0 at 0 and
// vb = 0 at h, refined by a profile fit u ~ C (x_v - x)^alpha through nodes
// behind a.  The fit prefers the second/third nodes behind: the node nearest
// the interface carries the largest deviation from the power profile under
// nodal relaxation, and a fit through it biases the vanish point toward the
// positive side.  Falls back to the first-pair fit, then to the transformed
// linear crossing.  Returns the offset from the positive endpoint in [0, h].
inline double edge_vanish_offset(const Params& p, double va, double v_behind,
                                 double v_behind2, double h) {
    if (v_behind2 > v_behind && v_behind > va) {
        const double rho2 = std::pow(v_behind2 / v_behind, 1.0 / p.alpha);
        // behind nodes at distances d+h, d+2h from the vanish point, d the
        // offset sought: rho2 = (d+2h)/(d+h), in [1.5, 2] iff d in [0, h]
        if (rho2 >= 1.5 && rho2 <= 2.0) return h * (2.0 - rho2) / (rho2 - 1.0);
    }
    if (v_behind > va) {
        const double rho = std::pow(v_behind / va, 1.0 / p.alpha);
        if (rho >= 2.0) {
            const double xv = h / (rho - 1.0);
            if (xv <= h) return xv;
        }
    }
    return h;
}

} // namespace detail

/// Cells with a sign change of chi_{u>0} among their corners, subgrid points
/// on sign-changing edges, and per-point normals from the gradient of a 3x3
/// smoothed indicator.  Empty when u > 0 everywhere or u vanishes everywhere.
inline FreeBoundary extract_fb(const Params& p, const ScalarField& u) {
    FreeBoundary fb;
    const double h = u.h;
    const int nx = u.dims[0];

    if (u.ndim == 1) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double a = u.at(i), b = u.at(i + 1);
            const bool pa = a > 0.0, pb = b > 0.0;
            if (pa == pb) continue;
            fb.cells.push_back({i, 0});
            double x;
            if (pb) { // positive to the right, vanish left of node i+1
                const double b1 = i + 2 < nx ? u.at(i + 2) : 0.0;
                const double b2 = i + 3 < nx ? u.at(i + 3) : 0.0;
                x = u.x(i + 1) - detail::edge_vanish_offset(p, b, b1, b2, h);
                fb.normals.push_back({1.0, 0.0});
            } else {
                const double b1 = i >= 1 ? u.at(i - 1) : 0.0;
                const double b2 = i >= 2 ? u.at(i - 2) : 0.0;
                x = u.x(i) + detail::edge_vanish_offset(p, a, b1, b2, h);
                fb.normals.push_back({-1.0, 0.0});
            }
            fb.points.push_back({x, 0.0});
        }
        return fb;
    }

    const int ny = u.dims[1];
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int npos = (u.at(i, j) > 0.0) + (u.at(i + 1, j) > 0.0) +
                             (u.at(i, j + 1) > 0.0) + (u.at(i + 1, j + 1) > 0.0);
            if (npos > 0 && npos < 4) fb.cells.push_back({i, j});
        }

    // smoothed indicator for normals
    std::vector<double> chi(u.values.size());
    for (std::size_t k = 0; k < chi.size(); ++k)
        chi[k] = u.values[k] > 0.0 ? 1.0 : 0.0;
    auto smooth_at = [&](int i, int j) {
        double s = 0.0, wsum = 0.0;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                const double w = (di == 0 ? 2.0 : 1.0) * (dj == 0 ? 2.0 : 1.0);
                s += w * chi[u.idx(ii, jj)];
                wsum += w;
            }
        return s / wsum;
    };
    auto normal_at = [&](int i, int j) -> Point {
        const int il = std::max(i - 1, 0), ir = std::min(i + 1, nx - 1);
        const int jl = std::max(j - 1, 0), jr = std::min(j + 1, ny - 1);
        double gx = (smooth_at(ir, j) - smooth_at(il, j)) / ((ir - il) * h);
        double gy = (smooth_at(i, jr) - smooth_at(i, jl)) / ((jr - jl) * h);
        const double n = std::hypot(gx, gy);
        if (n < 1e-14) return {0.0, 1.0};
        return {gx / n, gy / n};
    };

    auto emit = [&](Point pt, int ni, int nj) {
        fb.points.push_back(pt);
        fb.normals.push_back(normal_at(ni, nj));
    };
    // x-edges
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const double a = u.at(i, j), b = u.at(i + 1, j);
            if ((a > 0.0) == (b > 0.0)) continue;
            if (b > 0.0) {
                const double b1 = i + 2 < nx ? u.at(i + 2, j) : 0.0;
                const double b2 = i + 3 < nx ? u.at(i + 3, j) : 0.0;
                const double off = detail::edge_vanish_offset(p, b, b1, b2, h);
                emit({u.x(i + 1) - off, u.y(j)}, i, j);
            } else {
                const double b1 = i >= 1 ? u.at(i - 1, j) : 0.0;
                const double b2 = i >= 2 ? u.at(i - 2, j) : 0.0;
                const double off = detail::edge_vanish_offset(p, a, b1, b2, h);
                emit({u.x(i) + off, u.y(j)}, i, j);
            }
        }
    // y-edges
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double a = u.at(i, j), b = u.at(i, j + 1);
            if ((a > 0.0) == (b > 0.0)) continue;
            if (b > 0.0) {
                const double b1 = j + 2 < ny ? u.at(i, j + 2) : 0.0;
                const double b2 = j + 3 < ny ? u.at(i, j + 3) : 0.0;
                const double off = detail::edge_vanish_offset(p, b, b1, b2, h);
                emit({u.x(i), u.y(j + 1) - off}, i, j);
            } else {
                const double b1 = j >= 1 ? u.at(i, j - 1) : 0.0;
                const double b2 = j >= 2 ? u.at(i, j - 2) : 0.0;
                const double off = detail::edge_vanish_offset(p, a, b1, b2, h);
                emit({u.x(i), u.y(j) + off}, i, j);
            }
        }
    return fb;
}

struct GrowthFit {
    std::vector<double> radii;
    std::vector<double> maxima;        // max_{boundary of B_r} u
    std::vector<std::size_t> excluded; // indices with max = 0, not fitted
    double slope = 0.0;                // fitted log-log exponent
    double intercept = 0.0;            // multiplicative constant
};

namespace detail {

inline double sphere_max(const ScalarField& u, Point c, double r,
                         int n_angles = 4096) {
    if (u.ndim == 1) {
        return std::max(interpolate(u, {c[0] - r, 0.0}),
                        interpolate(u, {c[0] + r, 0.0}));
    }
    double m = 0.0;
    for (int k = 0; k < n_angles; ++k) {
        const double th = 2.0 * M_PI * k / n_angles;
        m = std::max(m, interpolate(u, {c[0] + r * std::cos(th),
                                        c[1] + r * std::sin(th)}));
    }
    return m;
}

} // namespace detail

/// Max of u over sphere boundaries by dense angular sampling, with the
/// least-squares exponent of log(max) against log(r).  Zero maxima are
/// reported and excluded from the fit.
inline GrowthFit growth_fit(const ScalarField& u, Point center,
                            const std::vector<double>& radii) {
    if (radii.size() < 2)
        throw std::invalid_argument("growth_fit: need at least two radii");
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(radii[k] > radii[k - 1]))
            throw std::invalid_argument("growth_fit: radii must increase");
    GrowthFit gf;
    gf.radii = radii;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double m = detail::sphere_max(u, center, radii[k]);
        gf.maxima.push_back(m);
        if (m > 0.0) {
            lx.push_back(std::log(radii[k]));
            ly.push_back(std::log(m));
        } else {
            gf.excluded.push_back(k);
        }
    }
    if (lx.size() < 2)
        throw std::domain_error("growth_fit: fewer than two nonzero maxima");
    const LineFit lf = fit_line(lx, ly);
    gf.slope = lf.slope;
    gf.intercept = std::exp(lf.intercept);
    return gf;
}

struct WeissCurve {
    std::vector<double> radii;
    std::vector<double> values;
};

namespace detail {

// Boundary values of u interpolated through the root transform
// v = (u/c0)^{1/alpha}: v is distance-like and nearly linear across the free
// boundary, where bilinear interpolation of u itself loses O(h^2 d^{a-2})
// against the concave profile.
inline double interp_profile_root(const Params& p, const ScalarField& u,
                                  Point x) {
    const double eps = 1e-12 * (1.0 + std::abs(x[0]) + std::abs(x[1]));
    auto locate = [&](double c, double o, int n) {
        double t = (c - o) / u.h;
        if (t < 0.0) {
            if (t < -eps / u.h)
                throw std::domain_error("interp_profile_root: point outside grid");
            t = 0.0;
        }
        if (t > n - 1) {
            if (t > n - 1 + eps / u.h)
                throw std::domain_error("interp_profile_root: point outside grid");
            t = n - 1;
        }
        int i = static_cast<int>(t);
        if (i > n - 2) i = n - 2;
        return std::pair<int, double>(i, t - i);
    };
    const double inv_alpha = 1.0 / p.alpha;
    auto root = [&](double val) {
        return val > 0.0 ? std::pow(val / p.c0, inv_alpha) : 0.0;
    };
    auto [i, fx] = locate(x[0], u.origin[0], u.dims[0]);
    double v;
    if (u.ndim == 1) {
        v = (1.0 - fx) * root(u.at(i)) + fx * root(u.at(i + 1));
    } else {
        auto [j, fy] = locate(x[1], u.origin[1], u.dims[1]);
        v = (1.0 - fy) * ((1.0 - fx) * root(u.at(i, j)) + fx * root(u.at(i + 1, j))) +
            fy * ((1.0 - fx) * root(u.at(i, j + 1)) + fx * root(u.at(i + 1, j + 1)));
    }
    return v > 0.0 ? p.c0 * std::pow(v, p.alpha) : 0.0;
}

} // namespace detail

/// W(r) = r^{-n-2(alpha-1)} J(u, B_r) - alpha r^{-(n-1)-2alpha} I(r), with
/// I(r) the boundary integral of u^2: trapezoid over 4096 angles in 2D, the
/// two-point sum in 1D, sampled through the root transform of
/// interp_profile_root.  Constant exactly on alpha-homogeneous fields;
/// increasing in r for minimizers.
inline WeissCurve weiss_curve(const Params& p, const ScalarField& u,
                              Point center, const std::vector<double>& radii,
                              int n_angles = 4096) {
    WeissCurve wc;
    wc.radii = radii;
    const int n = u.ndim;
    for (const double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("weiss_curve: r <= 0");
        const double J =
            energy(p, u, Region::ball(center, r)).total;
        double I = 0.0;
        if (n == 1) {
            const double ua = detail::interp_profile_root(p, u, {center[0] - r, 0.0});
            const double ub = detail::interp_profile_root(p, u, {center[0] + r, 0.0});
            I = ua * ua + ub * ub;
        } else {
            std::vector<double> terms(n_angles);
            for (int k = 0; k < n_angles; ++k) {
                const double th = 2.0 * M_PI * k / n_angles;
                const double v = detail::interp_profile_root(
                    p, u, {center[0] + r * std::cos(th),
                           center[1] + r * std::sin(th)});
                terms[k] = v * v;
            }
            I = pairwise_sum(terms) * (2.0 * M_PI * r / n_angles);
        }
        const double W = std::pow(r, -n - 2.0 * (p.alpha - 1.0)) * J -
                         p.alpha * std::pow(r, -(n - 1) - 2.0 * p.alpha) * I;
        wc.values.push_back(W);
    }
    return wc;
}

struct BlowupReport {
    std::vector<double> lambdas;
    std::vector<double> successive_dist;     // L_inf(u_{l_k}, u_{l_{k+1}})
    std::vector<double> dist_to_halfplane;   // best-rotation L_inf per lambda
    std::vector<double> best_angle;          // radians; 0 or pi in 1D
    double window_halfwidth = 0.0;
    bool window_shrunk = false;
};

namespace detail {

inline double halfplane_distance(const Params& p, const ScalarField& v,
                                 double angle) {
    // compare against c0 ((x . nu)^+)^alpha on v's own nodes
    const double cx = std::cos(angle), cy = std::sin(angle);
    double d = 0.0;
    const int ny = v.ndim == 2 ? v.dims[1] : 1;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < v.dims[0]; ++i) {
            const Point x = v.node(i, j);
            const double t = v.ndim == 2 ? cx * x[0] + cy * x[1] : cx * x[0];
            const double ref = t > 0.0 ? p.c0 * std::pow(t, p.alpha) : 0.0;
            d = std::max(d, std::abs(v.at(i, j) - ref));
        }
    return d;
}

} // namespace detail

/// Rescalings u_lambda on a shared window about an FB point, successive
/// L_inf distances, and per-lambda distance to the best-rotated flat
/// solution.  A window that would escape the field box is shrunk and the
/// shrink recorded.
inline BlowupReport blowup_diag(const Params& p, const ScalarField& u,
                                Point center, std::vector<double> lambdas,
                                double window_halfwidth = 0.5,
                                int window_nodes = 129) {
    if (lambdas.empty())
        throw std::invalid_argument("blowup_diag: empty lambda list");
    for (std::size_t k = 1; k < lambdas.size(); ++k)
        if (!(lambdas[k] < lambdas[k - 1]))
            throw std::invalid_argument("blowup_diag: lambdas must decrease");
    BlowupReport rep;
    rep.lambdas = lambdas;
    const double lmax = lambdas.front();
    const Point lo = u.box_lo(), hi = u.box_hi();
    double room = hi[0] - center[0];
    room = std::min(room, center[0] - lo[0]);
    if (u.ndim == 2) {
        room = std::min(room, hi[1] - center[1]);
        room = std::min(room, center[1] - lo[1]);
    }
    double w = window_halfwidth;
    if (w * lmax > room) {
        w = room / lmax * (1.0 - 1e-12);
        rep.window_shrunk = true;
    }
    rep.window_halfwidth = w;

    const double h_out = 2.0 * w / (window_nodes - 1);
    std::vector<ScalarField> frames;
    for (const double l : lambdas)
        frames.push_back(blowup_rescale(p, u, l, center, {-w, -w}, {w, w},
                                        h_out));
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        double d = 0.0;
        for (std::size_t m = 0; m < frames[k].values.size(); ++m)
            d = std::max(d,
                         std::abs(frames[k].values[m] - frames[k + 1].values[m]));
        rep.successive_dist.push_back(d);
    }
    for (auto& f : frames) {
        double best_d = std::numeric_limits<double>::infinity();
        double best_a = 0.0;
        if (u.ndim == 1) {
            for (const double a : {0.0, M_PI}) {
                const double d = detail::halfplane_distance(p, f, a);
                if (d < best_d) { best_d = d; best_a = a; }
            }
        } else {
            const int na = 720;
            int bi = 0;
            for (int k = 0; k < na; ++k) {
                const double a = 2.0 * M_PI * k / na;
                const double d = detail::halfplane_distance(p, f, a);
                if (d < best_d) { best_d = d; best_a = a; bi = k; }
            }
            // golden-section polish around the coarse winner
            double al = 2.0 * M_PI * (bi - 1) / na, ar = 2.0 * M_PI * (bi + 1) / na;
            for (int it = 0; it < 40; ++it) {
                const double m1 = al + 0.381966 * (ar - al);
                const double m2 = ar - 0.381966 * (ar - al);
                if (detail::halfplane_distance(p, f, m1) <
                    detail::halfplane_distance(p, f, m2))
                    ar = m2;
                else
                    al = m1;
            }
            best_a = 0.5 * (al + ar);
            best_d = detail::halfplane_distance(p, f, best_a);
        }
        rep.dist_to_halfplane.push_back(best_d);
        rep.best_angle.push_back(best_a);
    }
    return rep;
}

/// Least-squares plane through the FB points inside the ball; eps is the max
/// slab half-width over r.  The normal is oriented along the mean of the
/// stored FB normals.
inline std::pair<Point, double> flatness(const FreeBoundary& fb, Point center,
                                         double r) {
    std::vector<std::size_t> in;
    for (std::size_t k = 0; k < fb.points.size(); ++k) {
        const double dx = fb.points[k][0] - center[0];
        const double dy = fb.points[k][1] - center[1];
        if (dx * dx + dy * dy <= r * r) in.push_back(k);
    }
    if (in.size() < 3)
        throw std::domain_error("flatness: fewer than 3 FB points in the ball");
    double mx = 0.0, my = 0.0;
    for (const auto k : in) { mx += fb.points[k][0]; my += fb.points[k][1]; }
    mx /= in.size(); my /= in.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto k : in) {
        const double dx = fb.points[k][0] - mx, dy = fb.points[k][1] - my;
        sxx += dx * dx; sxy += dx * dy; syy += dy * dy;
    }
    // eigenvector of the smallest eigenvalue of [[sxx,sxy],[sxy,syy]]
    const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
    const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
    const double lmin = tr / 2.0 - disc;
    Point nu;
    if (std::abs(sxy) > 1e-30) {
        nu = {lmin - syy, sxy};
    } else {
        nu = sxx <= syy ? Point{1.0, 0.0} : Point{0.0, 1.0};
    }
    const double nn = std::hypot(nu[0], nu[1]);
    if (nn < 1e-300)
        throw std::domain_error("flatness: degenerate point configuration");
    nu = {nu[0] / nn, nu[1] / nn};
    double dot = 0.0;
    for (const auto k : in)
        dot += nu[0] * fb.normals[k][0] + nu[1] * fb.normals[k][1];
    if (dot < 0.0) nu = {-nu[0], -nu[1]};
    double wmax = 0.0;
    for (const auto k : in) {
        const double d = nu[0] * (fb.points[k][0] - mx) +
                         nu[1] * (fb.points[k][1] - my);
        wmax = std::max(wmax, std::abs(d));
    }
    return {nu, wmax / r};
}

/// Discrete Lipschitz constant of u^2: max over edges of |u_i^2 - u_j^2|/h,
/// restricted to nodes at least a 10% margin inside the box on every side.
inline double lipschitz_u2(const ScalarField& u) {
    const int nx = u.dims[0], ny = u.ndim == 2 ? u.dims[1] : 1;
    const int mi = std::max(1, nx / 10);
    const int mj = u.ndim == 2 ? std::max(1, ny / 10) : 0;
    double L = 0.0;
    for (int j = mj; j < ny - mj; ++j)
        for (int i = mi; i < nx - mi; ++i) {
            const double a2 = u.at(i, j) * u.at(i, j);
            if (i + 1 < nx - mi) {
                const double b2 = u.at(i + 1, j) * u.at(i + 1, j);
                L = std::max(L, std::abs(b2 - a2) / u.h);
            }
            if (u.ndim == 2 && j + 1 < ny - mj) {
                const double b2 = u.at(i, j + 1) * u.at(i, j + 1);
                L = std::max(L, std::abs(b2 - a2) / u.h);
            }
        }
    return L;
}

} // namespace apfb
