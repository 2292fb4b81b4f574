#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace apfb {

/// Gauss-Legendre nodes/weights on [-1,1], computed once per order by
/// Newton iteration on P_n; accurate to machine precision.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
    static std::vector<std::pair<std::vector<double>, std::vector<double>>> cache(64);
    assert(n > 1 && n < 64);
    auto& entry = cache[n];
    if (entry.first.empty()) {
        std::vector<double> x(n), w(n);
        for (int i = 0; i < n; ++i) {
            double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                const double dx = p1 / dp;
                xi -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
        entry = {x, w};
    }
    return entry;
}

namespace detail {

template <class F>
double gl15(const F& f, double a, double b) {
    const auto& [x, w] = gauss_legendre(15);
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += w[i] * f(c + r * x[i]);
    return s * r;
}

template <class F>
double adapt(const F& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl15(f, a, m), right = gl15(f, m, b);
    const double err = std::abs(left + right - whole);
    if (err < tol || depth > 48) return left + right;
    return adapt(f, a, m, left, 0.5 * tol, depth + 1) +
           adapt(f, m, b, right, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Adaptive quadrature to absolute tolerance; the integrand must be finite
/// on [a,b].
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abstol) {
    if (a == b) return 0.0;
    return detail::adapt(f, a, b, detail::gl15(f, a, b), abstol, 0);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    assert(xs.size() == ys.size() && xs.size() >= 2);
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw std::domain_error("fit_line: degenerate abscissae");
    return {(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

/// Least squares for y ~ a f1 + b f2 given the basis samples.
inline std::array<double, 2> fit_two_basis(const std::vector<double>& f1,
                                           const std::vector<double>& f2,
                                           const std::vector<double>& y) {
    double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        a11 += f1[i] * f1[i];
        a12 += f1[i] * f2[i];
        a22 += f2[i] * f2[i];
        r1 += f1[i] * y[i];
        r2 += f2[i] * y[i];
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-300 * std::max(1.0, a11 * a22))
        throw std::domain_error("fit_two_basis: ill-conditioned basis");
    return {(r1 * a22 - r2 * a12) / det, (a11 * r2 - a12 * r1) / det};
}

/// Deterministic uniform generator; mapping from engine output to [0,1)
/// avoids std::uniform_real_distribution so streams are identical across
/// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// Piecewise-linear evaluation of (xs, ys) with xs strictly increasing;
/// clamps outside the range.
inline double interp_sorted(const std::vector<double>& xs, const std::vector<double>& ys,
                            double x) {
    assert(xs.size() == ys.size() && !xs.empty());
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

/// Bisection for a sign change of f on [a,b]; f(a) and f(b) must differ in
/// sign.  Returns the midpoint of the final bracket.
template <class F>
double bisect(const F& f, double a, double b, double xtol, int maxit = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw std::domain_error("bisect: no sign change in bracket");
    for (int it = 0; it < maxit && b - a > xtol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace apfb
