#pragma once
// Perimeter-limit experiment: rescaled energies, the Cauchy-Schwarz/BV lower
// bound, recovery fields for smooth sets, and the sweep table comparing them
// against the closed-form layer prediction.

#include "apfb/energy.hpp"
#include "apfb/field.hpp"
#include "apfb/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apfb {

/// A set E with queryable signed distance to its boundary, positive inside.
/// Disks have smooth boundary; boxes are allowed but their corners fall
/// outside the smooth-boundary hypothesis of the recovery construction, so
/// box results are reported without tight assertions (nonsmooth flag).
struct SetGeometry {
    enum class Shape { empty, disk, box, disk_union };
    Shape shape = Shape::empty;
    std::vector<Point> centers; // disk / disk_union
    std::vector<double> radii;
    Point box_lo{0.0, 0.0}, box_hi{0.0, 0.0};

    static SetGeometry empty_set() { return {}; }
    static SetGeometry disk(Point c, double R) {
        if (!(R > 0.0)) throw std::invalid_argument("disk: R must be > 0");
        SetGeometry g;
        g.shape = Shape::disk;
        g.centers = {c};
        g.radii = {R};
        return g;
    }
    static SetGeometry box(Point lo, Point hi) {
        if (!(hi[0] > lo[0]) || !(hi[1] > lo[1]))
            throw std::invalid_argument("box: need hi > lo per axis");
        SetGeometry g;
        g.shape = Shape::box;
        g.box_lo = lo;
        g.box_hi = hi;
        return g;
    }
    static SetGeometry disk_union(std::vector<Point> cs, std::vector<double> rs) {
        if (cs.size() != rs.size() || cs.empty())
            throw std::invalid_argument("disk_union: need matching nonempty lists");
        for (double r : rs)
            if (!(r > 0.0))
                throw std::invalid_argument("disk_union: radii must be > 0");
        SetGeometry g;
        g.shape = cs.size() == 1 ? Shape::disk : Shape::disk_union;
        g.centers = std::move(cs);
        g.radii = std::move(rs);
        return g;
    }

    bool nonsmooth() const { return shape == Shape::box; }

    /// Signed distance to the set boundary, positive inside E.
    double signed_distance(Point x) const {
        switch (shape) {
        case Shape::empty:
            return -std::numeric_limits<double>::infinity();
        case Shape::disk:
        case Shape::disk_union: {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < radii.size(); ++k) {
                const double r = std::hypot(x[0] - centers[k][0],
                                            x[1] - centers[k][1]);
                best = std::max(best, radii[k] - r);
            }
            return best;
        }
        case Shape::box: {
            const double dx = std::min(x[0] - box_lo[0], box_hi[0] - x[0]);
            const double dy = std::min(x[1] - box_lo[1], box_hi[1] - x[1]);
            if (dx >= 0.0 && dy >= 0.0) return std::min(dx, dy);
            // outside: distance to the rectangle
            const double ox = std::max(0.0, -dx), oy = std::max(0.0, -dy);
            return -std::hypot(ox, oy);
        }
        }
        return -std::numeric_limits<double>::infinity();
    }

    /// Largest inscribed depth: the bound recovery layers must stay under.
    double feature_size() const {
        switch (shape) {
        case Shape::empty: return 0.0;
        case Shape::disk:
        case Shape::disk_union:
            return *std::max_element(radii.begin(), radii.end());
        case Shape::box:
            return 0.5 * std::min(box_hi[0] - box_lo[0], box_hi[1] - box_lo[1]);
        }
        return 0.0;
    }
};

/// Perimeter of E: closed form for the analytic shapes.  Overlapping disk
/// unions subtract, per circle, the angular intervals buried inside other
/// disks, so the result is exact for any arrangement.
inline double perimeter(const SetGeometry& g) {
    switch (g.shape) {
    case SetGeometry::Shape::empty: return 0.0;
    case SetGeometry::Shape::box:
        return 2.0 * ((g.box_hi[0] - g.box_lo[0]) + (g.box_hi[1] - g.box_lo[1]));
    case SetGeometry::Shape::disk:
        return 2.0 * 3.14159265358979323846 * g.radii[0];
    case SetGeometry::Shape::disk_union: {
        const double two_pi = 2.0 * 3.14159265358979323846;
        double total = 0.0;
        const std::size_t K = g.radii.size();
        for (std::size_t i = 0; i < K; ++i) {
            const double Ri = g.radii[i];
            // angular intervals of circle i that lie inside some other disk
            std::vector<std::pair<double, double>> cov;
            bool swallowed = false;
            for (std::size_t j = 0; j < K && !swallowed; ++j) {
                if (j == i) continue;
                const double Rj = g.radii[j];
                const double dx = g.centers[j][0] - g.centers[i][0];
                const double dy = g.centers[j][1] - g.centers[i][1];
                const double d = std::hypot(dx, dy);
                if (d + Ri <= Rj) swallowed = true;      // i inside j
                else if (d >= Ri + Rj || d + Rj <= Ri) continue; // disjoint or j inside i
                else {
                    const double cosphi =
                        (d * d + Ri * Ri - Rj * Rj) / (2.0 * d * Ri);
                    const double phi = std::acos(std::clamp(cosphi, -1.0, 1.0));
                    const double mid = std::atan2(dy, dx);
                    cov.push_back({mid - phi, mid + phi});
                }
            }
            if (swallowed) continue;
            // measure the union of covered intervals on the circle
            double covered = 0.0;
            if (!cov.empty()) {
                // normalize starts to [0, 2pi), split wrap-around
                std::vector<std::pair<double, double>> iv;
                for (auto [a0, b0] : cov) {
                    const double w = b0 - a0;
                    double a = std::fmod(std::fmod(a0, two_pi) + two_pi, two_pi);
                    double b = a + w;
                    if (b <= two_pi) iv.push_back({a, b});
                    else {
                        iv.push_back({a, two_pi});
                        iv.push_back({0.0, b - two_pi});
                    }
                }
                std::sort(iv.begin(), iv.end());
                double cur_a = iv[0].first, cur_b = iv[0].second;
                for (std::size_t k = 1; k < iv.size(); ++k) {
                    if (iv[k].first > cur_b) {
                        covered += cur_b - cur_a;
                        cur_a = iv[k].first;
                        cur_b = iv[k].second;
                    } else
                        cur_b = std::max(cur_b, iv[k].second);
                }
                covered += cur_b - cur_a;
            }
            total += Ri * (two_pi - covered);
        }
        return total;
    }
    }
    return 0.0;
}

/// Perimeter of a positivity set given only as a sampled indicator: discrete
/// BV with the cell-averaged isotropic gradient.  Carries the usual O(h)
/// staircase bias; closed forms above are preferred when geometry is known.
inline double perimeter(const ScalarField& indicator) {
    if (indicator.ndim != 2)
        throw std::invalid_argument("perimeter(indicator): 2D fields only");
    const double h = indicator.h;
    std::vector<double> terms;
    for (int j = 0; j + 1 < indicator.dims[1]; ++j)
        for (int i = 0; i + 1 < indicator.dims[0]; ++i) {
            const double v00 = indicator.at(i, j) > 0.0 ? 1.0 : 0.0;
            const double v10 = indicator.at(i + 1, j) > 0.0 ? 1.0 : 0.0;
            const double v01 = indicator.at(i, j + 1) > 0.0 ? 1.0 : 0.0;
            const double v11 = indicator.at(i + 1, j + 1) > 0.0 ? 1.0 : 0.0;
            const double gx = 0.5 * ((v10 - v00) + (v11 - v01)) / h;
            const double gy = 0.5 * ((v01 - v00) + (v11 - v10)) / h;
            if (gx != 0.0 || gy != 0.0)
                terms.push_back(std::hypot(gx, gy) * h * h);
        }
    return pairwise_sum(terms);
}

/// The rescaled functional whose limit is the perimeter.
inline double rescaled_energy(const Params& p, const ScalarField& u,
                              const Region& reg = Region::all()) {
    return p.c_gamma * energy(p, u, reg).total;
}

/// Discrete total variation of u^{1 - gamma/2}; by pointwise AM-GM this is
/// a lower bound for the rescaled energy (exact in the continuum, tracked
/// with a small slack discretely).  Cells cut by the positivity boundary use
/// the same local-profile closed form as energy(), which keeps the per-cell
/// inequality structural there:  c_gamma c0^2 alpha^2 = c0^{1-gamma/2}(2
/// alpha - 1) turns the model's TV into the AM-GM bound of the model's
/// energy.
inline double bv_lower_bound(const Params& p, const ScalarField& u) {
    const double h = u.h;
    const double pw = 1.0 - 0.5 * p.gamma;
    const double q = 2.0 * p.alpha - 1.0;
    const double model_coef = std::pow(p.c0, pw) * q;
    const double u_near = p.c0 * std::pow(6.0 * h, p.alpha);
    std::vector<double> terms;
    auto g_of = [&](double v) { return v > 0.0 ? std::pow(v, pw) : 0.0; };
    if (u.ndim == 1) {
        for (int i = 0; i + 1 < u.dims[0]; ++i) {
            const double t = std::abs(g_of(u.at(i + 1)) - g_of(u.at(i)));
            if (t != 0.0) terms.push_back(t);
        }
        return pairwise_sum(terms);
    }
    // Same cell classification and local model as energy(), so the per-cell
    // AM-GM inequality  c_gamma (dir + pot) >= model TV  is structural on
    // model cells for any corner data.
    for (int j = 0; j + 1 < u.dims[1]; ++j)
        for (int i = 0; i + 1 < u.dims[0]; ++i) {
            const double v00 = u.at(i, j), v10 = u.at(i + 1, j);
            const double v01 = u.at(i, j + 1), v11 = u.at(i + 1, j + 1);
            const int npos =
                (v00 > 0.0) + (v10 > 0.0) + (v01 > 0.0) + (v11 > 0.0);
            if (npos == 0) continue;
            const double vmin = std::min(std::min(v00, v10), std::min(v01, v11));
            double t;
            if (npos < 4 || vmin < u_near) {
                const detail::CellModel m = detail::cell_model_2d(p, u, i, j);
                const double I = detail::power_integral_cell_2d(
                    m.base, m.gx, m.gy, h, 2.0 * p.alpha - 2.0);
                t = model_coef * std::hypot(m.gx, m.gy) * I;
            } else {
                const double g00 = g_of(v00), g10 = g_of(v10);
                const double g01 = g_of(v01), g11 = g_of(v11);
                const double gx = 0.5 * ((g10 - g00) + (g11 - g01)) / h;
                const double gy = 0.5 * ((g01 - g00) + (g11 - g10)) / h;
                t = std::hypot(gx, gy) * h * h;
            }
            if (t != 0.0) terms.push_back(t);
        }
    return pairwise_sum(terms);
}

/// Boundary-layer profile parameters for recovery fields.
struct RecoveryProfile {
    double delta = 0.05; // layer width
    // blending cutoff shape: 0 for d <= delta, ((d-delta)/delta)^alpha capped
    // at 1 (reached at d = 2 delta); only used when a target is blended in
};

/// The layer recovery field  w(x) = c0 min(d(x)^+, delta)^alpha, optionally
/// blended with a target:  v = w + cutoff(d) u_target.  The positivity set
/// equals E exactly.  Throws when the layer cannot fit inside the shape.
inline ScalarField recovery_field(const Params& p, const SetGeometry& g,
                                  const RecoveryProfile& r,
                                  const ScalarField& domain_template,
                                  const ScalarField* u_target = nullptr) {
    if (!(r.delta > 0.0))
        throw std::invalid_argument("recovery_field: delta must be > 0");
    if (g.shape != SetGeometry::Shape::empty && r.delta >= g.feature_size())
        throw std::invalid_argument(
            "recovery_field: delta " + std::to_string(r.delta) +
            " too large for shape feature size " +
            std::to_string(g.feature_size()));
    if (u_target && (u_target->dims != domain_template.dims ||
                     u_target->h != domain_template.h))
        throw std::invalid_argument("recovery_field: target grid mismatch");
    ScalarField v = domain_template;
    const int ny = v.ndim == 2 ? v.dims[1] : 1;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < v.dims[0]; ++i) {
            const double d = g.signed_distance(v.node(i, j));
            double val = 0.0;
            if (d > 0.0)
                val = p.c0 * std::pow(std::min(d, r.delta), p.alpha);
            if (u_target && d > r.delta) {
                const double cut =
                    std::min(1.0, std::pow((d - r.delta) / r.delta, p.alpha));
                val += cut * u_target->at(i, j);
            }
            v.at(i, j) = val;
        }
    return v;
}

/// One row of the sweep table.
struct GammaSweepRow {
    double gamma, delta, h;
    double J_rescaled, bv_bound, perimeter, layer_factor_predicted;
};

/// Sweeps (gamma, delta) pairs on the unit square [-1/2, 1/2]^2, building the
/// recovery field at spacing h for each and recording the rescaled energy,
/// the BV lower bound, the shape perimeter, and the closed-form layer factor
/// (c0 delta^alpha)^{1 - gamma/2}.  Rows are emitted in loop order (gamma
/// outer, delta inner), so output is deterministic.
inline std::vector<GammaSweepRow> gamma_sweep(const SetGeometry& shape,
                                              const std::vector<double>& gammas,
                                              const std::vector<double>& deltas,
                                              double h) {
    const int n = static_cast<int>(std::lround(1.0 / h)) + 1;
    ScalarField tmpl = make_grid_2d(n, n, h, {-0.5, -0.5});
    const double per = perimeter(shape);
    std::vector<GammaSweepRow> rows;
    for (double gamma : gammas)
        for (double delta : deltas) {
            Params p = make_params(gamma);
            GammaSweepRow row;
            row.gamma = gamma;
            row.delta = delta;
            row.h = h;
            row.perimeter = per;
            if (shape.shape == SetGeometry::Shape::empty) {
                row.J_rescaled = 0.0;
                row.bv_bound = 0.0;
                row.layer_factor_predicted = 0.0;
            } else {
                RecoveryProfile r;
                r.delta = delta;
                ScalarField w = recovery_field(p, shape, r, tmpl);
                row.J_rescaled = rescaled_energy(p, w);
                row.bv_bound = bv_lower_bound(p, w);
                row.layer_factor_predicted =
                    std::pow(p.c0 * std::pow(delta, p.alpha),
                             1.0 - 0.5 * gamma);
            }
            rows.push_back(row);
        }
    return rows;
}

/// Closed-form prediction for a disk recovery field: layer factor times the
/// layer-averaged perimeter 2 pi (R - (2a-1)/(2a) delta), from integrating
/// the profile's energy density against Per({d > s}) = 2 pi (R - s).
inline double disk_layer_prediction(const Params& p, double R, double delta) {
    const double a_gamma =
        std::pow(p.c0 * std::pow(delta, p.alpha), 1.0 - 0.5 * p.gamma);
    const double q = 2.0 * p.alpha - 1.0;
    return a_gamma * 2.0 * 3.14159265358979323846 *
           (R - q / (q + 1.0) * delta);
}

} // namespace apfb
