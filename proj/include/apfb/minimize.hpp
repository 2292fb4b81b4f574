#pragma once
// Direct minimization of the discrete functional
//   E_h(u) = sum_edges  (h^n/2) ((u_j - u_i)/h)^2  +  sum_nodes h^n W(u_i)
// by exact per-node relaxation with an explicit zero branch.  The zero branch
// is what creates free boundaries: the smooth Euler-Lagrange flow alone only
// pushes values upward.

#include "apfb/energy.hpp"
#include "apfb/field.hpp"
#include "apfb/numerics.hpp"
#include "apfb/params.hpp"
#include "apfb/presets.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace apfb {

struct Problem {
    Params params;
    ScalarField field_template; // geometry + Dirichlet data on masked nodes
    Region region = Region::all();
};

// Node-wise descent pins free boundaries: the potential jump at zero makes
// activating a node a barrier move, and a translate of a solution profile is
// itself a critical point, so an interface initialized off its minimizing
// position can stall there in either direction.  cascade keeps the error
// within one coarse cell; when a template carrying a good interface guess is
// available (e.g. a sampled profile), prefer InitMode::given.
enum class InitMode { zero, comparator, cascade, given };

struct SolverConfig {
    double sweep_tolerance = 1e-12; // energy decrease per sweep
    int max_sweeps = 200000;
    double node_tolerance = 1e-15; // Newton step tolerance, relative
    InitMode init = InitMode::cascade;
    int restarts = 0;
    std::uint64_t seed = 1;
};

struct SolveReport {
    std::vector<double> energy_history; // per sweep, after the sweep
    std::vector<int> flip_history;
    bool converged = false;
    int sweeps_used = 0;
};

namespace detail {

// q(v) = a v^2 / 2 - b v + W(v), the per-node energy profile (up to the
// constant neighbor terms), in units of the node measure h^n.
inline double node_profile(const Params& p, double a, double b, double v) {
    if (v <= 0.0) return 0.0;
    return 0.5 * a * v * v - b * v + std::pow(v, -p.gamma) / p.gamma;
}

} // namespace detail

/// Exact minimizer of q(v) = a v^2/2 - b v + (1/gamma) v^{-gamma} chi_{v>0}
/// over v in {0} u (0, inf), with q(0) = 0 and ties broken toward 0.
/// The positive branch solves a v - b = v^{-(gamma+1)}; the left side of the
/// balance is increasing and the right decreasing, so the root is unique and
/// lies right of both b/a and a^{-1/(gamma+2)}.  Newton from either start is
/// monotone increasing (the residual is concave), hence safe.
inline double local_node_min(double a, double b, const Params& p,
                             double tol = 1e-15, double guess = 0.0) {
    if (!(a > 0.0)) throw std::domain_error("local_node_min: a must be > 0");
    if (!(b > 0.0)) return 0.0;
    const double g1 = p.gamma + 1.0;
    // Concavity of the residual makes Newton one-sided from any start at or
    // beyond max(b/a, a^{-1/(gamma+2)}); a warm start lands near the root.
    double v = std::max(b / a, std::pow(a, -1.0 / (p.gamma + 2.0)));
    if (guess > v) v = guess;
    for (int it = 0; it < 100; ++it) {
        const double w = std::pow(v, -g1);
        const double f = a * v - b - w;
        const double df = a + g1 * w / v;
        const double vn = v - f / df;
        if (!(vn > 0.0)) { // cannot happen on the monotone path; guard anyway
            v = 0.5 * v;
            continue;
        }
        const bool done = std::abs(vn - v) <= tol * (1.0 + std::abs(vn));
        v = vn;
        if (done) break;
    }
    return detail::node_profile(p, a, b, v) < 0.0 ? v : 0.0;
}

/// Node-based discrete functional E_h over the whole grid (all edges, all
/// node potentials).  This is the quantity the sweeps decrease exactly; the
/// quadrature-based energy() is the model of the continuum value.
inline double discrete_energy(const Params& p, const ScalarField& u) {
    std::vector<double> terms;
    const double h = u.h;
    const double voln = u.ndim == 2 ? h * h : h;
    const int nx = u.dims[0], ny = u.ndim == 2 ? u.dims[1] : 1;
    terms.reserve(static_cast<std::size_t>(nx) * ny * 3);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double v = u.at(i, j);
            if (i + 1 < nx) {
                const double d = (u.at(i + 1, j) - v) / h;
                terms.push_back(0.5 * d * d * voln);
            }
            if (u.ndim == 2 && j + 1 < ny) {
                const double d = (u.at(i, j + 1) - v) / h;
                terms.push_back(0.5 * d * d * voln);
            }
            if (v > 0.0) terms.push_back(voln * std::pow(v, -p.gamma) / p.gamma);
        }
    return pairwise_sum(terms);
}

struct SweepResult {
    double delta_energy = 0.0; // decrease (>= 0 up to roundoff)
    int flips = 0;
};

/// Optional cross-sweep workspace: a node whose stencil saw no write since
/// its last visit recomputes to the same value, so it can be skipped without
/// changing a single bit of the result.
struct SweepWorkspace {
    std::vector<std::uint8_t> moved;
    bool fresh = true;
};

/// One red-black pass of local_node_min over the free nodes.  The energy
/// decrease is accumulated incrementally from the per-node profiles, which is
/// exact for E_h because each node's couplings are linear in its neighbors.
inline SweepResult sweep(const Problem& prob, ScalarField& u,
                         double node_tolerance = 1e-15,
                         SweepWorkspace* ws = nullptr) {
    const Params& p = prob.params;
    const double h = u.h;
    const int n = u.ndim;
    const double a = 2.0 * n / (h * h);
    const double voln = n == 2 ? h * h : h;
    const int nx = u.dims[0], ny = n == 2 ? u.dims[1] : 1;
    std::vector<std::uint8_t> prev;
    if (ws) {
        if (ws->fresh) {
            ws->moved.assign(u.values.size(), 1);
            ws->fresh = false;
        }
        prev = std::move(ws->moved);
        ws->moved.assign(u.values.size(), 0);
    }
    // during the second color, writes of the first color are already in
    // ws->moved, so the sequential data flow is preserved
    auto stencil_active = [&](int i, int j) {
        auto hit = [&](int ii, int jj) {
            const std::size_t k = u.idx(ii, jj);
            return prev[k] != 0 || ws->moved[k] != 0;
        };
        if (hit(i, j) || hit(i - 1, j) || hit(i + 1, j)) return true;
        return n == 2 && (hit(i, j - 1) || hit(i, j + 1));
    };
    SweepResult res;
    double decrease = 0.0;
    for (int color = 0; color < 2; ++color)
        for (int j = 0; j < ny; ++j)
            for (int i = (j + color) % 2; i < nx; i += 2) {
                if (u.fixed(i, j)) continue;
                if (ws && !stencil_active(i, j)) continue;
                double b = u.at(i - 1, j) + u.at(i + 1, j);
                if (n == 2) b += u.at(i, j - 1) + u.at(i, j + 1);
                b /= h * h;
                const double vold = u.at(i, j);
                const double vnew =
                    local_node_min(a, b, p, node_tolerance, vold);
                if (vnew == vold) continue;
                const bool flip = (vold > 0.0) != (vnew > 0.0);
                // deadband: warm-started Newton wobbles by ~1 ulp around its
                // fixed point; not writing those keeps sweeps stationary at
                // equilibrium, which is the convergence signal
                if (!flip && std::abs(vnew - vold) <=
                                 4.0 * node_tolerance * (1.0 + std::abs(vold)))
                    continue;
                // signed sum: per-node roundoff is zero-mean, and clamping it
                // would leave a noise floor that masks convergence
                decrease += detail::node_profile(p, a, b, vold) -
                            detail::node_profile(p, a, b, vnew);
                res.flips += flip;
                u.at(i, j) = vnew;
                if (ws) ws->moved[u.idx(i, j)] = 1;
            }
    res.delta_energy = decrease * voln;
    return res;
}

namespace detail {

inline bool coarsenable(const ScalarField& f) {
    const bool x_ok = f.dims[0] >= 5 && (f.dims[0] - 1) % 2 == 0;
    if (f.ndim == 1) return x_ok;
    return x_ok && f.dims[1] >= 5 && (f.dims[1] - 1) % 2 == 0;
}

inline ScalarField restrict_template(const ScalarField& f) {
    const int cx = (f.dims[0] - 1) / 2 + 1;
    ScalarField c = f.ndim == 2
                        ? make_grid_2d(cx, (f.dims[1] - 1) / 2 + 1, 2.0 * f.h,
                                       f.origin)
                        : make_grid_1d(cx, 2.0 * f.h, f.origin[0]);
    const int cy = c.ndim == 2 ? c.dims[1] : 1;
    for (int j = 0; j < cy; ++j)
        for (int i = 0; i < c.dims[0]; ++i) c.at(i, j) = f.at(2 * i, 2 * j);
    return c;
}

inline void comparator_init(const Params& p, ScalarField& u) {
    const Point lo = u.box_lo(), hi = u.box_hi();
    const Point c{0.5 * (lo[0] + hi[0]),
                  u.ndim == 2 ? 0.5 * (lo[1] + hi[1]) : 0.0};
    double dmax = 0.0, rmax = 0.0;
    const int ny = u.ndim == 2 ? u.dims[1] : 1;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < u.dims[0]; ++i)
            if (u.fixed(i, j)) {
                dmax = std::max(dmax, u.at(i, j));
                const Point x = u.node(i, j);
                const double dx = x[0] - c[0], dy = x[1] - c[1];
                rmax = std::max(rmax, std::sqrt(dx * dx + dy * dy));
            }
    if (dmax <= 0.0 || rmax <= 0.0) {
        for (std::size_t k = 0; k < u.values.size(); ++k)
            if (!u.boundary_mask[k]) u.values[k] = 0.0;
        return;
    }
    const double M = dmax / std::pow(rmax, p.alpha);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < u.dims[0]; ++i)
            if (!u.fixed(i, j))
                u.at(i, j) = radial_comparator_value(p, u.node(i, j), c, 0.0, M);
}

} // namespace detail

/// Relax to a discrete minimizer.  Convergence = a sweep whose energy
/// decrease drops below sweep_tolerance with no phase flips.  cascade
/// initialization solves the 2x-coarser restriction first and interpolates;
/// restarts re-run from multiplicatively noised seeds and keep the lowest
/// final energy.  Deterministic for a fixed config.
inline std::pair<ScalarField, SolveReport> solve(const Problem& prob,
                                                 const SolverConfig& cfg) {
    if (!(cfg.sweep_tolerance > 0.0) || !(cfg.node_tolerance > 0.0))
        throw std::invalid_argument("solve: tolerances must be positive");
    const Params& p = prob.params;

    auto run = [&](ScalarField u, SolveReport& rep) {
        double e = discrete_energy(p, u);
        SweepWorkspace ws;
        for (int s = 0; s < cfg.max_sweeps; ++s) {
            const SweepResult sr = sweep(prob, u, cfg.node_tolerance, &ws);
            rep.sweeps_used++;
            // running-min absorbs the roundoff of near-converged sweeps; the
            // reported history is non-increasing by construction
            e = std::min(e - sr.delta_energy, e);
            rep.energy_history.push_back(e);
            rep.flip_history.push_back(sr.flips);
            if (sr.delta_energy < cfg.sweep_tolerance && sr.flips == 0) {
                rep.converged = true;
                break;
            }
        }
        return u;
    };

    auto initial = [&](InitMode mode) -> ScalarField {
        ScalarField u = prob.field_template;
        switch (mode) {
        case InitMode::given:
            break;
        case InitMode::zero:
            for (std::size_t k = 0; k < u.values.size(); ++k)
                if (!u.boundary_mask[k]) u.values[k] = 0.0;
            break;
        case InitMode::comparator:
            detail::comparator_init(p, u);
            break;
        case InitMode::cascade: {
            if (!detail::coarsenable(u)) {
                detail::comparator_init(p, u);
                break;
            }
            Problem coarse{p, detail::restrict_template(prob.field_template),
                           prob.region};
            SolverConfig ccfg = cfg;
            ccfg.restarts = 0;
            auto [cu, crep] = solve(coarse, ccfg);
            const int ny = u.ndim == 2 ? u.dims[1] : 1;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < u.dims[0]; ++i)
                    if (!u.fixed(i, j))
                        u.at(i, j) = interpolate(cu, u.node(i, j));
            break;
        }
        }
        return u;
    };

    SolveReport best_rep;
    ScalarField base = initial(cfg.init);
    ScalarField best = run(base, best_rep);
    double best_e = discrete_energy(p, best);

    Rng rng(cfg.seed);
    for (int r = 0; r < cfg.restarts; ++r) {
        ScalarField u0 = base;
        for (std::size_t k = 0; k < u0.values.size(); ++k)
            if (!u0.boundary_mask[k] && u0.values[k] > 0.0)
                u0.values[k] *= 0.5 + rng.uniform();
        SolveReport rep;
        ScalarField cand = run(std::move(u0), rep);
        const double e = discrete_energy(p, cand);
        if (e < best_e) {
            best_e = e;
            best = std::move(cand);
            best_rep = std::move(rep);
        }
    }
    return {std::move(best), std::move(best_rep)};
}

} // namespace apfb
