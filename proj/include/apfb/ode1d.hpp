#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "apfb/numerics.hpp"
#include "apfb/params.hpp"

namespace apfb {

/// Time-to-climb integral for the 1D first integral u'^2 = mu + 2 W(u):
///   G(s) = \int_0^s (mu + (2/gamma) r^{-gamma})^{-1/2} dr.
/// The integrand is integrable at r=0; the singular part is summed as a
/// binomial series on [0,eps] with |mu*gamma/2| eps^gamma <= 1/4, the rest by
/// adaptive quadrature.  Throws if the radicand is nonpositive anywhere on
/// (0,s], i.e. if s lies beyond the turning point of a descending arch.
inline double g_quadrature(const Params& p, double mu, double s) {
    if (!(s >= 0.0)) throw std::domain_error("g_quadrature: s must be nonnegative");
    if (s == 0.0) return 0.0;
    const double g = p.gamma;
    const double rad_end = mu + (2.0 / g) * std::pow(s, -g);
    if (!(rad_end > 0.0))
        throw std::domain_error("g_quadrature: nonpositive radicand at r=" +
                                std::to_string(s) + " for mu=" + std::to_string(mu));
    double eps = s;
    if (mu != 0.0) {
        const double cap = std::pow(0.5 / (std::abs(mu) * g), 1.0 / g);
        eps = std::min(eps, cap);
    }
    // series: sqrt(g/2) sum_k binom(-1/2,k) (mu g/2)^k eps^{g/2+kg+1} / (g/2+kg+1)
    const double q = mu * g * 0.5;
    const double step = std::pow(eps, g);
    double coef = std::pow(eps, 0.5 * g + 1.0); // binom * q^k * eps^{g/2+kg+1}
    double acc = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double term = coef / (0.5 * g + k * g + 1.0);
        acc += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(acc), 1e-300)) break;
        coef *= -(2.0 * k + 1.0) / (2.0 * k + 2.0) * q * step;
    }
    double G = std::sqrt(0.5 * g) * acc;
    if (eps < s) {
        auto f = [&](double r) { return 1.0 / std::sqrt(mu + (2.0 / g) * std::pow(r, -g)); };
        G += integrate_adaptive(f, eps, s, 1e-13 * (1.0 + std::abs(G)));
    }
    return G;
}

/// Coefficient of the subleading t^{2-alpha} term (per unit mu) in the
/// vanishing-point expansion u = c0 t^alpha + mu c1 t^{2-alpha} + ...,
/// obtained by inverting the G series.
inline double analytic_c1(const Params& p) {
    const double g = p.gamma;
    return p.alpha * std::pow(p.c0, 0.5 * (3.0 * g + 4.0)) * std::sqrt(0.5 * g) * g /
           (2.0 * (3.0 * g + 2.0));
}

struct ODETrajectory {
    std::vector<double> t, u, du;
    double mu = 0.0;
    bool truncated = false;                                  // vanished before t_end
    double t_vanish = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct DriveStop {
    bool truncated = false;
    double t = 0.0, u = 0.0, du = 0.0;
};

/// Integrates y'=(u,du)'=rhs from t0, emitting dense samples at `targets`.
/// Truncates when u descends below floor_frac * (running peak); the caller
/// owns the vanishing-point extrapolation.
template <class RHS, class Emit>
DriveStop drive_profile(RHS rhs, std::array<double, 2> y0, double t0, double t_end,
                        const std::vector<double>& targets, double floor_frac, Emit emit) {
    namespace od = boost::numeric::odeint;
    using state_t = std::array<double, 2>;
    auto st = od::make_dense_output(1e-13, 1e-12, od::runge_kutta_dopri5<state_t>());
    st.initialize(y0, t0, 0.1 * t0 + 1e-9 * (t_end - t0));
    std::size_t ti = 0;
    double peak = y0[0];
    DriveStop stop;
    for (std::size_t steps = 0;; ++steps) {
        if (steps > 5'000'000)
            throw std::runtime_error("drive_profile: step budget exceeded");
        const auto interval = st.do_step(rhs);
        peak = std::max(peak, st.current_state()[0]);
        double t_hi = interval.second;
        const double floor_v = floor_frac * peak;
        bool trunc = false;
        if (floor_frac > 0.0 && st.current_state()[0] < floor_v &&
            st.current_state()[1] < 0.0) {
            double a = interval.first, b = interval.second;
            state_t ys;
            for (int k = 0; k < 80 && b - a > 1e-16 * (1.0 + std::abs(b)); ++k) {
                const double m = 0.5 * (a + b);
                st.calc_state(m, ys);
                (ys[0] > floor_v ? a : b) = m;
            }
            t_hi = 0.5 * (a + b);
            st.calc_state(t_hi, ys);
            stop.truncated = true;
            stop.t = t_hi;
            stop.u = ys[0];
            stop.du = ys[1];
            trunc = true;
        }
        state_t ys;
        while (ti < targets.size() && targets[ti] <= t_hi) {
            st.calc_state(targets[ti], ys);
            emit(targets[ti], ys[0], ys[1]);
            ++ti;
        }
        if (trunc) return stop;
        if (interval.second >= t_end) {
            stop.t = interval.second;
            stop.u = st.current_state()[0];
            stop.du = st.current_state()[1];
            return stop;
        }
    }
}

} // namespace detail

/// Integrates u'' = -u^{-(gamma+1)} from a vanishing point at t=0, selecting
/// the solution branch with first-integral constant mu.  Seeded at
/// t0 = 1e-6 t_end from the two-term expansion; the derivative seed enforces
/// the first integral exactly.  Samples are log-spaced.  If the profile
/// returns to zero before t_end (mu < 0 arches), the trajectory is truncated
/// and t_vanish extrapolated through g_quadrature with the locally measured
/// first-integral constant.
inline ODETrajectory integrate_profile(const Params& p, double mu, double t_end,
                                       int samples_per_decade = 100) {
    if (!(t_end > 0.0)) throw std::domain_error("integrate_profile: t_end must be positive");
    const double t0 = 1e-6 * t_end;
    const double u0 =
        p.c0 * std::pow(t0, p.alpha) + mu * analytic_c1(p) * std::pow(t0, 2.0 - p.alpha);
    if (!(u0 > 0.0)) throw std::domain_error("integrate_profile: seed value nonpositive");
    const double rad = mu + (2.0 / p.gamma) * std::pow(u0, -p.gamma);
    if (!(rad > 0.0)) throw std::domain_error("integrate_profile: seed radicand nonpositive");
    const double du0 = std::sqrt(rad);

    const int ndec = 6;
    std::vector<double> targets;
    targets.reserve(static_cast<std::size_t>(ndec * samples_per_decade) + 1);
    for (int i = 0; i <= ndec * samples_per_decade; ++i)
        targets.push_back(t0 * std::pow(10.0, static_cast<double>(i) / samples_per_decade));
    targets.back() = t_end;

    ODETrajectory tr;
    tr.mu = mu;
    const double gp1 = p.gamma + 1.0;
    auto rhs = [gp1](const std::array<double, 2>& y, std::array<double, 2>& dy, double) {
        dy[0] = y[1];
        dy[1] = -std::pow(std::max(y[0], 1e-300), -gp1);
    };
    auto stop = detail::drive_profile(rhs, {u0, du0}, t0, t_end, targets, 1e-6,
                                      [&](double t, double u, double du) {
                                          tr.t.push_back(t);
                                          tr.u.push_back(u);
                                          tr.du.push_back(du);
                                      });
    if (stop.truncated) {
        tr.truncated = true;
        const double mu_loc =
            stop.du * stop.du - (2.0 / p.gamma) * std::pow(stop.u, -p.gamma);
        tr.t_vanish = stop.t + g_quadrature(p, mu_loc, stop.u);
    }
    return tr;
}

/// Worst-case violation of the first integral along a trajectory, scaled by
/// the magnitude of its terms.
inline double first_integral_drift(const Params& p, const ODETrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double tw = (2.0 / p.gamma) * std::pow(traj.u[i], -p.gamma);
        const double k = traj.du[i] * traj.du[i] - tw;
        const double scale = traj.du[i] * traj.du[i] + tw + std::abs(traj.mu);
        worst = std::max(worst, std::abs(k - traj.mu) / scale);
    }
    return worst;
}

struct ExpansionFit {
    double c0_hat = 0.0;   // leading coefficient from the joint two-term fit
    double c1_hat = 0.0;   // regression of u - c0 t^alpha against t^{2-alpha}
    double sigma_hat = std::numeric_limits<double>::quiet_NaN(); // remainder exponent
    double window_lo = 0.0, window_hi = 0.0;
    int n_used = 0;
};

/// Fits the vanishing-point expansion on a window of a trajectory.  The
/// window must span at least two decades so the two basis powers separate.
inline ExpansionFit fit_expansion(const Params& p, const ODETrajectory& traj,
                                  double wlo, double whi) {
    std::vector<double> t, u;
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        if (traj.t[i] >= wlo && traj.t[i] <= whi && traj.u[i] > 0.0) {
            t.push_back(traj.t[i]);
            u.push_back(traj.u[i]);
        }
    if (t.size() < 16)
        throw std::invalid_argument("fit_expansion: fewer than 16 samples in window");
    if (std::log10(whi / wlo) < 2.0 - 1e-9)
        throw std::invalid_argument("fit_expansion: window must span at least two decades");
    if (std::log10(t.back() / t.front()) < 1.9)
        throw std::invalid_argument("fit_expansion: trajectory does not cover the window");

    std::vector<double> phi1(t.size()), phi2(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        phi1[i] = std::pow(t[i], p.alpha);
        phi2[i] = std::pow(t[i], 2.0 - p.alpha);
    }
    ExpansionFit fit;
    fit.window_lo = t.front();
    fit.window_hi = t.back();
    fit.n_used = static_cast<int>(t.size());

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += phi2[i] * (u[i] - p.c0 * phi1[i]);
        den += phi2[i] * phi2[i];
    }
    fit.c1_hat = num / den;

    const auto ab = fit_two_basis(phi1, phi2, u);
    fit.c0_hat = ab[0];

    // Remainder exponent, measured on the decade above the fit window so the
    // fitted coefficients cannot absorb the next-order term there.
    std::vector<double> lt, lr;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double ti = traj.t[i];
        if (ti <= whi || ti > 10.0 * whi || !(traj.u[i] > 0.0)) continue;
        const double r = traj.u[i] - p.c0 * std::pow(ti, p.alpha) -
                         fit.c1_hat * std::pow(ti, 2.0 - p.alpha);
        if (std::abs(r) > 3e-12 * (1.0 + std::abs(traj.u[i]))) {
            lt.push_back(std::log(ti));
            lr.push_back(std::log(std::abs(r)));
        }
    }
    if (lt.size() >= 8) fit.sigma_hat = fit_line(lt, lr).slope;
    return fit;
}

struct AngularProfile {
    std::vector<double> theta, f;
    double a = 0.0;  // vanishing angle
    double mu = 0.0; // first-integral constant: f'^2 + alpha^2 f^2 - 2W(f) = 2 mu
};

/// Arch of f'' + alpha^2 f = -f^{-(gamma+1)} starting from a vanishing point
/// at theta=0.  mu=0 gives f = c0 sin^alpha(theta) with a = pi.
inline AngularProfile angular_profile(const Params& p, double mu, int n_out = 4096) {
    const double th0 = 1e-6;
    const double c1 = analytic_c1(p);
    const double f0 =
        p.c0 * std::pow(th0, p.alpha) + 2.0 * mu * c1 * std::pow(th0, 2.0 - p.alpha);
    if (!(f0 > 0.0)) throw std::domain_error("angular_profile: seed value nonpositive");
    const double rad = 2.0 * mu + (2.0 / p.gamma) * std::pow(f0, -p.gamma) -
                       p.alpha * p.alpha * f0 * f0;
    if (!(rad > 0.0)) throw std::domain_error("angular_profile: seed radicand nonpositive");
    const double df0 = std::sqrt(rad);

    // every orbit vanishes before the comparison oscillator's half period
    const double th_cap = 2.0 * M_PI / p.alpha + 1.0;
    std::vector<double> targets;
    const double dth = M_PI / (n_out - 1);
    for (double th = th0; th < th_cap; th += dth) targets.push_back(th);

    AngularProfile ap;
    ap.mu = mu;
    const double gp1 = p.gamma + 1.0;
    const double a2 = p.alpha * p.alpha;
    auto rhs = [gp1, a2](const std::array<double, 2>& y, std::array<double, 2>& dy, double) {
        dy[0] = y[1];
        dy[1] = -a2 * y[0] - std::pow(std::max(y[0], 1e-300), -gp1);
    };
    auto stop = detail::drive_profile(rhs, {f0, df0}, th0, th_cap, targets, 1e-6,
                                      [&](double th, double f, double) {
                                          ap.theta.push_back(th);
                                          ap.f.push_back(f);
                                      });
    if (!stop.truncated)
        throw std::runtime_error("angular_profile: arch failed to vanish below the cap");
    const double mu_loc = stop.du * stop.du - (2.0 / p.gamma) * std::pow(stop.u, -p.gamma);
    ap.a = stop.t + g_quadrature(p, mu_loc, stop.u);
    return ap;
}

struct RadialProfile {
    std::vector<double> r, phi;
    double m = 0.0; // center value
    double R = 0.0;
    int dim = 1;
};

/// Radially symmetric dead-core profile on a ball: phi'' + (n-1)/r phi' =
/// -phi^{-(gamma+1)}, phi'(0)=0, phi(R)=0, found by shooting on the center
/// value.  The vanishing radius grows monotonically with the center value.
inline RadialProfile radial_profile(const Params& p, int dim, double R, int n_out = 2049) {
    if (dim < 1 || dim > 9) throw std::domain_error("radial_profile: dim out of range");
    if (!(R > 0.0)) throw std::domain_error("radial_profile: R must be positive");
    const double gp1 = p.gamma + 1.0;

    auto make_rhs = [&](int n) {
        return [gp1, n](const std::array<double, 2>& y, std::array<double, 2>& dy, double r) {
            dy[0] = y[1];
            dy[1] = -std::pow(std::max(y[0], 1e-300), -gp1) - (n - 1) * y[1] / r;
        };
    };
    auto seed = [&](double m) {
        const double r0 = 1e-8 * R;
        const double lap = std::pow(m, -gp1);
        return std::tuple<double, std::array<double, 2>>{
            r0, {m - lap * r0 * r0 / (2.0 * dim), -lap * r0 / dim}};
    };
    auto vanish_radius = [&](double m) {
        auto [r0, y0] = seed(m);
        static const std::vector<double> none;
        auto stop = detail::drive_profile(make_rhs(dim), y0, r0, 3.0 * R, none, 1e-9,
                                          [](double, double, double) {});
        if (!stop.truncated) return 4.0 * R;
        const double mu_loc =
            stop.du * stop.du - (2.0 / p.gamma) * std::pow(stop.u, -p.gamma);
        return stop.t + g_quadrature(p, mu_loc, stop.u);
    };

    double m_lo = p.c0 * std::pow(R, p.alpha), m_hi = m_lo;
    int guard = 0;
    while (vanish_radius(m_lo) > R) {
        m_lo *= 0.5;
        if (++guard > 60) throw std::runtime_error("radial_profile: bracket search failed");
    }
    guard = 0;
    while (vanish_radius(m_hi) < R) {
        m_hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("radial_profile: bracket search failed");
    }
    double m_mid = 0.5 * (m_lo + m_hi);
    for (int it = 0; it < 200; ++it) {
        m_mid = 0.5 * (m_lo + m_hi);
        const double rs = vanish_radius(m_mid);
        if (std::abs(rs - R) <= 1e-10 * std::max(1.0, R)) break;
        (rs < R ? m_lo : m_hi) = m_mid;
    }

    RadialProfile rp;
    rp.m = m_mid;
    rp.R = R;
    rp.dim = dim;
    auto [r0, y0] = seed(m_mid);
    std::vector<double> targets;
    for (int k = 1; k < n_out; ++k) {
        const double rk = R * static_cast<double>(k) / (n_out - 1);
        if (rk > r0) targets.push_back(rk);
    }
    rp.r.push_back(0.0);
    rp.phi.push_back(m_mid);
    detail::drive_profile(make_rhs(dim), y0, r0, 3.0 * R, targets, 1e-9,
                          [&](double r, double phi, double) {
                              rp.r.push_back(r);
                              rp.phi.push_back(std::max(phi, 0.0));
                          });
    while (static_cast<int>(rp.r.size()) < n_out) {
        rp.r.push_back(R * static_cast<double>(rp.r.size()) / (n_out - 1));
        rp.phi.push_back(0.0);
    }
    return rp;
}

} // namespace apfb
