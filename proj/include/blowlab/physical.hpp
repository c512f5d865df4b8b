#pragma once

// Method-of-lines integrator for the radial equation in physical coordinates,
//
//   d_t^2 u = d_r^2 u + (2/r) d_r u - F(t, r, u, d_t u, d_r u) + u |u|^{p-1},
//
// on the backward lightcone of the data ball: the active grid is truncated to
// r <= R0 - (t - T0) as t advances, so no outer boundary condition is ever
// imposed (the truncated points are exactly the ones a unit-speed
// characteristic from outside could have reached). Fourth-order central
// stencils inside, one-sided closures at the moving edge, even-parity ghosts
// at the origin, classical RK4 in time. Used to cross-validate the
// similarity-coordinate evolution.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/evolve.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/state.hpp"

namespace blowlab::physical {

struct PhysicalOptions {
    int n_r = 2001;      // nodes on [0, R0]
    double cfl = 0.4;    // dt = cfl * dr
    double overflow = 1e12;
};

namespace detail {

struct Fields {
    std::vector<cplx> u, ut;
};

inline void rhs(const Fields& s, double t, const std::vector<double>& r, double h, int m,
                const evolve::EquationSpec& spec, Fields& out) {
    const double p = spec.p;
    out.u.resize(s.u.size());
    out.ut.resize(s.ut.size());

    auto uat = [&](int i) { return s.u[std::abs(i)]; };  // even extension at r = 0

    for (int i = 0; i <= m; ++i) {
        cplx lap, dur;
        if (i <= m - 2) {
            // centered stencils; parity ghosts u(-k) = u(k) cover i = 0, 1
            dur = (uat(i - 2) - 8.0 * uat(i - 1) + 8.0 * uat(i + 1) - uat(i + 2)) / (12.0 * h);
            lap = (-uat(i - 2) + 16.0 * uat(i - 1) - 30.0 * uat(i) + 16.0 * uat(i + 1) -
                   uat(i + 2)) /
                  (12.0 * h * h);
        } else {
            // one-sided 4th-order closures at the truncation edge
            static const double d1c[5] = {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0};
            static const double d2c[6] = {15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0,
                                          -13.0,      61.0 / 12.0, -5.0 / 6.0};
            cplx a{}, b{};
            for (int k = 0; k < 5; ++k) a += d1c[k] * s.u[i - k];
            for (int k = 0; k < 6; ++k) b += d2c[k] * s.u[i - k];
            dur = -a / h;  // mirrored stencil flips the first-derivative sign
            lap = b / (h * h);
        }

        cplx full_lap;
        if (i == 0) {
            full_lap = 3.0 * lap;  // (2/r) u' -> 2 u'' as r -> 0 for even u
        } else {
            full_lap = lap + 2.0 * dur / r[i];
        }

        cplx Fv{};
        if (spec.perturbation) {
            expr::Point pt;
            pt.t = t;
            pt.r = r[i];
            pt.u = s.u[i];
            pt.v = s.ut[i];
            pt.w = (i == 0) ? cplx{} : dur;
            Fv = spec.perturbation->evaluate(pt);
        }
        double au = std::abs(s.u[i]);
        cplx nonlin = s.u[i] * std::pow(au, p - 1.0);

        out.u[i] = s.ut[i];
        out.ut[i] = full_lap - Fv + nonlin;
    }
    for (std::size_t i = m + 1; i < out.u.size(); ++i) {
        out.u[i] = {};
        out.ut[i] = {};
    }
}

}  // namespace detail

// Integrate data (f, g) from t = T0 to t_end < T on the shrinking cone and
// return the final section (truncated to the causal radius).
inline ConeSection physical_evolve(const profile::DataPair& data,
                                   const evolve::EquationSpec& spec, double t_end,
                                   const PhysicalOptions& opts = {}) {
    const double T0 = spec.frame.T0;
    const double T = spec.frame.T;
    const double R0 = T - T0;
    if (!(t_end > T0) || !(t_end < T))
        throw ValidationError("t_end", "requires T0 < t_end < T");
    if (opts.n_r < 32) throw ValidationError("n_r", "too few nodes");
    if (!(opts.cfl > 0.0) || opts.cfl > 0.9)
        throw ValidationError("cfl", "requires 0 < cfl <= 0.9");
    if (data.f.radius < R0 * (1.0 - 1e-12) || data.g.radius < R0 * (1.0 - 1e-12))
        throw ValidationError("data", "radius too small for the lightcone");

    const int n = opts.n_r;
    const double h = R0 / (n - 1);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = i * h;

    detail::Fields s;
    s.u.resize(n);
    s.ut.resize(n);
    for (int i = 0; i < n; ++i) {
        s.u[i] = data.f(r[i]);
        s.ut[i] = data.g(r[i]);
    }

    double dt = opts.cfl * h;
    double t = T0;
    detail::Fields k1, k2, k3, k4, tmp;

    // Truncate 4 points inside the causal radius: the biased edge stencils
    // are dropped before their local error can creep inward.
    auto active_index = [&](double tt) {
        double radius = R0 - (tt - T0);
        int m = static_cast<int>(std::floor(radius / h + 1e-9)) - 4;
        return std::min(m, n - 1);
    };

    while (t < t_end - 1e-14) {
        double step = std::min(dt, t_end - t);
        int m = active_index(t + step);  // causal radius at the end of the step
        if (m < 8) throw ScientificError("lightcone truncated below the minimum grid size");

        detail::rhs(s, t, r, h, m, spec, k1);
        tmp = s;
        for (int i = 0; i <= m; ++i) {
            tmp.u[i] = s.u[i] + 0.5 * step * k1.u[i];
            tmp.ut[i] = s.ut[i] + 0.5 * step * k1.ut[i];
        }
        detail::rhs(tmp, t + 0.5 * step, r, h, m, spec, k2);
        for (int i = 0; i <= m; ++i) {
            tmp.u[i] = s.u[i] + 0.5 * step * k2.u[i];
            tmp.ut[i] = s.ut[i] + 0.5 * step * k2.ut[i];
        }
        detail::rhs(tmp, t + 0.5 * step, r, h, m, spec, k3);
        for (int i = 0; i <= m; ++i) {
            tmp.u[i] = s.u[i] + step * k3.u[i];
            tmp.ut[i] = s.ut[i] + step * k3.ut[i];
        }
        detail::rhs(tmp, t + step, r, h, m, spec, k4);
        for (int i = 0; i <= m; ++i) {
            s.u[i] += step / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
            s.ut[i] += step / 6.0 * (k1.ut[i] + 2.0 * k2.ut[i] + 2.0 * k3.ut[i] + k4.ut[i]);
        }
        t += step;

        double worst = 0;
        for (int i = 0; i <= m; ++i)
            worst = std::max(worst, std::max(std::abs(s.u[i]), std::abs(s.ut[i])));
        if (!std::isfinite(worst) || worst > opts.overflow)
            throw ScientificError("blowup overflow before t_end");
    }

    int m = active_index(t);
    ConeSection sec;
    sec.t = t;
    sec.radius = r[m];
    sec.r.assign(r.begin(), r.begin() + m + 1);
    sec.u.assign(s.u.begin(), s.u.begin() + m + 1);
    sec.ut.assign(s.ut.begin(), s.ut.begin() + m + 1);
    return sec;
}

}  // namespace blowlab::physical
