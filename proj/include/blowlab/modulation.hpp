#pragma once

// Modulation diagnostics and the blowup-time shooter. The rank-one spectral
// projections onto the symmetry modes are replaced by Gram-corrected oblique
// projections onto span{r_theta} and span{g_theta}: the ranges agree with the
// spectral ones and only the unstable coefficients are needed operationally.
// With the rho^2-weighted pairing used here the two constant mode vectors are
// in fact orthogonal, so the Gram solve is exact on their span by
// construction either way.

#include <array>
#include <cmath>
#include <complex>
#include <future>
#include <optional>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/evolve.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/similarity.hpp"
#include "blowlab/state.hpp"

namespace blowlab::modulation {

using evolve::EquationSpec;
using profile::BlowupProfile;
using profile::SimilarityFrame;
using Vec4 = std::array<double, 4>;

struct ProjectionSample {
    double tau = 0;
    double theta_est = 0;
    double coeff_r = 0;
    double coeff_g = 0;
    double remainder_norm = 0;
};

// Ball-averaged phase: theta = atan2(<nu1>, <phi1>) with rho^2-weighted
// averages; branch (-pi, pi].
inline double extract_theta(const FieldState& st, const grid::RadialGrid& g) {
    double a = g.integrate_rho2(st.comp[0]);
    double b = g.integrate_rho2(st.comp[2]);
    double scale = std::sqrt(a * a + b * b);
    if (scale < 1e-12) throw ScientificError("phase undefined: ball averages are degenerate");
    double th = std::atan2(b, a);
    if (th <= -3.14159265358979323846) th = 3.14159265358979323846;
    return th;
}

namespace detail {

inline double pair_rho2(const std::vector<double>& f, const grid::RadialGrid& g) {
    return g.integrate_rho2(f);
}

// <d, m> = sum_c m_c int rho^2 d_c drho for a constant mode vector m.
inline double mode_pairing(const FieldState& d, const Vec4& m, const grid::RadialGrid& g) {
    double acc = 0;
    for (int c = 0; c < 4; ++c) acc += m[c] * g.integrate_rho2(d.comp[c]);
    return acc;
}

inline double i2(const grid::RadialGrid& g) {
    std::vector<double> one(g.n, 1.0);
    return g.integrate_rho2(one);
}

}  // namespace detail

// H2 x H1 - type discrete norm: full Sobolev weight on the first/third
// components, one derivative fewer on the second/fourth.
inline double sobolev_norm(const FieldState& st, const grid::RadialGrid& g) {
    double acc = 0;
    for (int c = 0; c < 4; ++c) {
        auto d1 = g.deriv_even1(st.comp[c]);
        std::vector<double> sq(g.n);
        for (int j = 0; j < g.n; ++j)
            sq[j] = st.comp[c][j] * st.comp[c][j] + d1[j] * d1[j];
        if (c == 0 || c == 2) {
            auto d2 = g.deriv_even2(st.comp[c]);
            for (int j = 0; j < g.n; ++j) sq[j] += d2[j] * d2[j];
        }
        acc += g.integrate_rho2(sq);
    }
    return std::sqrt(acc);
}

// Gram-corrected coefficients of (state - Psi_theta) along r_theta, g_theta,
// plus the Sobolev norm of what remains.
inline ProjectionSample project_modes(const FieldState& st, const grid::RadialGrid& g, double p,
                                      double theta) {
    Vec4 psi = profile::psi_theta(p, theta);
    Vec4 r = profile::mode_r(p, theta);
    Vec4 gm = profile::mode_g(p, theta);

    FieldState d = st;
    for (int c = 0; c < 4; ++c)
        for (int j = 0; j < g.n; ++j) d.comp[c][j] -= psi[c];

    double w2 = detail::i2(g);
    auto dot4 = [](const Vec4& a, const Vec4& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    };
    double grr = w2 * dot4(r, r), ggg = w2 * dot4(gm, gm), grg = w2 * dot4(r, gm);
    double br = detail::mode_pairing(d, r, g);
    double bg = detail::mode_pairing(d, gm, g);
    double det = grr * ggg - grg * grg;
    double cr = (ggg * br - grg * bg) / det;
    double cg = (grr * bg - grg * br) / det;

    for (int c = 0; c < 4; ++c)
        for (int j = 0; j < g.n; ++j) d.comp[c][j] -= cr * r[c] + cg * gm[c];

    ProjectionSample out;
    out.tau = st.tau;
    out.theta_est = theta;
    out.coeff_r = cr;
    out.coeff_g = cg;
    out.remainder_norm = sobolev_norm(d, g);
    return out;
}

// ---------------------------------------------------------------------------
// Decay fits
// ---------------------------------------------------------------------------

struct DecayFit {
    double omega = 0;      // fitted rate: value ~ C exp(-omega tau)
    double intercept = 0;  // log C
    double r_squared = 0;
    double window_lo = 0, window_hi = 0;
    int points = 0;
};

inline DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double window_lo,
                          double window_hi) {
    std::vector<double> xs, ys;
    for (auto [tau, value] : series) {
        if (tau < window_lo - 1e-12 || tau > window_hi + 1e-12) continue;
        if (!(value > 0.0))
            throw ValidationError("series", "fit_decay requires positive values in the window");
        xs.push_back(tau);
        ys.push_back(std::log(value));
    }
    if (xs.size() < 5) throw ValidationError("series", "fit_decay needs at least 5 points in the window");
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double fit = intercept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    DecayFit out;
    out.omega = -slope;
    out.intercept = intercept;
    out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    out.window_lo = window_lo;
    out.window_hi = window_hi;
    out.points = static_cast<int>(xs.size());
    return out;
}

// ---------------------------------------------------------------------------
// Weighted lightcone norms
// ---------------------------------------------------------------------------

// The three weighted lightcone norms used as convergence diagnostics:
//   n2 = (T-t)^{ 1/2+s} || (u, d_t u) ||_{H2. x H1.(B_{T-t})}
//   n1 = (T-t)^{-1/2+s} || (u, d_t u) - profile ||_{H1. x L2}
//   n0 = (T-t)^{-3/2+s} || u - profile ||_{L2}
// with s = 2/(p-1), homogeneous seminorms from the top derivatives only and
// the radial measure r^2 dr (trapezoidal quadrature on the section grid).
struct LightconeNorms {
    double n2 = 0, n1 = 0, n0 = 0;
};

inline LightconeNorms lightcone_norms(const ConeSection& sec, const BlowupProfile& prof, double t) {
    if (!(t < prof.T)) throw ValidationError("t", "requires t < T");
    double R = prof.T - t;
    if (sec.radius < R * (1.0 - 1e-9))
        throw ValidationError("section", "section radius too small for the requested time");
    double s = 2.0 / (prof.p - 1.0);
    cplx phase(std::cos(prof.theta), std::sin(prof.theta));
    cplx pu = phase * profile::kappa(prof.p) * std::pow(R, -s);
    cplx put = phase * profile::kappa(prof.p) * s * std::pow(R, -s - 1.0);

    auto du = sec.d1(sec.u);
    auto d2u = sec.d2(sec.u);
    auto dut = sec.d1(sec.ut);

    const std::size_t n = sec.r.size();
    std::vector<double> a(n), b(n), c(n), d(n), e(n);
    for (std::size_t j = 0; j < n; ++j) {
        double r2 = sec.r[j] * sec.r[j];
        a[j] = r2 * std::norm(d2u[j]);            // |u''|^2
        b[j] = r2 * std::norm(dut[j]);            // |(d_t u)'|^2
        c[j] = r2 * std::norm(du[j]);             // |u'|^2
        d[j] = r2 * std::norm(sec.ut[j] - put);   // |d_t u - d_t profile|^2
        e[j] = r2 * std::norm(sec.u[j] - pu);     // |u - profile|^2
    }
    LightconeNorms out;
    out.n2 = std::pow(R, 0.5 + s) * std::sqrt(grid::trapezoid(sec.r, a) + grid::trapezoid(sec.r, b));
    out.n1 = std::pow(R, -0.5 + s) * std::sqrt(grid::trapezoid(sec.r, c) + grid::trapezoid(sec.r, d));
    out.n0 = std::pow(R, -1.5 + s) * std::sqrt(grid::trapezoid(sec.r, e));
    return out;
}

// ---------------------------------------------------------------------------
// Shooting on the blowup time
// ---------------------------------------------------------------------------

struct ShootResult {
    double T_star = 0;
    double theta_inf = 0;
    int iterations = 0;
    double bracket_lo = 0, bracket_hi = 0;
    bool converged = false;
    double final_coeff_g = 0;
    std::vector<std::pair<double, double>> iterates;  // (T, coeff_g at horizon)
};

struct ShootOptions {
    double tau_horizon = 6.0;
    double tol = 1e-6;        // bracket width and coefficient tolerance
    double dtau = 0.0;        // 0: grid default
    double sample_dtau = 0.05;
    int max_iterations = 80;
};

namespace detail {

struct HorizonEval {
    double coeff_g = 0;
    double theta = 0;
    bool truncated = false;  // left the trust region before the horizon
};

// Evolve candidate-T initial data to the horizon and read off the coefficient
// of the unstable mode. A trajectory that leaves the trust region before the
// horizon is evaluated at its last stable sample; the e^tau growth of the
// unstable direction makes that sign decisive.
inline HorizonEval eval_candidate(double T, const profile::DataPair& data,
                                  const EquationSpec& spec_template, const grid::RadialGrid& g,
                                  const ShootOptions& opts) {
    EquationSpec spec = spec_template;
    spec.frame = SimilarityFrame(T, spec_template.frame.T0);
    FieldState init = similarity::to_similarity(spec.frame, data, g, spec.p);

    double last_theta = 0.0;
    auto observe = [&](const FieldState& st) {
        evolve::Sample s;
        s.tau = st.tau;
        try {
            s.theta = extract_theta(st, g);
            s.theta_valid = true;
            last_theta = s.theta;
        } catch (const ScientificError&) {
            s.theta = last_theta;
            s.theta_valid = false;
        }
        auto proj = project_modes(st, g, spec.p, s.theta);
        s.coeff_r = proj.coeff_r;
        s.coeff_g = proj.coeff_g;
        s.remainder_norm = proj.remainder_norm;
        return s;
    };

    evolve::EvolveOptions eopts;
    eopts.tau_max = opts.tau_horizon;
    eopts.dtau = opts.dtau;
    eopts.sample_dtau = opts.sample_dtau;
    eopts.observe = observe;
    evolve::Trajectory traj = evolve::evolve(init, spec, g, eopts);
    if (traj.samples.empty())
        throw ScientificError("shooting: candidate evolution produced no usable samples");

    HorizonEval ev;
    ev.coeff_g = traj.samples.back().coeff_g;
    ev.theta = traj.samples.back().theta;
    ev.truncated = !traj.completed;
    if (!std::isfinite(ev.coeff_g))
        throw ScientificError("shooting: endpoint evolution unstable before any usable sample");
    return ev;
}

}  // namespace detail

inline ShootResult shoot_T(const profile::DataPair& data, const EquationSpec& spec_template,
                           const grid::RadialGrid& g, double T_lo, double T_hi,
                           const ShootOptions& opts = {}) {
    if (!(T_lo < T_hi)) throw ValidationError("bracket", "requires T_lo < T_hi");
    if (!(spec_template.frame.T0 < T_lo))
        throw ValidationError("bracket", "requires T0 < T_lo");

    // The endpoint evolutions are independent; run them concurrently.
    auto hi_future = std::async(std::launch::async, [&] {
        return detail::eval_candidate(T_hi, data, spec_template, g, opts);
    });
    detail::HorizonEval lo = detail::eval_candidate(T_lo, data, spec_template, g, opts);
    detail::HorizonEval hi = hi_future.get();

    ShootResult res;
    res.iterates.push_back({T_lo, lo.coeff_g});
    res.iterates.push_back({T_hi, hi.coeff_g});

    if (lo.coeff_g == 0.0 || hi.coeff_g == 0.0) {
        // an endpoint is already on the manifold to working precision
        bool lo_zero = lo.coeff_g == 0.0;
        res.T_star = lo_zero ? T_lo : T_hi;
        res.theta_inf = lo_zero ? lo.theta : hi.theta;
        res.converged = true;
        res.final_coeff_g = 0.0;
        res.bracket_lo = T_lo;
        res.bracket_hi = T_hi;
        return res;
    }
    if ((lo.coeff_g > 0) == (hi.coeff_g > 0))
        throw ScientificError(
            "shooting: no sign change across the bracket (coeff_g endpoints " +
            std::to_string(lo.coeff_g) + ", " + std::to_string(hi.coeff_g) +
            "); data too far from the blowup family");

    double a = T_lo, b = T_hi;
    double fa = lo.coeff_g;
    detail::HorizonEval mid_eval = lo;
    int it = 0;
    while (b - a > opts.tol && it < opts.max_iterations) {
        double m = 0.5 * (a + b);
        mid_eval = detail::eval_candidate(m, data, spec_template, g, opts);
        ++it;
        res.iterates.push_back({m, mid_eval.coeff_g});
        if (std::abs(mid_eval.coeff_g) <= opts.tol) {
            a = b = m;
            break;
        }
        if ((mid_eval.coeff_g > 0) == (fa > 0)) {
            a = m;
            fa = mid_eval.coeff_g;
        } else {
            b = m;
        }
    }

    res.T_star = 0.5 * (a + b);
    detail::HorizonEval fin = detail::eval_candidate(res.T_star, data, spec_template, g, opts);
    res.theta_inf = fin.theta;
    res.final_coeff_g = fin.coeff_g;
    res.iterations = it;
    res.bracket_lo = a;
    res.bracket_hi = b;
    res.converged = (b - a <= opts.tol) || std::abs(fin.coeff_g) <= opts.tol;
    return res;
}

}  // namespace blowlab::modulation
