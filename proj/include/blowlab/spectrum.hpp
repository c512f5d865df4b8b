#pragma once

// Spectrum of the linearized similarity operator via the hypergeometric
// connection problem. Radial eigenvalue candidates lambda with
// Re(lambda) > -2/(p-1) solve
//
//   z(1-z) w'' + (c - (a+b+1) z) w' - a b w = 0,   z = rho^2, c = 1/2,
//
// where a, b are the roots of
//   x^2 - (lambda + 2/(p-1) - 1/2) x + ((lambda+s)(lambda+s-1) - mu)/4,
// mu in {c_p, p c_p} for the two decoupled component equations. lambda is an
// eigenvalue exactly when the connection coefficient
//
//   c1 = Gamma(a+b+1-c) Gamma(1-c) / (Gamma(a+1-c) Gamma(b+1-c))
//
// vanishes, i.e. when a+1-c or b+1-c hits a pole of Gamma. The scanner works
// with c1 assembled from the entire reciprocal 1/Gamma, so its zeros are
// honest zeros of an analytic function.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/gamma.hpp"
#include "blowlab/hyp2f1.hpp"
#include "blowlab/profile.hpp"

namespace blowlab::specfun {

inline double mu_nu(double p) { return profile::c_p(p); }
inline double mu_phi(double p) { return p * profile::c_p(p); }

inline HypergeometricParams reduce_to_hypergeometric(double p, double mu, cplx lambda) {
    if (!(p > 1.0)) throw ValidationError("p", "requires p > 1");
    double s = 2.0 / (p - 1.0);
    cplx ls = lambda + s;
    cplx sum = lambda + s - 0.5;                    // a + b
    cplx prod = 0.25 * (ls * (ls - 1.0) - mu);      // a b
    cplx disc = std::sqrt(sum * sum - 4.0 * prod);
    cplx a = 0.5 * (sum - disc);
    cplx b = 0.5 * (sum + disc);
    if (a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag())) std::swap(a, b);
    return {a, b, cplx(0.5, 0.0)};
}

// Connection coefficient c1 as an analytic function of lambda on
// Re(lambda) > -2/(p-1). Exact zeros occur iff a+1-c or b+1-c is a
// non-positive integer.
inline cplx connection_c1(double p, double mu, cplx lambda) {
    auto [a, b, c] = reduce_to_hypergeometric(p, mu, lambda);
    cplx num = a + b + 1.0 - c;
    if (detail::is_nonpositive_integer(num, 1e-10))
        throw SpecialFunctionError(
            "connection coefficient has a numerator pole (degenerate logarithmic case)");
    return gamma(num) * gamma(1.0 - c) * rgamma(a + 1.0 - c) * rgamma(b + 1.0 - c);
}

struct Region {
    double re_lo, re_hi;
    double im_lo, im_hi;
};

struct EigenvalueRecord {
    cplx lambda;
    double abs_c1;        // |c1| at the refined root
    double ode_residual;  // residual of the reconstructed regular mode
};

struct SpectralResult {
    double p = 0;
    double mu = 0;
    Region region{};
    double grid_step = 0;
    std::vector<cplx> eigenvalues;
    std::vector<EigenvalueRecord> records;
};

enum class FundamentalSolution { f1, f2, g1, g2 };

namespace detail {

// Richardson-extrapolated central differences (base step 1e-4).
template <class F>
inline cplx fd1(const F& f, double x, double h = 1e-4) {
    auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

template <class F>
inline cplx fd2(const F& f, double x, double h = 1e-4) {
    auto d = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
    return (4.0 * d(h / 2) - d(h)) / 3.0;
}

// Max residual of the hypergeometric ODE for a candidate solution w(z) on a
// grid in (0.05, 0.95).
template <class W>
inline double hypergeometric_ode_residual(const HypergeometricParams& prm, const W& w,
                                          int n_points = 19) {
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        double z = 0.05 + 0.9 * (i + 0.5) / n_points;
        cplx w0 = w(z);
        cplx w1 = fd1(w, z);
        cplx w2 = fd2(w, z);
        cplx res = z * (1.0 - z) * w2 + (prm.c - (prm.a + prm.b + 1.0) * z) * w1 -
                   prm.a * prm.b * w0;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace detail

// Evaluate one member of the local fundamental systems (g1, g2 around z=0;
// f1, f2 around z=1) and return the max ODE residual on z in (0.05, 0.95).
inline double verify_mode_ode(double p, double mu, cplx lambda, FundamentalSolution which) {
    HypergeometricParams prm = reduce_to_hypergeometric(p, mu, lambda);
    const cplx a = prm.a, b = prm.b, c = prm.c;
    std::function<cplx(double)> w;
    switch (which) {
        case FundamentalSolution::g1:
            w = [=](double z) { return hyp2f1(a, b, c, z); };
            break;
        case FundamentalSolution::g2:
            w = [=](double z) {
                return std::sqrt(z) * hyp2f1(a - c + 1.0, b - c + 1.0, 2.0 - c, z);
            };
            break;
        case FundamentalSolution::f1: {
            cplx cc = a + b + 1.0 - c;
            if (detail::is_nonpositive_integer(cc, 1e-9))
                throw SpecialFunctionError("f1 undefined for these parameters");
            w = [=](double z) { return hyp2f1(a, b, cc, 1.0 - z); };
            break;
        }
        case FundamentalSolution::f2: {
            cplx cab = c - a - b;
            if (detail::near_integer(cab, 1e-9) && cab.real() < 0.5)
                throw SpecialFunctionError(
                    "f2 undefined: logarithmic case, second solution diverges at z = 1");
            w = [=](double z) { return std::pow(1.0 - z, cab) * hyp2f1(c - a, c - b, cab + 1.0, 1.0 - z); };
            break;
        }
    }
    return detail::hypergeometric_ode_residual(prm, w);
}

namespace detail {

inline double wrap_phase(double d) {
    const double pi = 3.14159265358979323846;
    while (d > pi) d -= 2 * pi;
    while (d < -pi) d += 2 * pi;
    return d;
}

}  // namespace detail

// Locate all zeros of c1 inside the region by phase winding over grid cells
// followed by Newton refinement with a numerical derivative (step 1e-7).
// Roots are reported sorted lexicographically by (Re, Im).
inline SpectralResult eigenvalue_scan(double p, double mu, const Region& region,
                                      double grid_step) {
    double s = 2.0 / (p - 1.0);
    if (!(region.re_lo > -s))
        throw ValidationError("region", "must satisfy Re(lambda) > -2/(p-1)");
    if (!(region.re_lo < region.re_hi) || !(region.im_lo < region.im_hi))
        throw ValidationError("region", "empty region");
    if (!(grid_step > 0.0)) throw ValidationError("grid_step", "must be positive");

    auto h = [&](cplx lam) { return connection_c1(p, mu, lam); };

    // Deterministic lattice offset so analytic zeros do not sit on cell edges.
    double ox = -0.2345678910 * grid_step;
    double oy = -0.3456789101 * grid_step;
    int nx = static_cast<int>(std::ceil((region.re_hi - region.re_lo - ox) / grid_step));
    int ny = static_cast<int>(std::ceil((region.im_hi - region.im_lo - oy) / grid_step));

    std::vector<cplx> candidates;
    const int samples_per_side = 12;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double x0 = region.re_lo + ox + i * grid_step;
            double x1 = x0 + grid_step;
            double y0 = region.im_lo + oy + j * grid_step;
            double y1 = y0 + grid_step;
            // walk the boundary counterclockwise
            double winding = 0.0;
            double prev_arg = 0.0;
            bool first = true;
            bool tiny = false;
            auto visit = [&](cplx z) {
                cplx val = h(z);
                if (std::abs(val) < 1e-13) {
                    tiny = true;
                    return;
                }
                double arg = std::arg(val);
                if (!first) winding += detail::wrap_phase(arg - prev_arg);
                prev_arg = arg;
                first = false;
            };
            for (int k = 0; k < samples_per_side; ++k)
                visit({x0 + (x1 - x0) * k / samples_per_side, y0});
            for (int k = 0; k < samples_per_side; ++k)
                visit({x1, y0 + (y1 - y0) * k / samples_per_side});
            for (int k = 0; k < samples_per_side; ++k)
                visit({x1 - (x1 - x0) * k / samples_per_side, y1});
            for (int k = 0; k <= samples_per_side; ++k)
                visit({x0, y1 - (y1 - y0) * k / samples_per_side});
            if (tiny || std::abs(winding) > 3.5 /* > pi: at least one zero enclosed */)
                candidates.push_back({0.5 * (x0 + x1), 0.5 * (y0 + y1)});
        }
    }

    std::vector<cplx> roots;
    const double newton_step = 1e-7;
    for (cplx z : candidates) {
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            cplx f = h(z);
            cplx df = (h(z + newton_step) - h(z - newton_step)) / (2.0 * newton_step);
            if (std::abs(df) == 0.0) break;
            cplx dz = f / df;
            z -= dz;
            if (std::abs(dz) < 1e-12 * (1.0 + std::abs(z))) {
                ok = true;
                break;
            }
        }
        if (!ok) continue;
        if (std::abs(h(z)) > 1e-8) continue;
        if (z.real() < region.re_lo - 1e-9 || z.real() > region.re_hi + 1e-9 ||
            z.imag() < region.im_lo - 1e-9 || z.imag() > region.im_hi + 1e-9)
            continue;
        bool dup = false;
        for (cplx r : roots)
            if (std::abs(r - z) < 1e-6) dup = true;
        if (!dup) roots.push_back(z);
    }

    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    SpectralResult out;
    out.p = p;
    out.mu = mu;
    out.region = region;
    out.grid_step = grid_step;
    out.eigenvalues = roots;
    for (cplx lam : roots) {
        EigenvalueRecord rec;
        rec.lambda = lam;
        rec.abs_c1 = std::abs(h(lam));
        // regular-at-z=1 branch reconstructed from the refined eigenvalue
        HypergeometricParams prm = reduce_to_hypergeometric(p, mu, lam);
        cplx cc = prm.a + prm.b + 1.0 - prm.c;
        auto w = [&](double z) { return hyp2f1(prm.a, prm.b, cc, 1.0 - z); };
        rec.ode_residual = detail::hypergeometric_ode_residual(prm, w);
        out.records.push_back(rec);
    }
    return out;
}

struct WronskianCheck {
    double fitted_exponent = 0;
    double fitted_constant = 0;
    double max_relative_deviation = 0;
};

// Wronskian of the fundamental system of the eigenvalue-0 reduced equation:
// f1 = rho and the second solution, numerically differentiated; expected
// W(f1,f2) = const * (1-rho^2)^{-2/(p-1)}. At p = 3 the indicial exponents
// at rho = 1 coincide and the generic hypergeometric form collapses onto f1;
// the logarithmic second solution rho*atanh(rho) - 1 is used instead.
inline WronskianCheck wronskian_check(double p, int n_points = 40) {
    if (!(p > 1.0)) throw ValidationError("p", "requires p > 1");
    double s = 2.0 / (p - 1.0);
    cplx cpar = cplx(2.0 - s, 0.0);
    if (detail::is_nonpositive_integer(cpar, 1e-12))
        throw SpecialFunctionError("second solution undefined: 2 - 2/(p-1) is a non-positive integer");
    if (n_points < 5) throw ValidationError("n_points", "need at least 5 points");

    std::function<double(double)> f2;
    if (std::abs(s - 1.0) < 1e-12) {
        f2 = [](double rho) { return rho * std::atanh(rho) - 1.0; };
    } else {
        f2 = [s](double rho) {
            double x = 1.0 - rho * rho;
            return std::pow(x, 1.0 - s) * hyp2f1(1.0, 0.5 - s, 2.0 - s, x).real();
        };
    }

    std::vector<double> logw, logx, compensated;
    compensated.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        double rho = 0.05 + 0.9 * (i + 0.5) / n_points;
        auto fr = [&](double x) { return cplx(f2(x), 0.0); };
        double df2 = detail::fd1(fr, rho).real();
        double W = rho * df2 - f2(rho);  // f1 = rho, f1' = 1
        double x = 1.0 - rho * rho;
        logw.push_back(std::log(std::abs(W)));
        logx.push_back(std::log(x));
        compensated.push_back(W * std::pow(x, s));
    }

    // least-squares line log|W| = intercept + slope * log(1 - rho^2)
    double n = static_cast<double>(n_points);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n_points; ++i) {
        sx += logx[i];
        sy += logw[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logw[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;

    double mean = 0;
    for (double v : compensated) mean += v;
    mean /= n;
    double dev = 0;
    for (double v : compensated) dev = std::max(dev, std::abs(v - mean));

    WronskianCheck out;
    out.fitted_exponent = slope;
    out.fitted_constant = (mean < 0 ? -1.0 : 1.0) * std::exp(intercept);
    out.max_relative_deviation = dev / std::abs(mean);
    return out;
}

}  // namespace blowlab::specfun
