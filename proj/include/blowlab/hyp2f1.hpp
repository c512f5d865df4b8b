#pragma once

// Gauss hypergeometric function 2F1(a,b;c;z) on the unit disk, plus the
// z -> 1-z connection and the Pfaff map for negative real parts. This covers
// every argument that occurs in the eigenvalue machinery (z = rho^2 and
// 1 - rho^2 with rho in [0,1)); no full analytic continuation is attempted.

#include <cmath>
#include <complex>
#include <string>

#include "blowlab/error.hpp"
#include "blowlab/gamma.hpp"

namespace blowlab::specfun {

struct HypergeometricParams {
    cplx a, b, c;
};

namespace detail {

constexpr int kSeriesCap = 100000;

inline bool near_integer(cplx z, double tol = 1e-8) {
    return std::abs(z.imag()) <= tol && std::abs(z.real() - std::round(z.real())) <= tol;
}

inline cplx gauss_series(cplx a, cplx b, cplx c, cplx z) {
    cplx sum = 1.0;
    cplx term = 1.0;
    int small_streak = 0;
    for (int n = 0; n < kSeriesCap; ++n) {
        term *= (a + static_cast<double>(n)) * (b + static_cast<double>(n)) /
                ((c + static_cast<double>(n)) * static_cast<double>(n + 1)) * z;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) {
            if (++small_streak >= 2) return sum;
        } else {
            small_streak = 0;
        }
    }
    throw SpecialFunctionError("2F1 series did not converge (cap 1e5 terms)");
}

inline cplx hyp2f1_impl(cplx a, cplx b, cplx c, cplx z, int depth) {
    if (near_integer(c, 1e-12) && c.real() < 0.5)
        throw SpecialFunctionError("2F1 undefined: c is a non-positive integer");
    if (z == cplx(0.0, 0.0)) return 1.0;

    // Terminating polynomial case.
    if (is_nonpositive_integer(a, 1e-13) || is_nonpositive_integer(b, 1e-13))
        return gauss_series(a, b, c, z);

    if (std::abs(z) <= 0.6) return gauss_series(a, b, c, z);

    if (z.real() < 0.0 && depth == 0) {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))
        return std::pow(1.0 - z, -a) * hyp2f1_impl(a, c - b, c, z / (z - 1.0), depth + 1);
    }

    cplx cab = c - a - b;
    if (std::abs(1.0 - z) <= 0.6 && !near_integer(cab)) {
        cplx f1 = gamma(c) * gamma(cab) * rgamma(c - a) * rgamma(c - b) *
                  gauss_series(a, b, a + b - c + 1.0, 1.0 - z);
        cplx f2 = std::pow(1.0 - z, cab) * gamma(c) * gamma(-cab) * rgamma(a) * rgamma(b) *
                  gauss_series(c - a, c - b, cab + 1.0, 1.0 - z);
        return f1 + f2;
    }

    // Slowly-converging ring (or logarithmic connection case): the direct
    // series still converges linearly with ratio |z| < 1.
    if (std::abs(z) < 1.0) return gauss_series(a, b, c, z);

    throw SpecialFunctionError("2F1 argument outside the supported domain |z| < 1");
}

}  // namespace detail

inline cplx hyp2f1(cplx a, cplx b, cplx c, cplx z) {
    return detail::hyp2f1_impl(a, b, c, z, 0);
}

inline cplx hyp2f1(const HypergeometricParams& p, cplx z) {
    return detail::hyp2f1_impl(p.a, p.b, p.c, z, 0);
}

}  // namespace blowlab::specfun
