#pragma once

#include <cmath>
#include <complex>

#include "blowlab/error.hpp"

namespace blowlab::specfun {

using cplx = std::complex<double>;

namespace detail {

// sin(pi z) with argument reduction on the real part, accurate near integers.
inline cplx sinpi(cplx z) {
    double n = std::round(z.real());
    double f = z.real() - n;
    double y = z.imag();
    double sign = (std::fmod(std::abs(n), 2.0) == 0.0) ? 1.0 : -1.0;
    const double pi = 3.14159265358979323846;
    return sign * cplx(std::sin(pi * f) * std::cosh(pi * y),
                       std::cos(pi * f) * std::sinh(pi * y));
}

// Rational-series gamma for Re z >= 0.5 (Lanczos, g = 607/128, 14 terms).
inline cplx gamma_right(cplx z) {
    static const double coef[14] = {
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
        -0.491913816097620199,   3.39946499848118887e-5,  4.65236289270485756e-5,
        -9.83744753048795646e-5, 1.58088703224912494e-4,  -2.10264441724104883e-4,
        2.17439618115212643e-4,  -1.64318106536763890e-4, 8.44182239838527433e-5,
        -2.61908384015814087e-5, 3.68991826595316234e-6};
    cplx x = z;
    cplx tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    cplx ser = 0.999999999999997092;
    cplx y = x;
    for (double c : coef) {
        y += 1.0;
        ser += c / y;
    }
    return std::exp(tmp) * (2.5066282746310005 * ser / x);
}

inline bool is_nonpositive_integer(cplx z, double tol = 0.0) {
    if (std::abs(z.imag()) > tol) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) <= tol;
}

}  // namespace detail

// Gamma function on the complex plane; relative accuracy ~1e-14 for |z| <= 50
// away from the poles at the non-positive integers.
inline cplx gamma(cplx z) {
    if (detail::is_nonpositive_integer(z))
        throw SpecialFunctionError("gamma pole at z = " + std::to_string(z.real()));
    if (z.real() < 0.5) {
        const double pi = 3.14159265358979323846;
        return pi / (detail::sinpi(z) * detail::gamma_right(1.0 - z));
    }
    return detail::gamma_right(z);
}

// Entire reciprocal 1/Gamma; vanishes at the non-positive integers.
inline cplx rgamma(cplx z) {
    if (z.real() < 0.5) {
        const double pi = 3.14159265358979323846;
        return detail::sinpi(z) * detail::gamma_right(1.0 - z) / pi;
    }
    return 1.0 / detail::gamma_right(z);
}

}  // namespace blowlab::specfun
