#pragma once

// Closed-form objects of the blowup family: the constants kappa_p and c_p,
// the phase-rotated profile Psi_theta in similarity variables, the symmetry
// mode vectors r_theta (phase) and g_theta (time translation), and the ODE
// blowup solution itself.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "blowlab/error.hpp"

namespace blowlab::profile {

using cplx = std::complex<double>;
using Vec4 = std::array<double, 4>;

inline double kappa(double p) {
    if (!(p > 1.0)) throw ValidationError("p", "kappa requires p > 1");
    return std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
}

// c_p = kappa_p^{p-1} = 2(p+1)/(p-1)^2 = s(s+1) with s = 2/(p-1).
inline double c_p(double p) {
    if (!(p > 1.0)) throw ValidationError("p", "c_p requires p > 1");
    return 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
}

struct BlowupProfile {
    double T = 1.0;
    double theta = 0.0;
    double p = 3.0;
};

struct SimilarityFrame {
    double T = 1.0;
    double T0 = 0.5;

    SimilarityFrame() = default;
    SimilarityFrame(double T_, double T0_) : T(T_), T0(T0_) {
        if (!(T0 < T)) throw ValidationError("frame", "requires T0 < T");
    }
    double delta() const { return T - T0; }
};

// Psi_theta = (kappa cos, (2/(p-1)) kappa cos, kappa sin, (2/(p-1)) kappa sin),
// the blowup family as a constant-in-rho 4-vector.
inline Vec4 psi_theta(double p, double theta) {
    double k = kappa(p);
    double s = 2.0 / (p - 1.0);
    return {k * std::cos(theta), s * k * std::cos(theta), k * std::sin(theta),
            s * k * std::sin(theta)};
}

// Eigenvalue-0 mode: the theta-tangent of the family, d/dtheta Psi_theta.
inline Vec4 mode_r(double p, double theta) {
    double k = kappa(p);
    double s = 2.0 / (p - 1.0);
    return {-k * std::sin(theta), -s * k * std::sin(theta), k * std::cos(theta),
            s * k * std::cos(theta)};
}

// Eigenvalue-1 mode, generated by varying the blowup time.
inline Vec4 mode_g(double p, double theta) {
    double sg = (p + 1.0) / (p - 1.0);
    return {std::cos(theta), sg * std::cos(theta), std::sin(theta), sg * std::sin(theta)};
}

// u^T_theta(t, r) = e^{i theta} kappa_p (T - t)^{-2/(p-1)}; spatially constant,
// r is accepted for interface uniformity.
inline cplx ode_profile(const BlowupProfile& prof, double t, double /*r*/ = 0.0) {
    if (!(t < prof.T)) throw ValidationError("t", "ode_profile requires t < T");
    double s = 2.0 / (prof.p - 1.0);
    double amp = kappa(prof.p) * std::pow(prof.T - t, -s);
    return amp * cplx(std::cos(prof.theta), std::sin(prof.theta));
}

// Radial data: a complex-valued function of r with a declared radius of
// definition (infinite by default).
struct RadialFn {
    std::function<cplx(double)> fn;
    double radius = std::numeric_limits<double>::infinity();

    cplx operator()(double r) const {
        if (r > radius * (1.0 + 1e-12))
            throw ValidationError("data", "radial data evaluated beyond its radius");
        return fn(r);
    }
};

struct DataPair {
    RadialFn f;  // u(T0, .)
    RadialFn g;  // d_t u(T0, .)
};

// Exact-section initial data of u^{T}_theta at time T0.
inline DataPair profile_initial_data(double p, double T_data, double theta, double T0) {
    if (!(T0 < T_data)) throw ValidationError("data", "profile data requires T0 < T");
    double s = 2.0 / (p - 1.0);
    cplx phase(std::cos(theta), std::sin(theta));
    cplx f0 = phase * kappa(p) * std::pow(T_data - T0, -s);
    cplx g0 = phase * kappa(p) * s * std::pow(T_data - T0, -s - 1.0);
    return {RadialFn{[f0](double) { return f0; }},
            RadialFn{[g0](double) { return g0; }}};
}

inline RadialFn gaussian_bump(double amplitude, double width, double phase = 0.0) {
    if (!(width > 0.0)) throw ValidationError("bump", "width must be positive");
    cplx amp = amplitude * cplx(std::cos(phase), std::sin(phase));
    return RadialFn{[amp, width](double r) { return amp * std::exp(-(r / width) * (r / width)); }};
}

inline DataPair add_bump(DataPair base, const RadialFn& bump) {
    auto f = base.f;
    double radius = std::min(base.f.radius, bump.radius);
    return {RadialFn{[f, bump](double r) { return f(r) + bump(r); }, radius}, base.g};
}

}  // namespace blowlab::profile
