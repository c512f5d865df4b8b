#pragma once

// Coordinate maps between the physical lightcone and similarity variables
//   tau = -log(T - t) + log(T - T0),   rho = r / (T - t),
// with psi(tau, rho) = (T - t)^{2/(p-1)} u(t, r). The first-order fields are
//   psi1 = psi,  psi2 = (d_tau + rho d_rho + 2/(p-1)) psi,
// so that u = (T-t)^{-2/(p-1)} psi1 and d_t u = (T-t)^{-2/(p-1)-1} psi2.

#include <cmath>

#include "blowlab/grid.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/state.hpp"

namespace blowlab::similarity {

using profile::DataPair;
using profile::RadialFn;
using profile::SimilarityFrame;

// Initial data (f, g) at t = T0 mapped to the similarity state at tau = 0:
//   phi1 = Re((T-T0)^{2/(p-1)} f((T-T0) rho)),  phi2 = Re((T-T0)^{(p+1)/(p-1)} g((T-T0) rho)),
// and nu1, nu2 the imaginary parts.
inline FieldState to_similarity(const SimilarityFrame& frame, const DataPair& data,
                                const grid::RadialGrid& g, double p) {
    double delta = frame.delta();
    if (data.f.radius < delta * (1.0 - 1e-12) || data.g.radius < delta * (1.0 - 1e-12))
        throw ValidationError("data", "radius too small for the lightcone section");
    double s = 2.0 / (p - 1.0);
    double cf = std::pow(delta, s);
    double cg = std::pow(delta, s + 1.0);
    FieldState st = FieldState::zeros(g.n, 0.0);
    for (int j = 0; j < g.n; ++j) {
        cplx fv = cf * data.f(delta * g.nodes[j]);
        cplx gv = cg * data.g(delta * g.nodes[j]);
        st.comp[0][j] = fv.real();
        st.comp[1][j] = gv.real();
        st.comp[2][j] = fv.imag();
        st.comp[3][j] = gv.imag();
    }
    return st;
}

// Similarity state back to the lightcone section at t = T - (T-T0) e^{-tau}.
inline ConeSection from_similarity(const SimilarityFrame& frame, const FieldState& st,
                                   const grid::RadialGrid& g, double p) {
    double lam = frame.delta() * std::exp(-st.tau);
    double s = 2.0 / (p - 1.0);
    ConeSection sec;
    sec.t = frame.T - lam;
    sec.radius = lam;
    sec.spectral = &g;
    sec.r.resize(g.n);
    sec.u.resize(g.n);
    sec.ut.resize(g.n);
    double cu = std::pow(lam, -s);
    double cut = std::pow(lam, -s - 1.0);
    for (int j = 0; j < g.n; ++j) {
        sec.r[j] = lam * g.nodes[j];
        sec.u[j] = cu * cplx(st.comp[0][j], st.comp[2][j]);
        sec.ut[j] = cut * cplx(st.comp[1][j], st.comp[3][j]);
    }
    return sec;
}

// Scaling operator for perturbation data v = (f~, g~) relative to the
// reference profile: U(T, v) = J(v)^T + Psi_0^T - Psi_0, where J stacks real
// and imaginary parts and the T-superscript applies the component-wise
// rescaling of the similarity transform.
inline FieldState scale_data(const DataPair& v, const SimilarityFrame& frame,
                             const grid::RadialGrid& g, double p) {
    double delta = frame.delta();
    if (v.f.radius < delta * (1.0 - 1e-12) || v.g.radius < delta * (1.0 - 1e-12))
        throw ValidationError("data", "radius too small for the lightcone section");
    if (!(frame.T0 < 1.0))
        throw ValidationError("frame", "scale_data normalizes against the reference time 1, needs T0 < 1");
    double s = 2.0 / (p - 1.0);
    double k = profile::kappa(p);
    double eta = delta / (1.0 - frame.T0);
    double corr1 = k * (std::pow(eta, s) - 1.0);
    double corr2 = s * k * (std::pow(eta, s + 1.0) - 1.0);
    double cf = std::pow(delta, s);
    double cg = std::pow(delta, s + 1.0);
    FieldState st = FieldState::zeros(g.n, 0.0);
    for (int j = 0; j < g.n; ++j) {
        cplx fv = cf * v.f(delta * g.nodes[j]);
        cplx gv = cg * v.g(delta * g.nodes[j]);
        st.comp[0][j] = fv.real() + corr1;
        st.comp[1][j] = gv.real() + corr2;
        st.comp[2][j] = fv.imag();
        st.comp[3][j] = gv.imag();
    }
    return st;
}

}  // namespace blowlab::similarity
