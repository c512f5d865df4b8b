#pragma once

// Time integration of the four-field similarity system
//
//   d_tau phi1 = phi2 - rho d_rho phi1 - (2/(p-1)) phi1
//   d_tau phi2 = d_rho^2 phi1 + (2/rho) d_rho phi1 - rho d_rho phi2
//                - ((p+1)/(p-1)) phi2 - Re W + phi1 |psi1|^{p-1}
//
// (and the nu analogues with Im W), where psi1 = phi1 + i nu1 and W applies
// the perturbation F at the physically rescaled arguments
//
//   W = (T-T0)^{2+s} e^{-(2+s) tau} F(T - (T-T0)e^{-tau}, (T-T0) rho e^{-tau},
//         L^{-s} psi1, L^{-(1+s)} (psi2 - s psi1), L^{-(1+s)} d_rho psi1),
//
// with s = 2/(p-1) and L = (T-T0) e^{-tau}. The boundary rho = 1 is
// characteristic (the outgoing family leaves the cone, the ingoing family is
// tangent), so the collocation operator is applied one-sidedly with no
// boundary condition. At rho = 0 the singular transport term is replaced by
// its even-parity limit 2 d_rho^2.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/expr.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/state.hpp"

namespace blowlab::evolve {

using profile::SimilarityFrame;

struct EquationSpec {
    double p = 3.0;
    std::optional<expr::PerturbationExpr> perturbation;  // nullopt: unperturbed
    SimilarityFrame frame{};

    // The perturbative regime needs p > 3 (a growth exponent q in [1, p) with
    // the scaling gap must exist); unperturbed diagnostics run down to p > 1.
    void validate() const {
        if (perturbation && !(p > 3.0))
            throw ValidationError("p", "must be > 3 when a perturbation is active");
        if (!(p > 1.0)) throw ValidationError("p", "must be > 1");
    }
};

inline double default_dtau(int n) { return 2.5 / (static_cast<double>(n) * n); }

namespace detail {

struct Workspace {
    std::vector<double> dphi1, dphi2, d2phi1, dnu1, dnu2, d2nu1;
};

}  // namespace detail

inline void rhs(const FieldState& st, const EquationSpec& spec, const grid::RadialGrid& g,
                FieldState& out, detail::Workspace& ws) {
    const double p = spec.p;
    const double s = 2.0 / (p - 1.0);
    const double sig = (p + 1.0) / (p - 1.0);
    const int n = g.n;

    g.deriv_even1(st.comp[0], ws.dphi1);
    g.deriv_even1(st.comp[1], ws.dphi2);
    g.deriv_even2(st.comp[0], ws.d2phi1);
    g.deriv_even1(st.comp[2], ws.dnu1);
    g.deriv_even1(st.comp[3], ws.dnu2);
    g.deriv_even2(st.comp[2], ws.d2nu1);

    out.tau = st.tau;
    for (auto& c : out.comp) c.resize(n);

    const bool perturbed = spec.perturbation.has_value();
    double lam = 0, wpref = 0, tphys = 0, cu = 0, cv = 0;
    if (perturbed) {
        lam = spec.frame.delta() * std::exp(-st.tau);
        wpref = std::pow(lam, 2.0 + s);
        tphys = spec.frame.T - lam;
        cu = std::pow(lam, -s);
        cv = std::pow(lam, -(1.0 + s));
    }

    for (int j = 0; j < n; ++j) {
        double rho = g.nodes[j];
        double phi1 = st.comp[0][j], phi2 = st.comp[1][j];
        double nu1 = st.comp[2][j], nu2 = st.comp[3][j];

        double amp2 = phi1 * phi1 + nu1 * nu1;
        double amp = std::pow(amp2, 0.5 * (p - 1.0));  // |psi1|^{p-1}

        double lap_phi = ws.d2phi1[j] + (j == 0 ? 2.0 * ws.d2phi1[j] : 2.0 * ws.dphi1[j] / rho);
        double lap_nu = ws.d2nu1[j] + (j == 0 ? 2.0 * ws.d2nu1[j] : 2.0 * ws.dnu1[j] / rho);

        double wre = 0.0, wim = 0.0;
        if (perturbed) {
            expr::Point pt;
            pt.t = tphys;
            pt.r = lam * rho;
            pt.u = cu * cplx(phi1, nu1);
            pt.v = cv * cplx(phi2 - s * phi1, nu2 - s * nu1);
            pt.w = cv * cplx(ws.dphi1[j], ws.dnu1[j]);
            cplx W = wpref * spec.perturbation->evaluate(pt);
            if (!std::isfinite(W.real()) || !std::isfinite(W.imag()))
                throw ScientificError("perturbation evaluated to a non-finite value");
            wre = W.real();
            wim = W.imag();
        }

        out.comp[0][j] = phi2 - rho * ws.dphi1[j] - s * phi1;
        out.comp[1][j] = lap_phi - rho * ws.dphi2[j] - sig * phi2 - wre + phi1 * amp;
        out.comp[2][j] = nu2 - rho * ws.dnu1[j] - s * nu1;
        out.comp[3][j] = lap_nu - rho * ws.dnu2[j] - sig * nu2 - wim + nu1 * amp;
    }
}

// Classical four-stage Runge-Kutta step; deterministic, no adaptivity.
class Stepper {
  public:
    Stepper(const EquationSpec& spec, const grid::RadialGrid& g) : spec_(spec), grid_(g) {}

    void step(FieldState& st, double dtau) {
        if (!(dtau > 0.0)) throw ValidationError("dtau", "must be positive");
        const int n = grid_.n;

        rhs(st, spec_, grid_, k1_, ws_);
        stage(st, k1_, 0.5 * dtau);
        rhs(tmp_, spec_, grid_, k2_, ws_);
        stage(st, k2_, 0.5 * dtau);
        rhs(tmp_, spec_, grid_, k3_, ws_);
        stage(st, k3_, dtau);
        rhs(tmp_, spec_, grid_, k4_, ws_);

        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < n; ++j)
                st.comp[c][j] += dtau / 6.0 *
                                 (k1_.comp[c][j] + 2.0 * k2_.comp[c][j] + 2.0 * k3_.comp[c][j] +
                                  k4_.comp[c][j]);
        st.tau += dtau;
        if (!st.finite() || st.max_abs() > 1e10)
            throw ScientificError("solver instability: state norm exceeded the trust region");
    }

  private:
    void stage(const FieldState& base, const FieldState& k, double h) {
        tmp_ = base;
        axpy(tmp_, h, k);
        tmp_.tau = base.tau + h;
    }

    const EquationSpec& spec_;
    const grid::RadialGrid& grid_;
    FieldState k1_, k2_, k3_, k4_, tmp_;
    detail::Workspace ws_;
};

// One observer record along a trajectory.
struct Sample {
    double tau = 0;
    double sup_dev = 0;          // sup-node distance to the reference state
    double theta = 0;            // ball-averaged phase (0 when degenerate)
    bool theta_valid = false;
    double coeff_r = 0;          // Gram-corrected coefficients of the
    double coeff_g = 0;          // symmetry modes at the estimated phase
    double remainder_norm = 0;   // H2xH1-type norm of the projected remainder
    double w_norm = 0;           // L2(rho^2) norm of the perturbation term W
    double n2 = 0, n1 = 0, n0 = 0;  // weighted lightcone norms of the section
};

struct Trajectory {
    std::vector<Sample> samples;
    double tau_final = 0;
    bool completed = false;
    std::string stop_reason;  // "completed" | "instability"
    FieldState final_state;   // last stable state
};

struct EvolveOptions {
    double tau_max = 10.0;
    double dtau = 0.0;        // 0: default 2.5 / n^2
    double sample_dtau = 0.05;
    // Norm observers need the frame/profile context; wired by the caller.
    std::function<Sample(const FieldState&)> observe;
};

inline Trajectory evolve(FieldState state, const EquationSpec& spec, const grid::RadialGrid& g,
                         const EvolveOptions& opts) {
    if (!(opts.tau_max > 0.0)) throw ValidationError("tau_max", "must be positive");
    double dtau = opts.dtau > 0.0 ? opts.dtau : default_dtau(g.n);
    long steps = static_cast<long>(std::ceil(opts.tau_max / dtau - 1e-12));
    long stride = std::max<long>(1, static_cast<long>(std::round(opts.sample_dtau / dtau)));

    Stepper stepper(spec, g);
    Trajectory traj;
    auto observe = [&](const FieldState& st) {
        if (opts.observe) {
            traj.samples.push_back(opts.observe(st));
        } else {
            Sample s;
            s.tau = st.tau;
            traj.samples.push_back(s);
        }
    };
    observe(state);
    traj.final_state = state;
    try {
        for (long k = 1; k <= steps; ++k) {
            double h = std::min(dtau, opts.tau_max - state.tau);
            if (h <= 0) break;
            stepper.step(state, h);
            traj.final_state = state;
            if (k % stride == 0 || k == steps) observe(state);
        }
        traj.completed = true;
        traj.stop_reason = "completed";
    } catch (const ScientificError& e) {
        traj.completed = false;
        traj.stop_reason = e.what();
    }
    traj.tau_final = traj.samples.empty() ? 0.0 : traj.samples.back().tau;
    return traj;
}

// Magnitude diagnostic of the perturbation term along a state: the discrete
// L2(rho^2) norm of W over the grid.
inline double w_term_norm(const FieldState& st, const EquationSpec& spec,
                          const grid::RadialGrid& g) {
    if (!spec.perturbation) return 0.0;
    const double p = spec.p;
    const double s = 2.0 / (p - 1.0);
    double lam = spec.frame.delta() * std::exp(-st.tau);
    double wpref = std::pow(lam, 2.0 + s);
    double tphys = spec.frame.T - lam;
    double cu = std::pow(lam, -s);
    double cv = std::pow(lam, -(1.0 + s));
    auto dphi1 = g.deriv_even1(st.comp[0]);
    auto dnu1 = g.deriv_even1(st.comp[2]);
    std::vector<double> w2(g.n);
    for (int j = 0; j < g.n; ++j) {
        expr::Point pt;
        pt.t = tphys;
        pt.r = lam * g.nodes[j];
        pt.u = cu * cplx(st.comp[0][j], st.comp[2][j]);
        pt.v = cv * cplx(st.comp[1][j] - s * st.comp[0][j], st.comp[3][j] - s * st.comp[2][j]);
        pt.w = cv * cplx(dphi1[j], dnu1[j]);
        cplx W = wpref * spec.perturbation->evaluate(pt);
        w2[j] = std::norm(W);
    }
    return std::sqrt(g.integrate_rho2(w2));
}

}  // namespace blowlab::evolve
