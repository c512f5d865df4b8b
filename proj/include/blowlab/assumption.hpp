#pragma once

// Sampling-based check of the structural bounds on a perturbation
// F = A + B v + C w:
//
//   estBC:       |B| + |C| <= M (1 + |u|)     and Lipschitz in u
//   estimateV1:  |A| <= M (1 + |u|^q)         and |A(u1)-A(u2)| <= M |u1|u1|^{q-1} - u2|u2|^{q-1}|
//   estderF:     |d_r F| <= M (1 + |u|^q + (1+|u|)(|v|+|w|))
//                |d_x F| + |d_y F| <= M (1 + |u|^{q-1} + |v| + |w|)
//   estLipF:     Lipschitz versions of the derivative bounds
//
// Passing a finite sample is evidence on the sampled box, not a proof: the
// bounds quantify over unbounded complex arguments. The report records every
// violated instance. For the radial derivative two bound variants exist in
// circulation; violations are flagged against the weaker one and exceedances
// of the stricter form are counted separately.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/expr.hpp"
#include "blowlab/rng.hpp"

namespace blowlab::assumption {

using cplx = std::complex<double>;
using expr::PerturbationExpr;
using expr::Point;
using expr::VarId;

struct ComplexBox {
    double re_lo = -1.0, re_hi = 1.0;
    double im_lo = -1.0, im_hi = 1.0;
};

struct SampleBox {
    double t_lo = 0.95, t_hi = 1.05;
    double r_lo = 0.0, r_hi = 0.3;
    ComplexBox u, v, w;

    void validate() const {
        if (!(t_lo <= t_hi) || !(r_lo <= r_hi)) throw ValidationError("box", "empty t or r range");
        if (!(r_lo >= 0.0)) throw ValidationError("box", "r must be nonnegative");
        auto ok = [](const ComplexBox& b) { return b.re_lo <= b.re_hi && b.im_lo <= b.im_hi; };
        if (!ok(u) || !ok(v) || !ok(w)) throw ValidationError("box", "empty complex range");
    }
};

struct Violation {
    std::string inequality;  // estBC | estimateV1 | estderF | estLipF
    Point point;
    Point point2;            // second sample for Lipschitz forms
    bool pair = false;
    double lhs = 0;
    double rhs = 0;
    std::string detail;
};

struct AssumptionReport {
    double M = 0;
    double q = 0;
    double p = 0;
    std::uint64_t seed = 0;
    int samples_checked = 0;
    std::vector<Violation> violations;
    // informative only: strict-form radial-derivative bound exceedances and
    // the largest observed lhs/rhs ratio per family (minimal M that would pass)
    int strict_derF_exceedances = 0;
    double max_ratio_estBC = 0;
    double max_ratio_estimateV1 = 0;
    double max_ratio_estderF = 0;
    double max_ratio_estLipF = 0;

    bool passed() const { return violations.empty(); }
};

namespace detail {

inline cplx sample_cplx(Rng& rng, const ComplexBox& b) {
    return {rng.uniform(b.re_lo, b.re_hi), rng.uniform(b.im_lo, b.im_hi)};
}

inline Point sample_point(Rng& rng, const SampleBox& box) {
    Point p;
    p.t = rng.uniform(box.t_lo, box.t_hi);
    p.r = rng.uniform(box.r_lo, box.r_hi);
    p.u = sample_cplx(rng, box.u);
    p.v = sample_cplx(rng, box.v);
    p.w = sample_cplx(rng, box.w);
    return p;
}

// Central difference in r with a one-sided fallback at the r >= 0 boundary.
inline cplx d_r(const PerturbationExpr& f, Point p, double rel_step = 1e-5) {
    double h = rel_step * std::max(1.0, std::abs(p.r));
    Point a = p, b = p;
    if (p.r >= h) {
        a.r = p.r + h;
        b.r = p.r - h;
        return (f.evaluate(a) - f.evaluate(b)) / (2.0 * h);
    }
    a.r = p.r + h;
    b.r = p.r + 2.0 * h;
    return (-3.0 * f.evaluate(p) + 4.0 * f.evaluate(a) - f.evaluate(b)) / (2.0 * h);
}

inline cplx d_x(const PerturbationExpr& f, Point p, double rel_step = 1e-5) {
    double h = rel_step * std::max(1.0, std::abs(p.u));
    Point a = p, b = p;
    a.u += h;
    b.u -= h;
    return (f.evaluate(a) - f.evaluate(b)) / (2.0 * h);
}

inline cplx d_y(const PerturbationExpr& f, Point p, double rel_step = 1e-5) {
    double h = rel_step * std::max(1.0, std::abs(p.u));
    Point a = p, b = p;
    a.u += cplx(0.0, h);
    b.u -= cplx(0.0, h);
    return (f.evaluate(a) - f.evaluate(b)) / (2.0 * h);
}

inline double abs_pow(cplx u, double e) { return std::pow(std::abs(u), e); }

// |u|u|^{e-1}| pairs appear on the right-hand sides of the Lipschitz bounds.
inline cplx signed_pow(cplx u, double e) {
    double a = std::abs(u);
    if (a == 0.0) return {0.0, 0.0};
    return u * std::pow(a, e - 1.0);
}

}  // namespace detail

inline AssumptionReport validate_assumption(const PerturbationExpr& f, double p, double q,
                                            double M, const SampleBox& box, int n_samples,
                                            std::uint64_t seed) {
    if (!(q >= 1.0)) throw ValidationError("q", "must satisfy q >= 1");
    if (!(q < p)) throw ValidationError("q", "must satisfy q < p");
    if (!(M > 0.0)) throw ValidationError("M", "must be positive");
    if (n_samples <= 0) throw ValidationError("n_samples", "must be positive");
    box.validate();

    auto abc = expr::decompose_abc(f);
    Rng rng(seed);
    AssumptionReport report;
    report.M = M;
    report.q = q;
    report.p = p;
    report.seed = seed;

    // Numerical slack for the finite-difference derivative estimates.
    const double fd_slack = 1e-6;

    auto record = [&](const std::string& id, const Point& pt, const Point& pt2, bool pair,
                      double lhs, double rhs, double& max_ratio, const std::string& detail) {
        if (rhs > 0.0) max_ratio = std::max(max_ratio, lhs / rhs);
        if (lhs > rhs * (1.0 + 1e-12) + fd_slack) {
            Violation v;
            v.inequality = id;
            v.point = pt;
            v.point2 = pt2;
            v.pair = pair;
            v.lhs = lhs;
            v.rhs = rhs;
            v.detail = detail;
            report.violations.push_back(std::move(v));
        }
    };

    for (int k = 0; k < n_samples; ++k) {
        Point p1 = detail::sample_point(rng, box);
        Point p2 = detail::sample_point(rng, box);
        p2.t = p1.t;  // Lipschitz bounds compare at common (t, r)
        p2.r = p1.r;
        try {
            cplx A1 = abc.A.evaluate(p1), A2 = abc.A.evaluate(p2);
            cplx B1 = abc.B.evaluate(p1), B2 = abc.B.evaluate(p2);
            cplx C1 = abc.C.evaluate(p1), C2 = abc.C.evaluate(p2);

            // estBC
            record("estBC", p1, {}, false, std::abs(B1) + std::abs(C1),
                   M * (1.0 + std::abs(p1.u)), report.max_ratio_estBC, "|B|+|C|");
            record("estBC", p1, p2, true,
                   std::abs(B1 - B2) + std::abs(C1 - C2), M * std::abs(p1.u - p2.u),
                   report.max_ratio_estBC, "|B(u1)-B(u2)|+|C(u1)-C(u2)|");

            // estimateV1
            record("estimateV1", p1, {}, false, std::abs(A1),
                   M * (1.0 + detail::abs_pow(p1.u, q)), report.max_ratio_estimateV1, "|A|");
            record("estimateV1", p1, p2, true, std::abs(A1 - A2),
                   M * std::abs(detail::signed_pow(p1.u, q) - detail::signed_pow(p2.u, q)),
                   report.max_ratio_estimateV1, "|A(u1)-A(u2)|");

            // estderF, radial derivative: weak form drives violations, the
            // strict form is counted separately
            double drF1 = std::abs(detail::d_r(f, p1));
            double weak = M * (1.0 + detail::abs_pow(p1.u, q) +
                               (1.0 + std::abs(p1.u)) * (std::abs(p1.v) + std::abs(p1.w)));
            double strict = M * (1.0 + detail::abs_pow(p1.u, q) + std::abs(p1.v) + std::abs(p1.w));
            record("estderF", p1, {}, false, drF1, weak, report.max_ratio_estderF, "|d_r F|");
            if (drF1 > strict * (1.0 + 1e-12) + fd_slack) ++report.strict_derF_exceedances;

            // estderF, Wirtinger-style derivatives in u = x + i y
            double dxy1 = std::abs(detail::d_x(f, p1)) + std::abs(detail::d_y(f, p1));
            record("estderF", p1, {}, false, dxy1,
                   M * (1.0 + detail::abs_pow(p1.u, q - 1.0) + std::abs(p1.v) + std::abs(p1.w)),
                   report.max_ratio_estderF, "|d_x F|+|d_y F|");

            // estLipF
            double drF2 = std::abs(detail::d_r(f, p1) - detail::d_r(f, p2));
            double rhs_r =
                M * (std::abs(detail::signed_pow(p1.u, q) - detail::signed_pow(p2.u, q)) +
                     std::abs(p1.v - p2.v) + std::abs(p1.w - p2.w) +
                     std::abs(p1.u * p1.v - p2.u * p2.v) + std::abs(p1.u * p1.w - p2.u * p2.w));
            record("estLipF", p1, p2, true, drF2, rhs_r, report.max_ratio_estLipF,
                   "|d_r F(1) - d_r F(2)|");

            double rhs_xy =
                M * (std::abs(detail::signed_pow(p1.u, q - 1.0) -
                              detail::signed_pow(p2.u, q - 1.0)) +
                     std::abs(p1.v - p2.v) + std::abs(p1.w - p2.w));
            record("estLipF", p1, p2, true,
                   std::abs(detail::d_x(f, p1) - detail::d_x(f, p2)), rhs_xy,
                   report.max_ratio_estLipF, "|d_x F(1) - d_x F(2)|");
            record("estLipF", p1, p2, true,
                   std::abs(detail::d_y(f, p1) - detail::d_y(f, p2)), rhs_xy,
                   report.max_ratio_estLipF, "|d_y F(1) - d_y F(2)|");

            ++report.samples_checked;
        } catch (const EvalError&) {
            // singular sample; skip (still counted toward the sample budget)
        }
    }
    return report;
}

}  // namespace blowlab::assumption
