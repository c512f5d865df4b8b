#include <cmath>

#include "blowlab/evolve.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/modulation.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/rng.hpp"
#include "blowlab/similarity.hpp"
#include "doctest.h"

using namespace blowlab;
using evolve::EquationSpec;
using profile::SimilarityFrame;

TEST_CASE("project_modes is exact on the profile and its mode span") {
    auto g = grid::RadialGrid::make(32);
    double p = 5, th = 0.25;
    FieldState st = FieldState::constant(g.n, profile::psi_theta(p, th));
    auto proj = modulation::project_modes(st, g, p, th);
    CHECK(std::abs(proj.coeff_r) < 1e-13);
    CHECK(std::abs(proj.coeff_g) < 1e-13);
    CHECK(proj.remainder_norm < 1e-12);

    // add 0.01 g_theta: Gram-corrected coefficients are exactly (0, 0.01)
    auto gm = profile::mode_g(p, th);
    for (int c = 0; c < 4; ++c)
        for (int j = 0; j < g.n; ++j) st.comp[c][j] += 0.01 * gm[c];
    proj = modulation::project_modes(st, g, p, th);
    CHECK(proj.coeff_g == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(std::abs(proj.coeff_r) < 1e-14);
    CHECK(proj.remainder_norm < 1e-12);
}

TEST_CASE("reconstruct-and-project is the identity on coefficient pairs") {
    auto g = grid::RadialGrid::make(24);
    Rng rng(31);
    for (int k = 0; k < 25; ++k) {
        double p = rng.uniform(3.2, 9.0), th = rng.uniform(-0.6, 0.6);
        double cr = rng.uniform(-0.5, 0.5), cg = rng.uniform(-0.5, 0.5);
        FieldState st = FieldState::constant(g.n, profile::psi_theta(p, th));
        auto r = profile::mode_r(p, th);
        auto gm = profile::mode_g(p, th);
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < g.n; ++j) st.comp[c][j] += cr * r[c] + cg * gm[c];
        auto proj = modulation::project_modes(st, g, p, th);
        CHECK(proj.coeff_r == doctest::Approx(cr).epsilon(1e-12));
        CHECK(proj.coeff_g == doctest::Approx(cg).epsilon(1e-12));
        CHECK(proj.remainder_norm < 1e-11);
    }
}

TEST_CASE("generic bumps leave a remainder and O(eps) coefficients") {
    auto g = grid::RadialGrid::make(32);
    double p = 3, eps = 1e-3;
    FieldState st = FieldState::constant(g.n, profile::psi_theta(p, 0.0));
    for (int j = 0; j < g.n; ++j)
        st.comp[0][j] += eps * std::exp(-4.0 * g.nodes[j] * g.nodes[j]);
    auto proj = modulation::project_modes(st, g, p, 0.0);
    CHECK(proj.remainder_norm > 1e-5);
    CHECK(std::abs(proj.coeff_r) < 10 * eps);
    CHECK(std::abs(proj.coeff_g) < 10 * eps);
    CHECK(std::abs(proj.coeff_g) > 1e-6);  // the bump overlaps the modes
}

TEST_CASE("extract_theta") {
    auto g = grid::RadialGrid::make(24);
    for (double th : {0.3, -2.0, 1.4}) {
        FieldState st = FieldState::constant(g.n, profile::psi_theta(5, th));
        CHECK(modulation::extract_theta(st, g) == doctest::Approx(th).epsilon(1e-12));
    }
    // branch convention: theta = pi maps to +pi
    FieldState st_pi = FieldState::constant(g.n, profile::psi_theta(5, M_PI));
    CHECK(modulation::extract_theta(st_pi, g) == doctest::Approx(M_PI).epsilon(1e-12));

    FieldState zero = FieldState::zeros(g.n);
    CHECK_THROWS_AS(modulation::extract_theta(zero, g), ScientificError);
}

TEST_CASE("extract_theta is equivariant under block rotation") {
    auto g = grid::RadialGrid::make(24);
    Rng rng(4);
    for (int k = 0; k < 10; ++k) {
        double p = 5;
        FieldState st = FieldState::constant(g.n, profile::psi_theta(p, 0.2));
        for (int j = 0; j < g.n; ++j) st.comp[0][j] += 0.05 * std::cos(3 * g.nodes[j]);
        double alpha = rng.uniform(-1.0, 1.0);
        double th0 = modulation::extract_theta(st, g);
        FieldState rot = st;
        for (int j = 0; j < g.n; ++j) {
            double c = std::cos(alpha), s = std::sin(alpha);
            double a0 = st.comp[0][j], a1 = st.comp[1][j];
            double b0 = st.comp[2][j], b1 = st.comp[3][j];
            rot.comp[0][j] = c * a0 - s * b0;
            rot.comp[2][j] = s * a0 + c * b0;
            rot.comp[1][j] = c * a1 - s * b1;
            rot.comp[3][j] = s * a1 + c * b1;
        }
        double th1 = modulation::extract_theta(rot, g);
        double diff = std::remainder(th1 - th0 - alpha, 2 * M_PI);
        CHECK(std::abs(diff) < 1e-12);
    }
}

TEST_CASE("fit_decay on synthetic series") {
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k <= 100; ++k) {
        double tau = 0.1 * k;
        series.push_back({tau, 5.0 * std::exp(-0.3 * tau)});
    }
    auto fit = modulation::fit_decay(series, 0.0, 10.0);
    CHECK(fit.omega == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));

    std::vector<std::pair<double, double>> flat;
    for (int k = 0; k <= 10; ++k) flat.push_back({0.5 * k, 2.0});
    auto f2 = modulation::fit_decay(flat, 0.0, 5.0);
    CHECK(std::abs(f2.omega) < 1e-14);

    // scale invariance of the rate
    std::vector<std::pair<double, double>> scaled = series;
    for (auto& s : scaled) s.second *= 7.5;
    auto f3 = modulation::fit_decay(scaled, 0.0, 10.0);
    CHECK(f3.omega == doctest::Approx(fit.omega).epsilon(1e-12));
    CHECK(f3.intercept - fit.intercept == doctest::Approx(std::log(7.5)).epsilon(1e-10));

    CHECK_THROWS_AS(modulation::fit_decay(series, 9.9, 10.0), ValidationError);  // too few
    std::vector<std::pair<double, double>> bad = {{0, 1}, {1, -1}, {2, 1}, {3, 1}, {4, 1}};
    CHECK_THROWS_AS(modulation::fit_decay(bad, 0.0, 4.0), ValidationError);
}

TEST_CASE("lightcone_norms on exact and shifted profiles") {
    auto g = grid::RadialGrid::make(64);
    double p = 3, T = 1.0, t = 0.75;
    profile::BlowupProfile prof{T, 0.0, p};
    SimilarityFrame frame(T, t);  // section exactly on the cone at time t

    // exact profile: all three vanish
    auto data = profile::profile_initial_data(p, T, 0.0, t);
    FieldState st = similarity::to_similarity(frame, data, g, p);
    auto sec = similarity::from_similarity(frame, st, g, p);
    auto n = modulation::lightcone_norms(sec, prof, t);
    CHECK(n.n2 < 1e-10);
    CHECK(n.n1 < 1e-10);
    CHECK(n.n0 < 1e-10);

    // constant offset c = 0.1: n0 = |c|/sqrt(3) * (T-t)^{2/(p-1)}
    for (auto& u : sec.u) u += 0.1;
    auto n2 = modulation::lightcone_norms(sec, prof, t);
    CHECK(n2.n0 == doctest::Approx(0.1 / std::sqrt(3.0) * 0.25).epsilon(2e-4));
    CHECK(n2.n1 < 1e-10);

    // zero section against the profile: the weight exponents cancel exactly
    // and n0 reduces to the profile norm constant kappa_p / sqrt(3)
    for (auto& u : sec.u) u = 0.0;
    for (auto& ut : sec.ut) ut = 0.0;
    auto n3 = modulation::lightcone_norms(sec, prof, t);
    CHECK(n3.n0 == doctest::Approx(profile::kappa(p) / std::sqrt(3.0)).epsilon(2e-4));

    CHECK_THROWS_AS(modulation::lightcone_norms(sec, prof, 1.0), ValidationError);
}

TEST_CASE("shooting recovers the blowup time of exact profile data") {
    auto g = grid::RadialGrid::make(48);
    double p = 3;
    EquationSpec spec{p, std::nullopt, SimilarityFrame(1.0, 0.5)};

    modulation::ShootOptions opts;
    opts.tau_horizon = 5.0;
    opts.tol = 2e-5;

    for (double T_true : {1.0, 1.03}) {
        auto data = profile::profile_initial_data(p, T_true, 0.0, 0.5);
        auto res = modulation::shoot_T(data, spec, g, 0.9, 1.1, opts);
        CHECK(res.converged);
        CHECK(res.T_star == doctest::Approx(T_true).epsilon(1e-4));
        CHECK(res.bracket_lo < res.T_star + 1e-12);
        CHECK(res.T_star < res.bracket_hi + 1e-12);
    }
}

TEST_CASE("shooting reports a missing sign change") {
    auto g = grid::RadialGrid::make(32);
    double p = 3;
    EquationSpec spec{p, std::nullopt, SimilarityFrame(1.0, 0.5)};
    auto data = profile::profile_initial_data(p, 1.0, 0.0, 0.5);
    modulation::ShootOptions opts;
    opts.tau_horizon = 4.0;
    // bracket entirely above the true time: both endpoints blow up early
    CHECK_THROWS_AS(modulation::shoot_T(data, spec, g, 1.05, 1.1, opts), ScientificError);
}

TEST_CASE("shooting iterates are monotone across the final bracket") {
    auto g = grid::RadialGrid::make(48);
    double p = 3;
    EquationSpec spec{p, std::nullopt, SimilarityFrame(1.0, 0.5)};
    auto data = profile::profile_initial_data(p, 1.01, 0.0, 0.5);
    modulation::ShootOptions opts;
    opts.tau_horizon = 5.0;
    opts.tol = 1e-5;
    auto res = modulation::shoot_T(data, spec, g, 0.9, 1.1, opts);
    REQUIRE(res.converged);
    // coefficient vs T must be increasing across the final (tight) bracket;
    // early endpoint evaluations may be horizon-truncated and do not compare
    int n = static_cast<int>(res.iterates.size());
    REQUIRE(n >= 5);
    std::vector<std::pair<double, double>> last(res.iterates.end() - 5, res.iterates.end());
    std::sort(last.begin(), last.end());
    for (int i = 0; i + 1 < 5; ++i) CHECK(last[i].second <= last[i + 1].second + 1e-12);
}
