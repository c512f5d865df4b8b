#include <cmath>
#include <complex>

#include "blowlab/gamma.hpp"
#include "blowlab/hyp2f1.hpp"
#include "blowlab/profile.hpp"
#include "blowlab/rng.hpp"
#include "blowlab/spectrum.hpp"
#include "doctest.h"

using namespace blowlab;
using namespace blowlab::specfun;

TEST_CASE("gamma: classical values") {
    CHECK(std::abs(gamma({1, 0}) - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(gamma({0.5, 0}) - cplx(std::sqrt(M_PI), 0)) < 1e-12 * std::sqrt(M_PI));
    CHECK(std::abs(gamma({5, 0}) - cplx(24, 0)) < 1e-12 * 24);
    CHECK_THROWS_AS(gamma({-1, 0}), SpecialFunctionError);
    CHECK_THROWS_AS(gamma({0, 0}), SpecialFunctionError);
}

TEST_CASE("gamma: recurrence and reflection on random samples") {
    Rng rng(123);
    for (int k = 0; k < 100; ++k) {
        cplx z(rng.uniform(-10, 10), rng.uniform(-10, 10));
        if (std::abs(z.imag()) < 0.05) z += cplx(0, 0.1);
        // reflection: Gamma(z) Gamma(1-z) sin(pi z) / pi = 1
        cplx lhs = gamma(z) * gamma(1.0 - z) * std::sin(M_PI * z) / M_PI;
        CHECK(std::abs(lhs - 1.0) < 1e-10);
        // recurrence: Gamma(z+1) = z Gamma(z)
        cplx rec = gamma(z + 1.0) / (z * gamma(z));
        CHECK(std::abs(rec - 1.0) < 1e-11);
    }
}

TEST_CASE("rgamma vanishes at the non-positive integers") {
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(rgamma({-static_cast<double>(k), 0})) < 1e-13);
    CHECK(std::abs(rgamma({2, 0}) - cplx(1, 0)) < 2e-15);  // 1/Gamma(2) = 1
}

TEST_CASE("2F1: trivial and closed-form values") {
    CHECK(std::abs(hyp2f1(0.3, 1.7, 0.5, {0, 0}) - 1.0) == 0.0);
    // 2F1(1,1;2;z) = -log(1-z)/z
    cplx v = hyp2f1(1, 1, 2, {0.5, 0});
    CHECK(std::abs(v - 2.0 * std::log(2.0)) < 1e-10);
    // terminating series: 2F1(-1,b;c;z) = 1 - (b/c) z
    cplx t = hyp2f1(-1, 3, 2, {0.4, 0});
    CHECK(std::abs(t - (1.0 - 1.5 * 0.4)) < 1e-14);
    CHECK_THROWS_AS(hyp2f1(1, 1, -2, {0.3, 0}), SpecialFunctionError);
}

TEST_CASE("2F1: binomial identity across the evaluation branches") {
    // 2F1(a, b; b; z) = (1-z)^{-a} for any b (direct, connection, Pfaff paths)
    for (double z : {-0.8, 0.05, 0.3, 0.55, 0.8, 0.97, 0.999}) {
        cplx got = hyp2f1(0.37, 1.21, 1.21, {z, 0});
        cplx want = std::pow(cplx(1.0 - z, 0), -0.37);
        CHECK(std::abs(got - want) < 1e-12 * std::abs(want));
    }
}

TEST_CASE("2F1: Euler transformation consistency on random samples") {
    Rng rng(5150);
    for (int k = 0; k < 60; ++k) {
        cplx a(rng.uniform(-1.5, 2.0), 0), b(rng.uniform(-1.5, 2.0), 0);
        cplx c(rng.uniform(0.5, 3.0), 0);
        double z = rng.uniform(0.02, 0.93);
        cplx lhs = hyp2f1(a, b, c, {z, 0});
        cplx rhs = std::pow(cplx(1.0 - z, 0), c - a - b) * hyp2f1(c - a, c - b, c, {z, 0});
        CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("reduce_to_hypergeometric reproduces the closed-form parameters") {
    // For mu = c_p: a = (lambda-1)/2, b = (lambda + 4/(p-1))/2, c = 1/2.
    double p = 3, mu = profile::c_p(3);
    auto prm = reduce_to_hypergeometric(p, mu, {0, 0});
    CHECK(std::abs(prm.a - cplx(-0.5, 0)) < 1e-14);
    CHECK(std::abs(prm.b - cplx(1.0, 0)) < 1e-14);
    CHECK(std::abs(prm.c - cplx(0.5, 0)) < 1e-14);
    auto prm1 = reduce_to_hypergeometric(p, mu, {1, 0});
    CHECK(std::abs(prm1.a - cplx(0.0, 0)) < 1e-14);
    CHECK(std::abs(prm1.b - cplx(1.5, 0)) < 1e-14);

    Rng rng(42);
    for (int k = 0; k < 20; ++k) {
        double pp = rng.uniform(3.2, 9.0);
        cplx lam(rng.uniform(-0.3, 2.5), rng.uniform(-1.5, 1.5));
        auto q = reduce_to_hypergeometric(pp, profile::c_p(pp), lam);
        cplx want_ab = 0.25 * (lam - 1.0) * (lam + 4.0 / (pp - 1.0));
        CHECK(std::abs(q.a * q.b - want_ab) < 1e-12 * (1.0 + std::abs(want_ab)));
    }
}

TEST_CASE("connection coefficient zeros sit on the gamma poles") {
    double p = 3, mu = profile::c_p(3);
    CHECK(std::abs(connection_c1(p, mu, {0, 0})) < 1e-12);
    CHECK(std::abs(connection_c1(p, mu, {1, 0})) > 0.1);

    // At p = 3 the numerator Gamma(lambda + 2/(p-1)) hits its own pole at
    // lambda = -2 (the limit of c1 there is 1/2, not 0); the degenerate case
    // is reported distinctly. For p > 3 the zeros at lambda = -2k are honest.
    CHECK_THROWS_AS(connection_c1(3.0, mu, {-2, 0}), SpecialFunctionError);
    CHECK(std::abs(connection_c1(5.0, profile::c_p(5.0), {-2, 0})) < 1e-12);
    CHECK(std::abs(connection_c1(7.0, profile::c_p(7.0), {-4, 0})) < 1e-12);

    Rng rng(777);
    for (int hits = 0; hits < 50; ++hits) {
        double pp = rng.uniform(3.1, 11.0);
        int k = static_cast<int>(rng.uniform(0.0, 4.0));
        cplx lam(-2.0 * k, 0.0);  // a + 1 - c = lambda/2 = -k
        CHECK(std::abs(connection_c1(pp, profile::c_p(pp), lam)) < 1e-12);
    }
}

TEST_CASE("eigenvalue scan finds exactly {0} and {1} for the two equations") {
    for (double p : {3.0, 5.0, 7.0}) {
        double s = 2.0 / (p - 1.0);
        Region reg{-s + 0.05, 3.0, -2.0, 2.0};
        auto nu = eigenvalue_scan(p, mu_nu(p), reg, 0.07);
        REQUIRE(nu.eigenvalues.size() == 1);
        CHECK(std::abs(nu.eigenvalues[0] - cplx(0, 0)) < 1e-8);
        CHECK(nu.records[0].abs_c1 < 1e-10);
        CHECK(nu.records[0].ode_residual < 1e-5);

        auto phi = eigenvalue_scan(p, mu_phi(p), reg, 0.07);
        REQUIRE(phi.eigenvalues.size() == 1);
        CHECK(std::abs(phi.eigenvalues[0] - cplx(1, 0)) < 1e-8);
    }
}

TEST_CASE("eigenvalue scan is stable under grid refinement") {
    double p = 5;
    Region reg{-0.45, 3.0, -2.0, 2.0};
    auto coarse = eigenvalue_scan(p, mu_nu(p), reg, 0.1);
    auto fine = eigenvalue_scan(p, mu_nu(p), reg, 0.05);
    REQUIRE(coarse.eigenvalues.size() == fine.eigenvalues.size());
    for (std::size_t i = 0; i < coarse.eigenvalues.size(); ++i)
        CHECK(std::abs(coarse.eigenvalues[i] - fine.eigenvalues[i]) < 1e-8);
}

TEST_CASE("eigenvalue scan validates its inputs") {
    CHECK_THROWS_AS(eigenvalue_scan(3, 2.0, Region{-1.5, 3, -2, 2}, 0.1), ValidationError);
    CHECK_THROWS_AS(eigenvalue_scan(3, 2.0, Region{-0.5, 3, -2, 2}, 0.0), ValidationError);
}

TEST_CASE("wronskian check recovers the -2/(p-1) power law") {
    for (double p : {3.0, 5.0, 7.0}) {
        auto w = wronskian_check(p, 40);
        CHECK(w.fitted_exponent == doctest::Approx(-2.0 / (p - 1.0)).epsilon(1e-6));
        CHECK(w.max_relative_deviation < 1e-8);
    }
}

TEST_CASE("fundamental solutions satisfy the hypergeometric equation") {
    CHECK(verify_mode_ode(3, profile::c_p(3), {0, 0}, FundamentalSolution::g1) < 1e-6);
    CHECK(verify_mode_ode(5, profile::c_p(5), {0, 0}, FundamentalSolution::f1) < 1e-6);
    CHECK(verify_mode_ode(7, mu_phi(7), {1, 0}, FundamentalSolution::f1) < 1e-6);
    CHECK(verify_mode_ode(7, profile::c_p(7), {0.35, 0.2}, FundamentalSolution::g2) < 1e-5);
    // c - a - b = 0 at lambda = 1 - 2/(p-1): logarithmic degeneracy
    CHECK_THROWS_AS(verify_mode_ode(3, profile::c_p(3), {0, 0}, FundamentalSolution::f2),
                    SpecialFunctionError);
}

TEST_CASE("lambda = 0 mode unwinds to the constant phase mode") {
    // f1 at lambda=0, mu=c_p is sqrt(z) up to scale: u3 = f1(rho^2)/rho constant.
    for (double p : {3.0, 7.0}) {
        auto prm = reduce_to_hypergeometric(p, profile::c_p(p), {0, 0});
        cplx cc = prm.a + prm.b + 1.0 - prm.c;
        double ref = (hyp2f1(prm.a, prm.b, cc, {1.0 - 0.25, 0}) / 0.5).real();
        for (double rho : {0.2, 0.4, 0.6, 0.8, 0.95}) {
            double z = rho * rho;
            double u3 = (hyp2f1(prm.a, prm.b, cc, {1.0 - z, 0}) / rho).real();
            CHECK(u3 == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}
