#include <cmath>
#include <vector>

#include "blowlab/grid.hpp"
#include "doctest.h"

using namespace blowlab;

TEST_CASE("nodes are strictly increasing and span [0,1]") {
    auto g = grid::RadialGrid::make(33);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);
    for (int i = 1; i < g.n; ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
}

TEST_CASE("differentiation operators act correctly on polynomials") {
    auto g = grid::RadialGrid::make(48);
    std::vector<double> ones(g.n, 1.0), rho = g.nodes, rho3(g.n);
    for (int i = 0; i < g.n; ++i) rho3[i] = g.nodes[i] * g.nodes[i] * g.nodes[i];

    auto d_ones = g.d1.apply(ones);
    auto d_rho = g.d1.apply(rho);
    auto d2_rho3 = g.d2.apply(rho3);
    for (int i = 0; i < g.n; ++i) {
        CHECK(std::abs(d_ones[i]) < 1e-12);
        CHECK(std::abs(d_rho[i] - 1.0) < 1e-10);
        CHECK(std::abs(d2_rho3[i] - 6.0 * g.nodes[i]) < 1e-8);
    }
}

TEST_CASE("plain stencils are high-order accurate on a smooth function") {
    auto g = grid::RadialGrid::make(64);
    std::vector<double> f(g.n), want(g.n);
    for (int i = 0; i < g.n; ++i) {
        double x = g.nodes[i];
        f[i] = std::exp(-2.0 * x) * std::cos(3.0 * x);
        want[i] = std::exp(-2.0 * x) * (-2.0 * std::cos(3.0 * x) - 3.0 * std::sin(3.0 * x));
    }
    auto df = g.d1.apply(f);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(df[i] - want[i]) < 1e-6);
}

TEST_CASE("clenshaw-curtis weights integrate polynomials exactly") {
    auto g = grid::RadialGrid::make(40);
    std::vector<double> one(g.n, 1.0), sq(g.n);
    for (int i = 0; i < g.n; ++i) sq[i] = g.nodes[i] * g.nodes[i];
    CHECK(g.integrate(one) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.integrate(sq) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(g.integrate_rho2(one) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("barycentric interpolation reproduces smooth even fields") {
    auto g = grid::RadialGrid::make(48);
    std::vector<double> f(g.n);
    auto fn = [](double x) { return std::cos(2.5 * x) * std::exp(-x * x); };
    for (int i = 0; i < g.n; ++i) f[i] = fn(g.nodes[i]);
    for (double x : {0.013, 0.27, 0.5001, 0.83, 0.999}) {
        CHECK(g.interpolate(f, x) == doctest::Approx(fn(x)).epsilon(1e-12));
    }
    CHECK(g.interpolate(f, g.nodes[7]) == f[7]);
}

TEST_CASE("parity-folded operators differentiate even fields") {
    auto g = grid::RadialGrid::make(40);
    std::vector<double> f(g.n), want1(g.n), want2(g.n);
    for (int i = 0; i < g.n; ++i) {
        double x = g.nodes[i];
        f[i] = std::cos(3.0 * x);
        want1[i] = -3.0 * std::sin(3.0 * x);
        want2[i] = -9.0 * std::cos(3.0 * x);
    }
    auto df = g.deriv_even1(f);
    auto d2f = g.deriv_even2(f);
    CHECK(std::abs(df[0]) < 1e-12);  // u'(0) = 0 by parity
    for (int i = 0; i < g.n; ++i) {
        CHECK(std::abs(df[i] - want1[i]) < 1e-9);
        CHECK(std::abs(d2f[i] - want2[i]) < 1e-7);
    }
    // exact annihilation of constants
    std::vector<double> c(g.n, 3.7);
    for (double v : g.deriv_even1(c)) CHECK(v == 0.0);
    for (double v : g.deriv_even2(c)) CHECK(v == 0.0);
}

TEST_CASE("trapezoid rule on a nonuniform grid") {
    std::vector<double> x = {0.0, 0.1, 0.35, 0.7, 1.0};
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 * x[i];
    CHECK(grid::trapezoid(x, y) == doctest::Approx(1.0).epsilon(1e-14));
}
