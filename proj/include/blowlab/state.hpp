#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/grid.hpp"

namespace blowlab {

using cplx = std::complex<double>;

// The four real fields (phi1, phi2, nu1, nu2) on the radial grid at a
// similarity time tau.
struct FieldState {
    double tau = 0.0;
    std::array<std::vector<double>, 4> comp;

    static FieldState zeros(int n, double tau = 0.0) {
        FieldState s;
        s.tau = tau;
        for (auto& c : s.comp) c.assign(n, 0.0);
        return s;
    }

    static FieldState constant(int n, const std::array<double, 4>& v, double tau = 0.0) {
        FieldState s;
        s.tau = tau;
        for (int c = 0; c < 4; ++c) s.comp[c].assign(n, v[c]);
        return s;
    }

    int size() const { return static_cast<int>(comp[0].size()); }

    bool finite() const {
        for (const auto& c : comp)
            for (double v : c)
                if (!std::isfinite(v)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : comp)
            for (double v : c) m = std::max(m, std::abs(v));
        return m;
    }

    // sup over nodes and components of |this - other|
    double sup_distance(const FieldState& other) const {
        double m = 0.0;
        for (int c = 0; c < 4; ++c)
            for (std::size_t j = 0; j < comp[c].size(); ++j)
                m = std::max(m, std::abs(comp[c][j] - other.comp[c][j]));
        return m;
    }
};

inline FieldState operator+(FieldState a, const FieldState& b) {
    for (int c = 0; c < 4; ++c)
        for (std::size_t j = 0; j < a.comp[c].size(); ++j) a.comp[c][j] += b.comp[c][j];
    return a;
}

inline void axpy(FieldState& y, double alpha, const FieldState& x) {
    for (int c = 0; c < 4; ++c)
        for (std::size_t j = 0; j < y.comp[c].size(); ++j) y.comp[c][j] += alpha * x.comp[c][j];
}

// A lightcone section: (u, d_t u) sampled on radii in [0, radius] at physical
// time t, together with the discrete differentiation the section was built
// with (spectral for similarity-side sections, 4th-order stencils for the
// uniform finite-difference solver).
struct ConeSection {
    double t = 0.0;
    double radius = 0.0;
    std::vector<double> r;
    std::vector<cplx> u;
    std::vector<cplx> ut;

    // spectral backing (r = radius * rho on the grid's nodes)
    const grid::RadialGrid* spectral = nullptr;

    std::vector<cplx> d1(const std::vector<cplx>& f) const {
        if (spectral) {
            auto g = spectral->deriv_even1(f);
            for (auto& v : g) v /= radius;
            return g;
        }
        return fd_derivative(f, 1);
    }

    std::vector<cplx> d2(const std::vector<cplx>& f) const {
        if (spectral) {
            auto g = spectral->deriv_even2(f);
            for (auto& v : g) v /= radius * radius;
            return g;
        }
        return fd_derivative(f, 2);
    }

  private:
    // 4th-order centered stencils with one-sided closures, uniform spacing.
    std::vector<cplx> fd_derivative(const std::vector<cplx>& f, int order) const {
        int n = static_cast<int>(f.size());
        if (n < 7) throw ValidationError("section", "too few nodes for differentiation");
        double h = r[1] - r[0];
        std::vector<cplx> g(n);
        if (order == 1) {
            for (int i = 2; i < n - 2; ++i)
                g[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            g[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
            g[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
            g[n - 2] = -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) / (12.0 * h);
            g[n - 1] = -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) / (12.0 * h);
        } else {
            for (int i = 2; i < n - 2; ++i)
                g[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h * h);
            auto one_sided = [&](int i0, int dir) {
                // 6-point one-sided second derivative, O(h^4)
                static const double cc[6] = {15.0 / 4.0,  -77.0 / 6.0, 107.0 / 6.0,
                                             -13.0,       61.0 / 12.0, -5.0 / 6.0};
                cplx acc{};
                for (int k = 0; k < 6; ++k) acc += cc[k] * f[i0 + dir * k];
                return acc / (h * h);
            };
            g[0] = one_sided(0, 1);
            g[1] = one_sided(1, 1);
            g[n - 2] = one_sided(n - 2, -1);
            g[n - 1] = one_sided(n - 1, -1);
        }
        return g;
    }
};

}  // namespace blowlab
