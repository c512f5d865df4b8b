#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "blowlab/error.hpp"

namespace blowlab::grid {

using cplx = std::complex<double>;

// Minimal dense row-major matrix; enough for differentiation operators.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    template <class T>
    void apply(const std::vector<T>& x, std::vector<T>& y) const {
        y.assign(rows, T{});
        for (int i = 0; i < rows; ++i) {
            T acc{};
            const double* row = &a[static_cast<std::size_t>(i) * cols];
            for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
    }

    template <class T>
    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y;
        apply(x, y);
        return y;
    }

    Mat mul(const Mat& other) const {
        Mat out(rows, other.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < other.cols; ++j) out(i, j) += v * other(k, j);
            }
        return out;
    }

    void fix_row_sums() {
        for (int i = 0; i < rows; ++i) {
            double sum = 0.0;
            for (int j = 0; j < cols; ++j)
                if (j != i) sum += (*this)(i, j);
            (*this)(i, i) = -sum;
        }
    }
};

// Radial collocation on rho in [0, 1]. The nodes are the nonnegative half of
// a full Chebyshev-Gauss-Lobatto grid on [-1, 1], so the innermost positive
// node sits at distance ~pi/N from the origin and the singular transport
// term 2/rho stays moderate. Two operator families are provided:
//
//   d1, d2   plain barycentric differentiation on the half grid (generic
//            functions; d2 = d1 d1)
//   d1e, d2e parity-folded operators that differentiate the even extension
//            across rho = 0 (radial fields; these are what the evolution
//            uses, and they give u'(0) = 0 identically)
//
// Quadrature weights are Clenshaw-Curtis folded onto [0, 1].
struct RadialGrid {
    int n = 0;
    std::vector<double> nodes;   // ascending, nodes[0] = 0, nodes[n-1] = 1
    Mat d1, d2;                  // plain
    Mat d1e, d2e;                // even-parity folded
    std::vector<double> quad_w;  // integral over [0, 1]

    static RadialGrid make(int n_nodes) {
        if (n_nodes < 4) throw ValidationError("grid_n", "need at least 4 nodes");
        RadialGrid g;
        g.n = n_nodes;
        const int N = 2 * (n_nodes - 1);  // full-grid panel count (even)
        const double pi = 3.14159265358979323846;

        std::vector<double> x(N + 1);
        for (int k = 0; k <= N; ++k) x[k] = std::cos(pi * k / N);
        x[N / 2] = 0.0;

        // Full differentiation matrix with the negative-sum diagonal.
        Mat Dfull(N + 1, N + 1);
        auto cw = [&](int i) { return ((i == 0 || i == N) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0); };
        for (int i = 0; i <= N; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                double v = (cw(i) / cw(j)) / (x[i] - x[j]);
                Dfull(i, j) = v;
                rowsum += v;
            }
            Dfull(i, i) = -rowsum;
        }
        Mat D2full = Dfull.mul(Dfull);
        D2full.fix_row_sums();

        g.nodes.resize(n_nodes);
        for (int a = 0; a < n_nodes; ++a) g.nodes[a] = x[N / 2 - a];
        g.nodes[0] = 0.0;
        g.nodes[n_nodes - 1] = 1.0;

        auto fold = [&](const Mat& M) {
            Mat F(n_nodes, n_nodes);
            for (int a = 0; a < n_nodes; ++a) {
                int i = N / 2 - a;
                for (int b = 0; b < n_nodes; ++b) {
                    int j = N / 2 - b;
                    double v = M(i, j);
                    if (b != 0) v += M(i, N - j);
                    F(a, b) = v;
                }
            }
            return F;
        };
        g.d1e = fold(Dfull);
        g.d2e = fold(D2full);

        // Plain operators: sliding 7-point Lagrange stencils. Global
        // polynomial differentiation through the half grid is ill-conditioned
        // for functions without a parity constraint, so generic radial data
        // gets local high-order stencils instead; d2 is d1 composed with
        // itself by construction.
        const int half = 3;
        g.d1 = Mat(n_nodes, n_nodes);
        for (int i = 0; i < n_nodes; ++i) {
            int lo = std::max(0, std::min(i - half, n_nodes - 2 * half - 1));
            int hi = std::min(n_nodes - 1, lo + 2 * half);
            for (int m = lo; m <= hi; ++m) {
                // derivative of the m-th Lagrange basis at nodes[i]
                double acc = 0.0;
                for (int q = lo; q <= hi; ++q) {
                    if (q == m) continue;
                    double prod = 1.0;
                    for (int k = lo; k <= hi; ++k) {
                        if (k == m || k == q) continue;
                        prod *= (g.nodes[i] - g.nodes[k]) / (g.nodes[m] - g.nodes[k]);
                    }
                    acc += prod / (g.nodes[m] - g.nodes[q]);
                }
                g.d1(i, m) = acc;
            }
        }
        g.d2 = g.d1.mul(g.d1);
        g.d2.fix_row_sums();

        // Clenshaw-Curtis on [-1, 1] (even N), folded to [0, 1].
        std::vector<double> w(N + 1, 0.0);
        w[0] = w[N] = 1.0 / (N * N - 1.0);
        for (int i = 1; i < N; ++i) {
            double th = pi * i / N;
            double v = 1.0;
            for (int k = 1; k <= N / 2 - 1; ++k)
                v -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
            v -= std::cos(N * th) / (N * N - 1.0);
            w[i] = 2.0 * v / N;
        }
        g.quad_w.resize(n_nodes);
        g.quad_w[0] = 0.5 * w[N / 2];
        for (int a = 1; a < n_nodes; ++a) g.quad_w[a] = w[N / 2 - a];
        return g;
    }

    template <class T>
    T integrate(const std::vector<T>& f) const {
        T acc{};
        for (int i = 0; i < n; ++i) acc += quad_w[i] * f[i];
        return acc;
    }

    // int_0^1 rho^2 f(rho) drho
    template <class T>
    T integrate_rho2(const std::vector<T>& f) const {
        T acc{};
        for (int i = 0; i < n; ++i) acc += quad_w[i] * nodes[i] * nodes[i] * f[i];
        return acc;
    }

    // Differentiation of even radial fields. The node mean is removed before
    // the matrix is applied: derivatives annihilate constants analytically,
    // and doing it explicitly keeps the large corner entries of the operators
    // from amplifying a constant background through rounding.
    template <class T>
    void deriv_even1(const std::vector<T>& f, std::vector<T>& out) const {
        apply_centered(d1e, f, out);
    }
    template <class T>
    void deriv_even2(const std::vector<T>& f, std::vector<T>& out) const {
        apply_centered(d2e, f, out);
    }
    template <class T>
    std::vector<T> deriv_even1(const std::vector<T>& f) const {
        std::vector<T> out;
        deriv_even1(f, out);
        return out;
    }
    template <class T>
    std::vector<T> deriv_even2(const std::vector<T>& f) const {
        std::vector<T> out;
        deriv_even2(f, out);
        return out;
    }

    // Barycentric evaluation of the even spectral interpolant at rho in [0,1].
    template <class T>
    T interpolate(const std::vector<T>& f, double rho) const {
        const int N = 2 * (n - 1);
        T num{};
        double den = 0.0;
        for (int k = 0; k <= N; ++k) {
            int a = (k <= N / 2) ? (N / 2 - k) : (k - N / 2);  // mirrored value index
            double xk = (k <= N / 2) ? nodes[N / 2 - k] : -nodes[k - N / 2];
            double d = rho - xk;
            if (std::abs(d) < 1e-300) return f[a];
            double lam = ((k == 0 || k == N) ? 0.5 : 1.0) * ((k % 2) ? -1.0 : 1.0);
            double q = lam / d;
            num += q * f[a];
            den += q;
        }
        return num * (1.0 / den);
    }

  private:
    template <class T>
    void apply_centered(const Mat& M, const std::vector<T>& f, std::vector<T>& out) const {
        T mean{};
        for (const T& v : f) mean += v;
        mean *= 1.0 / static_cast<double>(n);
        std::vector<T> shifted(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) shifted[i] = f[i] - mean;
        M.apply(shifted, out);
    }
};

template <class T>
inline T trapezoid(const std::vector<double>& x, const std::vector<T>& y) {
    T acc{};
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    return acc;
}

}  // namespace blowlab::grid
