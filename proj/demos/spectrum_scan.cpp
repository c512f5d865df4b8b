// Scan the point spectrum of the two decoupled component equations for a
// given nonlinearity exponent and print the located eigenvalues.
//
//   ./spectrum_scan [p]

#include <cstdio>
#include <cstdlib>

#include "blowlab/spectrum.hpp"

int main(int argc, char** argv) {
    double p = argc > 1 ? std::atof(argv[1]) : 5.0;
    double s = 2.0 / (p - 1.0);
    blowlab::specfun::Region region{-s + 0.05, 3.0, -2.0, 2.0};

    std::printf("p = %.3f, scan region Re in (%.3f, 3], |Im| <= 2\n", p, -s + 0.05);
    for (auto [name, mu] : {std::pair<const char*, double>{"nu  (mu = c_p)", blowlab::specfun::mu_nu(p)},
                            std::pair<const char*, double>{"phi (mu = p c_p)", blowlab::specfun::mu_phi(p)}}) {
        auto res = blowlab::specfun::eigenvalue_scan(p, mu, region, 0.07);
        std::printf("%-18s eigenvalues:", name);
        for (std::size_t i = 0; i < res.eigenvalues.size(); ++i)
            std::printf("  %.12f%+.2e i  (|c1| = %.1e, ode residual = %.1e)",
                        res.eigenvalues[i].real(), res.eigenvalues[i].imag(),
                        res.records[i].abs_c1, res.records[i].ode_residual);
        std::printf("\n");
    }
    return 0;
}
