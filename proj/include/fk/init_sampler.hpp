#pragma once

#include <complex>
#include <random>
#include <vector>

#include "fk/grid.hpp"

namespace fk {

/// u0(x) = sum_{n=1..N} a_n sin(2 pi n x / L) with a_n in (0, 1).
struct FourierSeriesIC {
    std::vector<double> coefficients;  // a_1 .. a_N

    int max_frequency() const { return static_cast<int>(coefficients.size()); }
    Field sample(const Grid& grid) const;
    double operator()(double x, double extent = 1.0) const;

    static FourierSeriesIC draw(int N, std::mt19937_64& rng);
};

/// Draws fresh coefficients and samples them on a 1D grid.
Field sample_fourier_ic(int N, const Grid& grid, std::mt19937_64& rng);

/// Gaussian random field with spectral weight amplitude * (4 pi^2 |k|^2 + tau^2)^(-alpha).
struct GrfSpec {
    double tau = 7.0;
    double alpha = 2.5;
    double amplitude = 18.520259177452136;  // 7^(3/2)

    double weight(double k0, double k1) const;
};

/// Full (Hermitian-completed) n0 x n1 coefficient array c_k of one draw, such
/// that the sample is u(x) = sum_k c_k exp(2 pi i k.x / L). The k = 0 and
/// Nyquist modes are zero. Exposed so the symmetry can be tested directly.
std::vector<std::complex<double>> grf_coefficients(const GrfSpec& spec, const Grid& grid,
                                                   std::mt19937_64& rng);

/// One GRF draw on a 2D periodic grid.
Field sample_grf(const GrfSpec& spec, const Grid& grid, std::mt19937_64& rng);

}  // namespace fk
