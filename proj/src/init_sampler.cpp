#include "fk/init_sampler.hpp"

#include <cmath>
#include <numbers>

#include "fk/error.hpp"
#include "fk/fft.hpp"

namespace fk {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double FourierSeriesIC::operator()(double x, double extent) const {
    double v = 0.0;
    for (std::size_t n = 0; n < coefficients.size(); ++n)
        v += coefficients[n] * std::sin(two_pi * static_cast<double>(n + 1) * x / extent);
    return v;
}

Field FourierSeriesIC::sample(const Grid& grid) const {
    if (grid.dim() != 1) throw InvalidArgument("Fourier-series initial conditions are 1D");
    Field f(grid);
    for (int i = 0; i < grid.resolution(0); ++i)
        f[static_cast<std::size_t>(i)] = (*this)(grid.coordinate(0, i), grid.extent(0));
    return f;
}

FourierSeriesIC FourierSeriesIC::draw(int N, std::mt19937_64& rng) {
    if (N < 1) throw InvalidArgument("maximum frequency N must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    FourierSeriesIC ic;
    ic.coefficients.resize(static_cast<std::size_t>(N));
    for (auto& a : ic.coefficients) {
        do {
            a = unif(rng);
        } while (a <= 0.0);
    }
    return ic;
}

Field sample_fourier_ic(int N, const Grid& grid, std::mt19937_64& rng) {
    if (grid.dim() != 1) throw InvalidArgument("sample_fourier_ic requires a 1D grid");
    return FourierSeriesIC::draw(N, rng).sample(grid);
}

double GrfSpec::weight(double k0, double k1) const {
    const double k2 = k0 * k0 + k1 * k1;
    return amplitude * std::pow(4.0 * std::numbers::pi * std::numbers::pi * k2 + tau * tau, -alpha);
}

std::vector<std::complex<double>> grf_coefficients(const GrfSpec& spec, const Grid& grid,
                                                   std::mt19937_64& rng) {
    if (grid.dim() != 2 || !grid.periodic())
        throw InvalidArgument("sample_grf requires a 2D periodic grid");
    const int n0 = grid.resolution(0);
    const int n1 = grid.resolution(1);
    const double L0 = grid.extent(0);
    const double L1 = grid.extent(1);
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(n0) * n1);
    auto at = [&](int i, int j) -> std::complex<double>& {
        return c[static_cast<std::size_t>(i) * n1 + j];
    };
    auto nyquist = [](int i, int n) { return n % 2 == 0 && i == n / 2; };
    // Draw each conjugate pair once: j in the upper half plane, plus the
    // positive half of the j = 0 column.
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j <= (n1 - 1) / 2; ++j) {
            const int k0 = wavenumber(i, n0);
            const int k1 = j;
            if (k1 == 0 && k0 <= 0) continue;
            if (nyquist(i, n0)) continue;
            // Wavenumbers in units of 1/L so the continuum covariance does
            // not depend on the resolution.
            const double w = spec.weight(k0 / L0, k1 / L1) / (L0 * L1);
            const double s = std::sqrt(0.5 * w);
            const std::complex<double> z(s * normal(rng), s * normal(rng));
            at(i, j) = z;
            at((n0 - i) % n0, (n1 - j) % n1) = std::conj(z);
        }
    }
    return c;
}

Field sample_grf(const GrfSpec& spec, const Grid& grid, std::mt19937_64& rng) {
    const auto c = grf_coefficients(spec, grid, rng);
    const int n0 = grid.resolution(0);
    const int n1 = grid.resolution(1);
    RealFft fft({n0, n1});
    const int h1 = fft.half_length();
    std::vector<std::complex<double>> half(fft.spectrum_size());
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < h1; ++j)
            half[static_cast<std::size_t>(i) * h1 + j] = c[static_cast<std::size_t>(i) * n1 + j];
    Field f(grid);
    fft.inverse(half, f.values());
    return f;
}

}  // namespace fk
