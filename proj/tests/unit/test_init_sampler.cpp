#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "fk/error.hpp"
#include "fk/init_sampler.hpp"

using namespace fk;
using std::numbers::pi;

TEST_CASE("single-term series is a sine") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    FourierSeriesIC ic{{1.0}};
    const Field f = ic.sample(g);
    for (int i = 0; i < 64; ++i) CHECK(f[i] == doctest::Approx(std::sin(2 * pi * i / 64.0)).epsilon(1e-15));
}

TEST_CASE("series vanishes at the origin and is deterministic") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 a(seed), b(seed);
        const Field fa = sample_fourier_ic(10, g, a);
        const Field fb = sample_fourier_ic(10, g, b);
        CHECK(fa[0] == 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(fa[i] == fb[i]);
    }
    std::mt19937_64 rng(1);
    const auto ic = FourierSeriesIC::draw(5, rng);
    for (double a : ic.coefficients) CHECK((a > 0.0 && a < 1.0));
}

TEST_CASE("mean field energy matches the uniform coefficient law") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 rng(11);
    double total = 0.0;
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) {
        const Field f = sample_fourier_ic(5, g, rng);
        double e = 0.0;
        for (double v : f.values()) e += v * v;
        total += e / 64.0;  // mean of u^2 over the period
    }
    // E[a^2] = 1/3 per coefficient, five terms, each sine averages to 1/2
    CHECK(total / samples == doctest::Approx(5.0 / 6.0).epsilon(0.03));
}

TEST_CASE("sampler argument checks") {
    std::mt19937_64 rng(0);
    CHECK_THROWS_AS(sample_fourier_ic(5, make_grid(2, 8, 1.0, BoundaryKind::Periodic), rng), InvalidArgument);
    CHECK_THROWS_AS(sample_grf(GrfSpec{}, make_grid(1, 8, 1.0, BoundaryKind::Periodic), rng), InvalidArgument);
    CHECK_THROWS_AS(sample_grf(GrfSpec{}, make_grid(2, 9, 1.0, BoundaryKind::DirichletZero), rng), InvalidArgument);
}

TEST_CASE("GRF weight shape") {
    const GrfSpec s;
    CHECK(s.amplitude == doctest::Approx(std::pow(7.0, 1.5)));
    const double expected = std::pow((4 * pi * pi + 49) / (16 * pi * pi + 49), -2.5);
    CHECK(s.weight(1, 0) / s.weight(2, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.weight(0, 1) == s.weight(1, 0));
    for (int k = 0; k < 20; ++k) CHECK(s.weight(k + 1, 0) < s.weight(k, 0));
}

TEST_CASE("GRF samples are real, mean-free and reproducible") {
    const Grid g = make_grid(2, 16, 1.0, BoundaryKind::Periodic);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 r1(seed), r2(seed), r3(seed);
        const auto c = grf_coefficients(GrfSpec{}, g, r1);
        const Field f = sample_grf(GrfSpec{}, g, r2);
        const Field f2 = sample_grf(GrfSpec{}, g, r3);
        double mean = 0.0;
        for (double v : f.values()) mean += v;
        CHECK(std::abs(mean / 256.0) < 1e-10);
        for (std::size_t i = 0; i < 256; ++i) REQUIRE(f[i] == f2[i]);
        // naive inverse DFT of the full coefficient array
        double max_imag = 0.0, max_diff = 0.0;
        for (int x0 = 0; x0 < 16; ++x0)
            for (int x1 = 0; x1 < 16; ++x1) {
                std::complex<double> acc;
                for (int k0 = 0; k0 < 16; ++k0)
                    for (int k1 = 0; k1 < 16; ++k1)
                        acc += c[k0 * 16 + k1] * std::polar(1.0, 2 * pi * (k0 * x0 + k1 * x1) / 16.0);
                max_imag = std::max(max_imag, std::abs(acc.imag()));
                max_diff = std::max(max_diff, std::abs(acc.real() - f[g.index(x0, x1)]));
            }
        CHECK(max_imag < 1e-10);
        CHECK(max_diff < 1e-10);
    }
}

TEST_CASE("GRF shell variances follow the weight formula") {
    const Grid g = make_grid(2, 16, 1.0, BoundaryKind::Periodic);
    const GrfSpec spec;
    std::mt19937_64 rng(2024);
    const int samples = 1000;
    std::map<int, double> sum;  // keyed by |k|^2
    std::map<int, int> count;
    for (int s = 0; s < samples; ++s) {
        const auto c = grf_coefficients(spec, g, rng);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const int k0 = i <= 8 ? i : i - 16;
                const int k1 = j <= 8 ? j : j - 16;
                const int k2 = k0 * k0 + k1 * k1;
                if (k2 == 0 || k2 > 9) continue;
                sum[k2] += std::norm(c[i * 16 + j]);
                ++count[k2];
            }
    }
    for (auto [k2, total] : sum) {
        const double mean = total / count[k2];
        const double w = spec.weight(std::sqrt(k2), 0.0);
        // |c|^2 is exponential; conjugate pairs halve the independent count
        const double se = w / std::sqrt(count[k2] / 2.0);
        CHECK(std::abs(mean - w) < 5 * se);
    }
}

TEST_CASE("GRF low modes are resolution independent") {
    const GrfSpec spec;
    const Grid a = make_grid(2, 16, 1.0, BoundaryKind::Periodic);
    const Grid b = make_grid(2, 32, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 ra(9), rb(9);
    double va = 0.0, vb = 0.0;
    for (int s = 0; s < 400; ++s) {
        va += std::norm(grf_coefficients(spec, a, ra)[1]);
        vb += std::norm(grf_coefficients(spec, b, rb)[1]);
    }
    CHECK(va / vb == doctest::Approx(1.0).epsilon(0.25));
}
