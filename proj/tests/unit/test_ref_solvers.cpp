#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fk/error.hpp"
#include "fk/init_sampler.hpp"
#include "fk/ref_solvers.hpp"

using namespace fk;
using std::numbers::pi;

namespace {

double rel_l2(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

double l2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

Field mode_field(const Grid& g, int n) {
    Field f(g);
    for (std::size_t p = 0; p < g.size(); ++p) f[p] = std::sin(2 * pi * n * g.point(p)[0]);
    return f;
}

SolverRun run_with(Scheme s, int steps, int internal, int output) {
    SolverRun r;
    r.scheme = s;
    r.steps = steps;
    r.internal_resolution = internal;
    r.output_resolution = output;
    return r;
}

// u0 = a bump well inside (0, 1), flat near both walls
Field bump(const Grid& g) {
    Field f(g);
    for (int i = 0; i < g.resolution(0); ++i) {
        const double x = g.coordinate(0, i);
        f[i] = 0.5 * (std::tanh((x - 0.35) / 0.05) - std::tanh((x - 0.65) / 0.05));
    }
    return f;
}

}  // namespace

TEST_CASE("spectral convection-diffusion reproduces a travelling mode") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    const Field ic = mode_field(g, 3);
    for (Scheme s : {Scheme::SpectralRK2, Scheme::SpectralExact}) {
        const auto tr = spectral_convdiff_solve(ic, 0.1, 0.01, 2.0, run_with(s, 20000, 64, 64));
        REQUIRE(tr.frames.size() == 10);
        for (std::size_t k = 0; k < tr.frames.size(); ++k) {
            const double t = tr.times[k];
            Field exact(g);
            for (int i = 0; i < 64; ++i)
                exact[i] = std::exp(-4 * pi * pi * 9 * 0.01 * t) *
                           std::sin(2 * pi * 3 * (g.coordinate(0, i) + 0.1 * t));
            CHECK(rel_l2(tr.frames[k].values(), exact.values()) < 1e-6);
        }
    }
}

TEST_CASE("spectral solver lifts coarse initial data") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    const auto coarse = spectral_convdiff_solve(mode_field(g, 2), 0.1, 0.005, 1.0,
                                                run_with(Scheme::SpectralExact, 10, 1024, 64));
    const auto direct = spectral_convdiff_solve(mode_field(g, 2), 0.1, 0.005, 1.0,
                                                run_with(Scheme::SpectralExact, 10, 64, 64));
    CHECK(rel_l2(coarse.frames.back().values(), direct.frames.back().values()) < 1e-12);
}

TEST_CASE("pure advection conserves the norm") {
    const Grid g = make_grid(1, 256, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 rng(4);
    const Field ic = sample_fourier_ic(10, g, rng);
    const auto tr = spectral_convdiff_solve(ic, 0.1, 0.0, 2.0, run_with(Scheme::SpectralExact, 1000, 256, 256));
    for (const auto& f : tr.frames) CHECK(std::abs(l2(f.values()) - l2(ic.values())) < 1e-10 * l2(ic.values()));
}

TEST_CASE("RK2 is second order") {
    const Grid g = make_grid(1, 64, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 rng(8);
    const Field ic = sample_fourier_ic(10, g, rng);
    const auto exact = spectral_convdiff_solve(ic, 0.1, 0.01, 2.0, run_with(Scheme::SpectralExact, 100, 64, 64));
    auto err = [&](int steps) {
        const auto tr = spectral_convdiff_solve(ic, 0.1, 0.01, 2.0, run_with(Scheme::SpectralRK2, steps, 64, 64));
        return rel_l2(tr.frames.back().values(), exact.frames.back().values());
    };
    const double ratio = err(400) / err(800);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("Crank-Nicolson diffuses a shear mode exactly") {
    const Grid g = make_grid(2, 32, 1.0, BoundaryKind::Periodic);
    Field w(g);
    for (std::size_t p = 0; p < g.size(); ++p) w[p] = std::sin(2 * pi * g.point(p)[0]);
    SolverRun run = run_with(Scheme::SpectralCrankNicolson, 1000, 32, 32);
    const auto tr = crank_nicolson_ns_solve(w, 0.1, ForcingKind::None, 1.0, run);
    for (std::size_t k = 0; k < tr.frames.size(); ++k) {
        Field exact = w;
        for (auto& v : exact.values()) v *= std::exp(-4 * pi * pi * 0.1 * tr.times[k]);
        CHECK(rel_l2(tr.frames[k].values(), exact.values()) < 1e-4);
    }
}

TEST_CASE("mean vorticity stays zero under periodic forcing") {
    const Grid g = make_grid(2, 32, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 rng(1);
    const Field w = sample_grf(GrfSpec{}, g, rng);
    for (auto f : {ForcingKind::Li, ForcingKind::Kolmogorov}) {
        const auto tr = crank_nicolson_ns_solve(w, 1e-3, f, 2.0, run_with(Scheme::SpectralCrankNicolson, 200, 32, 32));
        for (const auto& fr : tr.frames) {
            double m = 0.0;
            for (double v : fr.values()) m += v;
            CHECK(std::abs(m / fr.values().size()) < 1e-10);
        }
    }
}

TEST_CASE("runaway vorticity is reported as blowup") {
    const Grid g = make_grid(2, 32, 1.0, BoundaryKind::Periodic);
    std::mt19937_64 rng(1);
    Field w = sample_grf(GrfSpec{}, g, rng);
    for (auto& v : w.values()) v *= 200.0;
    CHECK_THROWS_AS(crank_nicolson_ns_solve(w, 1e-5, ForcingKind::Li, 10.0,
                                            run_with(Scheme::SpectralCrankNicolson, 10, 32, 32)),
                    Blowup);
}

TEST_CASE("Allen-Cahn zero state is an equilibrium") {
    const Grid g = make_grid(1, 65, 1.0, BoundaryKind::DirichletZero);
    for (auto b : {BoundaryKind::DirichletZero, BoundaryKind::NeumannZero}) {
        const auto tr = fd_allen_cahn_solve(Field(g), b, 0.01, 1.0, run_with(Scheme::FiniteDifferenceRK2, 1000, 65, 65));
        for (const auto& f : tr.frames)
            for (double v : f.values()) CHECK(v == 0.0);
    }
}

TEST_CASE("Allen-Cahn linear growth of the first Neumann mode") {
    const Grid g = make_grid(1, 65, 1.0, BoundaryKind::NeumannZero);
    Field ic(g);
    for (int i = 0; i < 65; ++i) ic[i] = 0.1 * std::cos(pi * g.coordinate(0, i));
    const auto tr = fd_allen_cahn_solve(ic, BoundaryKind::NeumannZero, 0.01, 0.1,
                                        run_with(Scheme::FiniteDifferenceRK2, 1000, 65, 65));
    // projection on cos(pi x) with trapezoid weights
    auto amplitude = [&](const Field& f) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 65; ++i) {
            const double w = (i == 0 || i == 64) ? 0.5 : 1.0;
            const double c = std::cos(pi * g.coordinate(0, i));
            num += w * f[i] * c;
            den += w * c * c;
        }
        return num / den;
    };
    for (std::size_t k = 0; k < tr.frames.size(); ++k) {
        const double expected = 0.1 * std::exp((1 - 0.01 * pi * pi) * tr.times[k]);
        CHECK(amplitude(tr.frames[k]) == doctest::Approx(expected).epsilon(0.02));
    }
}

TEST_CASE("Allen-Cahn RK2 converges at second order") {
    const Grid g = make_grid(1, 65, 1.0, BoundaryKind::NeumannZero);
    const Field ic = bump(g);
    auto last = [&](int steps) {
        return fd_allen_cahn_solve(ic, BoundaryKind::NeumannZero, 0.01, 0.2,
                                   run_with(Scheme::FiniteDifferenceRK2, steps, 65, 65))
            .frames.back();
    };
    const Field a = last(40), b = last(80), c = last(160);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < 65; ++i) {
        e1 += (a[i] - b[i]) * (a[i] - b[i]);
        e2 += (b[i] - c[i]) * (b[i] - c[i]);
    }
    const double ratio = std::sqrt(e1 / e2);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("Allen-Cahn stability note") {
    const Grid g = make_grid(1, 65, 1.0, BoundaryKind::DirichletZero);
    const auto ok = fd_allen_cahn_solve(bump(g), BoundaryKind::DirichletZero, 0.01, 0.1,
                                        run_with(Scheme::FiniteDifferenceRK2, 100, 65, 65));
    CHECK(ok.notes.empty());
    // kappa dt / h^2 = 0.82
    const auto tr = fd_allen_cahn_solve(bump(g), BoundaryKind::DirichletZero, 0.01, 0.2,
                                        run_with(Scheme::FiniteDifferenceRK2, 10, 65, 65));
    CHECK_FALSE(tr.notes.empty());
}

TEST_CASE("Allen-Cahn output is strided from the internal grid") {
    const Grid fine = make_grid(1, 257, 1.0, BoundaryKind::DirichletZero);
    const auto tr = fd_allen_cahn_solve(bump(fine), BoundaryKind::DirichletZero, 0.01, 0.1,
                                        run_with(Scheme::FiniteDifferenceRK2, 1000, 257, 65));
    CHECK(tr.frames.front().grid().resolution(0) == 65);
    CHECK(tr.frames.front()[0] == 0.0);
}

TEST_CASE("particle Monte Carlo error follows the estimator variance") {
    const PdeSpec pde = convdiff_case(3);
    const auto& m = std::get<ConvectionDiffusion>(pde.model);
    const Grid& g = pde.grid;
    std::mt19937_64 rng(1);
    const auto ic = FourierSeriesIC::draw(pde.N, rng);
    const auto& a = ic.coefficients;

    // For X ~ N(x + beta t, 2 kappa t) the mean and variance of u0(X) are
    // closed-form sums over the sine modes.
    struct Moments {
        std::vector<double> mean, var;
    };
    auto moments = [&](double t) {
        Moments mo{std::vector<double>(64), std::vector<double>(64)};
        const double s2 = 2 * m.kappa * t;
        auto damp = [&](int k) { return std::exp(-2 * pi * pi * k * k * s2); };
        for (int i = 0; i < 64; ++i) {
            const double c = g.coordinate(0, i) + m.beta * t;
            double mu = 0.0, second = 0.0;
            for (int n = 1; n <= pde.N; ++n) {
                mu += a[n - 1] * damp(n) * std::sin(2 * pi * n * c);
                for (int k = 1; k <= pde.N; ++k)
                    second += 0.5 * a[n - 1] * a[k - 1] *
                              (damp(n - k) * std::cos(2 * pi * (n - k) * c) -
                               damp(n + k) * std::cos(2 * pi * (n + k) * c));
            }
            mo.mean[i] = mu;
            mo.var[i] = second - mu * mu;
        }
        return mo;
    };

    auto measured_and_predicted = [&](int M) {
        SolverRun run = run_with(Scheme::ParticleMC, 10, 64, 64);
        run.seed = 17;
        const auto tr = mc_solve_full(pde, ic.sample(g), M, run);
        double e = 0.0, predicted = 0.0;
        for (std::size_t k = 0; k < 10; ++k) {
            const Moments mo = moments(tr.times[k]);
            e += rel_l2(tr.frames[k].values(), mo.mean);
            double v = 0.0;
            for (double x : mo.var) v += x;
            predicted += std::sqrt(v / M) / l2(mo.mean);
        }
        return std::pair{e / 10, predicted / 10};
    };
    const auto [e200, p200] = measured_and_predicted(200);
    const auto [e2000, p2000] = measured_and_predicted(2000);
    CHECK(e200 == doctest::Approx(p200).epsilon(0.2));
    CHECK(e2000 == doctest::Approx(p2000).epsilon(0.2));
    CHECK(e200 / e2000 >= 2.2);
    CHECK(e200 / e2000 <= 4.5);
}

TEST_CASE("particle Monte Carlo without diffusion is deterministic translation") {
    PdeSpec pde = convdiff_case(1);
    std::get<ConvectionDiffusion>(pde.model).kappa = 0.0;
    const Field ic = mode_field(pde.grid, 2);
    SolverRun run = run_with(Scheme::ParticleMC, 10, 64, 64);
    const auto a = mc_solve_full(pde, ic, 1, run);
    const auto b = mc_solve_full(pde, ic, 50, run);
    for (std::size_t k = 0; k < 10; ++k)
        CHECK(rel_l2(a.frames[k].values(), b.frames[k].values()) < 1e-12);
    CHECK_THROWS_AS(mc_solve_full(allen_cahn_case(1), Field(allen_cahn_case(1).grid), 10, run), InvalidArgument);
}
