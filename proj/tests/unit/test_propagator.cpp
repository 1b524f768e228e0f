#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fk/error.hpp"
#include "fk/init_sampler.hpp"
#include "fk/propagator.hpp"

using namespace fk;
using std::numbers::pi;

namespace {

PdeSpec convdiff(double beta, double kappa, int n = 64,
                 BoundaryKind b = BoundaryKind::Periodic) {
    PdeSpec p;
    p.model = ConvectionDiffusion{beta, kappa};
    p.grid = make_grid(1, n, 1.0, b);
    p.horizon = 2.0;
    return p;
}

Field mode(const Grid& g, int n, double shift = 0.0) {
    Field f(g);
    for (std::size_t p = 0; p < g.size(); ++p) f[p] = std::sin(2 * pi * n * (g.point(p)[0] + shift));
    return f;
}

double rel_l2(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

Field random_field(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Field f(g);
    for (auto& v : f.values()) v = n(rng);
    return f;
}

double trapezoid_mean(const Field& f) {
    const Grid& g = f.grid();
    double s = 0.0, w = 0.0;
    for (int i = 0; i < g.resolution(0); ++i) {
        const double e = (!g.periodic() && (i == 0 || i == g.resolution(0) - 1)) ? 0.5 : 1.0;
        s += e * f[i];
        w += e;
    }
    return s / w;
}

}  // namespace

TEST_CASE("zero diffusion and zero drift is the identity") {
    const PdeSpec pde = convdiff(0.0, 0.0);
    std::mt19937_64 rng(1);
    const Field u = random_field(pde.grid, rng);
    const Field out = propagate(u, pde, 0.0, PropagatorConfig{});
    for (std::size_t i = 0; i < u.values().size(); ++i) CHECK(out[i] == u[i]);
}

TEST_CASE("single Fourier modes decay and shift") {
    SUBCASE("pure heat equation") {
        const PdeSpec pde = convdiff(0.0, 0.01);
        const Field out = propagate(mode(pde.grid, 3), pde, 0.0, PropagatorConfig{});
        Field exact = mode(pde.grid, 3);
        for (auto& v : exact.values()) v *= std::exp(-4 * pi * pi * 9 * 0.01 * 0.2);
        CHECK(rel_l2(out, exact) < 1e-3);
    }
    SUBCASE("convection-diffusion") {
        const PdeSpec pde = convdiff(0.1, 0.005);
        const Field out = propagate(mode(pde.grid, 1), pde, 0.0, PropagatorConfig{});
        Field exact = mode(pde.grid, 1, 0.02);
        for (auto& v : exact.values()) v *= std::exp(-4 * pi * pi * 0.005 * 0.2);
        CHECK(rel_l2(out, exact) < 1e-3);
    }
}

TEST_CASE("linear operator matches propagate bit for bit") {
    std::mt19937_64 rng(7);
    // kappa = 0.0001 forces an upsampled working grid
    for (double kappa : {0.005, 0.0001}) {
        const PdeSpec pde = convdiff(0.1, kappa);
        PropagationDiagnostics diag;
        const SparseOperator op = assemble_linear_operator(pde, PropagatorConfig{}, &diag);
        CHECK(op.rows() == 64);
        if (kappa < 0.001) CHECK(diag.factor > 1);
        if (kappa < 0.001) CHECK(diag.max_defect <= PropagatorConfig{}.tolerance());
        for (int trial = 0; trial < 100; ++trial) {
            const Field u = random_field(pde.grid, rng);
            const Field a = op.apply(u);
            const Field b = propagate(u, pde, 0.0, PropagatorConfig{});
            double worst = 0.0;
            for (std::size_t i = 0; i < 64; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
            REQUIRE(worst == 0.0);
        }
    }
}

TEST_CASE("operator rows are normalized and compact") {
    const PdeSpec pde = convdiff(0.1, 0.005);
    const SparseOperator op = assemble_linear_operator(pde, PropagatorConfig{});
    Field ones(pde.grid);
    for (auto& v : ones.values()) v = 1.0;
    const Field out = op.apply(ones);
    for (double v : out.values()) CHECK(std::abs(v - 1.0) <= 2e-4);
    const double r = select_radius(diffusion_scale(pde, 0.2), 1, 1e-4);
    const auto bound = static_cast<std::size_t>(2 * std::ceil(r / pde.grid.spacing(0)) + 1);
    for (std::size_t p = 0; p < op.rows(); ++p) CHECK(op.row_nnz(p) <= bound);
}

TEST_CASE("nonlinear problems cannot be exported") {
    try {
        assemble_linear_operator(allen_cahn_case(1), PropagatorConfig{});
        FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("PROPAGATE") != std::string::npos);
    }
}

TEST_CASE("mass conservation and positivity without forcing") {
    std::mt19937_64 rng(3);
    for (auto b : {BoundaryKind::Periodic, BoundaryKind::NeumannZero}) {
        const int n = b == BoundaryKind::Periodic ? 64 : 65;
        const PdeSpec pde = convdiff(b == BoundaryKind::Periodic ? 0.1 : 0.0, 0.01, n, b);
        PropagatorConfig cfg;
        for (int trial = 0; trial < 10; ++trial) {
            Field u = random_field(pde.grid, rng);
            const Field out = propagate(u, pde, 0.0, cfg);
            double umax = 0.0;
            for (double v : u.values()) umax = std::max(umax, std::abs(v));
            CHECK(std::abs(trapezoid_mean(out) - trapezoid_mean(u)) <= 5 * cfg.tolerance() * umax);
            const double tol = 5 * cfg.tolerance() * umax;
            const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
            for (double v : out.values()) {
                CHECK(v >= *lo - tol);
                CHECK(v <= *hi + tol);
            }
        }
    }
}

TEST_CASE("Dirichlet diffusion keeps the walls at zero and decays the sine mode") {
    const PdeSpec pde = convdiff(0.0, 0.01, 65, BoundaryKind::DirichletZero);
    Field u(pde.grid);
    for (int i = 0; i < 65; ++i) u[i] = std::sin(pi * pde.grid.coordinate(0, i));
    const Field out = propagate(u, pde, 0.0, PropagatorConfig{});
    CHECK(out[0] == 0.0);
    CHECK(out[64] == 0.0);
    Field exact = u;
    for (auto& v : exact.values()) v *= std::exp(-pi * pi * 0.01 * 0.2);
    CHECK(rel_l2(out, exact) < 1e-3);
}

TEST_CASE("normalization failure and the interpolation switch") {
    const PdeSpec pde = convdiff(0.1, 0.0001);  // sigma well below the grid spacing
    PropagatorConfig cfg;
    cfg.upsample_cap = 1;
    const Field u = mode(pde.grid, 1);
    CHECK_THROWS_AS(propagate(u, pde, 0.0, cfg), NormalizationFailure);
    cfg.interpolation = Interpolation::Off;
    PropagationDiagnostics diag;
    CHECK_NOTHROW(propagate(u, pde, 0.0, cfg, &diag));
    CHECK(diag.factor == 1);
    CHECK(diag.max_defect > cfg.tolerance());
    cfg.interpolation = Interpolation::Auto;
    cfg.upsample_cap = 16;
    PropagationDiagnostics auto_diag;
    CHECK_NOTHROW(propagate(u, pde, 0.0, cfg, &auto_diag));
    CHECK(auto_diag.factor > 1);
    CHECK(auto_diag.max_defect <= cfg.tolerance());

    // The working spacing must reach sigma/2 even where the coarser grid
    // already meets the tolerance.
    const double sigma = std::sqrt(2.0 * 0.0001 * cfg.dt);
    int expected = 1;
    while (pde.grid.spacing(0) / expected > 0.5 * sigma) expected *= 2;
    CHECK(auto_diag.factor == expected);
}

TEST_CASE("CFL advisory is raised for long drift steps") {
    const PdeSpec pde = convdiff(2.0, 0.005);
    PropagationDiagnostics diag;
    propagate(mode(pde.grid, 1), pde, 0.0, PropagatorConfig{}, &diag);
    CHECK(diag.cfl_advisory);
    PropagationDiagnostics calm;
    propagate(mode(pde.grid, 1), convdiff(0.1, 0.005), 0.0, PropagatorConfig{}, &calm);
    CHECK_FALSE(calm.cfl_advisory);
}

TEST_CASE("nonlinear propagation is deterministic") {
    const PdeSpec ns = navier_stokes_case(1, 16);
    std::mt19937_64 rng(5);
    const Field w = sample_grf(GrfSpec{}, ns.grid, rng);
    PropagationDiagnostics diag;
    const Field a = propagate(w, ns, 0.0, PropagatorConfig{}, &diag);
    const Field b = propagate(w, ns, 0.0, PropagatorConfig{});
    CHECK(diag.passes == 2);
    for (std::size_t i = 0; i < a.values().size(); ++i) REQUIRE(a[i] == b[i]);

    const PdeSpec ac = allen_cahn_case(1);
    const Field u0 = FourierSeriesIC{{0.5, 0.2}}.sample(make_grid(1, 65, 1.0, BoundaryKind::Periodic));
    Field u(ac.grid);
    for (int i = 0; i < 65; ++i) u[i] = std::sin(pi * ac.grid.coordinate(0, i)) * 0.5;
    const Field c = propagate(u, ac, 0.0, PropagatorConfig{});
    CHECK(c[0] == 0.0);
    CHECK(c[64] == 0.0);
    (void)u0;
}

TEST_CASE("Allen-Cahn reaction grows small data at the linear rate") {
    PdeSpec ac = allen_cahn_case(3);  // Neumann
    Field u(ac.grid);
    for (int i = 0; i < 65; ++i) u[i] = 1e-4 * std::cos(pi * ac.grid.coordinate(0, i));
    PropagatorConfig cfg;
    cfg.dt = 0.01;
    const Field out = propagate(u, ac, 0.0, cfg);
    Field exact = u;
    for (auto& v : exact.values()) v *= std::exp((1 - 0.01 * pi * pi) * 0.01);
    CHECK(rel_l2(out, exact) < 1e-3);
}

TEST_CASE("Monte Carlo step with zero diffusion equals the Euler propagator") {
    const PdeSpec pde = convdiff(0.1, 0.0);
    std::mt19937_64 rng(9);
    const Field u = random_field(pde.grid, rng);
    PropagatorConfig cfg;
    cfg.drift = DriftScheme::Euler;
    const Field det = propagate(u, pde, 0.0, cfg);
    for (int M : {1, 7}) {
        const Field mc = mc_propagate(u, pde, 0.0, M, 42, cfg);
        for (std::size_t i = 0; i < 64; ++i) REQUIRE(mc[i] == det[i]);
    }
}

TEST_CASE("Monte Carlo step agrees with the analytic mode within its standard error") {
    const PdeSpec pde = convdiff(0.1, 0.005);
    const Grid& g = pde.grid;
    const int M = 20000;
    const Field mc = mc_propagate(mode(g, 1), pde, 0.0, M, 2024, PropagatorConfig{});
    const double sigma = diffusion_scale(pde, 0.2);
    const double b = 2 * pi * sigma;
    int within = 0;
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double a = 2 * pi * (g.coordinate(0, i) + 0.02);
        const double mean = std::exp(-0.5 * b * b) * std::sin(a);
        const double second = 0.5 * (1 - std::exp(-2 * b * b) * std::cos(2 * a));
        const double se = std::sqrt((second - mean * mean) / M);
        const double z = std::abs(mc[i] - mean) / se;
        worst = std::max(worst, z);
        if (z <= 3.0) ++within;
    }
    CHECK(within >= 61);  // 3 SE covers 99.7 %
    CHECK(worst < 4.5);
}

TEST_CASE("Monte Carlo variance scales like 1/M") {
    PdeSpec pde = convdiff(0.1, 0.005, 16);
    const Field u = mode(pde.grid, 1);
    auto pooled_var = [&](int M) {
        const int reps = 200;
        std::vector<double> s(16), s2(16);
        for (int r = 0; r < reps; ++r) {
            const Field e = mc_propagate(u, pde, 0.0, M, 1000 + r + 100000ull * M, PropagatorConfig{});
            for (int i = 0; i < 16; ++i) {
                s[i] += e[i];
                s2[i] += e[i] * e[i];
            }
        }
        double v = 0.0;
        for (int i = 0; i < 16; ++i) v += (s2[i] - s[i] * s[i] / reps) / (reps - 1);
        return v / 16;
    };
    const double ratio = pooled_var(200) / pooled_var(2000);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 12.5);
}

TEST_CASE("Monte Carlo on bounded domains") {
    SUBCASE("Dirichlet walls absorb") {
        const PdeSpec pde = convdiff(0.0, 0.01, 65, BoundaryKind::DirichletZero);
        Field u(pde.grid);
        for (int i = 0; i < 65; ++i) u[i] = std::sin(pi * pde.grid.coordinate(0, i));
        const Field mc = mc_propagate(u, pde, 0.0, 20000, 5, PropagatorConfig{});
        Field exact = u;
        for (auto& v : exact.values()) v *= std::exp(-pi * pi * 0.01 * 0.2);
        CHECK(rel_l2(mc, exact) < 0.02);
        CHECK(mc[0] == 0.0);
    }
    SUBCASE("Neumann walls reflect") {
        const PdeSpec pde = convdiff(0.0, 0.01, 65, BoundaryKind::NeumannZero);
        Field u(pde.grid);
        for (auto& v : u.values()) v = 1.0;
        const Field mc = mc_propagate(u, pde, 0.0, 100, 5, PropagatorConfig{});
        for (double v : mc.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo is reproducible per seed") {
    const PdeSpec pde = convdiff(0.1, 0.005);
    const Field u = mode(pde.grid, 2);
    const Field a = mc_propagate(u, pde, 0.0, 50, 77, PropagatorConfig{});
    const Field b = mc_propagate(u, pde, 0.0, 50, 77, PropagatorConfig{});
    const Field c = mc_propagate(u, pde, 0.0, 50, 78, PropagatorConfig{});
    bool differs = false;
    for (std::size_t i = 0; i < 64; ++i) {
        REQUIRE(a[i] == b[i]);
        differs = differs || a[i] != c[i];
    }
    CHECK(differs);
}

TEST_CASE("FKW1 operator files") {
    const PdeSpec pde = convdiff(0.1, 0.005);
    const SparseOperator op = assemble_linear_operator(pde, PropagatorConfig{});
    std::stringstream ss;
    write_operator(ss, op);
    const std::string bytes = ss.str();

    std::stringstream in(bytes);
    const auto j = pde_to_json(pde);
    const SparseOperator back = read_operator(in, 0.2, &j);
    CHECK(back.rows() == 64);
    CHECK(back.nnz() == op.nnz());
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(pde.grid, rng);
        const Field a = back.apply(u);
        const Field b = propagate(u, pde, 0.0, PropagatorConfig{});
        for (std::size_t i = 0; i < 64; ++i) REQUIRE(a[i] == b[i]);
    }

    std::stringstream wrong_dt(bytes);
    CHECK_THROWS_AS(read_operator(wrong_dt, 0.1), FormatError);
    const auto other = pde_to_json(convdiff(0.1, 0.01));
    std::stringstream wrong_pde(bytes);
    CHECK_THROWS_AS(read_operator(wrong_pde, std::nullopt, &other), FormatError);
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_operator(cut), FormatError);
}
