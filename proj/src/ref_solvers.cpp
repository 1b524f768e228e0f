#include "fk/ref_solvers.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fk/error.hpp"
#include "fk/fft.hpp"
#include "fk/spectral.hpp"

namespace fk {

std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::SpectralRK2: return "spectral_rk2";
    case Scheme::SpectralExact: return "spectral_exact";
    case Scheme::SpectralCrankNicolson: return "spectral_cn";
    case Scheme::FiniteDifferenceRK2: return "fd_rk2";
    case Scheme::ParticleMC: return "particle_mc";
    }
    return "spectral_rk2";
}

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int stride_between(const Grid& fine, int output_resolution) {
    const int n = fine.resolution(0);
    const int span = fine.periodic() ? n : n - 1;
    const int out = fine.periodic() ? output_resolution : output_resolution - 1;
    if (out < 1 || span % out != 0)
        throw InvalidArgument("output resolution does not divide the internal resolution");
    return span / out;
}

void check_frames(const SolverRun& run) {
    if (run.frames < 1 || run.steps < run.frames || run.steps % run.frames != 0)
        throw InvalidArgument("steps must be a positive multiple of frames");
}

std::complex<double> ipow(std::complex<double> z, long long e) {
    std::complex<double> r(1.0, 0.0);
    while (e > 0) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

}  // namespace

Field lift_to_resolution(const Field& ic, int resolution) {
    const Grid& g = ic.grid();
    const int n = g.resolution(0);
    if (n == resolution) return ic;
    const int span = g.periodic() ? n : n - 1;
    const int target = g.periodic() ? resolution : resolution - 1;
    if (target < span || target % span != 0)
        throw InvalidArgument("initial field cannot be lifted to the internal resolution");
    const int factor = target / span;
    return spectral_interpolate(ic, factor, factor);
}

Trajectory spectral_convdiff_solve(const Field& ic, double beta, double kappa, double horizon,
                                   const SolverRun& run) {
    if (ic.grid().dim() != 1 || !ic.grid().periodic())
        throw InvalidArgument("spectral convection-diffusion needs a periodic 1D field");
    if (run.steps < 10) throw InvalidArgument("steps must be >= 10");
    check_frames(run);
    const Field u0 = lift_to_resolution(ic, run.internal_resolution);
    const Grid& g = u0.grid();
    const int n = g.resolution(0);
    const double L = g.extent(0);
    const int stride = stride_between(g, run.output_resolution);

    RealFft fft({n});
    std::vector<std::complex<double>> c(fft.spectrum_size());
    fft.forward(u0.values(), c);
    const double dt = horizon / run.steps;
    const int per_frame = run.steps / run.frames;

    std::vector<std::complex<double>> lambda(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double q = two_pi * static_cast<double>(k) / L;
        // Nyquist derivative is zero for a real field.
        const bool nyq = n % 2 == 0 && static_cast<int>(k) == n / 2;
        lambda[k] = {-kappa * q * q, nyq ? 0.0 : beta * q};
    }

    Trajectory tr;
    std::vector<std::complex<double>> ck = c;
    std::vector<double> phys(static_cast<std::size_t>(n));
    for (int f = 1; f <= run.frames; ++f) {
        const double t = horizon * f / run.frames;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (run.scheme == Scheme::SpectralExact) {
                ck[k] = c[k] * std::exp(lambda[k] * t);
            } else {
                const std::complex<double> z = lambda[k] * dt;
                ck[k] *= ipow(1.0 + z + 0.5 * z * z, per_frame);
            }
        }
        fft.inverse(ck, phys);
        Field fine(g);
        for (int i = 0; i < n; ++i) fine[static_cast<std::size_t>(i)] = phys[static_cast<std::size_t>(i)] / n;
        if (!fine.all_finite()) throw Blowup("spectral solve produced non-finite values", f * per_frame, t);
        tr.frames.push_back(subsample(fine, stride));
        tr.times.push_back(t);
    }
    tr.grid = tr.frames.front().grid();
    return tr;
}

Trajectory fd_allen_cahn_solve(const Field& ic, BoundaryKind boundary, double kappa,
                               double horizon, const SolverRun& run) {
    if (ic.grid().dim() != 1 || boundary == BoundaryKind::Periodic)
        throw InvalidArgument("Allen-Cahn solver needs a bounded 1D problem");
    check_frames(run);
    Field u = lift_to_resolution(ic, run.internal_resolution);
    const Grid g = u.grid();
    const int n = g.resolution(0);
    const double h = g.spacing(0);
    const double dt = horizon / run.steps;
    const int stride = stride_between(g, run.output_resolution);
    const int per_frame = run.steps / run.frames;
    Trajectory tr;
    const double ratio = kappa * dt / (h * h);
    if (ratio > 0.5)
        tr.notes.push_back("kappa*dt/h^2 = " + std::to_string(ratio) +
                           " exceeds 0.5; explicit stepping may be unstable");

    const bool dirichlet = boundary == BoundaryKind::DirichletZero;
    auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
        const double c = kappa / (h * h);
        for (int i = 0; i < n; ++i) {
            double lap;
            if (i == 0) {
                lap = dirichlet ? 0.0 : 2.0 * (v[1] - v[0]);
            } else if (i == n - 1) {
                lap = dirichlet ? 0.0 : 2.0 * (v[n - 2] - v[n - 1]);
            } else {
                lap = v[i - 1] - 2.0 * v[i] + v[i + 1];
            }
            const double x = v[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] = c * lap + x - x * x * x;
        }
        if (dirichlet) out[0] = out[static_cast<std::size_t>(n - 1)] = 0.0;
    };

    std::vector<double> v(u.values().begin(), u.values().end());
    if (dirichlet) v[0] = v[static_cast<std::size_t>(n - 1)] = 0.0;
    std::vector<double> k1(v.size()), k2(v.size()), tmp(v.size());
    for (int s = 1; s <= run.steps; ++s) {
        rhs(v, k1);
        for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] + dt * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.5 * dt * (k1[i] + k2[i]);
        if (s % per_frame == 0) {
            Field fine(g, v);
            if (!fine.all_finite()) throw Blowup("Allen-Cahn solve produced non-finite values", s, s * dt);
            tr.frames.push_back(subsample(fine, stride));
            tr.times.push_back(horizon * (s / per_frame) / run.frames);
        }
    }
    tr.grid = tr.frames.front().grid();
    return tr;
}

Trajectory mc_solve_full(const PdeSpec& pde, const Field& ic, int M, const SolverRun& run) {
    const auto* cd = std::get_if<ConvectionDiffusion>(&pde.model);
    if (!cd || !pde.grid.periodic())
        throw InvalidArgument("particle Monte Carlo supports periodic convection-diffusion only");
    if (M < 1) throw InvalidArgument("particle count M must be >= 1");
    check_frames(run);
    const TrigSeries1D u0(ic);
    const Grid& g = pde.grid;
    const double L = g.extent(0);
    const double dt = pde.horizon / run.steps;
    const double sigma = std::sqrt(2.0 * cd->kappa * dt);
    const double shift = cd->beta * dt;
    const int per_frame = run.steps / run.frames;
    const std::size_t P = g.size();

    std::vector<double> acc(P * static_cast<std::size_t>(run.frames), 0.0);
    const auto np = static_cast<long long>(P);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long pp = 0; pp < np; ++pp) {
        const auto p = static_cast<std::size_t>(pp);
        std::seed_seq sq{static_cast<std::uint32_t>(run.seed), static_cast<std::uint32_t>(run.seed >> 32),
                         static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
        std::mt19937_64 rng(sq);
        std::normal_distribution<double> normal;
        std::vector<double> sum(static_cast<std::size_t>(run.frames), 0.0);
        const double x0 = g.coordinate(0, static_cast<int>(p));
        for (int m = 0; m < M; ++m) {
            double x = x0;
            for (int s = 1; s <= run.steps; ++s) {
                x += shift + sigma * normal(rng);
                if (x >= L || x < 0.0) x -= L * std::floor(x / L);
                if (s % per_frame == 0) sum[static_cast<std::size_t>(s / per_frame - 1)] += u0(x);
            }
        }
        for (int f = 0; f < run.frames; ++f)
            acc[static_cast<std::size_t>(f) * P + p] = sum[static_cast<std::size_t>(f)] / M;
    }
    Trajectory tr;
    tr.grid = g;
    for (int f = 0; f < run.frames; ++f) {
        Field out(g, std::vector<double>(acc.begin() + static_cast<std::ptrdiff_t>(f * P),
                                         acc.begin() + static_cast<std::ptrdiff_t>((f + 1) * P)));
        tr.frames.push_back(std::move(out));
        tr.times.push_back(pde.horizon * (f + 1) / run.frames);
    }
    return tr;
}

}  // namespace fk
