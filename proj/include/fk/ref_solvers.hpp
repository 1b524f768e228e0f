#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fk/grid.hpp"
#include "fk/pde.hpp"

namespace fk {

/// Snapshots at times T k / frames, k = 1..frames (the initial state is not
/// included).
struct Trajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<Field> frames;
    std::vector<std::string> notes;  // non-fatal diagnostics (stability warnings)
};

enum class Scheme { SpectralRK2, SpectralExact, SpectralCrankNicolson, FiniteDifferenceRK2, ParticleMC };

std::string_view to_string(Scheme s);

struct SolverRun {
    Scheme scheme = Scheme::SpectralRK2;
    int steps = 1000;
    int internal_resolution = 1024;  // points per axis the integrator works on
    int output_resolution = 64;      // points per axis in the returned frames
    int frames = 10;
    std::uint64_t seed = 0;  // ParticleMC only
};

/// u_t = kappa u_xx + beta u_x, periodic. `ic` may be given at the internal
/// resolution or any coarser power-of-2 fraction of it (then band-limited
/// interpolation is applied). SpectralExact uses the integrating factor.
Trajectory spectral_convdiff_solve(const Field& ic, double beta, double kappa, double horizon,
                                   const SolverRun& run);

/// Vorticity form on the unit torus: Crank-Nicolson diffusion, Adams-Bashforth 2
/// advection (Euler on the first step), explicit forcing, 2/3-rule dealiasing.
/// Throws Blowup when max |w| exceeds 1e6 or turns non-finite.
Trajectory crank_nicolson_ns_solve(const Field& omega0, double nu, ForcingKind forcing,
                                   double horizon, const SolverRun& run);

/// u_t = kappa u_xx + u - u^3 on [0, L], ghost-point central differences
/// and RK2 (Heun). Adds a note when kappa dt / h^2 > 0.5.
Trajectory fd_allen_cahn_solve(const Field& ic, BoundaryKind boundary, double kappa,
                               double horizon, const SolverRun& run);

/// Particle Monte Carlo for the linear convection-diffusion problem: M
/// Euler-Maruyama paths per output point, u0 averaged at the path ends.
/// Point p draws from its own stream seeded by (run.seed, p).
Trajectory mc_solve_full(const PdeSpec& pde, const Field& ic, int M, const SolverRun& run);

/// Brings an initial field onto the integrator grid (identity or spectral
/// interpolation by a power-of-2 factor).
Field lift_to_resolution(const Field& ic, int resolution);

}  // namespace fk
