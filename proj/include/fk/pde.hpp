#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "fk/config.hpp"
#include "fk/grid.hpp"

namespace fk {

enum class ForcingKind { None, Li, Kolmogorov, Reaction };

std::string_view to_string(ForcingKind kind);
ForcingKind parse_forcing(std::string_view text);

/// u_t = kappa u_xx + beta u_x on the periodic line.
struct ConvectionDiffusion {
    double beta = 0.1;
    double kappa = 0.005;
};

/// u_t = kappa u_xx + u - u^3 on [0, 1] with zero Dirichlet or Neumann data.
struct AllenCahn {
    double kappa = 0.01;
};

/// w_t + u . grad w = nu lap w + f on the unit torus.
struct NavierStokesVorticity {
    double nu = 1e-4;
    ForcingKind forcing = ForcingKind::Li;
};

struct PdeSpec {
    std::variant<ConvectionDiffusion, AllenCahn, NavierStokesVorticity> model;
    Grid grid;
    double horizon = 1.0;
    int frames = 10;
    int N = 5;  // frequency cap of the 1D initial-condition family

    std::string name() const;       // "convdiff" | "allen_cahn" | "navier_stokes"
    double diffusivity() const;     // kappa or nu
    bool linear() const;            // drift and forcing independent of the state
    ForcingKind forcing() const;
    double frame_dt() const { return horizon / frames; }

    /// Checks the invariants (positive diffusivity, grid kind per model).
    void validate() const;
};

/// Benchmark cases E1..E4 (case index 1..4) at desk resolution.
PdeSpec convdiff_case(int e);
PdeSpec allen_cahn_case(int e);
PdeSpec navier_stokes_case(int e, int resolution = 64);

/// Drift field (dim components) for the given state.
Field drift(const PdeSpec& pde, const Field& state);

/// Velocity from vorticity by a spectral streamfunction solve; the k = 0
/// mode of the streamfunction is zero.
Field velocity_from_vorticity(const Field& omega);

/// f(x, t); Reaction needs `state` (evaluated off-grid by the grid's
/// interpolation rule).
double forcing_value(const PdeSpec& pde, const Point& x, double t, const Field* state = nullptr);

/// f sampled at every grid point.
Field forcing_field(const PdeSpec& pde, const Field& state, double t);

nlohmann::json pde_to_json(const PdeSpec& pde);
PdeSpec pde_from_json(const nlohmann::json& j);

/// Keys: pde, beta, kappa, nu, forcing, boundary, grid, T, frames, N, extent.
PdeSpec pde_from_config(const Config& cfg);
const std::set<std::string>& pde_config_keys();

}  // namespace fk
