#pragma once

#include <cstdint>

#include "fk/kernel.hpp"
#include "fk/pde.hpp"
#include "fk/sparse_operator.hpp"

namespace fk {

/// What a propagation step had to do; filled on request.
struct PropagationDiagnostics {
    int factor = 1;             // working-grid refinement actually used
    double max_defect = 0.0;    // worst |sum w + absorbed - 1| over all kernels
    bool cfl_advisory = false;  // max |beta| dt exceeded a quarter of the extent
    double max_drift_step = 0.0;
    int passes = 0;
};

/// One deterministic Feynman-Kac step u(t) -> u(t + dt).
///
/// Linear problems go through assemble_linear_operator, so the result is
/// bit-identical to applying the exported operator. Nonlinear problems use
/// two passes: the first freezes drift and forcing at t, the second uses the
/// first-pass field for the t + dt drift stage and forcing endpoint.
Field propagate(const Field& u, const PdeSpec& pde, double t, const PropagatorConfig& config,
                PropagationDiagnostics* diag = nullptr);

/// Sparse W, g with propagate(u) == W u + g; rejects nonlinear problems.
SparseOperator assemble_linear_operator(const PdeSpec& pde, const PropagatorConfig& config,
                                        PropagationDiagnostics* diag = nullptr);

/// Euler-Maruyama estimate of the same step with M samples per point. Point p
/// draws from its own stream seeded by (seed, p). Drift and forcing are
/// taken from u (time t).
Field mc_propagate(const Field& u, const PdeSpec& pde, double t, int M, std::uint64_t seed,
                   const PropagatorConfig& config);

/// sqrt(2 kappa dt)
double diffusion_scale(const PdeSpec& pde, double dt);

}  // namespace fk
