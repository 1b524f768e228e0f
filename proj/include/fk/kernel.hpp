#pragma once

#include <cstddef>
#include <vector>

#include "fk/grid.hpp"
#include "fk/spectral.hpp"

namespace fk {

enum class DriftScheme { Heun, Euler };
enum class Interpolation { Auto, Off };

struct PropagatorConfig {
    double dt = 0.2;
    double epsilon = 1e-4;
    DriftScheme drift = DriftScheme::Heun;
    Interpolation interpolation = Interpolation::Auto;
    int upsample_cap = 16;
    int image_terms = 8;
    double normalization_tolerance = 0.0;  // <= 0 means 2 * epsilon

    double tolerance() const {
        return normalization_tolerance > 0.0 ? normalization_tolerance : 2.0 * epsilon;
    }
    void validate() const;
};

/// Discrete transition probabilities from one backtraced point.
struct TransitionKernel {
    Point source{};
    std::vector<std::size_t> index;  // into the working grid, ascending
    std::vector<double> weight;      // density * trapezoid cell volume
    double absorbed_mass = 0.0;      // Dirichlet only
    std::array<int, 2> working_resolution{0, 0};

    double sum() const;
    /// |sum + absorbed_mass - 1|
    double defect() const;
};

/// Smallest r whose ball holds 1 - eps of an isotropic Gaussian with
/// per-axis standard deviation sigma.
double select_radius(double sigma, int dim, double eps);

/// Image-sum transition density along one axis of `grid` from c to y
/// (wrapped, absorbed or reflected by the grid's boundary kind).
double axis_density(const Grid& grid, int axis, double c, double y, double sigma, int images);

TransitionKernel transition_kernel(const Grid& working, const Point& source, double sigma,
                                   const PropagatorConfig& config);

/// Kernel for sigma = 0: the off-grid interpolation weights at `source`.
TransitionKernel interpolation_kernel(const Grid& grid, const Point& source);

/// Backtraced departure point. `beta_end` and `beta_start` are drift fields
/// (dim components) at t + dt and t. Periodic results are wrapped; bounded
/// results outside the domain raise DriftOutOfDomain.
Point heun_backtrace(const Point& x, const OffGridSampler& beta_end,
                     const OffGridSampler& beta_start, double dt, DriftScheme scheme);

}  // namespace fk
