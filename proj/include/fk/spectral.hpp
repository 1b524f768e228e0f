#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fk/grid.hpp"

namespace fk {

/// Band-limited upsampling onto `field.grid().refined(factor)`.
///
/// Periodic fields are zero-padded in Fourier space (the Nyquist bin is split
/// evenly between +N/2 and -N/2). DirichletZero fields use the odd extension
/// and NeumannZero fields the even extension over the doubled period, so the
/// interpolant honours the boundary condition. Point values are interpolated:
/// the refined field agrees with the input at the original nodes.
///
/// Rejects factors that are not a power of two or exceed `upsample_cap`.
Field spectral_interpolate(const Field& field, int factor, int upsample_cap = 16);

/// Every `stride`-th sample along each axis (1024 -> 64 periodic,
/// 1025 -> 65 bounded for stride 16).
Field subsample(const Field& fine, int stride);

/// Sparse interpolation weights along one axis.
struct AxisWeights {
    std::vector<int> index;
    std::vector<double> weight;
};

/// Off-grid evaluation of a sampled field.
///
/// Periodic grids use the trigonometric (cardinal sinc) interpolant, which is
/// exact for band-limited fields; bounded grids use linear interpolation.
/// Exact grid nodes return the stored sample. The sampler keeps a view of the
/// field's values, so the field must outlive it.
class OffGridSampler {
public:
    explicit OffGridSampler(const Field& field);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }

    double operator()(const Point& x, int component = 0) const;
    /// Evaluates every component at x; `out.size()` must equal components().
    void evaluate(const Point& x, std::span<double> out) const;

    /// Per-axis weights for coordinate `x` on `grid` (sorted by index).
    static AxisWeights axis_weights(const Grid& grid, int axis, double x);

private:
    Grid grid_;
    int components_;
    std::span<const double> values_;
};

/// Fourier-series evaluator for a periodic 1D field; the same interpolant as
/// OffGridSampler but O(P) per point without transcendental calls per term.
class TrigSeries1D {
public:
    explicit TrigSeries1D(const Field& field);
    double operator()(double x) const;

private:
    double period_;
    int n_;
    std::vector<std::complex<double>> coeff_;  // k = 0 .. n/2, scaled by 1/n
};

}  // namespace fk
