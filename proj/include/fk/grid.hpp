#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fk {

enum class BoundaryKind { Periodic, DirichletZero, NeumannZero };

std::string_view to_string(BoundaryKind kind);
BoundaryKind parse_boundary(std::string_view text);

/// Spatial location. Only the first `dim` coordinates are meaningful.
using Point = std::array<double, 2>;

/// Uniform rectangular sample grid in one or two dimensions.
///
/// Periodic axes hold P points over [0, L) and omit the duplicated endpoint;
/// bounded axes hold P points over [0, L] including both endpoints. Samples
/// are stored row-major with axis 0 slowest.
class Grid {
public:
    Grid() = default;
    Grid(int dim, std::array<int, 2> resolution, std::array<double, 2> extent,
         BoundaryKind boundary);

    int dim() const noexcept { return dim_; }
    int resolution(int axis) const { return resolution_[axis]; }
    double extent(int axis) const { return extent_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    BoundaryKind boundary() const noexcept { return boundary_; }
    bool periodic() const noexcept { return boundary_ == BoundaryKind::Periodic; }

    std::size_t size() const noexcept;
    double cell_volume() const noexcept;

    double coordinate(int axis, int i) const { return i * spacing_[axis]; }
    Point point(std::size_t index) const;
    std::size_t index(int i0, int i1 = 0) const {
        return dim_ == 1 ? static_cast<std::size_t>(i0)
                         : static_cast<std::size_t>(i0) * resolution_[1] + i1;
    }

    /// Grid with spacing divided by `factor` on every axis (P*factor points
    /// per periodic axis, (P-1)*factor+1 per bounded axis).
    Grid refined(int factor) const;

    /// Length of the periodic image lattice along an axis: L for periodic
    /// grids, 2L for bounded grids (reflection doubles the period).
    double image_period(int axis) const {
        return periodic() ? extent_[axis] : 2.0 * extent_[axis];
    }

    bool operator==(const Grid& other) const;

private:
    int dim_ = 1;
    std::array<int, 2> resolution_{1, 1};
    std::array<double, 2> extent_{1.0, 1.0};
    std::array<double, 2> spacing_{1.0, 1.0};
    BoundaryKind boundary_ = BoundaryKind::Periodic;
};

/// Square/interval grid with the same resolution and extent on every axis.
/// Rejects resolution < 4 and non-positive extent.
Grid make_grid(int dim, int resolution, double extent, BoundaryKind boundary);

/// Samples on a grid; vector fields store one contiguous slab per component.
class Field {
public:
    Field() = default;
    explicit Field(Grid grid, int components = 1);
    Field(Grid grid, std::vector<double> values, int components = 1);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }
    std::size_t points() const noexcept { return grid_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> component(int c) const;
    std::span<double> component(int c);

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool all_finite() const noexcept;

private:
    Grid grid_;
    int components_ = 1;
    std::vector<double> values_;
};

/// Indices p with |x_p - center| <= r under the grid's metric (torus distance
/// on periodic grids), in ascending order. Ties at exactly r are included.
std::vector<std::size_t> neighborhood(const Grid& grid, const Point& center, double r);

/// Signed displacement y - x reduced to the nearest periodic image along an
/// axis; plain difference on bounded axes.
double axis_displacement(const Grid& grid, int axis, double x, double y);

/// Maps a point into the domain on periodic axes ([0, L)); bounded axes are
/// returned unchanged.
Point wrap_point(const Grid& grid, Point p);

}  // namespace fk
