#include "fk/grid.hpp"

#include <algorithm>
#include <cmath>

#include "fk/error.hpp"

namespace fk {

std::string_view to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::DirichletZero: return "dirichlet";
    case BoundaryKind::NeumannZero: return "neumann";
    }
    return "periodic";
}

BoundaryKind parse_boundary(std::string_view text) {
    if (text == "periodic") return BoundaryKind::Periodic;
    if (text == "dirichlet" || text == "dirichlet_zero") return BoundaryKind::DirichletZero;
    if (text == "neumann" || text == "neumann_zero") return BoundaryKind::NeumannZero;
    throw FormatError("unknown boundary kind '" + std::string(text) + "'");
}

Grid::Grid(int dim, std::array<int, 2> resolution, std::array<double, 2> extent,
           BoundaryKind boundary)
    : dim_(dim), resolution_(resolution), extent_(extent), boundary_(boundary) {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (dim == 1) {
        resolution_[1] = 1;
        extent_[1] = 1.0;
    }
    for (int a = 0; a < dim; ++a) {
        if (resolution_[a] < 4) throw InvalidArgument("grid resolution must be >= 4");
        if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]))
            throw InvalidArgument("grid extent must be positive");
        spacing_[a] = periodic() ? extent_[a] / resolution_[a]
                                 : extent_[a] / (resolution_[a] - 1);
    }
    if (dim == 1) spacing_[1] = 1.0;
}

std::size_t Grid::size() const noexcept {
    return static_cast<std::size_t>(resolution_[0]) *
           static_cast<std::size_t>(dim_ == 2 ? resolution_[1] : 1);
}

double Grid::cell_volume() const noexcept {
    return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

Point Grid::point(std::size_t index) const {
    if (dim_ == 1) return {coordinate(0, static_cast<int>(index)), 0.0};
    const auto n1 = static_cast<std::size_t>(resolution_[1]);
    return {coordinate(0, static_cast<int>(index / n1)),
            coordinate(1, static_cast<int>(index % n1))};
}

Grid Grid::refined(int factor) const {
    if (factor < 1) throw InvalidArgument("refinement factor must be positive");
    std::array<int, 2> res = resolution_;
    for (int a = 0; a < dim_; ++a)
        res[a] = periodic() ? resolution_[a] * factor : (resolution_[a] - 1) * factor + 1;
    return Grid(dim_, res, extent_, boundary_);
}

bool Grid::operator==(const Grid& other) const {
    return dim_ == other.dim_ && resolution_ == other.resolution_ &&
           extent_ == other.extent_ && boundary_ == other.boundary_;
}

Grid make_grid(int dim, int resolution, double extent, BoundaryKind boundary) {
    return Grid(dim, {resolution, resolution}, {extent, extent}, boundary);
}

Field::Field(Grid grid, int components)
    : grid_(std::move(grid)), components_(components),
      values_(grid_.size() * static_cast<std::size_t>(components), 0.0) {
    if (components < 1) throw InvalidArgument("field needs at least one component");
}

Field::Field(Grid grid, std::vector<double> values, int components)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
    if (components < 1) throw InvalidArgument("field needs at least one component");
    if (values_.size() != grid_.size() * static_cast<std::size_t>(components))
        throw InvalidArgument("field value count does not match grid size");
}

std::span<const double> Field::component(int c) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * points(),
                                                    points());
}

std::span<double> Field::component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * points(), points());
}

bool Field::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double axis_displacement(const Grid& grid, int axis, double x, double y) {
    double d = y - x;
    if (grid.periodic()) {
        const double L = grid.extent(axis);
        d -= L * std::round(d / L);
    }
    return d;
}

Point wrap_point(const Grid& grid, Point p) {
    if (!grid.periodic()) return p;
    for (int a = 0; a < grid.dim(); ++a) {
        const double L = grid.extent(a);
        double v = std::fmod(p[a], L);
        if (v < 0.0) v += L;
        if (v >= L) v -= L;
        p[a] = v;
    }
    return p;
}

namespace {

// Candidate indices along one axis whose coordinate may lie within r of c.
std::vector<int> axis_candidates(const Grid& grid, int axis, double c, double r) {
    const int n = grid.resolution(axis);
    const double h = grid.spacing(axis);
    std::vector<int> out;
    const auto lo = static_cast<long long>(std::floor((c - r) / h)) - 1;
    const auto hi = static_cast<long long>(std::ceil((c + r) / h)) + 1;
    if (grid.periodic()) {
        if (hi - lo + 1 >= n) {
            out.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
            return out;
        }
        for (long long i = lo; i <= hi; ++i) {
            long long m = i % n;
            if (m < 0) m += n;
            out.push_back(static_cast<int>(m));
        }
    } else {
        for (long long i = std::max<long long>(lo, 0); i <= std::min<long long>(hi, n - 1); ++i)
            out.push_back(static_cast<int>(i));
    }
    return out;
}

}  // namespace

std::vector<std::size_t> neighborhood(const Grid& grid, const Point& center, double r) {
    std::vector<std::size_t> result;
    if (!(r >= 0.0)) return result;
    const double r2 = r * r;
    const auto c0 = axis_candidates(grid, 0, center[0], r);
    if (grid.dim() == 1) {
        for (int i : c0) {
            const double d = axis_displacement(grid, 0, center[0], grid.coordinate(0, i));
            if (d * d <= r2) result.push_back(static_cast<std::size_t>(i));
        }
    } else {
        const auto c1 = axis_candidates(grid, 1, center[1], r);
        std::vector<double> d1(c1.size());
        for (std::size_t j = 0; j < c1.size(); ++j) {
            const double d = axis_displacement(grid, 1, center[1], grid.coordinate(1, c1[j]));
            d1[j] = d * d;
        }
        for (int i : c0) {
            const double d = axis_displacement(grid, 0, center[0], grid.coordinate(0, i));
            const double d0 = d * d;
            if (d0 > r2) continue;
            for (std::size_t j = 0; j < c1.size(); ++j)
                if (d0 + d1[j] <= r2) result.push_back(grid.index(i, c1[j]));
        }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

}  // namespace fk
