#include "fk/kernel.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

#include "fk/error.hpp"

namespace fk {

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidArgument("epsilon must be in (0, 0.5)");
    if (image_terms < 1) throw InvalidArgument("image_terms must be >= 1");
    if (upsample_cap < 1 || (upsample_cap & (upsample_cap - 1)) != 0)
        throw InvalidArgument("upsample_cap must be a power of 2");
}

double TransitionKernel::sum() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
}

double TransitionKernel::defect() const { return std::abs(sum() + absorbed_mass - 1.0); }

double select_radius(double sigma, int dim, double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("epsilon must be in (0, 0.5]");
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    if (dim == 1) return sigma * std::numbers::sqrt2 * boost::math::erfc_inv(eps);
    if (dim == 2) return sigma * std::sqrt(2.0 * std::log(1.0 / eps));
    throw InvalidArgument("dim must be 1 or 2");
}

namespace {

inline double gauss(double d, double sigma) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double z = d / sigma;
    return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
}

// Trapezoid factor for bounded endpoints.
inline double edge_factor(const Grid& g, int axis, int i) {
    if (g.periodic()) return 1.0;
    return (i == 0 || i == g.resolution(axis) - 1) ? 0.5 : 1.0;
}

// Largest density any dropped image can contribute, relative to the peak.
void check_image_tail(const Grid& g, double sigma, int images) {
    for (int a = 0; a < g.dim(); ++a) {
        const double gap = images * g.image_period(a) - g.extent(a);
        const double z = gap / sigma;
        if (!(0.5 * z * z > 34.5))  // exp(-34.5) ~ 1e-15
            throw InvalidArgument("too few image terms for this sigma");
    }
}

}  // namespace

double axis_density(const Grid& g, int axis, double c, double y, double sigma, int images) {
    const double L = g.extent(axis);
    double s = 0.0;
    if (g.periodic()) {
        const double d = axis_displacement(g, axis, c, y);
        for (int n = -images; n <= images; ++n) s += gauss(d + n * L, sigma);
        return s;
    }
    const double sign = g.boundary() == BoundaryKind::DirichletZero ? -1.0 : 1.0;
    for (int n = -images; n <= images; ++n)
        s += gauss(y - c + 2.0 * n * L, sigma) + sign * gauss(y + c + 2.0 * n * L, sigma);
    return s;
}

TransitionKernel transition_kernel(const Grid& working, const Point& source, double sigma,
                                   const PropagatorConfig& config) {
    check_image_tail(working, sigma, config.image_terms);
    const double r = select_radius(sigma, working.dim(), config.epsilon);
    TransitionKernel k;
    k.source = source;
    k.working_resolution = {working.resolution(0), working.dim() == 2 ? working.resolution(1) : 1};
    k.index = neighborhood(working, source, r);
    k.weight.resize(k.index.size());

    const int K = config.image_terms;
    if (working.dim() == 1) {
        const double h = working.spacing(0);
        for (std::size_t q = 0; q < k.index.size(); ++q) {
            const int i = static_cast<int>(k.index[q]);
            k.weight[q] = axis_density(working, 0, source[0], working.coordinate(0, i), sigma, K) *
                          h * edge_factor(working, 0, i);
        }
    } else {
        // Separable density: cache per-axis factors by index.
        const int n1 = working.resolution(1);
        std::vector<double> row_cache(static_cast<std::size_t>(working.resolution(0)), -1.0);
        std::vector<double> col_cache(static_cast<std::size_t>(n1), -1.0);
        auto axis_factor = [&](std::vector<double>& cache, int axis, int i) {
            double& v = cache[static_cast<std::size_t>(i)];
            if (v < 0.0)
                v = axis_density(working, axis, source[axis], working.coordinate(axis, i), sigma,
                                 K) *
                    working.spacing(axis) * edge_factor(working, axis, i);
            return v;
        };
        for (std::size_t q = 0; q < k.index.size(); ++q) {
            const int i = static_cast<int>(k.index[q] / static_cast<std::size_t>(n1));
            const int j = static_cast<int>(k.index[q] % static_cast<std::size_t>(n1));
            k.weight[q] = axis_factor(row_cache, 0, i) * axis_factor(col_cache, 1, j);
        }
    }

    if (working.boundary() == BoundaryKind::DirichletZero) {
        // Mass left in the domain, by the same quadrature over a window wide
        // enough that the Gaussian tail beyond it is below double precision.
        double inside = 1.0;
        const double reach = r + 10.0 * sigma;
        for (int a = 0; a < working.dim(); ++a) {
            const double h = working.spacing(a);
            const int n = working.resolution(a);
            const int lo = std::max(0, static_cast<int>(std::floor((source[a] - reach) / h)));
            const int hi = std::min(n - 1, static_cast<int>(std::ceil((source[a] + reach) / h)));
            double q = 0.0;
            for (int i = lo; i <= hi; ++i)
                q += axis_density(working, a, source[a], working.coordinate(a, i), sigma, K) * h *
                     edge_factor(working, a, i);
            inside *= q;
        }
        k.absorbed_mass = std::max(0.0, 1.0 - inside);
    }
    return k;
}

TransitionKernel interpolation_kernel(const Grid& grid, const Point& source) {
    TransitionKernel k;
    k.source = source;
    k.working_resolution = {grid.resolution(0), grid.dim() == 2 ? grid.resolution(1) : 1};
    const auto w0 = OffGridSampler::axis_weights(grid, 0, source[0]);
    if (grid.dim() == 1) {
        k.index.assign(w0.index.begin(), w0.index.end());
        k.weight = w0.weight;
        return k;
    }
    const auto w1 = OffGridSampler::axis_weights(grid, 1, source[1]);
    for (std::size_t a = 0; a < w0.index.size(); ++a)
        for (std::size_t b = 0; b < w1.index.size(); ++b) {
            k.index.push_back(grid.index(w0.index[a], w1.index[b]));
            k.weight.push_back(w0.weight[a] * w1.weight[b]);
        }
    return k;
}

Point heun_backtrace(const Point& x, const OffGridSampler& beta_end,
                     const OffGridSampler& beta_start, double dt, DriftScheme scheme) {
    const Grid& g = beta_end.grid();
    const int dim = g.dim();
    double b1[2] = {0.0, 0.0};
    beta_end.evaluate(x, std::span<double>(b1, static_cast<std::size_t>(dim)));
    Point xi = x;
    if (scheme == DriftScheme::Euler) {
        for (int a = 0; a < dim; ++a) xi[a] = x[a] + b1[a] * dt;
    } else {
        Point mid = x;
        for (int a = 0; a < dim; ++a) mid[a] = x[a] + b1[a] * dt;
        mid = wrap_point(g, mid);
        double b2[2] = {0.0, 0.0};
        beta_start.evaluate(mid, std::span<double>(b2, static_cast<std::size_t>(dim)));
        for (int a = 0; a < dim; ++a) xi[a] = x[a] + 0.5 * (b1[a] * dt + b2[a] * dt);
    }
    if (g.periodic()) return wrap_point(g, xi);
    for (int a = 0; a < dim; ++a)
        if (xi[a] < 0.0 || xi[a] > g.extent(a))
            throw DriftOutOfDomain("backtraced point left the bounded domain");
    return xi;
}

}  // namespace fk
