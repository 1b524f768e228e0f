#include "fk/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fk/error.hpp"
#include "fk/fft.hpp"

namespace fk {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Samples of one axis of the (possibly extended) periodic representation.
int periodic_length(const Grid& g, int axis) {
    return g.periodic() ? g.resolution(axis) : 2 * (g.resolution(axis) - 1);
}

// Index into the original grid for extended index q, and the sign the
// extension applies (odd for DirichletZero, even for NeumannZero).
std::pair<int, double> fold_index(const Grid& g, int axis, int q) {
    const int n = g.resolution(axis);
    if (g.periodic() || q <= n - 1) return {q, 1.0};
    const double sign = g.boundary() == BoundaryKind::DirichletZero ? -1.0 : 1.0;
    return {2 * (n - 1) - q, sign};
}

std::vector<double> periodic_extension(const Grid& g, std::span<const double> v) {
    if (g.periodic()) return {v.begin(), v.end()};
    const int m0 = periodic_length(g, 0);
    if (g.dim() == 1) {
        std::vector<double> e(static_cast<std::size_t>(m0));
        for (int q = 0; q < m0; ++q) {
            const auto [i, s] = fold_index(g, 0, q);
            e[static_cast<std::size_t>(q)] = s * v[static_cast<std::size_t>(i)];
        }
        return e;
    }
    const int m1 = periodic_length(g, 1);
    std::vector<double> e(static_cast<std::size_t>(m0) * static_cast<std::size_t>(m1));
    for (int q0 = 0; q0 < m0; ++q0) {
        const auto [i, s0] = fold_index(g, 0, q0);
        for (int q1 = 0; q1 < m1; ++q1) {
            const auto [j, s1] = fold_index(g, 1, q1);
            e[static_cast<std::size_t>(q0) * m1 + q1] = s0 * s1 * v[g.index(i, j)];
        }
    }
    return e;
}

}  // namespace

Field spectral_interpolate(const Field& field, int factor, int upsample_cap) {
    if (!is_power_of_two(factor))
        throw InvalidArgument("interpolation factor must be a positive power of 2");
    if (factor > upsample_cap)
        throw InvalidArgument("interpolation factor exceeds the upsample cap");
    const Grid& g = field.grid();
    const Grid fine = g.refined(factor);
    if (factor == 1) return field;

    const int dim = g.dim();
    const int m0 = periodic_length(g, 0);
    const int m1 = dim == 2 ? periodic_length(g, 1) : 1;
    const int M0 = m0 * factor;
    const int M1 = m1 * factor;
    std::vector<int> src_shape = dim == 1 ? std::vector<int>{m0} : std::vector<int>{m0, m1};
    std::vector<int> dst_shape = dim == 1 ? std::vector<int>{M0} : std::vector<int>{M0, M1};
    RealFft src(src_shape);
    RealFft dst(dst_shape);
    const double scale = 1.0 / static_cast<double>(src.real_size());

    Field out(fine, field.components());
    std::vector<std::complex<double>> spec(src.spectrum_size());
    std::vector<std::complex<double>> padded(dst.spectrum_size());
    std::vector<double> big(dst.real_size());

    for (int c = 0; c < field.components(); ++c) {
        const auto ext = periodic_extension(g, field.component(c));
        src.forward(ext, spec);
        std::fill(padded.begin(), padded.end(), std::complex<double>{});
        if (dim == 1) {
            for (int k = 0; k < src.half_length(); ++k) {
                const double s = (m0 % 2 == 0 && k == m0 / 2) ? 0.5 : 1.0;
                padded[static_cast<std::size_t>(k)] = spec[static_cast<std::size_t>(k)] * s;
            }
        } else {
            const int h1 = src.half_length();
            const int H1 = dst.half_length();
            for (int i = 0; i < m0; ++i) {
                const int w = wavenumber(i, m0);
                const bool nyq0 = m0 % 2 == 0 && i == m0 / 2;
                const int rows[2] = {nyq0 ? m0 / 2 : (w >= 0 ? w : M0 + w), M0 - m0 / 2};
                const int nrows = nyq0 ? 2 : 1;
                const double rs = nyq0 ? 0.5 : 1.0;
                for (int r = 0; r < nrows; ++r) {
                    for (int k = 0; k < h1; ++k) {
                        const double s = (m1 % 2 == 0 && k == m1 / 2) ? 0.5 : 1.0;
                        padded[static_cast<std::size_t>(rows[r]) * H1 + k] +=
                            spec[static_cast<std::size_t>(i) * h1 + k] * (s * rs);
                    }
                }
            }
        }
        dst.inverse(padded, big);
        auto dst_values = out.component(c);
        if (dim == 1) {
            for (std::size_t j = 0; j < dst_values.size(); ++j) dst_values[j] = big[j] * scale;
        } else {
            const int n0 = fine.resolution(0);
            const int n1 = fine.resolution(1);
            for (int i = 0; i < n0; ++i)
                for (int j = 0; j < n1; ++j)
                    dst_values[fine.index(i, j)] =
                        big[static_cast<std::size_t>(i) * M1 + j] * scale;
        }
    }
    return out;
}

Field subsample(const Field& fine, int stride) {
    const Grid& g = fine.grid();
    if (stride < 1) throw InvalidArgument("subsample stride must be positive");
    std::array<int, 2> res{1, 1};
    for (int a = 0; a < g.dim(); ++a) {
        const int n = g.resolution(a);
        const int span = g.periodic() ? n : n - 1;
        if (span % stride != 0)
            throw InvalidArgument("subsample stride does not divide the grid");
        res[a] = g.periodic() ? n / stride : (n - 1) / stride + 1;
    }
    Grid coarse(g.dim(), res, {g.extent(0), g.extent(1)}, g.boundary());
    Field out(coarse, fine.components());
    for (int c = 0; c < fine.components(); ++c) {
        auto src = fine.component(c);
        auto dst = out.component(c);
        if (g.dim() == 1) {
            for (int i = 0; i < res[0]; ++i)
                dst[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(i) * stride];
        } else {
            for (int i = 0; i < res[0]; ++i)
                for (int j = 0; j < res[1]; ++j)
                    dst[coarse.index(i, j)] = src[g.index(i * stride, j * stride)];
        }
    }
    return out;
}

OffGridSampler::OffGridSampler(const Field& field)
    : grid_(field.grid()), components_(field.components()), values_(field.values()) {}

AxisWeights OffGridSampler::axis_weights(const Grid& grid, int axis, double x) {
    AxisWeights w;
    const int n = grid.resolution(axis);
    const double h = grid.spacing(axis);
    const double L = grid.extent(axis);
    if (grid.periodic()) {
        double xr = std::fmod(x, L);
        if (xr < 0.0) xr += L;
        long long k = std::llround(xr / h);
        const double delta = xr - static_cast<double>(k) * h;
        if (k == n) k = 0;
        if (delta == 0.0) {
            w.index.push_back(static_cast<int>(k));
            w.weight.push_back(1.0);
            return w;
        }
        constexpr double pi = std::numbers::pi;
        const double s = std::sin(n * pi * delta / L);
        w.index.resize(static_cast<std::size_t>(n));
        w.weight.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const long long off = k - j;
            const double sign = (off % 2 == 0) ? 1.0 : -1.0;
            const double d = pi * (delta + static_cast<double>(off) * h) / L;
            const double den = n % 2 == 0 ? n * std::tan(d) : n * std::sin(d);
            w.index[static_cast<std::size_t>(j)] = j;
            w.weight[static_cast<std::size_t>(j)] = sign * s / den;
        }
        return w;
    }
    const double xc = std::clamp(x, 0.0, L);
    const double t = xc / h;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, n - 2);
    const double frac = t - i;
    if (frac == 0.0) {
        w.index = {i};
        w.weight = {1.0};
    } else if (frac == 1.0) {
        w.index = {i + 1};
        w.weight = {1.0};
    } else {
        w.index = {i, i + 1};
        w.weight = {1.0 - frac, frac};
    }
    return w;
}

void OffGridSampler::evaluate(const Point& x, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(components_))
        throw InvalidArgument("OffGridSampler::evaluate output size mismatch");
    const auto w0 = axis_weights(grid_, 0, x[0]);
    const std::size_t np = grid_.size();
    if (grid_.dim() == 1) {
        for (int c = 0; c < components_; ++c) {
            const double* v = values_.data() + static_cast<std::size_t>(c) * np;
            double acc = 0.0;
            for (std::size_t a = 0; a < w0.index.size(); ++a)
                acc += w0.weight[a] * v[w0.index[a]];
            out[static_cast<std::size_t>(c)] = acc;
        }
        return;
    }
    const auto w1 = axis_weights(grid_, 1, x[1]);
    const std::size_t n1 = static_cast<std::size_t>(grid_.resolution(1));
    for (int c = 0; c < components_; ++c) {
        const double* v = values_.data() + static_cast<std::size_t>(c) * np;
        double acc = 0.0;
        for (std::size_t a = 0; a < w0.index.size(); ++a) {
            const double* row = v + static_cast<std::size_t>(w0.index[a]) * n1;
            double inner = 0.0;
            for (std::size_t b = 0; b < w1.index.size(); ++b)
                inner += w1.weight[b] * row[w1.index[b]];
            acc += w0.weight[a] * inner;
        }
        out[static_cast<std::size_t>(c)] = acc;
    }
}

double OffGridSampler::operator()(const Point& x, int component) const {
    if (components_ == 1) {
        double v = 0.0;
        evaluate(x, std::span<double>(&v, 1));
        return v;
    }
    std::vector<double> all(static_cast<std::size_t>(components_));
    evaluate(x, all);
    return all[static_cast<std::size_t>(component)];
}

TrigSeries1D::TrigSeries1D(const Field& field)
    : period_(field.grid().extent(0)), n_(field.grid().resolution(0)) {
    if (field.grid().dim() != 1 || !field.grid().periodic())
        throw InvalidArgument("TrigSeries1D needs a periodic 1D field");
    RealFft fft({n_});
    coeff_.resize(fft.spectrum_size());
    fft.forward(field.component(0), coeff_);
    for (std::size_t k = 0; k < coeff_.size(); ++k) {
        double s = 2.0 / n_;
        if (k == 0 || (n_ % 2 == 0 && static_cast<int>(k) == n_ / 2)) s = 1.0 / n_;
        coeff_[k] *= s;
    }
}

double TrigSeries1D::operator()(double x) const {
    const double theta = 2.0 * std::numbers::pi * x / period_;
    const std::complex<double> z(std::cos(theta), std::sin(theta));
    std::complex<double> zk = z;
    double acc = coeff_[0].real();
    const int top = static_cast<int>(coeff_.size()) - 1;
    const bool nyquist = n_ % 2 == 0;
    for (int k = 1; k <= top; ++k) {
        if (nyquist && k == top) {
            acc += coeff_[static_cast<std::size_t>(k)].real() * zk.real();
        } else {
            acc += (coeff_[static_cast<std::size_t>(k)] * zk).real();
        }
        zk *= z;
    }
    return acc;
}

}  // namespace fk
