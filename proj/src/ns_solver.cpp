#include <cmath>
#include <numbers>

#include "fk/error.hpp"
#include "fk/fft.hpp"
#include "fk/ref_solvers.hpp"
#include "fk/spectral.hpp"

namespace fk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double blowup_threshold = 1e6;

using cvec = std::vector<std::complex<double>>;

// Spectral workspace for the vorticity equation on an n x n torus.
class VorticityOperator {
public:
    VorticityOperator(int n, double extent) : n_(n), fft_({n, n}) {
        h1_ = fft_.half_length();
        const std::size_t S = fft_.spectrum_size();
        kx_.resize(S);
        ky_.resize(S);
        k2_.resize(S);
        keep_.resize(S);
        const double cut = (2.0 / 3.0) * (n / 2.0);
        for (int i = 0; i < n; ++i) {
            const int k0 = wavenumber(i, n);
            for (int j = 0; j < h1_; ++j) {
                const std::size_t s = static_cast<std::size_t>(i) * h1_ + j;
                kx_[s] = two_pi * k0 / extent;
                ky_[s] = two_pi * j / extent;
                k2_[s] = kx_[s] * kx_[s] + ky_[s] * ky_[s];
                keep_[s] = std::abs(k0) <= cut && j <= cut;
            }
        }
        for (auto* b : {&u_, &v_, &wx_, &wy_}) b->resize(static_cast<std::size_t>(n) * n);
        for (auto* b : {&uh_, &vh_, &wxh_, &wyh_}) b->resize(S);
    }

    std::size_t spectrum_size() const { return fft_.spectrum_size(); }
    const std::vector<double>& k2() const { return k2_; }

    void forward(std::span<const double> in, cvec& out) { fft_.forward(in, out); }

    // Physical field of w_hat (normalized).
    void to_physical(const cvec& w_hat, std::vector<double>& out) {
        fft_.inverse(w_hat, out);
        const double s = 1.0 / (static_cast<double>(n_) * n_);
        for (double& x : out) x *= s;
    }

    // Dealiased spectrum of -(u . grad w).
    void advection(const cvec& w_hat, cvec& out) {
        const std::complex<double> I(0.0, 1.0);
        const double s = 1.0 / (static_cast<double>(n_) * n_);
        for (std::size_t k = 0; k < w_hat.size(); ++k) {
            if (!keep_[k]) {
                uh_[k] = vh_[k] = wxh_[k] = wyh_[k] = 0.0;
                continue;
            }
            const std::complex<double> w = w_hat[k] * s;
            const std::complex<double> psi = k2_[k] > 0.0 ? w / k2_[k] : 0.0;
            uh_[k] = I * ky_[k] * psi;
            vh_[k] = -I * kx_[k] * psi;
            wxh_[k] = I * kx_[k] * w;
            wyh_[k] = I * ky_[k] * w;
        }
        fft_.inverse(uh_, u_);
        fft_.inverse(vh_, v_);
        fft_.inverse(wxh_, wx_);
        fft_.inverse(wyh_, wy_);
        for (std::size_t p = 0; p < u_.size(); ++p) u_[p] = -(u_[p] * wx_[p] + v_[p] * wy_[p]);
        fft_.forward(u_, out);
        for (std::size_t k = 0; k < out.size(); ++k)
            if (!keep_[k]) out[k] = 0.0;
    }

private:
    int n_;
    int h1_ = 0;
    RealFft fft_;
    std::vector<double> kx_, ky_, k2_;
    std::vector<bool> keep_;
    std::vector<double> u_, v_, wx_, wy_;
    cvec uh_, vh_, wxh_, wyh_;
};

}  // namespace

Trajectory crank_nicolson_ns_solve(const Field& omega0, double nu, ForcingKind forcing,
                                   double horizon, const SolverRun& run) {
    const Grid& g0 = omega0.grid();
    if (g0.dim() != 2 || !g0.periodic())
        throw InvalidArgument("Navier-Stokes solver needs a periodic 2D field");
    if (run.frames < 1 || run.steps % run.frames != 0)
        throw InvalidArgument("steps must be a positive multiple of frames");
    const Field w0 = lift_to_resolution(omega0, run.internal_resolution);
    const Grid& g = w0.grid();
    const int n = g.resolution(0);
    if (n % run.output_resolution != 0)
        throw InvalidArgument("output resolution does not divide the internal resolution");
    const int stride = n / run.output_resolution;

    PdeSpec forced;
    forced.model = NavierStokesVorticity{nu, forcing};
    forced.grid = g;
    const Field f = forcing_field(forced, w0, 0.0);

    VorticityOperator op(n, g.extent(0));
    const std::size_t S = op.spectrum_size();
    cvec w_hat(S), f_hat(S), adv(S), adv_prev(S);
    op.forward(w0.values(), w_hat);
    op.forward(f.values(), f_hat);

    const double dt = horizon / run.steps;
    const int per_frame = run.steps / run.frames;
    const auto& k2 = op.k2();
    std::vector<double> phys(g.size());
    Trajectory tr;
    for (int s = 1; s <= run.steps; ++s) {
        op.advection(w_hat, adv);
        for (std::size_t k = 0; k < S; ++k) {
            const std::complex<double> explicit_part =
                s == 1 ? adv[k] : 1.5 * adv[k] - 0.5 * adv_prev[k];
            const double d = 0.5 * dt * nu * k2[k];
            w_hat[k] = ((1.0 - d) * w_hat[k] + dt * (explicit_part + f_hat[k])) / (1.0 + d);
        }
        std::swap(adv, adv_prev);

        op.to_physical(w_hat, phys);
        double peak = 0.0;
        bool finite = true;
        for (double x : phys) {
            if (!std::isfinite(x)) finite = false;
            peak = std::max(peak, std::abs(x));
        }
        if (!finite || peak > blowup_threshold)
            throw Blowup("vorticity exceeded the blow-up threshold", s, s * dt);
        if (s % per_frame == 0) {
            tr.frames.push_back(subsample(Field(g, phys), stride));
            tr.times.push_back(horizon * (s / per_frame) / run.frames);
        }
    }
    tr.grid = tr.frames.front().grid();
    return tr;
}

}  // namespace fk
