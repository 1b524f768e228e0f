#include "fk/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <utility>

#include "fk/error.hpp"

namespace fk {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft::RealFft(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2) throw InvalidArgument("RealFft supports 1D and 2D");
    real_size_ = 1;
    for (int n : shape_) {
        if (n < 1) throw InvalidArgument("RealFft extent must be positive");
        real_size_ *= static_cast<std::size_t>(n);
    }
    spectrum_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                     static_cast<std::size_t>(half_length());

    std::lock_guard lock(planner_mutex());
    real_buf_ = fftw_alloc_real(real_size_);
    auto* spec = fftw_alloc_complex(spectrum_size_);
    spec_buf_ = spec;
    const int rank = static_cast<int>(shape_.size());
    forward_plan_ = fftw_plan_dft_r2c(rank, shape_.data(), real_buf_, spec, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r(rank, shape_.data(), spec, real_buf_, FFTW_ESTIMATE);
    if (!forward_plan_ || !inverse_plan_) {
        release();
        throw Error("FFTW plan creation failed");
    }
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : shape_(std::move(other.shape_)), real_size_(other.real_size_),
      spectrum_size_(other.spectrum_size_),
      real_buf_(std::exchange(other.real_buf_, nullptr)),
      spec_buf_(std::exchange(other.spec_buf_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
    if (this != &other) {
        release();
        shape_ = std::move(other.shape_);
        real_size_ = other.real_size_;
        spectrum_size_ = other.spectrum_size_;
        real_buf_ = std::exchange(other.real_buf_, nullptr);
        spec_buf_ = std::exchange(other.spec_buf_, nullptr);
        forward_plan_ = std::exchange(other.forward_plan_, nullptr);
        inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    }
    return *this;
}

void RealFft::release() noexcept {
    if (!real_buf_ && !spec_buf_ && !forward_plan_ && !inverse_plan_) return;
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    if (real_buf_) fftw_free(real_buf_);
    if (spec_buf_) fftw_free(spec_buf_);
    forward_plan_ = inverse_plan_ = nullptr;
    real_buf_ = nullptr;
    spec_buf_ = nullptr;
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    if (in.size() != real_size_ || out.size() != spectrum_size_)
        throw InvalidArgument("RealFft::forward size mismatch");
    std::copy(in.begin(), in.end(), real_buf_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::memcpy(out.data(), spec_buf_, spectrum_size_ * sizeof(std::complex<double>));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != spectrum_size_ || out.size() != real_size_)
        throw InvalidArgument("RealFft::inverse size mismatch");
    std::memcpy(spec_buf_, in.data(), spectrum_size_ * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    std::copy(real_buf_, real_buf_ + real_size_, out.begin());
}

}  // namespace fk
