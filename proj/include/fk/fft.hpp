#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fk {

/// Real-to-complex / complex-to-real transform of a 1D or 2D real array,
/// backed by FFTW with estimate-mode plans (bitwise reproducible).
///
/// The spectrum uses the half-complex layout: shape n0 x (n1/2 + 1) in 2D,
/// n/2 + 1 in 1D. `inverse` is unnormalized, so inverse(forward(x)) = N * x.
/// An instance owns its scratch buffers and must not be shared across threads.
class RealFft {
public:
    explicit RealFft(std::vector<int> shape);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;

    const std::vector<int>& shape() const noexcept { return shape_; }
    std::size_t real_size() const noexcept { return real_size_; }
    std::size_t spectrum_size() const noexcept { return spectrum_size_; }
    /// Length of the last (half-complex) spectral axis.
    int half_length() const noexcept { return shape_.back() / 2 + 1; }

    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    void release() noexcept;

    std::vector<int> shape_;
    std::size_t real_size_ = 0;
    std::size_t spectrum_size_ = 0;
    double* real_buf_ = nullptr;
    void* spec_buf_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Signed integer wavenumber of DFT bin i for length n (numpy fftfreq * n).
inline int wavenumber(int i, int n) { return i <= (n - 1) / 2 ? i : i - n; }

}  // namespace fk
