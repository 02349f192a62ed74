#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "asymsep/errors.hpp"

namespace asymsep {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform for power-of-two sizes.
/// Forward kernel uses exp(-2*pi*i*k/n); no normalization on either direction.
class Radix2Fft {
public:
    explicit Radix2Fft(std::size_t n) : n_(n) {
        if (!is_power_of_two(n)) throw ConfigError("radix-2 FFT size must be a power of two");
        twiddle_.resize(n_ / 2);
        const double step = -2.0 * std::numbers::pi / static_cast<double>(n_);
        for (std::size_t k = 0; k < n_ / 2; ++k)
            twiddle_[k] = std::polar(1.0, step * static_cast<double>(k));
        // bit-reversal permutation table
        rev_.resize(n_);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n_) ++bits;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            rev_[i] = r;
        }
    }

    std::size_t size() const { return n_; }

    /// data.size() must equal size(); inverse applies conjugate twiddles, still unnormalized.
    void transform(std::span<std::complex<double>> data, bool inverse) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j = rev_[i];
            if (i < j) std::swap(data[i], data[j]);
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    std::complex<double> w = twiddle_[k * stride];
                    if (inverse) w = std::conj(w);
                    const std::complex<double> a = data[start + k];
                    const std::complex<double> b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<std::complex<double>> twiddle_;
    std::vector<std::size_t> rev_;
};

/// Bluestein chirp-z transform: DFT of arbitrary size via one power-of-two
/// convolution. Used for non-power-of-two frame lengths (e.g. 46 ms at 8 kHz).
class BluesteinFft {
public:
    explicit BluesteinFft(std::size_t n)
        : n_(n), conv_n_(next_power_of_two(2 * n - 1)), inner_(conv_n_) {
        if (n < 2) throw ConfigError("FFT size must be >= 2");
        chirp_.resize(n_);
        // exp(-i*pi*m^2/n); m^2 reduced mod 2n keeps the sine argument small and exact
        for (std::size_t m = 0; m < n_; ++m) {
            const std::size_t m2 = (m * m) % (2 * n_);
            chirp_[m] = std::polar(1.0, -std::numbers::pi * static_cast<double>(m2) /
                                            static_cast<double>(n_));
        }
        // transform of the (conjugate) chirp, wrapped for linear convolution
        bfft_.assign(conv_n_, {0.0, 0.0});
        for (std::size_t m = 0; m < n_; ++m) {
            const std::complex<double> c = std::conj(chirp_[m]);
            bfft_[m] = c;
            if (m != 0) bfft_[conv_n_ - m] = c;
        }
        inner_.transform(bfft_, false);
    }

    std::size_t size() const { return n_; }

    void transform(std::span<std::complex<double>> data, bool inverse) const {
        std::vector<std::complex<double>> a(conv_n_, {0.0, 0.0});
        for (std::size_t m = 0; m < n_; ++m) {
            const std::complex<double> x = inverse ? std::conj(data[m]) : data[m];
            a[m] = x * chirp_[m];
        }
        inner_.transform(a, false);
        for (std::size_t k = 0; k < conv_n_; ++k) a[k] *= bfft_[k];
        inner_.transform(a, true);
        const double scale = 1.0 / static_cast<double>(conv_n_);
        for (std::size_t k = 0; k < n_; ++k) {
            std::complex<double> y = a[k] * scale * chirp_[k];
            data[k] = inverse ? std::conj(y) : y;
        }
    }

private:
    std::size_t n_;
    std::size_t conv_n_;
    Radix2Fft inner_;
    std::vector<std::complex<double>> chirp_;
    std::vector<std::complex<double>> bfft_;
};

} // namespace detail

/// Real-input transform plan of fixed even size K. Forward keeps bins 0..K/2
/// and is unnormalized; inverse rebuilds the conjugate-symmetric spectrum and
/// scales by 1/K, so inverse(forward(x)) == x.
///
/// Power-of-two sizes run on the radix-2 kernel, anything else through
/// Bluestein. A plan is immutable after construction and safe to share
/// across threads.
class RealFft {
public:
    explicit RealFft(std::size_t size) : n_(size) {
        if (size < 2 || size % 2 != 0) throw ConfigError("real FFT size must be even and >= 2");
        if (detail::is_power_of_two(size))
            radix2_.emplace(size);
        else
            bluestein_.emplace(size);
    }

    std::size_t size() const { return n_; }
    std::size_t bins() const { return n_ / 2 + 1; }

    /// input.size() must equal size(); writes bins() complex values.
    void forward(std::span<const double> input, std::vector<std::complex<double>>& out) const {
        if (input.size() != n_) throw ConfigError("FFT input length does not match plan size");
        std::vector<std::complex<double>> work(n_);
        for (std::size_t i = 0; i < n_; ++i) work[i] = {input[i], 0.0};
        dispatch(work, false);
        out.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(bins()));
    }

    std::vector<std::complex<double>> forward(std::span<const double> input) const {
        std::vector<std::complex<double>> out;
        forward(input, out);
        return out;
    }

    /// spectrum.size() must equal bins(); writes size() real samples.
    void inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& out) const {
        if (spectrum.size() != bins()) throw ConfigError("spectrum length does not match plan size");
        std::vector<std::complex<double>> work(n_);
        for (std::size_t k = 0; k < bins(); ++k) work[k] = spectrum[k];
        for (std::size_t k = 1; k < n_ / 2; ++k) work[n_ - k] = std::conj(spectrum[k]);
        dispatch(work, true);
        const double scale = 1.0 / static_cast<double>(n_);
        out.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = work[i].real() * scale;
    }

    std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const {
        std::vector<double> out;
        inverse(spectrum, out);
        return out;
    }

private:
    void dispatch(std::span<std::complex<double>> data, bool inverse) const {
        if (radix2_)
            radix2_->transform(data, inverse);
        else
            bluestein_->transform(data, inverse);
    }

    std::size_t n_;
    std::optional<detail::Radix2Fft> radix2_;
    std::optional<detail::BluesteinFft> bluestein_;
};

} // namespace asymsep
