#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asymsep/errors.hpp"

namespace asymsep {

/// Geometry of an analysis/synthesis window pair.
///
/// The analysis window has length K = analysis_len, the synthesis window
/// length 2M = synthesis_len (stored zero-padded to K), and frames advance by
/// the hop M = synthesis_len / 2. The algorithmic latency of a stream built
/// on the pair is synthesis_len samples. dead_zone is the number of leading
/// zeros of the analysis window.
struct WindowConfig {
    std::size_t analysis_len = 0;  ///< K, samples; even
    std::size_t synthesis_len = 0; ///< 2M, samples; even
    std::size_t hop = 0;           ///< M = synthesis_len / 2
    std::size_t dead_zone = 0;     ///< d, leading zeros of the analysis window
    double sample_rate = 8000.0;   ///< Hz; used only for ms conversions and I/O

    void validate() const {
        if (analysis_len == 0 || synthesis_len == 0 || hop == 0)
            throw ConfigError("window lengths and hop must be positive");
        if (analysis_len % 2 != 0 || synthesis_len % 2 != 0)
            throw ConfigError("window lengths must be even");
        if (hop * 2 != synthesis_len)
            throw ConfigError("hop must equal synthesis_len / 2 exactly");
        if (analysis_len < synthesis_len)
            throw ConfigError("analysis window must be at least as long as the synthesis window");
        if (dead_zone > analysis_len - synthesis_len)
            throw ConfigError("dead zone exceeds analysis_len - synthesis_len");
        if (!(sample_rate > 0.0))
            throw ConfigError("sample rate must be positive");
    }

    std::size_t latency_samples() const { return synthesis_len; }

    static WindowConfig from_samples(std::size_t analysis_len, std::size_t synthesis_len,
                                     std::size_t dead_zone = 0, double sample_rate = 8000.0) {
        WindowConfig cfg{analysis_len, synthesis_len, synthesis_len / 2, dead_zone, sample_rate};
        cfg.validate();
        return cfg;
    }

    /// Durations in milliseconds; sample counts round to the nearest even integer.
    static WindowConfig from_ms(double analysis_ms, double synthesis_ms, double sample_rate,
                                std::size_t dead_zone = 0) {
        if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
        auto to_even = [sample_rate](double ms) {
            const double samples = ms * sample_rate / 1000.0;
            auto n = static_cast<long long>(std::llround(samples / 2.0)) * 2;
            return static_cast<std::size_t>(n < 0 ? 0 : n);
        };
        return from_samples(to_even(analysis_ms), to_even(synthesis_ms), dead_zone, sample_rate);
    }

    bool operator==(const WindowConfig&) const = default;
};

/// An analysis/synthesis window pair. Both vectors have length K; the
/// synthesis vector is the 2M-sample synthesis window zero-padded on the
/// left, so the two can be applied to K-sample frames directly.
struct WindowPair {
    std::vector<double> analysis;
    std::vector<double> synthesis;
    WindowConfig config;
};

/// Periodic Hann window of even length 2M: element n is 0.5*(1 - cos(pi*n/M)).
inline std::vector<double> hann_prototype(std::size_t length) {
    if (length < 2 || length % 2 != 0)
        throw ConfigError("Hann prototype length must be even and >= 2");
    const double half = static_cast<double>(length) / 2.0;
    std::vector<double> w(length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(n) / half));
    return w;
}

/// Symmetric baseline: analysis = synthesis = sqrt(periodic Hann), hop =
/// length/2. The window product is the Hann prototype itself, which
/// overlap-adds to 1 at 50% overlap.
inline WindowPair design_symmetric_pair(std::size_t length, double sample_rate = 8000.0) {
    WindowConfig cfg = WindowConfig::from_samples(length, length, 0, sample_rate);
    std::vector<double> root = hann_prototype(length);
    for (double& v : root) v = std::sqrt(v);
    return WindowPair{root, root, cfg};
}

/// Asymmetric analysis/synthesis pair.
///
/// Layout of the length-K analysis window:
///   [0, d)       zeros (dead zone)
///   [d, K-M)     rising root-Hann segment sqrt(H_{2(K-M-d)}(n-d))
///   [K-M, K)     falling root-Hann tail sqrt(H_{2M}(n-K+2M)), shared with synthesis
/// and of the synthesis window (zero-padded to K):
///   [0, K-2M)    zeros
///   [K-2M, K-M)  quotient segment H_{2M}(n-K+2M) / A(n)
///   [K-M, K)     shared root tail
///
/// The construction forces A(n)*S(n) to equal the zero-padded Hann prototype,
/// which overlap-adds to a constant at hop M, so the transform chain
/// reconstructs perfectly under an identity mask. The quotient's 0/0 point at
/// n = K-2M (the prototype starts at zero) is defined as 0.
inline WindowPair design_asymmetric_pair(const WindowConfig& config) {
    config.validate();
    const std::size_t K = config.analysis_len;
    const std::size_t two_m = config.synthesis_len;
    const std::size_t M = config.hop;
    const std::size_t d = config.dead_zone;

    // K == 2M degenerates to the symmetric pair: the rising segment spans the
    // same prototype as the tail and the quotient H/sqrt(H) is sqrt(H).
    // Building it through design_symmetric_pair keeps the two elementwise
    // identical.
    if (K == two_m) return design_symmetric_pair(K, config.sample_rate);

    std::vector<double> analysis(K, 0.0);
    const double rise_half = static_cast<double>(K - M - d);
    for (std::size_t n = d; n < K - M; ++n) {
        const double h = 0.5 * (1.0 - std::cos(std::numbers::pi *
                                                static_cast<double>(n - d) / rise_half));
        analysis[n] = std::sqrt(h);
    }
    const std::vector<double> proto = hann_prototype(two_m);
    for (std::size_t n = K - M; n < K; ++n) analysis[n] = std::sqrt(proto[n - K + two_m]);

    std::vector<double> synthesis(K, 0.0);
    for (std::size_t n = K - two_m; n < K - M; ++n) {
        const double num = proto[n - K + two_m];
        synthesis[n] = (num == 0.0) ? 0.0 : num / analysis[n];
    }
    for (std::size_t n = K - M; n < K; ++n) synthesis[n] = analysis[n];

    return WindowPair{std::move(analysis), std::move(synthesis), config};
}

/// Measures round-trip error of the pair: a deterministic pseudo-random
/// signal is framed with the analysis window, left untouched, windowed with
/// the synthesis window and overlap-added. Returns
/// max |reconstructed - input| / max |input| over the steady-state region
/// (one analysis length trimmed from each end).
///
/// The frame path here is pure windowing; it deliberately bypasses the
/// transform so that window design is verified independently of the FFT.
inline double verify_perfect_reconstruction(const WindowPair& pair, std::size_t test_len) {
    pair.config.validate();
    const std::size_t K = pair.config.analysis_len;
    const std::size_t M = pair.config.hop;
    if (test_len < 4 * K) throw ConfigError("test length must be at least 4 * analysis_len");

    std::mt19937_64 rng(0x5eedu);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> input(test_len);
    for (double& v : input) v = dist(rng);

    const std::size_t num_frames = (test_len - K) / M + 1;
    std::vector<double> output((num_frames - 1) * M + K, 0.0);
    std::vector<double> frame(K);
    for (std::size_t t = 0; t < num_frames; ++t) {
        const std::size_t start = t * M;
        for (std::size_t i = 0; i < K; ++i)
            frame[i] = input[start + i] * pair.analysis[i];
        for (std::size_t i = 0; i < K; ++i)
            output[start + i] += frame[i] * pair.synthesis[i];
    }

    double peak = 0.0;
    for (double v : input) peak = std::max(peak, std::abs(v));
    double max_err = 0.0;
    const std::size_t lo = K;
    const std::size_t hi = output.size() > K ? output.size() - K : 0;
    for (std::size_t n = lo; n < hi; ++n)
        max_err = std::max(max_err, std::abs(output[n] - input[n]));
    return max_err / peak;
}

} // namespace asymsep
