#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "asymsep/fft.hpp"
#include "asymsep/spectrogram.hpp"
#include "asymsep/window.hpp"

namespace asymsep {

/// Forward transform. Frame t covers samples [t*M, t*M + K), is multiplied by
/// the analysis window and transformed by a length-K DFT keeping bins 0..K/2.
/// The first frame is left-aligned at sample 0 with no pre-padding; the
/// forward transform is unnormalized.
inline Spectrogram analyze(std::span<const double> signal, const WindowPair& pair) {
    pair.config.validate();
    const std::size_t K = pair.config.analysis_len;
    const std::size_t M = pair.config.hop;
    if (signal.size() < K)
        throw DataError("signal shorter than one analysis window; spectrogram would be empty");

    const RealFft fft(K);
    const std::size_t num_frames = (signal.size() - K) / M + 1;
    Spectrogram spec(num_frames, fft.bins(), pair.config);

    std::vector<double> frame(K);
    std::vector<std::complex<double>> bins;
    for (std::size_t t = 0; t < num_frames; ++t) {
        const std::size_t start = t * M;
        for (std::size_t i = 0; i < K; ++i)
            frame[i] = signal[start + i] * pair.analysis[i];
        fft.forward(frame, bins);
        auto out = spec.frame(t);
        for (std::size_t k = 0; k < bins.size(); ++k) out[k] = bins[k];
    }
    return spec;
}

/// Inverse transform: per frame, a length-K inverse DFT (conjugate-symmetric
/// extension, scaled by 1/K), elementwise synthesis window, overlap-add at
/// hop M. Output length is (num_frames - 1)*M + K. With an identity mask this
/// reconstructs the input in steady state; the first K-M samples are warm-up.
inline std::vector<double> synthesize(const Spectrogram& spec, const WindowPair& pair) {
    pair.config.validate();
    if (spec.config() != pair.config)
        throw GeometryError("spectrogram was produced with a different window config");
    const std::size_t K = pair.config.analysis_len;
    const std::size_t M = pair.config.hop;
    const RealFft fft(K);
    if (spec.num_bins() != fft.bins())
        throw GeometryError("spectrogram bin count does not match analysis length");
    if (spec.num_frames() == 0) return {};

    std::vector<double> output((spec.num_frames() - 1) * M + K, 0.0);
    std::vector<double> frame;
    for (std::size_t t = 0; t < spec.num_frames(); ++t) {
        fft.inverse(spec.frame(t), frame);
        const std::size_t start = t * M;
        // synthesis window is zero on [0, K-2M); skip the dead part
        for (std::size_t i = K - pair.config.synthesis_len; i < K; ++i)
            output[start + i] += frame[i] * pair.synthesis[i];
    }
    return output;
}

} // namespace asymsep
