#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "asymsep/errors.hpp"

namespace asymsep {

/// Parameters of one synthetic vowel-like voice: a harmonic series on a
/// slowly gliding fundamental, shaped by two formant resonances and a
/// syllable-rate amplitude modulation. Voices like these carry the fine
/// harmonic structure that distinguishes long-window from short-window
/// time-frequency resolution, without needing licensed speech data.
struct VoiceSpec {
    double f0_hz = 150.0;          ///< fundamental at t = 0
    double glide = 0.0;            ///< relative f0 change over the full duration
    double vibrato_rate_hz = 5.5;
    double vibrato_depth = 0.01;   ///< relative
    double formant1_hz = 500.0;
    double formant1_bw = 140.0;
    double formant2_hz = 1500.0;
    double formant2_bw = 250.0;
    double am_rate_hz = 3.0;       ///< syllable-like amplitude modulation
    double am_depth = 0.55;        ///< 0 = flat envelope, 1 = full gating
    double am_phase = 0.0;
    double vibrato_phase = 0.0;
    double lead_silence_s = 0.0;
    double rms = 0.1;              ///< target RMS of the voiced part
    std::uint64_t phase_seed = 0;  ///< harmonic start phases
};

/// Renders the voice. Harmonics run up to 0.42 * sample_rate.
inline std::vector<double> synth_harmonic_voice(const VoiceSpec& spec, double duration_s,
                                                double sample_rate) {
    if (!(duration_s > 0.0) || !(sample_rate > 0.0))
        throw ConfigError("duration and sample rate must be positive");
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    const double f_max = 0.42 * sample_rate;
    const double f0_peak = spec.f0_hz * std::max(1.0, 1.0 + spec.glide) * (1.0 + spec.vibrato_depth);
    const auto harmonics = static_cast<std::size_t>(std::max(1.0, std::floor(f_max / f0_peak)));

    std::mt19937_64 rng(spec.phase_seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> start_phase(harmonics);
    for (double& p : start_phase) p = uphase(rng);

    // fixed spectral envelope: -6 dB/oct tilt plus two formant peaks
    auto envelope = [&spec](double f) {
        const double tilt = 1.0 / (1.0 + f / 600.0);
        auto peak = [f](double fc, double bw, double gain) {
            const double d = (f - fc) / bw;
            return gain * std::exp(-0.5 * d * d);
        };
        return tilt * (0.35 + peak(f, spec.formant1_hz, spec.formant1_bw, 1.0) +
                       peak(f, spec.formant2_hz, spec.formant2_bw, 0.6));
    };
    std::vector<double> amp(harmonics);
    for (std::size_t h = 0; h < harmonics; ++h)
        amp[h] = envelope(static_cast<double>(h + 1) * spec.f0_hz);

    std::vector<double> voiced(n, 0.0);
    double phase = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double f0 = spec.f0_hz * (1.0 + spec.glide * t / duration_s) *
                          (1.0 + spec.vibrato_depth *
                                     std::sin(two_pi * spec.vibrato_rate_hz * t + spec.vibrato_phase));
        phase += two_pi * f0 / sample_rate;
        double x = 0.0;
        for (std::size_t h = 0; h < harmonics; ++h)
            x += amp[h] * std::sin(static_cast<double>(h + 1) * phase + start_phase[h]);
        const double attack = std::min(1.0, t / 0.03);
        const double am = (1.0 - spec.am_depth) +
                          spec.am_depth * 0.5 *
                              (1.0 + std::sin(two_pi * spec.am_rate_hz * t + spec.am_phase));
        voiced[i] = x * attack * am;
    }

    double energy = 0.0;
    for (double v : voiced) energy += v * v;
    const double rms = std::sqrt(energy / static_cast<double>(n));
    if (rms > 0.0) {
        const double scale = spec.rms / rms;
        for (double& v : voiced) v *= scale;
    }

    const auto lead = static_cast<std::size_t>(std::llround(spec.lead_silence_s * sample_rate));
    std::vector<double> out(lead, 0.0);
    out.insert(out.end(), voiced.begin(), voiced.end());
    return out;
}

struct SourcePair {
    std::vector<double> first;
    std::vector<double> second;
};

struct CorpusParams {
    std::size_t count = 30;
    double sample_rate = 8000.0;
    double duration_s = 1.6;
    std::uint64_t seed = 1;
};

/// Deterministic two-voice corpus. Fundamentals are drawn so that harmonic
/// spacing sits below the bin width of an 8 ms window but well above that of
/// a 32 ms window; the f0 ratio between the two voices varies from nearly
/// unison to a perfect fourth and beyond, which spreads the source-overlap
/// statistic across mixtures.
inline std::vector<SourcePair> generate_corpus(const CorpusParams& params) {
    std::vector<SourcePair> corpus;
    corpus.reserve(params.count);
    for (std::size_t i = 0; i < params.count; ++i) {
        std::seed_seq seq{params.seed, static_cast<std::uint64_t>(i), std::uint64_t{0x9e3779b9}};
        std::mt19937_64 rng(seq);
        auto uni = [&rng](double lo, double hi) {
            return std::uniform_real_distribution<double>(lo, hi)(rng);
        };

        VoiceSpec a;
        a.f0_hz = uni(125.0, 185.0);
        a.glide = uni(-0.08, 0.12);
        a.vibrato_rate_hz = uni(4.5, 6.5);
        a.vibrato_depth = uni(0.005, 0.02);
        a.vibrato_phase = uni(0.0, 6.28);
        a.formant1_hz = uni(350.0, 800.0);
        a.formant1_bw = uni(110.0, 180.0);
        a.formant2_hz = uni(900.0, 2100.0);
        a.formant2_bw = uni(200.0, 320.0);
        a.am_rate_hz = uni(2.0, 4.5);
        a.am_depth = uni(0.4, 0.7);
        a.am_phase = uni(0.0, 6.28);
        a.lead_silence_s = uni(0.02, 0.1);
        a.phase_seed = rng();

        VoiceSpec b = a;
        b.f0_hz = a.f0_hz * uni(1.04, 1.45);
        b.glide = uni(-0.08, 0.12);
        b.vibrato_rate_hz = uni(4.5, 6.5);
        b.vibrato_phase = uni(0.0, 6.28);
        b.formant1_hz = uni(350.0, 800.0);
        b.formant2_hz = uni(900.0, 2100.0);
        b.am_rate_hz = uni(2.0, 4.5);
        b.am_phase = uni(0.0, 6.28);
        b.lead_silence_s = uni(0.02, 0.1);
        b.phase_seed = rng();

        corpus.push_back(SourcePair{
            synth_harmonic_voice(a, params.duration_s, params.sample_rate),
            synth_harmonic_voice(b, params.duration_s, params.sample_rate)});
    }
    return corpus;
}

} // namespace asymsep
