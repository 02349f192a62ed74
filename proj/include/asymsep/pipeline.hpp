#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "asymsep/bss_eval.hpp"
#include "asymsep/errors.hpp"
#include "asymsep/mask.hpp"
#include "asymsep/stft.hpp"
#include "asymsep/synth.hpp"
#include "asymsep/wav.hpp"
#include "asymsep/window.hpp"

namespace asymsep {

/// Drops everything before the first 10 ms frame whose RMS exceeds the peak
/// frame RMS by threshold_db (a negative offset). Frames are non-overlapping;
/// the cut lands on a frame boundary.
inline std::vector<double> trim_leading_silence(std::span<const double> signal,
                                                double threshold_db, double sample_rate) {
    if (!(threshold_db < 0.0)) throw ConfigError("trim threshold must be negative dB");
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    const auto frame = static_cast<std::size_t>(std::max(1.0, std::round(0.01 * sample_rate)));

    std::vector<double> rms;
    for (std::size_t start = 0; start < signal.size(); start += frame) {
        const std::size_t end = std::min(signal.size(), start + frame);
        double e = 0.0;
        for (std::size_t i = start; i < end; ++i) e += signal[i] * signal[i];
        rms.push_back(std::sqrt(e / static_cast<double>(end - start)));
    }
    const double peak = rms.empty() ? 0.0 : *std::max_element(rms.begin(), rms.end());
    if (peak <= 0.0) throw DataError("signal is entirely silent; nothing to trim to");

    const double level = peak * std::pow(10.0, threshold_db / 20.0);
    for (std::size_t f = 0; f < rms.size(); ++f) {
        if (rms[f] > level)
            return {signal.begin() + static_cast<std::ptrdiff_t>(f * frame), signal.end()};
    }
    throw DataError("signal is entirely silent; nothing to trim to");
}

/// Recipe for a two-speaker mixture.
struct MixtureSpec {
    std::array<std::string, 2> source_paths;
    std::array<double, 2> gains_db{0.0, 0.0};
    double trim_threshold_db = -40.0;
    double sample_rate = 0.0; ///< 0 = accept the files' (matching) rate
};

struct MixtureData {
    std::vector<double> mixture;
    std::array<std::vector<double>, 2> sources; ///< trimmed, truncated, gain-applied
    double sample_rate = 0.0;
};

/// In-memory mixing: trims leading silence from both sources, truncates to
/// the shorter one, applies the dB gains and sums. A gain of -inf mutes a
/// source.
inline MixtureData mix_signals(std::span<const double> a, std::span<const double> b,
                               double sample_rate, std::array<double, 2> gains_db = {0.0, 0.0},
                               double trim_threshold_db = -40.0) {
    std::vector<double> ta = trim_leading_silence(a, trim_threshold_db, sample_rate);
    std::vector<double> tb = trim_leading_silence(b, trim_threshold_db, sample_rate);
    const std::size_t n = std::min(ta.size(), tb.size());
    ta.resize(n);
    tb.resize(n);
    auto gain = [](double db) {
        return std::isinf(db) && db < 0.0 ? 0.0 : std::pow(10.0, db / 20.0);
    };
    const double ga = gain(gains_db[0]), gb = gain(gains_db[1]);
    MixtureData mix;
    mix.sample_rate = sample_rate;
    mix.sources[0].resize(n);
    mix.sources[1].resize(n);
    mix.mixture.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mix.sources[0][i] = ga * ta[i];
        mix.sources[1][i] = gb * tb[i];
        mix.mixture[i] = mix.sources[0][i] + mix.sources[1][i];
    }
    return mix;
}

/// File-based mixing per MixtureSpec. Rates must match; there is no implicit
/// resampling.
inline MixtureData make_mixture(const MixtureSpec& spec) {
    const WavData a = read_wav(spec.source_paths[0]);
    const WavData b = read_wav(spec.source_paths[1]);
    if (a.sample_rate != b.sample_rate)
        throw DataError("source sample rates differ; resample first");
    if (spec.sample_rate > 0.0 && a.sample_rate != spec.sample_rate)
        throw DataError("source sample rate does not match the requested rate");
    return mix_signals(a.samples, b.samples, a.sample_rate, spec.gains_db,
                       spec.trim_threshold_db);
}

/// Oracle separation: analyze the mixture and the reference sources with the
/// pair's analysis window, build the requested oracle masks at that
/// resolution, apply them to the mixture spectrogram and resynthesize with
/// the pair's synthesis window.
///
/// The frame grid starts at sample 0, so resynthesis introduces no sample
/// shift; estimates are returned zero-padded to the mixture length and are
/// directly comparable to the references.
inline std::vector<std::vector<double>> oracle_separate(
    std::span<const double> mixture, const std::vector<std::vector<double>>& references,
    const WindowPair& pair, MaskKind kind) {
    if (references.empty()) throw DataError("oracle separation needs reference sources");
    for (const auto& r : references)
        if (r.size() != mixture.size())
            throw DataError("references must be aligned with the mixture");
    if (kind == MaskKind::external)
        throw ConfigError("oracle separation needs an oracle mask kind (binary or ratio)");

    const Spectrogram mix_spec = analyze(mixture, pair);
    std::vector<Spectrogram> ref_specs;
    ref_specs.reserve(references.size());
    for (const auto& r : references) ref_specs.push_back(analyze(r, pair));

    std::vector<std::vector<double>> estimates;
    estimates.reserve(references.size());
    for (std::size_t i = 0; i < references.size(); ++i) {
        const Mask mask = kind == MaskKind::binary ? ideal_binary_mask(ref_specs, i)
                                                   : ideal_ratio_mask(ref_specs, i);
        std::vector<double> est = synthesize(apply_mask(mix_spec, mask), pair);
        est.resize(mixture.size(), 0.0);
        estimates.push_back(std::move(est));
    }
    return estimates;
}

enum class WindowScheme { symmetric, asymmetric };

/// A window scheme as reported in result tables: symmetric (A = S) or
/// asymmetric (A > S), with durations in milliseconds.
struct SchemeSpec {
    WindowScheme scheme = WindowScheme::asymmetric;
    double analysis_ms = 32.0;
    double synthesis_ms = 8.0;
    std::size_t dead_zone = 0;

    std::string label() const {
        return scheme == WindowScheme::symmetric ? "Sym." : "Asym.";
    }
};

inline WindowPair make_scheme_pair(const SchemeSpec& scheme, double sample_rate) {
    if (scheme.scheme == WindowScheme::symmetric) {
        const WindowConfig cfg =
            WindowConfig::from_ms(scheme.analysis_ms, scheme.analysis_ms, sample_rate);
        return design_symmetric_pair(cfg.analysis_len, sample_rate);
    }
    return design_asymmetric_pair(WindowConfig::from_ms(scheme.analysis_ms, scheme.synthesis_ms,
                                                        sample_rate, scheme.dead_zone));
}

struct MixtureResult {
    std::size_t mixture_index = 0;
    std::vector<SeparationScores> scores; ///< one per estimated source
    double mean_sdr = 0.0;
    OverlapStats overlap; ///< at this scheme's analysis resolution
};

struct ExperimentResult {
    SchemeSpec scheme;
    MaskKind mask_kind = MaskKind::ratio;
    double sample_rate = 8000.0;
    std::size_t filter_len = 512;
    double tau = 0.1;
    std::vector<MixtureResult> per_mixture;
    double mean_sdr = 0.0; ///< arithmetic mean over all (mixture, source) scores
    double mean_sir = 0.0;
    double mean_sar = 0.0;
    double mean_overlap = 0.0;
};

/// Runs oracle separation + BSS-eval for one scheme over a corpus of source
/// pairs. Mixtures are built at 0 dB gain offsets with the default trim.
inline ExperimentResult run_oracle_experiment(const std::vector<SourcePair>& corpus,
                                              const SchemeSpec& scheme, MaskKind kind,
                                              double sample_rate, std::size_t filter_len = 512,
                                              double tau = 0.1) {
    if (corpus.empty()) throw DataError("empty corpus");
    const WindowPair pair = make_scheme_pair(scheme, sample_rate);

    ExperimentResult result;
    result.scheme = scheme;
    result.mask_kind = kind;
    result.sample_rate = sample_rate;
    result.filter_len = filter_len;
    result.tau = tau;

    double sdr_sum = 0.0, sir_sum = 0.0, sar_sum = 0.0, overlap_sum = 0.0;
    std::size_t score_count = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const MixtureData mix = mix_signals(corpus[i].first, corpus[i].second, sample_rate);
        const std::vector<std::vector<double>> refs{mix.sources[0], mix.sources[1]};
        const std::vector<std::vector<double>> estimates =
            oracle_separate(mix.mixture, refs, pair, kind);

        MixtureResult mr;
        mr.mixture_index = i;
        mr.scores = bss_eval(estimates, refs, filter_len);
        for (const SeparationScores& s : mr.scores) {
            mr.mean_sdr += s.sdr;
            sdr_sum += s.sdr;
            sir_sum += s.sir;
            sar_sum += s.sar;
            ++score_count;
        }
        mr.mean_sdr /= static_cast<double>(mr.scores.size());

        const Spectrogram s1 = analyze(mix.sources[0], pair);
        const Spectrogram s2 = analyze(mix.sources[1], pair);
        const Spectrogram m = analyze(mix.mixture, pair);
        mr.overlap = overlap_proportion(s1, s2, m, tau);
        overlap_sum += mr.overlap.proportion;

        result.per_mixture.push_back(std::move(mr));
    }
    result.mean_sdr = sdr_sum / static_cast<double>(score_count);
    result.mean_sir = sir_sum / static_cast<double>(score_count);
    result.mean_sar = sar_sum / static_cast<double>(score_count);
    result.mean_overlap = overlap_sum / static_cast<double>(corpus.size());
    return result;
}

/// Fig.-4-style sweep: oracle separation with asymmetric pairs of varying
/// analysis length at a fixed synthesis length.
inline std::vector<ExperimentResult> sweep_analysis_lengths(
    const std::vector<SourcePair>& corpus, const std::vector<double>& lengths_ms,
    double synthesis_ms, MaskKind kind, double sample_rate, std::size_t filter_len = 512,
    double tau = 0.1) {
    if (lengths_ms.empty()) throw ConfigError("sweep needs at least one analysis length");
    for (double l : lengths_ms)
        if (l < synthesis_ms)
            throw ConfigError("analysis length below the synthesis length");
    std::vector<ExperimentResult> results;
    results.reserve(lengths_ms.size());
    for (double l : lengths_ms) {
        SchemeSpec scheme{WindowScheme::asymmetric, l, synthesis_ms, 0};
        results.push_back(
            run_oracle_experiment(corpus, scheme, kind, sample_rate, filter_len, tau));
    }
    return results;
}

// ---------------------------------------------------------------------------
// Corpus files and result emission
// ---------------------------------------------------------------------------

inline std::string corpus_stem(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "mix%03zu", index);
    return buf;
}

inline void write_corpus(const std::string& dir, const std::vector<SourcePair>& corpus,
                         double sample_rate) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::string stem = (std::filesystem::path(dir) / corpus_stem(i)).string();
        write_wav(stem + "_src1.wav", corpus[i].first, sample_rate, WavFormat::float32);
        write_wav(stem + "_src2.wav", corpus[i].second, sample_rate, WavFormat::float32);
    }
}

/// Loads every *_src1.wav / *_src2.wav pair in the directory, sorted by name.
/// Returns the pairs plus the common sample rate.
inline std::vector<SourcePair> load_corpus(const std::string& dir, double& sample_rate) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("corpus directory not found: " + dir);
    std::vector<std::string> firsts;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 9 && name.ends_with("_src1.wav")) firsts.push_back(entry.path().string());
    }
    std::sort(firsts.begin(), firsts.end());
    if (firsts.empty()) throw DataError("no *_src1.wav files in corpus directory: " + dir);

    std::vector<SourcePair> corpus;
    sample_rate = 0.0;
    for (const std::string& p1 : firsts) {
        std::string p2 = p1;
        p2.replace(p2.size() - 9, 9, "_src2.wav");
        if (!fs::exists(p2)) throw DataError("missing partner file: " + p2);
        WavData a = read_wav(p1);
        WavData b = read_wav(p2);
        if (a.sample_rate != b.sample_rate) throw DataError("sample rate mismatch in " + p1);
        if (sample_rate == 0.0)
            sample_rate = a.sample_rate;
        else if (a.sample_rate != sample_rate)
            throw DataError("corpus files have mixed sample rates");
        corpus.push_back(SourcePair{std::move(a.samples), std::move(b.samples)});
    }
    return corpus;
}

inline std::string mask_kind_name(MaskKind kind) {
    switch (kind) {
        case MaskKind::binary: return "ibm";
        case MaskKind::ratio: return "irm";
        default: return "external";
    }
}

/// One CSV row per mixture per scheme.
inline void write_results_csv(const std::string& path,
                              const std::vector<ExperimentResult>& results) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open results CSV for writing: " + path);
    out << "window,analysis_ms,synthesis_ms,mask,mixture,sdr1,sir1,sar1,sdr2,sir2,sar2,"
           "mean_sdr,overlap_proportion\n";
    out.precision(12);
    for (const ExperimentResult& r : results) {
        for (const MixtureResult& m : r.per_mixture) {
            out << r.scheme.label() << ',' << r.scheme.analysis_ms << ','
                << r.scheme.synthesis_ms << ',' << mask_kind_name(r.mask_kind) << ','
                << m.mixture_index;
            for (std::size_t s = 0; s < 2; ++s) {
                if (s < m.scores.size())
                    out << ',' << m.scores[s].sdr << ',' << m.scores[s].sir << ','
                        << m.scores[s].sar;
                else
                    out << ",,,";
            }
            out << ',' << m.mean_sdr << ',' << m.overlap.proportion << '\n';
        }
    }
    if (!out) throw DataError("failed writing results CSV: " + path);
}

/// One CSV row per scheme with aggregate means; the file Fig.-4-style sweep
/// plots are made from.
inline void write_sweep_csv(const std::string& path,
                            const std::vector<ExperimentResult>& results) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open sweep CSV for writing: " + path);
    out << "window,analysis_ms,synthesis_ms,mask,mean_sdr,mean_sir,mean_sar,mean_overlap\n";
    out.precision(12);
    for (const ExperimentResult& r : results)
        out << r.scheme.label() << ',' << r.scheme.analysis_ms << ',' << r.scheme.synthesis_ms
            << ',' << mask_kind_name(r.mask_kind) << ',' << r.mean_sdr << ',' << r.mean_sir
            << ',' << r.mean_sar << ',' << r.mean_overlap << '\n';
    if (!out) throw DataError("failed writing sweep CSV: " + path);
}

} // namespace asymsep
