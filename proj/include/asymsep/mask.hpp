#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asymsep/errors.hpp"
#include "asymsep/spectrogram.hpp"
#include "asymsep/stream.hpp"

namespace asymsep {

enum class MaskKind { binary, ratio, external };

/// ideal_ratio_mask denominator guard; also the per-bin share handed to each
/// source so that a complementary mask set sums to exactly 1 at every bin,
/// including silent ones.
inline constexpr double kMaskEpsilon = 1e-12;

/// Real-valued [0,1] time-frequency matrix with the same geometry as the
/// spectrograms it applies to. Row-major, rows = frames.
struct Mask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    MaskKind kind = MaskKind::external;
    std::vector<double> values;

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    void require_same_geometry(const Spectrogram& spec) const {
        if (rows != spec.num_frames() || cols != spec.num_bins())
            throw GeometryError("mask geometry does not match spectrogram");
    }
};

namespace detail {

inline void require_shared_geometry(const std::vector<Spectrogram>& sources) {
    if (sources.empty()) throw GeometryError("at least one source spectrogram required");
    for (const Spectrogram& s : sources) sources.front().require_same_geometry(s);
}

} // namespace detail

/// Ideal ratio mask for sources[target]: per bin,
/// (|s_t| + eps/n) / (sum_j |s_j| + eps). The shared epsilon keeps the mask
/// defined at silent bins and makes an n-source mask set sum to exactly 1
/// everywhere; for bins with magnitude above 1e-3 the effect is below 1e-9.
inline Mask ideal_ratio_mask(const std::vector<Spectrogram>& sources, std::size_t target) {
    detail::require_shared_geometry(sources);
    if (target >= sources.size()) throw GeometryError("target source index out of range");
    const Spectrogram& first = sources.front();
    Mask mask{first.num_frames(), first.num_bins(), MaskKind::ratio, {}};
    mask.values.resize(mask.rows * mask.cols);
    const double share = kMaskEpsilon / static_cast<double>(sources.size());
    for (std::size_t t = 0; t < mask.rows; ++t) {
        for (std::size_t k = 0; k < mask.cols; ++k) {
            double total = kMaskEpsilon;
            for (const Spectrogram& s : sources) total += std::abs(s.at(t, k));
            mask.at(t, k) = (std::abs(sources[target].at(t, k)) + share) / total;
        }
    }
    return mask;
}

/// Ideal binary mask for sources[target]: 1 where the target magnitude beats
/// every other source, ties going to the lower-indexed source. The resulting
/// mask set partitions every bin exactly once.
inline Mask ideal_binary_mask(const std::vector<Spectrogram>& sources, std::size_t target) {
    detail::require_shared_geometry(sources);
    if (target >= sources.size()) throw GeometryError("target source index out of range");
    const Spectrogram& first = sources.front();
    Mask mask{first.num_frames(), first.num_bins(), MaskKind::binary, {}};
    mask.values.resize(mask.rows * mask.cols);
    for (std::size_t t = 0; t < mask.rows; ++t) {
        for (std::size_t k = 0; k < mask.cols; ++k) {
            const double own = std::abs(sources[target].at(t, k));
            bool wins = true;
            for (std::size_t j = 0; j < sources.size(); ++j) {
                if (j == target) continue;
                const double other = std::abs(sources[j].at(t, k));
                if (other > own || (other == own && j < target)) {
                    wins = false;
                    break;
                }
            }
            mask.at(t, k) = wins ? 1.0 : 0.0;
        }
    }
    return mask;
}

/// Scales each complex mixture bin by the real mask value; mixture phase is
/// retained.
inline Spectrogram apply_mask(const Spectrogram& mix, const Mask& mask) {
    mask.require_same_geometry(mix);
    Spectrogram out = mix;
    for (std::size_t t = 0; t < out.num_frames(); ++t)
        for (std::size_t k = 0; k < out.num_bins(); ++k)
            out.at(t, k) *= mask.at(t, k);
    return out;
}

/// Source-overlap statistic: the fraction of TF bins where both sources are
/// active, a bin counting as active when its magnitude reaches threshold
/// times the mixture's peak magnitude.
struct OverlapStats {
    std::size_t active_both = 0; ///< bins where both sources pass the threshold
    std::size_t total = 0;       ///< all TF bins
    double threshold = 0.1;      ///< tau, relative to the mixture peak
    double proportion = 0.0;     ///< active_both / total
    bool degenerate = false;     ///< all-zero mixture; proportion forced to 0
};

inline OverlapStats overlap_proportion(const Spectrogram& s1, const Spectrogram& s2,
                                       const Spectrogram& mix, double tau) {
    s1.require_same_geometry(s2);
    s1.require_same_geometry(mix);
    if (!(tau > 0.0)) throw ConfigError("overlap threshold tau must be positive");

    double mix_peak = 0.0;
    for (std::size_t t = 0; t < mix.num_frames(); ++t)
        for (std::size_t k = 0; k < mix.num_bins(); ++k)
            mix_peak = std::max(mix_peak, std::abs(mix.at(t, k)));

    OverlapStats stats;
    stats.threshold = tau;
    stats.total = mix.num_frames() * mix.num_bins();
    if (mix_peak == 0.0) {
        stats.degenerate = true;
        return stats;
    }
    const double level = tau * mix_peak;
    for (std::size_t t = 0; t < mix.num_frames(); ++t)
        for (std::size_t k = 0; k < mix.num_bins(); ++k)
            if (std::abs(s1.at(t, k)) >= level && std::abs(s2.at(t, k)) >= level)
                ++stats.active_both;
    stats.proportion =
        static_cast<double>(stats.active_both) / static_cast<double>(stats.total);
    return stats;
}

/// Wraps a precomputed mask as a streaming estimator. Frames beyond the mask
/// rows report failure, which the stream turns into a unity-mask passthrough.
inline MaskEstimator precomputed_mask_estimator(Mask mask) {
    return [mask = std::move(mask)](std::size_t frame_index,
                                    std::span<const std::complex<double>> spectrum,
                                    std::span<double> out) {
        if (frame_index >= mask.rows || spectrum.size() != mask.cols) return false;
        for (std::size_t k = 0; k < mask.cols; ++k) out[k] = mask.at(frame_index, k);
        return true;
    };
}

// ---------------------------------------------------------------------------
// Mask files. Binary layout (little-endian):
//   uint64 rows | uint64 cols | char dtype[8] = "f64" zero-padded |
//   rows*cols float64, row-major (rows = frames, cols = bins).
// CSV: one row per frame, comma-separated values. Both are the exchange
// format for externally computed masks.
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_mask_values(const Mask& mask, const std::string& origin) {
    for (double v : mask.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw DataError("mask value outside [0,1] in " + origin);
}

} // namespace detail

inline void save_mask_binary(const Mask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open mask file for writing: " + path);
    const std::uint64_t rows = mask.rows, cols = mask.cols;
    std::array<char, 8> dtype{'f', '6', '4', 0, 0, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(dtype.data(), dtype.size());
    out.write(reinterpret_cast<const char*>(mask.values.data()),
              static_cast<std::streamsize>(mask.values.size() * sizeof(double)));
    if (!out) throw DataError("failed writing mask file: " + path);
}

inline Mask load_mask_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open mask file: " + path);
    std::uint64_t rows = 0, cols = 0;
    std::array<char, 8> dtype{};
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    in.read(dtype.data(), dtype.size());
    if (!in) throw DataError("truncated mask header: " + path);
    if (std::strncmp(dtype.data(), "f64", 3) != 0)
        throw DataError("unsupported mask dtype in " + path);
    Mask mask{rows, cols, MaskKind::external, {}};
    mask.values.resize(rows * cols);
    in.read(reinterpret_cast<char*>(mask.values.data()),
            static_cast<std::streamsize>(mask.values.size() * sizeof(double)));
    if (!in) throw DataError("truncated mask data: " + path);
    detail::validate_mask_values(mask, path);
    return mask;
}

inline void save_mask_csv(const Mask& mask, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open mask file for writing: " + path);
    out.precision(17);
    for (std::size_t r = 0; r < mask.rows; ++r) {
        for (std::size_t c = 0; c < mask.cols; ++c) {
            if (c) out << ',';
            out << mask.at(r, c);
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing mask file: " + path);
}

inline Mask load_mask_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mask file: " + path);
    Mask mask{0, 0, MaskKind::external, {}};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) {
            mask.values.push_back(std::stod(cell));
            ++cols;
        }
        if (mask.rows == 0)
            mask.cols = cols;
        else if (cols != mask.cols)
            throw DataError("ragged rows in mask CSV: " + path);
        ++mask.rows;
    }
    detail::validate_mask_values(mask, path);
    return mask;
}

} // namespace asymsep
