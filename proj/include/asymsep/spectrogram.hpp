#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "asymsep/errors.hpp"
#include "asymsep/window.hpp"

namespace asymsep {

/// Complex time-frequency matrix produced by analyze(): num_frames rows of
/// K/2+1 bins, row-major. Frames advance by the hop of the window config the
/// spectrogram was computed with.
class Spectrogram {
public:
    Spectrogram() = default;

    Spectrogram(std::size_t num_frames, std::size_t num_bins, WindowConfig config)
        : num_frames_(num_frames), num_bins_(num_bins), config_(config),
          data_(num_frames * num_bins, {0.0, 0.0}) {}

    std::size_t num_frames() const { return num_frames_; }
    std::size_t num_bins() const { return num_bins_; }
    std::size_t frame_advance() const { return config_.hop; }
    const WindowConfig& config() const { return config_; }

    std::complex<double>& at(std::size_t frame, std::size_t bin) {
        return data_[frame * num_bins_ + bin];
    }
    std::complex<double> at(std::size_t frame, std::size_t bin) const {
        return data_[frame * num_bins_ + bin];
    }

    std::span<std::complex<double>> frame(std::size_t t) {
        return {data_.data() + t * num_bins_, num_bins_};
    }
    std::span<const std::complex<double>> frame(std::size_t t) const {
        return {data_.data() + t * num_bins_, num_bins_};
    }

    bool same_geometry(const Spectrogram& other) const {
        return num_frames_ == other.num_frames_ && num_bins_ == other.num_bins_;
    }

    void require_same_geometry(const Spectrogram& other) const {
        if (!same_geometry(other))
            throw GeometryError("spectrogram geometries do not match");
    }

private:
    std::size_t num_frames_ = 0;
    std::size_t num_bins_ = 0;
    WindowConfig config_{};
    std::vector<std::complex<double>> data_;
};

} // namespace asymsep
