#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asymsep/fft.hpp"
#include "asymsep/window.hpp"

namespace asymsep {

/// Per-frame mask estimator hook. Receives the frame index and the frame's
/// K/2+1 complex bins, fills one mask value per bin, and returns false to
/// signal failure for that frame. This is the plug-in point for externally
/// trained models; the engine itself never blocks on an estimator.
using MaskEstimator = std::function<bool(std::size_t frame_index,
                                         std::span<const std::complex<double>> spectrum,
                                         std::span<double> mask)>;

inline MaskEstimator unity_estimator() {
    return [](std::size_t, std::span<const std::complex<double>>, std::span<double> mask) {
        for (double& m : mask) m = 1.0;
        return true;
    };
}

inline MaskEstimator zero_estimator() {
    return [](std::size_t, std::span<const std::complex<double>>, std::span<double> mask) {
        for (double& m : mask) m = 0.0;
        return true;
    };
}

/// Single-stream, sample-in/sample-out processor with an algorithmic latency
/// of exactly 2M samples (the synthesis window length).
///
/// Per hop: analysis window -> forward transform -> estimator mask ->
/// elementwise multiply -> inverse transform -> synthesis window ->
/// overlap-add. Input chunks may have any length including zero; the engine
/// re-blocks internally, and the emitted stream is a pure function of the
/// input stream, independent of chunk boundaries.
///
/// After feeding c samples, exactly max(0, c - 2M) samples have been emitted,
/// and emitted sample n depends only on input samples with index <= n + 2M.
/// An estimator failure (false return, exception, or non-finite mask value)
/// passes the frame through with a unity mask and is counted, so the stream
/// never stalls.
///
/// A StreamProcessor is single-owner: distinct streams may run on distinct
/// threads, one stream must not be shared.
class StreamProcessor {
public:
    StreamProcessor(WindowPair pair, MaskEstimator estimator)
        : pair_(std::move(pair)), estimator_(std::move(estimator)),
          fft_(pair_.config.analysis_len) {
        pair_.config.validate();
        const std::size_t K = pair_.config.analysis_len;
        in_ring_.assign(K, 0.0);
        ola_ring_.assign(2 * K, 0.0);
        mask_.assign(fft_.bins(), 1.0);
    }

    std::size_t latency_samples() const { return pair_.config.synthesis_len; }
    std::size_t samples_consumed() const { return consumed_input_; }
    std::size_t samples_emitted() const { return emitted_; }
    std::size_t frames_processed() const { return frames_; }
    std::size_t estimator_failures() const { return failures_; }
    const WindowPair& pair() const { return pair_; }

    void set_warning_handler(std::function<void(const std::string&)> handler) {
        on_warning_ = std::move(handler);
    }

    /// Feeds a chunk and returns every sample that becomes emittable.
    std::vector<double> process(std::span<const double> chunk) {
        if (flushed_) throw Error("stream has already been flushed");
        std::vector<double> out;
        out.reserve(chunk.size());
        for (double x : chunk) {
            push_sample(x);
            ++consumed_input_;
            emit_ready(out, emit_limit());
        }
        return out;
    }

    /// Closes the stream: drains the last 2M pending samples by feeding
    /// zeros, so that total output length equals total input length. The
    /// padding counts towards the latency bookkeeping but not towards
    /// samples_consumed(). No further process() calls are allowed.
    std::vector<double> flush() {
        if (flushed_) throw Error("stream has already been flushed");
        flushed_ = true;
        std::vector<double> out;
        const std::size_t target = consumed_input_ + latency_samples();
        while (consumed_total_ < target) {
            push_sample(0.0);
            emit_ready(out, std::min(emit_limit(), consumed_input_));
        }
        return out;
    }

private:
    std::size_t emit_limit() const {
        const std::size_t lat = latency_samples();
        return consumed_total_ > lat ? consumed_total_ - lat : 0;
    }

    void push_sample(double x) {
        const std::size_t K = pair_.config.analysis_len;
        in_ring_[consumed_total_ % K] = x;
        ++consumed_total_;
        if (consumed_total_ == next_frame_start_ + K) process_frame();
    }

    void process_frame() {
        const std::size_t K = pair_.config.analysis_len;
        const std::size_t two_m = pair_.config.synthesis_len;
        const std::size_t start = next_frame_start_;

        frame_.resize(K);
        for (std::size_t i = 0; i < K; ++i)
            frame_[i] = in_ring_[(start + i) % K] * pair_.analysis[i];
        fft_.forward(frame_, bins_);

        bool ok = false;
        std::string failure;
        try {
            ok = estimator_(frames_, bins_, mask_);
            if (!ok) failure = "mask estimator reported failure";
        } catch (const std::exception& e) {
            failure = std::string("mask estimator threw: ") + e.what();
        }
        if (ok) {
            for (double m : mask_) {
                if (!std::isfinite(m)) {
                    ok = false;
                    failure = "mask estimator produced non-finite values";
                    break;
                }
            }
        }
        if (!ok) {
            warn(failure + "; frame passed through with unity mask");
            ++failures_;
            for (double& m : mask_) m = 1.0;
        }

        for (std::size_t k = 0; k < bins_.size(); ++k) bins_[k] *= mask_[k];
        fft_.inverse(bins_, frame_);

        const std::size_t R = ola_ring_.size();
        for (std::size_t i = K - two_m; i < K; ++i)
            ola_ring_[(start + i) % R] += frame_[i] * pair_.synthesis[i];

        ++frames_;
        next_frame_start_ += pair_.config.hop;
    }

    void emit_ready(std::vector<double>& out, std::size_t limit) {
        const std::size_t R = ola_ring_.size();
        while (emitted_ < limit) {
            const std::size_t slot = emitted_ % R;
            out.push_back(ola_ring_[slot]);
            ola_ring_[slot] = 0.0;
            ++emitted_;
        }
    }

    void warn(const std::string& msg) {
        if (on_warning_)
            on_warning_(msg);
        else if (failures_ == 0)
            std::clog << "asymsep: " << msg << '\n';
    }

    WindowPair pair_;
    MaskEstimator estimator_;
    RealFft fft_;
    std::vector<double> in_ring_;
    std::vector<double> ola_ring_;
    std::vector<double> frame_;
    std::vector<std::complex<double>> bins_;
    std::vector<double> mask_;
    std::function<void(const std::string&)> on_warning_;
    std::size_t consumed_total_ = 0; ///< input samples plus flush padding
    std::size_t consumed_input_ = 0;
    std::size_t emitted_ = 0;
    std::size_t frames_ = 0;
    std::size_t next_frame_start_ = 0;
    std::size_t failures_ = 0;
    bool flushed_ = false;
};

} // namespace asymsep
