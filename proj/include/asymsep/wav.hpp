#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "asymsep/errors.hpp"

namespace asymsep {

enum class WavFormat { pcm16, float32 };

struct WavData {
    std::vector<double> samples;
    double sample_rate = 0.0;
};

namespace detail {

template <typename T>
T read_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

} // namespace detail

/// Reads a mono WAV file. Supported encodings: 16-bit PCM and 32-bit IEEE
/// float (including their WAVE_FORMAT_EXTENSIBLE wrappings). Samples are
/// returned as doubles; PCM is scaled by 1/32768.
inline WavData read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open WAV file: " + path);

    char tag[4];
    in.read(tag, 4);
    if (!in || std::strncmp(tag, "RIFF", 4) != 0) throw DataError("not a RIFF file: " + path);
    detail::read_le<std::uint32_t>(in);
    in.read(tag, 4);
    if (!in || std::strncmp(tag, "WAVE", 4) != 0) throw DataError("not a WAV file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::vector<char> payload;

    while (in.read(tag, 4)) {
        const auto chunk_size = detail::read_le<std::uint32_t>(in);
        if (!in) break;
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            format = detail::read_le<std::uint16_t>(in);
            channels = detail::read_le<std::uint16_t>(in);
            rate = detail::read_le<std::uint32_t>(in);
            detail::read_le<std::uint32_t>(in); // byte rate
            detail::read_le<std::uint16_t>(in); // block align
            bits = detail::read_le<std::uint16_t>(in);
            if (chunk_size > 16) {
                std::vector<char> ext(chunk_size - 16);
                in.read(ext.data(), static_cast<std::streamsize>(ext.size()));
                // extensible: the real format code sits in the GUID prefix
                if (format == 0xFFFE && ext.size() >= 10)
                    std::memcpy(&format, ext.data() + 8, 2);
            }
            have_fmt = true;
        } else if (std::strncmp(tag, "data", 4) == 0) {
            payload.resize(chunk_size);
            in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
            if (!in) throw DataError("truncated WAV data: " + path);
        } else {
            in.seekg(chunk_size + (chunk_size & 1u), std::ios::cur);
            continue;
        }
        if (chunk_size & 1u) in.seekg(1, std::ios::cur);
    }

    if (!have_fmt) throw DataError("missing fmt chunk: " + path);
    if (channels != 1) throw DataError("only mono WAV files are supported: " + path);

    WavData wav;
    wav.sample_rate = static_cast<double>(rate);
    if (format == 1 && bits == 16) {
        const std::size_t n = payload.size() / 2;
        wav.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::int16_t s;
            std::memcpy(&s, payload.data() + 2 * i, 2);
            wav.samples[i] = static_cast<double>(s) / 32768.0;
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t n = payload.size() / 4;
        wav.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            float s;
            std::memcpy(&s, payload.data() + 4 * i, 4);
            wav.samples[i] = static_cast<double>(s);
        }
    } else {
        throw DataError("unsupported WAV encoding (need 16-bit PCM or 32-bit float): " + path);
    }
    return wav;
}

/// Writes a mono WAV file. PCM output clamps to [-1, 1] and rounds; float
/// output stores samples verbatim as 32-bit floats.
inline void write_wav(const std::string& path, std::span<const double> samples,
                      double sample_rate, WavFormat format = WavFormat::float32) {
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open WAV file for writing: " + path);

    const bool pcm = format == WavFormat::pcm16;
    const std::uint16_t bits = pcm ? 16 : 32;
    const std::uint16_t block = static_cast<std::uint16_t>(bits / 8);
    const auto rate = static_cast<std::uint32_t>(std::llround(sample_rate));
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * block);
    const std::uint32_t fmt_size = pcm ? 16 : 18;
    // RIFF size: WAVE + fmt chunk + (fact chunk for float) + data chunk
    const std::uint32_t riff_size =
        4 + (8 + fmt_size) + (pcm ? 0 : 12) + (8 + data_bytes);

    out.write("RIFF", 4);
    detail::write_le(out, riff_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    detail::write_le(out, fmt_size);
    detail::write_le<std::uint16_t>(out, pcm ? 1 : 3);
    detail::write_le<std::uint16_t>(out, 1);
    detail::write_le(out, rate);
    detail::write_le<std::uint32_t>(out, rate * block);
    detail::write_le<std::uint16_t>(out, block);
    detail::write_le<std::uint16_t>(out, bits);
    if (!pcm) {
        detail::write_le<std::uint16_t>(out, 0); // no format extension
        out.write("fact", 4);
        detail::write_le<std::uint32_t>(out, 4);
        detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.size()));
    }
    out.write("data", 4);
    detail::write_le(out, data_bytes);

    if (pcm) {
        for (double v : samples) {
            const double clamped = std::clamp(v, -1.0, 1.0);
            const auto s = static_cast<std::int16_t>(
                std::clamp<long>(std::lround(clamped * 32767.0), -32768L, 32767L));
            detail::write_le(out, s);
        }
    } else {
        for (double v : samples) detail::write_le(out, static_cast<float>(v));
    }
    if (!out) throw DataError("failed writing WAV file: " + path);
}

} // namespace asymsep
