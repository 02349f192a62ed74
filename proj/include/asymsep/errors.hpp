#pragma once

#include <stdexcept>
#include <string>

namespace asymsep {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid window or run parameters (bad lengths, odd sizes, out-of-range dead zone, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Mismatched spectrogram/mask/window geometry between operands.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Bad input data: unreadable files, sample-rate mismatch, empty or silent signals.
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace asymsep
