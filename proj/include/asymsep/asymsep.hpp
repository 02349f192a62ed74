#pragma once

// Low-latency time-frequency mask-based source separation built on an
// asymmetric analysis/synthesis window pair: long analysis windows for
// frequency resolution, a short synthesis window for low algorithmic latency,
// with perfect reconstruction by construction.

#include "asymsep/bss_eval.hpp"
#include "asymsep/errors.hpp"
#include "asymsep/fft.hpp"
#include "asymsep/mask.hpp"
#include "asymsep/pipeline.hpp"
#include "asymsep/spectrogram.hpp"
#include "asymsep/stft.hpp"
#include "asymsep/stream.hpp"
#include "asymsep/synth.hpp"
#include "asymsep/wav.hpp"
#include "asymsep/window.hpp"

#define ASYMSEP_VERSION_MAJOR 0
#define ASYMSEP_VERSION_MINOR 1
#define ASYMSEP_VERSION_PATCH 0
