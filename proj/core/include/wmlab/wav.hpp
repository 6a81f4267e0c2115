// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "wmlab/audio.hpp"

namespace wmlab {

// Reads a RIFF/WAVE file.  Accepts 16-bit PCM and 32-bit float, mono or
// multi-channel; channels are averaged to mono and integer samples scaled
// to [-1, 1].  Throws std::runtime_error on malformed or unsupported input.
AudioClip load_wav(const std::string& path);

// Writes mono 16-bit PCM.  Samples are clamped to [-1, 1] and quantized as
// round(x * 32768) clamped to the int16 range, so a save/load round trip is
// accurate to 2^-15 at worst.
void save_wav(const AudioClip& clip, const std::string& path);

}  // namespace wmlab
