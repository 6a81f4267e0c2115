// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/message.hpp"
#include "wmlab/nn.hpp"

namespace wmlab {

enum class SchemeFamily { lsb, spread_spectrum, qim_freq, neural };

std::string family_name(SchemeFamily f);
SchemeFamily family_from_name(const std::string& name);

// Keyed secrets are derived deterministically from the seed (chip signs,
// band assignment); the neural family is keyed by its weights instead.
struct WatermarkKey {
  uint64_t seed = 1;
};

// A keyed embedder/detector pair.
//   lsb              payload in the LSB of 16-bit-quantized samples,
//                    cyclic, majority vote per bit position
//   spread-spectrum  +-1 chips per bit over interleaved sample sets;
//                    the host's chip-aligned component is projected out
//                    before adding alpha * chip * (2m-1), so a same-key
//                    re-embed replaces the message
//   qim-freq         key-selected mid-band STFT magnitudes quantized to
//                    the even/odd lattice of step delta, majority across
//                    frames
//   neural           delegates to an attached SurrogateModel
struct WatermarkScheme {
  SchemeFamily family = SchemeFamily::spread_spectrum;
  WatermarkKey key;
  size_t message_len = 16;
  double alpha = 0.01;  // spread-spectrum strength
  double delta = 0.1;   // QIM lattice step
  std::vector<uint8_t> pattern_bits;  // optional fixed prefix, size P < L
  std::shared_ptr<const SurrogateModel> model;  // neural family only

  size_t min_samples() const;
  double snr_floor_db() const;  // declared clean-embed floor on the corpus
};

WatermarkScheme make_scheme(SchemeFamily family, uint64_t seed,
                            size_t message_len = 16);
WatermarkScheme make_neural_scheme(std::shared_ptr<const SurrogateModel> model);

// QIM geometry (fixed per scheme construction, derived from the key):
// 512-point rectangular non-overlapping frames, carrier bins selected from
// the 1.5-5 kHz band.  Each quantized coefficient is the mean magnitude
// over a group of consecutive frames; averaging keeps the lattice margin
// above the broadband noise other schemes inject.
constexpr size_t kQimFft = 512;
constexpr size_t kQimGroupFrames = 24;

AudioClip embed(const WatermarkScheme& scheme, const AudioClip& clip,
                const Message& m);
DetectionResult detect(const WatermarkScheme& scheme, const AudioClip& clip);

// Random message whose prefix honors the scheme's pattern bits when set.
Message owner_message(const WatermarkScheme& scheme, Rng& rng);

// Text descriptor (family, seed, strength, pattern, checkpoint reference).
// load_scheme also accepts a bare model checkpoint as a neural scheme.
void save_scheme(const WatermarkScheme& scheme, const std::string& path);
WatermarkScheme load_scheme(const std::string& path);

}  // namespace wmlab
