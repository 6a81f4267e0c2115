// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wmlab {

// Mono PCM sample buffer.  Samples are nominally in [-1, 1]; the range is
// enforced when writing WAV files (clamped), not on every intermediate
// buffer, so that transforms and measurements can work on unclipped data.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws std::invalid_argument if the clip is empty, has a non-positive
// rate, or contains non-finite samples.
void validate(const AudioClip& clip);

double rms(const AudioClip& clip);
double peak(const AudioClip& clip);

enum class TransformKind { resample, additive_noise, lowpass, amplitude_scale };

struct Transform {
  TransformKind kind = TransformKind::amplitude_scale;
  int target_rate = 16000;   // resample
  double noise_rms = 0.0;    // additive-noise
  uint64_t noise_seed = 1;   // additive-noise (kept so transforms are pure)
  double cutoff_hz = 4000;   // lowpass
  double gain = 1.0;         // amplitude-scale

  static Transform resampled(int rate);
  static Transform noise(double noise_rms, uint64_t seed = 1);
  static Transform lowpassed(double cutoff_hz);
  static Transform scaled(double gain);
};

// Benign processing T(.).  Length is preserved except for resampling, where
// it scales by the rate ratio.  Parameters are validated (cutoff below
// Nyquist, gain positive, rate positive).
AudioClip apply_transform(const AudioClip& clip, const Transform& t);

// Deterministic synthetic corpus: each clip is a mixture of 3-8 sinusoids
// on a 125 Hz grid (<= 1.5 kHz), lowpass-filtered noise, and a faint
// broadband floor, peak-normalized to 0.9.  A pure function of its
// arguments.
std::vector<AudioClip> synth_corpus(uint64_t seed, int count,
                                    double duration_s = 3.0,
                                    int sample_rate = 16000);

AudioClip synth_clip(uint64_t seed, uint64_t index, double duration_s,
                     int sample_rate);

}  // namespace wmlab
