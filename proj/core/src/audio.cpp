// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/audio.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wmlab/rng.hpp"

namespace wmlab {

void validate(const AudioClip& clip) {
  if (clip.samples.empty())
    throw std::invalid_argument("audio clip is empty");
  if (clip.sample_rate <= 0)
    throw std::invalid_argument("audio clip has non-positive sample rate");
  for (double s : clip.samples)
    if (!std::isfinite(s))
      throw std::invalid_argument("audio clip contains non-finite samples");
}

double rms(const AudioClip& clip) {
  double acc = 0.0;
  for (double s : clip.samples) acc += s * s;
  return clip.samples.empty() ? 0.0
                              : std::sqrt(acc / double(clip.samples.size()));
}

double peak(const AudioClip& clip) {
  double p = 0.0;
  for (double s : clip.samples) p = std::max(p, std::fabs(s));
  return p;
}

Transform Transform::resampled(int rate) {
  Transform t;
  t.kind = TransformKind::resample;
  t.target_rate = rate;
  return t;
}

Transform Transform::noise(double noise_rms, uint64_t seed) {
  Transform t;
  t.kind = TransformKind::additive_noise;
  t.noise_rms = noise_rms;
  t.noise_seed = seed;
  return t;
}

Transform Transform::lowpassed(double cutoff_hz) {
  Transform t;
  t.kind = TransformKind::lowpass;
  t.cutoff_hz = cutoff_hz;
  return t;
}

Transform Transform::scaled(double gain) {
  Transform t;
  t.kind = TransformKind::amplitude_scale;
  t.gain = gain;
  return t;
}

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::fabs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Windowed-sinc interpolation, 16 taps per output sample.  The kernel cutoff
// follows the lower of the two Nyquist rates so downsampling anti-aliases.
AudioClip resample(const AudioClip& in, int out_rate) {
  if (out_rate <= 0) throw std::invalid_argument("resample: rate must be > 0");
  if (out_rate == in.sample_rate) {
    AudioClip out = in;
    return out;
  }
  const double ratio = double(out_rate) / double(in.sample_rate);
  const size_t out_len =
      std::max<size_t>(1, size_t(std::llround(double(in.size()) * ratio)));
  const double cut = std::min(1.0, ratio);  // relative to input Nyquist
  const int half = 8;                       // 16 taps
  AudioClip out;
  out.sample_rate = out_rate;
  out.samples.resize(out_len);
  const auto& x = in.samples;
  const long n = long(x.size());
  for (size_t j = 0; j < out_len; ++j) {
    const double t = double(j) / ratio;
    const long i0 = long(std::floor(t)) - half + 1;
    double acc = 0.0;
    for (long i = i0; i < i0 + 2 * half; ++i) {
      if (i < 0 || i >= n) continue;
      const double d = t - double(i);
      // Hann-windowed sinc over the 16-tap support
      const double w = 0.5 + 0.5 * std::cos(kPi * d / double(half));
      acc += x[size_t(i)] * cut * sinc(cut * d) * w;
    }
    out.samples[j] = acc;
  }
  return out;
}

// Linear-phase FIR lowpass, 129 taps, group delay compensated so length and
// alignment are preserved.
AudioClip lowpass(const AudioClip& in, double cutoff_hz) {
  const double nyq = 0.5 * in.sample_rate;
  if (cutoff_hz <= 0 || cutoff_hz >= nyq)
    throw std::invalid_argument("lowpass: cutoff must be in (0, Nyquist)");
  const int taps = 129;
  const int half = taps / 2;
  const double fc = cutoff_hz / in.sample_rate;  // cycles per sample
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int k = 0; k < taps; ++k) {
    const double d = double(k - half);
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * k / (taps - 1));
    h[size_t(k)] = 2.0 * fc * sinc(2.0 * fc * d) * w;
    sum += h[size_t(k)];
  }
  for (double& v : h) v /= sum;  // unit DC gain

  AudioClip out;
  out.sample_rate = in.sample_rate;
  out.samples.assign(in.size(), 0.0);
  const long n = long(in.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < taps; ++k) {
      const long src = i + k - half;
      if (src < 0 || src >= n) continue;
      acc += in.samples[size_t(src)] * h[size_t(k)];
    }
    out.samples[size_t(i)] = acc;
  }
  return out;
}

}  // namespace

AudioClip apply_transform(const AudioClip& clip, const Transform& t) {
  validate(clip);
  switch (t.kind) {
    case TransformKind::resample:
      return resample(clip, t.target_rate);
    case TransformKind::additive_noise: {
      if (t.noise_rms < 0)
        throw std::invalid_argument("noise rms must be >= 0");
      AudioClip out = clip;
      if (t.noise_rms > 0) {
        Rng rng(t.noise_seed, 0x6e6f697365ULL);
        for (double& s : out.samples) s += t.noise_rms * rng.gaussian();
      }
      return out;
    }
    case TransformKind::lowpass:
      return lowpass(clip, t.cutoff_hz);
    case TransformKind::amplitude_scale: {
      if (!(t.gain > 0)) throw std::invalid_argument("gain must be > 0");
      AudioClip out = clip;
      if (t.gain != 1.0)
        for (double& s : out.samples) s *= t.gain;
      return out;
    }
  }
  throw std::invalid_argument("unknown transform kind");
}

AudioClip synth_clip(uint64_t seed, uint64_t index, double duration_s,
                     int sample_rate) {
  Rng rng(seed, 0x636c6970ULL ^ index);
  const size_t n = std::max<size_t>(1, size_t(duration_s * sample_rate));
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(n, 0.0);

  // 3..8 sinusoids on a 125 Hz grid up to 1.5 kHz.  The grid keeps the
  // corpus energy in a narrow low band shared by every clip, which is what
  // speech-like material looks like to a per-frame model.
  const int n_sin = 3 + int(rng.below(6));
  for (int s = 0; s < n_sin; ++s) {
    const double f = 125.0 * double(1 + rng.below(12));
    const double amp = rng.uniform(0.4, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const double w = 2.0 * kPi * f / sample_rate;
    for (size_t i = 0; i < n; ++i)
      clip.samples[i] += amp * std::sin(w * double(i) + phase);
  }

  // Lowpass noise body: one-pole at ~400 Hz.
  {
    const double a = std::exp(-2.0 * kPi * 400.0 / sample_rate);
    double state = 0.0;
    const double g = 0.8 * double(n_sin);  // comparable to the tonal part
    for (size_t i = 0; i < n; ++i) {
      state = a * state + (1.0 - a) * rng.gaussian();
      clip.samples[i] += g * state;
    }
  }

  // Faint broadband floor so no band is exactly empty.
  {
    const double g = 0.012 * double(n_sin);
    for (size_t i = 0; i < n; ++i) clip.samples[i] += g * rng.gaussian();
  }

  const double p = peak(clip);
  const double scale = p > 0 ? 0.9 / p : 0.0;
  for (double& s : clip.samples) s *= scale;
  return clip;
}

std::vector<AudioClip> synth_corpus(uint64_t seed, int count,
                                    double duration_s, int sample_rate) {
  if (count < 0) throw std::invalid_argument("corpus count must be >= 0");
  std::vector<AudioClip> corpus;
  corpus.reserve(size_t(count));
  for (int i = 0; i < count; ++i)
    corpus.push_back(synth_clip(seed, uint64_t(i), duration_s, sample_rate));
  return corpus;
}

}  // namespace wmlab
