// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/stft.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace wmlab {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Mirror index about the edges (librosa-style reflect, no edge repeat).
size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  long period = 2 * (n - 1);
  long j = i % period;
  if (j < 0) j += period;
  if (j >= n) j = period - j;
  return size_t(j);
}

// Frame count over the reflect-padded signal.  The nominal count is
// floor((padded_len - window)/hop) + 1; when hop is large relative to the
// pad (for example rect windows with hop == window) extra frames are added
// so that overlap-add always covers the full original signal.
size_t frame_count(size_t n, size_t hop, size_t window) {
  const size_t pad = window / 2;
  const size_t padded = n + 2 * pad;
  size_t frames = (padded - window) / hop + 1;
  const size_t need_end = pad + n;  // cover original samples [pad, pad+n)
  while ((frames - 1) * hop + window < need_end) ++frames;
  return frames;
}

}  // namespace

std::vector<double> make_window(Window window, size_t length) {
  std::vector<double> w(length, 1.0);
  if (window == Window::hann) {
    // periodic Hann, COLA for hop = length/4
    for (size_t i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * double(i) / double(length));
  }
  return w;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!power_of_two(n)) throw std::invalid_argument("fft size not 2^k");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / double(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

Spectrogram stft(const AudioClip& clip, size_t fft_size, size_t hop,
                 size_t window_length, Window window) {
  validate(clip);
  if (!power_of_two(fft_size))
    throw std::invalid_argument("stft: fft_size must be a power of two");
  if (hop == 0 || hop > window_length || window_length > fft_size)
    throw std::invalid_argument("stft: need 0 < hop <= window <= fft_size");
  const size_t n = clip.samples.size();
  if (n < window_length)
    throw std::invalid_argument("stft: clip shorter than one window");

  const size_t pad = window_length / 2;
  const size_t frames = frame_count(n, hop, window_length);
  const size_t bins = fft_size / 2 + 1;
  const std::vector<double> win = make_window(window, window_length);

  Spectrogram spec;
  spec.coeffs.resize(frames * bins);
  spec.frames = frames;
  spec.bins = bins;
  spec.fft_size = fft_size;
  spec.hop = hop;
  spec.window_length = window_length;
  spec.window = window;
  spec.source_length = n;
  spec.sample_rate = clip.sample_rate;

  std::vector<std::complex<double>> work(fft_size);
  for (size_t f = 0; f < frames; ++f) {
    const long start = long(f * hop) - long(pad);
    for (size_t t = 0; t < window_length; ++t) {
      const size_t src = reflect_index(start + long(t), long(n));
      work[t] = clip.samples[src] * win[t];
    }
    for (size_t t = window_length; t < fft_size; ++t) work[t] = 0.0;
    fft(work, false);
    for (size_t k = 0; k < bins; ++k) spec.at(f, k) = work[k];
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec) {
  if (spec.frames == 0 || spec.bins != spec.fft_size / 2 + 1 ||
      spec.hop == 0 || spec.hop > spec.window_length ||
      spec.window_length > spec.fft_size || spec.source_length == 0)
    throw std::invalid_argument("istft: inconsistent spectrogram geometry");

  const size_t pad = spec.window_length / 2;
  if (spec.frames != frame_count(spec.source_length, spec.hop,
                                 spec.window_length))
    throw std::invalid_argument("istft: frame count does not match length");

  const size_t span = (spec.frames - 1) * spec.hop + spec.window_length;
  const std::vector<double> win = make_window(spec.window, spec.window_length);
  std::vector<double> acc(span, 0.0);
  std::vector<double> norm(span, 0.0);
  std::vector<std::complex<double>> work(spec.fft_size);

  for (size_t f = 0; f < spec.frames; ++f) {
    // rebuild the full spectrum from the half-spectrum
    for (size_t k = 0; k < spec.bins; ++k) work[k] = spec.at(f, k);
    for (size_t k = spec.bins; k < spec.fft_size; ++k)
      work[k] = std::conj(spec.at(f, spec.fft_size - k));
    fft(work, true);
    const size_t start = f * spec.hop;
    for (size_t t = 0; t < spec.window_length; ++t) {
      const size_t dst = start + t;
      acc[dst] += win[t] * work[t].real();
      norm[dst] += win[t] * win[t];
    }
  }

  AudioClip out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.source_length);
  for (size_t i = 0; i < spec.source_length; ++i) {
    const double d = norm[pad + i];
    out.samples[i] = d > 1e-12 ? acc[pad + i] / d : 0.0;
  }
  return out;
}

void spectrogram_magnitude_csv(const Spectrogram& spec,
                               const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.precision(9);
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t k = 0; k < spec.bins; ++k) {
      if (k) f << ',';
      f << std::abs(spec.at(t, k));
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace wmlab
