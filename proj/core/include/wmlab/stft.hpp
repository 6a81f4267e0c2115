// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "wmlab/audio.hpp"

namespace wmlab {

enum class Window { hann, rect };

// Complex short-time spectrum, frames x bins row-major, bins = fft_size/2+1.
struct Spectrogram {
  std::vector<std::complex<double>> coeffs;
  size_t frames = 0;
  size_t bins = 0;
  size_t fft_size = 0;
  size_t hop = 0;
  size_t window_length = 0;
  Window window = Window::hann;
  size_t source_length = 0;  // original clip length, needed to invert
  int sample_rate = 16000;

  std::complex<double>& at(size_t frame, size_t bin) {
    return coeffs[frame * bins + bin];
  }
  const std::complex<double>& at(size_t frame, size_t bin) const {
    return coeffs[frame * bins + bin];
  }
};

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Forward STFT.  The signal is reflect-padded by window_length/2 on each
// side; frames start every `hop` samples of the padded signal, so the frame
// count is floor((padded_len - window_length)/hop) + 1.  Frames shorter than
// fft_size are zero-padded before the transform.  Throws if the clip is
// shorter than one window or the geometry is invalid (hop <= window <= fft,
// fft a power of two).
Spectrogram stft(const AudioClip& clip, size_t fft_size, size_t hop,
                 size_t window_length, Window window = Window::hann);

// Weighted overlap-add inverse with per-sample window-power normalization;
// exact (to rounding) for any COLA-positive configuration produced by stft.
AudioClip istft(const Spectrogram& spec);

// Magnitude export, rows = frames, columns = bin magnitudes.
void spectrogram_magnitude_csv(const Spectrogram& spec,
                               const std::string& path);

std::vector<double> make_window(Window window, size_t length);

}  // namespace wmlab
