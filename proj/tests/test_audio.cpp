// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wmlab/audio.hpp"
#include "wmlab/rng.hpp"
#include "wmlab/stft.hpp"
#include "wmlab/wav.hpp"

using namespace wmlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

AudioClip random_clip(uint64_t seed, size_t n, int rate = 16000) {
  Rng rng(seed);
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (auto& s : c.samples) s = rng.uniform(-0.95, 0.95);
  return c;
}

double rms_diff(const AudioClip& a, const AudioClip& b) {
  REQUIRE(a.samples.size() == b.samples.size());
  double acc = 0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    acc += d * d;
  }
  return std::sqrt(acc / double(a.samples.size()));
}

// hand-rolled 16-bit PCM writer so load_wav is checked against raw bytes
void write_raw_wav16(const std::string& path, const std::vector<int16_t>& data,
                     int channels, int rate) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  auto u32 = [&](uint32_t v) { f.write(reinterpret_cast<char*>(&v), 4); };
  auto u16 = [&](uint16_t v) { f.write(reinterpret_cast<char*>(&v), 2); };
  const uint32_t bytes = uint32_t(data.size() * 2);
  f.write("RIFF", 4);
  u32(36 + bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(uint16_t(channels));
  u32(uint32_t(rate));
  u32(uint32_t(rate * channels * 2));
  u16(uint16_t(channels * 2));
  u16(16);
  f.write("data", 4);
  u32(bytes);
  for (int16_t v : data) f.write(reinterpret_cast<char*>(&v), 2);
}

}  // namespace

TEST_CASE("load_wav scales 16-bit samples to [-1, 1]") {
  const std::string path = temp_path("wmlab_scale.wav");
  write_raw_wav16(path, {0, 16384, -16384}, 1, 16000);
  const AudioClip clip = load_wav(path);
  REQUIRE(clip.samples.size() == 3);
  CHECK(clip.samples[0] == doctest::Approx(0.0));
  CHECK(clip.samples[1] == doctest::Approx(0.5));
  CHECK(clip.samples[2] == doctest::Approx(-0.5));
  CHECK(clip.sample_rate == 16000);
}

TEST_CASE("load_wav averages channels to mono") {
  const std::string path = temp_path("wmlab_stereo.wav");
  write_raw_wav16(path, {32767, 0, 32767, 0}, 2, 8000);
  const AudioClip clip = load_wav(path);
  REQUIRE(clip.samples.size() == 2);
  // (32767/32768 + 0) / 2
  CHECK(clip.samples[0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("load_wav rejects malformed input") {
  const std::string path = temp_path("wmlab_bad.wav");
  std::ofstream(path, std::ios::trunc) << "definitely not a RIFF file";
  CHECK_THROWS(load_wav(path));
  CHECK_THROWS(load_wav(temp_path("wmlab_does_not_exist.wav")));
}

TEST_CASE("save_wav writes silence and clamps full scale") {
  const std::string path = temp_path("wmlab_silence.wav");
  AudioClip silence;
  silence.sample_rate = 16000;
  silence.samples.assign(16000, 0.0);
  save_wav(silence, path);
  AudioClip back = load_wav(path);
  for (double s : back.samples) CHECK(s == 0.0);

  AudioClip full;
  full.sample_rate = 16000;
  full.samples = {1.0, -1.0};
  save_wav(full, path);
  back = load_wav(path);
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(back.samples[1] == doctest::Approx(-1.0));
}

TEST_CASE("wav round trip max error is at most 2^-15") {
  const std::string path = temp_path("wmlab_roundtrip.wav");
  for (uint64_t seed : {1u, 2u, 3u}) {
    AudioClip clip = random_clip(seed, 4096);
    clip.samples[0] = 1.0;  // clamped extreme
    save_wav(clip, path);
    const AudioClip back = load_wav(path);
    REQUIRE(back.samples.size() == clip.samples.size());
    double worst = 0;
    for (size_t i = 0; i < clip.samples.size(); ++i)
      worst = std::max(worst, std::fabs(clip.samples[i] - back.samples[i]));
    CHECK(worst <= std::pow(2.0, -15.0) + 1e-12);
  }
}

TEST_CASE("synth_corpus is deterministic and peak-normalized") {
  const auto a = synth_corpus(42, 5, 1.0, 16000);
  const auto b = synth_corpus(42, 5, 1.0, 16000);
  REQUIRE(a.size() == 5);
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].samples.size() == b[i].samples.size());
    CHECK(a[i].samples == b[i].samples);  // bit-identical
    CHECK(peak(a[i]) == doctest::Approx(0.9).epsilon(1e-6));
  }
  const auto c = synth_corpus(43, 1, 1.0, 16000);
  CHECK(c[0].samples != a[0].samples);
  CHECK(synth_corpus(1, 0).empty());
}

TEST_CASE("stft of a bin-centered sine concentrates its energy") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(16000);
  const size_t bin = 16;  // 1000 Hz at fft 256
  const double w = 2.0 * kPi * double(bin) * 16000.0 / 256.0 / 16000.0;
  for (size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = 0.5 * std::sin(w * double(i));
  const Spectrogram spec = stft(clip, 256, 64, 256);
  double total = 0, in_band = 0;
  for (size_t f = 0; f < spec.frames; ++f)
    for (size_t k = 0; k < spec.bins; ++k) {
      const double e = std::norm(spec.at(f, k));
      total += e;
      if (k >= bin - 1 && k <= bin + 1) in_band += e;
    }
  CHECK(in_band / total >= 0.95);
}

TEST_CASE("stft of silence-with-epsilon zero signal is all zero") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.assign(2048, 0.0);
  const Spectrogram spec = stft(clip, 128, 32, 128);
  for (const auto& c : spec.coeffs) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("stft satisfies Parseval per frame") {
  const AudioClip clip = random_clip(7, 8192);
  const size_t fft = 256, hop = 64, win = 256;
  const Spectrogram spec = stft(clip, fft, hop, win);
  // windowed-frame energy computed independently of the fft
  const auto window = make_window(Window::hann, win);
  const size_t pad = win / 2;
  double frame_energy = 0;
  auto reflect = [&](long i) {
    const long n = long(clip.samples.size());
    long period = 2 * (n - 1);
    long j = i % period;
    if (j < 0) j += period;
    if (j >= n) j = period - j;
    return clip.samples[size_t(j)];
  };
  for (size_t f = 0; f < spec.frames; ++f)
    for (size_t t = 0; t < win; ++t) {
      const double v = window[t] * reflect(long(f * hop + t) - long(pad));
      frame_energy += v * v;
    }
  double spec_energy = 0;
  for (size_t f = 0; f < spec.frames; ++f) {
    for (size_t k = 0; k < spec.bins; ++k) {
      const double e = std::norm(spec.at(f, k));
      const bool interior = k != 0 && k != spec.bins - 1;
      spec_energy += (interior ? 2.0 : 1.0) * e;
    }
  }
  spec_energy /= double(fft);
  CHECK(std::fabs(frame_energy - spec_energy) / frame_energy <= 1e-6);
}

TEST_CASE("istft inverts stft for every default resolution") {
  for (auto [fft, hop, win] : {std::tuple<size_t, size_t, size_t>{64, 16, 64},
                               {128, 32, 128},
                               {256, 64, 256}}) {
    const AudioClip clip = random_clip(11 + fft, 9973);  // awkward length
    const Spectrogram spec = stft(clip, fft, hop, win);
    const AudioClip back = istft(spec);
    CHECK(rms_diff(clip, back) <= 1e-6);
  }
  // rectangular non-overlapping geometry used by the QIM family
  const AudioClip clip = random_clip(99, 48000);
  const Spectrogram spec = stft(clip, 512, 512, 512, Window::rect);
  CHECK(rms_diff(clip, istft(spec)) <= 1e-6);
}

TEST_CASE("istft of an all-zero spectrogram is silence, and is linear") {
  const AudioClip clip = random_clip(13, 4000);
  Spectrogram spec = stft(clip, 128, 32, 128);
  Spectrogram zero = spec;
  for (auto& c : zero.coeffs) c = 0.0;
  for (double s : istft(zero).samples) CHECK(s == 0.0);

  Spectrogram scaled = spec;
  for (auto& c : scaled.coeffs) c *= 3.0;
  const AudioClip a = istft(spec);
  const AudioClip b = istft(scaled);
  for (size_t i = 0; i < a.samples.size(); ++i)
    CHECK(b.samples[i] == doctest::Approx(3.0 * a.samples[i]).epsilon(1e-9));
}

TEST_CASE("istft rejects inconsistent geometry") {
  const AudioClip clip = random_clip(17, 4000);
  Spectrogram spec = stft(clip, 128, 32, 128);
  Spectrogram broken = spec;
  broken.source_length = 0;
  CHECK_THROWS(istft(broken));
  broken = spec;
  broken.bins -= 1;
  CHECK_THROWS(istft(broken));
}

TEST_CASE("stft input validation") {
  AudioClip tiny;
  tiny.sample_rate = 16000;
  tiny.samples.assign(63, 0.1);
  CHECK_THROWS(stft(tiny, 128, 32, 128));          // shorter than window
  const AudioClip ok = random_clip(1, 1024);
  CHECK_THROWS(stft(ok, 100, 25, 100));            // not a power of two
  CHECK_THROWS(stft(ok, 128, 0, 128));             // zero hop
  CHECK_THROWS(stft(ok, 128, 200, 128));           // hop > window
}

TEST_CASE("amplitude-scale with unit gain is the identity") {
  const AudioClip clip = random_clip(19, 2048);
  const AudioClip out = apply_transform(clip, Transform::scaled(1.0));
  CHECK(out.samples == clip.samples);
  CHECK_THROWS(apply_transform(clip, Transform::scaled(0.0)));
}

TEST_CASE("additive noise lands at the expected SNR") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(48000);
  for (size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = std::sqrt(2.0) * std::sin(2.0 * kPi * 440.0 *
                                                double(i) / 16000.0);
  CHECK(rms(clip) == doctest::Approx(1.0).epsilon(1e-3));  // unit power
  for (double r : {0.05, 0.01}) {
    const AudioClip noisy = apply_transform(clip, Transform::noise(r, 7));
    double noise = 0, sig = 0;
    for (size_t i = 0; i < clip.samples.size(); ++i) {
      sig += clip.samples[i] * clip.samples[i];
      const double d = noisy.samples[i] - clip.samples[i];
      noise += d * d;
    }
    const double snr = 10.0 * std::log10(sig / noise);
    CHECK(snr == doctest::Approx(-20.0 * std::log10(r)).epsilon(0.02));
  }
}

TEST_CASE("resampling 16k->8k->16k removes energy above 4 kHz") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(16384);
  Rng rng(23);
  for (auto& s : clip.samples) s = rng.uniform(-0.5, 0.5);  // white
  AudioClip down = apply_transform(clip, Transform::resampled(8000));
  CHECK(down.sample_rate == 8000);
  CHECK(down.samples.size() == clip.samples.size() / 2);
  AudioClip up = apply_transform(down, Transform::resampled(16000));
  REQUIRE(up.samples.size() == clip.samples.size());

  std::vector<std::complex<double>> spec(up.samples.begin(),
                                         up.samples.end());
  fft(spec, false);
  double total = 0, high = 0;
  for (size_t k = 1; k < spec.size() / 2; ++k) {
    const double e = std::norm(spec[k]);
    total += e;
    if (double(k) / double(spec.size()) * 16000.0 > 4000.0) high += e;
  }
  CHECK(high / total <= 0.01);
}

TEST_CASE("lowpass transform validates its cutoff") {
  const AudioClip clip = random_clip(29, 2048);
  CHECK_THROWS(apply_transform(clip, Transform::lowpassed(9000.0)));
  CHECK_THROWS(apply_transform(clip, Transform::lowpassed(0.0)));
  const AudioClip out = apply_transform(clip, Transform::lowpassed(2000.0));
  CHECK(out.samples.size() == clip.samples.size());
}

TEST_CASE("clip validation catches bad buffers") {
  AudioClip empty;
  CHECK_THROWS(validate(empty));
  AudioClip nan_clip;
  nan_clip.samples = {0.0, std::nan("")};
  CHECK_THROWS(validate(nan_clip));
  AudioClip bad_rate = random_clip(1, 16);
  bad_rate.sample_rate = 0;
  CHECK_THROWS(validate(bad_rate));
}
