// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wmlab/checkpoint.hpp"
#include "wmlab/stft.hpp"

namespace wmlab {

std::string family_name(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::lsb: return "lsb";
    case SchemeFamily::spread_spectrum: return "spread-spectrum";
    case SchemeFamily::qim_freq: return "qim-freq";
    case SchemeFamily::neural: return "neural";
  }
  return "unknown";
}

SchemeFamily family_from_name(const std::string& name) {
  if (name == "lsb") return SchemeFamily::lsb;
  if (name == "spread-spectrum") return SchemeFamily::spread_spectrum;
  if (name == "qim-freq") return SchemeFamily::qim_freq;
  if (name == "neural") return SchemeFamily::neural;
  throw std::invalid_argument("unknown scheme family: " + name);
}

size_t WatermarkScheme::min_samples() const {
  switch (family) {
    case SchemeFamily::lsb: return message_len;
    case SchemeFamily::spread_spectrum: return 16 * message_len;
    case SchemeFamily::qim_freq: return kQimFft * kQimGroupFrames;
    case SchemeFamily::neural: return SurrogateModel::kFrame;
  }
  return message_len;
}

double WatermarkScheme::snr_floor_db() const {
  switch (family) {
    case SchemeFamily::lsb: return 60.0;
    case SchemeFamily::spread_spectrum: return 20.0;
    case SchemeFamily::qim_freq: return 20.0;
    case SchemeFamily::neural: return 10.0;
  }
  return 0.0;
}

WatermarkScheme make_scheme(SchemeFamily family, uint64_t seed,
                            size_t message_len) {
  if (message_len == 0) throw std::invalid_argument("message_len must be > 0");
  WatermarkScheme s;
  s.family = family;
  s.key.seed = seed;
  s.message_len = message_len;
  return s;
}

WatermarkScheme make_neural_scheme(
    std::shared_ptr<const SurrogateModel> model) {
  if (!model) throw std::invalid_argument("neural scheme needs a model");
  WatermarkScheme s;
  s.family = SchemeFamily::neural;
  s.key.seed = model->seed;
  s.message_len = model->message_len;
  s.model = std::move(model);
  return s;
}

namespace {

void check_input(const WatermarkScheme& s, const AudioClip& clip) {
  validate(clip);
  if (clip.samples.size() < s.min_samples())
    throw std::invalid_argument("clip too short for scheme capacity (need " +
                                std::to_string(s.min_samples()) + " samples)");
  if (s.family == SchemeFamily::neural && !s.model)
    throw std::invalid_argument("neural scheme has no model attached");
  if (!s.pattern_bits.empty() && s.pattern_bits.size() >= s.message_len)
    throw std::invalid_argument("pattern prefix must be shorter than message");
}

void check_message(const WatermarkScheme& s, const Message& m) {
  if (m.size() != s.message_len)
    throw std::invalid_argument("message length does not match scheme");
  for (uint8_t b : m.bits)
    if (b > 1) throw std::invalid_argument("message bits must be 0/1");
}

// ---- lsb ----------------------------------------------------------------

int16_t quantize16(double x) {
  long q = std::lround(std::clamp(x, -1.0, 1.0) * 32768.0);
  return int16_t(std::clamp(q, -32768L, 32767L));
}

AudioClip lsb_embed(const WatermarkScheme& s, const AudioClip& clip,
                    const Message& m) {
  AudioClip out = clip;
  const size_t L = s.message_len;
  for (size_t i = 0; i < out.samples.size(); ++i) {
    int16_t q = quantize16(out.samples[i]);
    q = int16_t((q & ~1) | int(m.bits[i % L]));
    out.samples[i] = double(q) / 32768.0;
  }
  return out;
}

DetectionResult lsb_detect(const WatermarkScheme& s, const AudioClip& clip) {
  const size_t L = s.message_len;
  std::vector<double> ones(L, 0.0), total(L, 0.0);
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    const int16_t q = quantize16(clip.samples[i]);
    ones[i % L] += double(q & 1);
    total[i % L] += 1.0;
  }
  std::vector<double> scores(L);
  for (size_t i = 0; i < L; ++i)
    scores[i] = total[i] > 0 ? ones[i] / total[i] : 0.5;
  return result_from_scores(std::move(scores));
}

// ---- spread-spectrum ----------------------------------------------------

// chip sign for absolute sample index j, a pure function of the key
inline double chip(uint64_t seed, size_t j) {
  return (mix_seed(seed ^ 0x5353u, j) & 1u) ? 1.0 : -1.0;
}

AudioClip ss_embed(const WatermarkScheme& s, const AudioClip& clip,
                   const Message& m) {
  if (s.alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  AudioClip out = clip;
  if (s.alpha == 0.0) return out;  // zero-strength limit: identity
  const size_t L = s.message_len;
  const uint64_t seed = s.key.seed;

  // host chip-aligned component per bit position; projecting it out makes
  // detection exact on clean audio and makes a same-key re-embed replace
  // the previous message instead of stacking with it
  std::vector<double> corr(L, 0.0), count(L, 0.0);
  for (size_t j = 0; j < out.samples.size(); ++j) {
    corr[j % L] += chip(seed, j) * out.samples[j];
    count[j % L] += 1.0;
  }
  for (size_t j = 0; j < out.samples.size(); ++j) {
    const size_t i = j % L;
    const double proj = corr[i] / count[i];
    const double target = s.alpha * (m.bits[i] ? 1.0 : -1.0);
    out.samples[j] += (target - proj) * chip(seed, j);
  }
  return out;
}

DetectionResult ss_detect(const WatermarkScheme& s, const AudioClip& clip) {
  const size_t L = s.message_len;
  const uint64_t seed = s.key.seed;
  std::vector<double> corr(L, 0.0), count(L, 0.0);
  for (size_t j = 0; j < clip.samples.size(); ++j) {
    corr[j % L] += chip(seed, j) * clip.samples[j];
    count[j % L] += 1.0;
  }
  const double alpha = s.alpha > 0 ? s.alpha : 0.01;
  std::vector<double> scores(L);
  for (size_t i = 0; i < L; ++i) {
    const double norm = corr[i] / (alpha * std::max(1.0, count[i]));
    scores[i] = 1.0 / (1.0 + std::exp(-4.0 * std::clamp(norm, -20.0, 20.0)));
  }
  return result_from_scores(std::move(scores));
}

// ---- qim-freq -----------------------------------------------------------

std::vector<size_t> qim_bins(const WatermarkScheme& s) {
  // carrier bins drawn from the 1.5-5 kHz band at 16 kHz / 512-point frames
  const size_t lo = 48, hi = 160;
  std::vector<size_t> band(hi - lo);
  for (size_t i = 0; i < band.size(); ++i) band[i] = lo + i;
  Rng rng(s.key.seed, 0x71696dULL);
  for (size_t i = band.size() - 1; i > 0; --i)
    std::swap(band[i], band[rng.below(i + 1)]);
  band.resize(s.message_len);
  return band;
}

// nearest multiple of delta with the given parity
double qim_quantize(double value, double delta, int parity) {
  const double r = value / delta;
  const double k = std::floor((r - parity) / 2.0 + 0.5);
  double q = (2.0 * k + parity) * delta;
  if (q < 0) q = parity ? delta : 0.0;  // magnitudes live on [0, inf)
  return q;
}

// parity of the nearest lattice multiple; exact ties round toward even
int qim_classify(double value, double delta) {
  const double r = value / delta;
  double k = std::floor(r + 0.5);
  if (r - std::floor(r) == 0.5) {  // boundary: prefer the even lattice
    const double lower = std::floor(r);
    k = (long(lower) % 2 == 0) ? lower : lower + 1.0;
  }
  long ki = long(k);
  return int(((ki % 2) + 2) % 2);
}

AudioClip qim_embed(const WatermarkScheme& s, const AudioClip& clip,
                    const Message& m) {
  if (!(s.delta > 0)) throw std::invalid_argument("delta must be > 0");
  Spectrogram spec = stft(clip, kQimFft, kQimFft, kQimFft, Window::rect);
  const auto bins = qim_bins(s);
  const size_t groups = spec.frames / kQimGroupFrames;
  // trailing frames that do not fill a group are left untouched and are
  // ignored by the detector, so stale data there cannot skew a re-embed
  for (size_t g = 0; g < groups; ++g) {
    const size_t f0 = g * kQimGroupFrames;
    for (size_t i = 0; i < s.message_len; ++i) {
      std::vector<double> mags(kQimGroupFrames);
      double mean = 0.0;
      for (size_t f = 0; f < kQimGroupFrames; ++f) {
        mags[f] = std::abs(spec.at(f0 + f, bins[i]));
        mean += mags[f];
      }
      mean /= double(kQimGroupFrames);
      const double q = qim_quantize(mean, s.delta, int(m.bits[i]));
      double d = q - mean;
      // common shift moves the group mean onto the lattice; magnitudes that
      // would go negative are clamped and the deficit respread so the mean
      // stays exact
      std::vector<double> out = mags;
      for (size_t f = 0; f < kQimGroupFrames; ++f) out[f] = mags[f] + d;
      for (int pass = 0; pass < 16; ++pass) {
        double deficit = 0.0;
        size_t positive = 0;
        for (double& v : out) {
          if (v < 0) {
            deficit += -v;
            v = 0;
          } else if (v > 0) {
            ++positive;
          }
        }
        if (deficit <= 1e-15 || positive == 0) break;
        const double share = deficit / double(positive);
        for (double& v : out)
          if (v > 0) v -= share;
      }
      for (size_t f = 0; f < kQimGroupFrames; ++f) {
        std::complex<double>& X = spec.at(f0 + f, bins[i]);
        const double mag = mags[f];
        X = (mag > 1e-12) ? X * (out[f] / mag)
                          : std::complex<double>(out[f], 0.0);
      }
    }
  }
  AudioClip out = istft(spec);
  out.sample_rate = clip.sample_rate;
  return out;
}

DetectionResult qim_detect(const WatermarkScheme& s, const AudioClip& clip) {
  Spectrogram spec = stft(clip, kQimFft, kQimFft, kQimFft, Window::rect);
  const auto bins = qim_bins(s);
  const size_t groups = spec.frames / kQimGroupFrames;
  std::vector<double> votes(s.message_len, 0.0);
  for (size_t g = 0; g < groups; ++g) {
    const size_t f0 = g * kQimGroupFrames;
    for (size_t i = 0; i < s.message_len; ++i) {
      double mean = 0.0;
      for (size_t f = 0; f < kQimGroupFrames; ++f)
        mean += std::abs(spec.at(f0 + f, bins[i]));
      mean /= double(kQimGroupFrames);
      votes[i] += qim_classify(mean, s.delta);
    }
  }
  std::vector<double> scores(s.message_len);
  for (size_t i = 0; i < s.message_len; ++i)
    scores[i] = votes[i] / double(groups);
  return result_from_scores(std::move(scores));
}

}  // namespace

AudioClip embed(const WatermarkScheme& scheme, const AudioClip& clip,
                const Message& m) {
  check_input(scheme, clip);
  check_message(scheme, m);
  switch (scheme.family) {
    case SchemeFamily::lsb: return lsb_embed(scheme, clip, m);
    case SchemeFamily::spread_spectrum: return ss_embed(scheme, clip, m);
    case SchemeFamily::qim_freq: return qim_embed(scheme, clip, m);
    case SchemeFamily::neural: return neural_embed(*scheme.model, clip, m);
  }
  throw std::logic_error("unreachable scheme family");
}

DetectionResult detect(const WatermarkScheme& scheme, const AudioClip& clip) {
  check_input(scheme, clip);
  DetectionResult r;
  switch (scheme.family) {
    case SchemeFamily::lsb: r = lsb_detect(scheme, clip); break;
    case SchemeFamily::spread_spectrum: r = ss_detect(scheme, clip); break;
    case SchemeFamily::qim_freq: r = qim_detect(scheme, clip); break;
    case SchemeFamily::neural: r = neural_detect(*scheme.model, clip); break;
  }
  // pattern-bit verification: a mismatched prefix means "no watermark"
  if (!scheme.pattern_bits.empty() && r.decoded) {
    for (size_t i = 0; i < scheme.pattern_bits.size(); ++i) {
      if (r.decoded->bits[i] != scheme.pattern_bits[i]) {
        r.decoded.reset();
        r.detected = false;
        break;
      }
    }
  }
  return r;
}

Message owner_message(const WatermarkScheme& scheme, Rng& rng) {
  Message m = random_message(rng, scheme.message_len);
  for (size_t i = 0; i < scheme.pattern_bits.size(); ++i)
    m.bits[i] = scheme.pattern_bits[i];
  return m;
}

void save_scheme(const WatermarkScheme& scheme, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "wmlab-scheme v1\n";
  f << "family = " << family_name(scheme.family) << '\n';
  f << "seed = " << scheme.key.seed << '\n';
  f << "message_len = " << scheme.message_len << '\n';
  f << "alpha = " << scheme.alpha << '\n';
  f << "delta = " << scheme.delta << '\n';
  if (!scheme.pattern_bits.empty()) {
    f << "pattern = ";
    for (uint8_t b : scheme.pattern_bits) f << int(b);
    f << '\n';
  }
  if (scheme.family == SchemeFamily::neural)
    f << "checkpoint = " << path << ".model\n";
  if (!f) throw std::runtime_error("short write: " + path);
  if (scheme.family == SchemeFamily::neural)
    save_model(*scheme.model, path + ".model");
}

WatermarkScheme load_scheme(const std::string& path) {
  if (is_checkpoint_file(path)) {
    auto model = std::make_shared<SurrogateModel>(load_model(path));
    return make_neural_scheme(std::move(model));
  }
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scheme file: " + path);
  std::string line;
  if (!std::getline(f, line) || line != "wmlab-scheme v1")
    throw std::runtime_error("not a wmlab scheme descriptor: " + path);
  WatermarkScheme s;
  std::string checkpoint;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "family") s.family = family_from_name(value);
    else if (key == "seed") s.key.seed = std::stoull(value);
    else if (key == "message_len") s.message_len = std::stoul(value);
    else if (key == "alpha") s.alpha = std::stod(value);
    else if (key == "delta") s.delta = std::stod(value);
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "pattern") {
      s.pattern_bits.clear();
      for (char c : value) {
        if (c != '0' && c != '1')
          throw std::runtime_error("pattern bits must be 0/1: " + path);
        s.pattern_bits.push_back(uint8_t(c - '0'));
      }
    }
  }
  if (s.message_len == 0 || (!s.pattern_bits.empty() &&
                             s.pattern_bits.size() >= s.message_len))
    throw std::runtime_error("invalid scheme descriptor: " + path);
  if (s.family == SchemeFamily::neural) {
    if (checkpoint.empty())
      throw std::runtime_error("neural scheme needs a checkpoint: " + path);
    s.model = std::make_shared<SurrogateModel>(load_model(checkpoint));
    s.message_len = s.model->message_len;
  }
  return s;
}

}  // namespace wmlab
