// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wmlab/parallel.hpp"
#include "wmlab/wav.hpp"

namespace wmlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    cfg.kv_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_string(text);
}

bool KeyValueConfig::has(const std::string& key) const {
  return kv_.count(key) != 0;
}

std::string KeyValueConfig::get(const std::string& key,
                                const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end())
    throw std::runtime_error("config missing required key: " + key);
  return it->second;
}

double KeyValueConfig::get_num(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + " is not a number: " +
                             it->second);
  }
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + " is not an integer: " +
                             it->second);
  }
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

uint64_t KeyValueConfig::content_hash() const {
  std::string flat;
  for (const auto& [k, v] : kv_) {  // std::map iterates sorted
    flat += k;
    flat += '=';
    flat += v;
    flat += '\n';
  }
  return fnv1a(flat.data(), flat.size());
}

std::vector<AudioClip> CorpusSpec::load() const {
  if (kind == Kind::synthetic)
    return synth_corpus(seed, count, duration_s, sample_rate);
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw std::runtime_error("no .wav files in corpus directory: " + dir);
  std::vector<AudioClip> corpus;
  corpus.reserve(paths.size());
  for (const auto& p : paths) {
    AudioClip clip = load_wav(p);
    if (clip.sample_rate != sample_rate) {
      Transform t = Transform::resampled(sample_rate);
      clip = apply_transform(clip, t);
    }
    corpus.push_back(std::move(clip));
  }
  return corpus;
}

CorpusSpec CorpusSpec::from_config(const KeyValueConfig& cfg,
                                   const std::string& prefix) {
  CorpusSpec spec;
  const std::string kind = cfg.get(prefix + "kind", "synthetic");
  if (kind == "synthetic") {
    spec.kind = Kind::synthetic;
  } else if (kind == "wav-dir") {
    spec.kind = Kind::wav_dir;
    spec.dir = cfg.require(prefix + "dir");
  } else {
    throw std::runtime_error("corpus kind must be synthetic or wav-dir");
  }
  spec.seed = uint64_t(cfg.get_int(prefix + "seed", 1));
  spec.count = int(cfg.get_int(prefix + "count", 200));
  spec.duration_s = cfg.get_num(prefix + "duration_s", 3.0);
  spec.sample_rate = int(cfg.get_int(prefix + "sample_rate", 16000));
  if (spec.count <= 0 || spec.duration_s <= 0 || spec.sample_rate <= 0)
    throw std::runtime_error("corpus parameters must be positive");
  return spec;
}

SuiteResult run_overwrite_suite(const WatermarkScheme& owner,
                                const WatermarkScheme& attacker,
                                const WatermarkScheme& adversary_verifier,
                                const std::vector<AudioClip>& corpus,
                                uint64_t seed, double snr_floor_db, int jobs,
                                int hist_bins) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  const size_t n = corpus.size();
  std::vector<SampleRecord> samples(n);
  std::vector<std::pair<std::optional<Message>, Message>> owner_outcomes(n);
  std::vector<std::pair<std::optional<Message>, Message>> adv_outcomes(n);
  std::vector<SuccessFlags> flags(n);

  parallel_for(n, jobs, [&](size_t i) {
    Rng rng(seed, 0xa77ac << 8 | i);
    const Message m_owner = owner_message(owner, rng);
    Message m_adv = random_message(rng, attacker.message_len);
    while (m_adv == m_owner) m_adv = random_message(rng, attacker.message_len);

    const AudioClip x_w = embed(owner, corpus[i], m_owner);
    const AudioClip x_adv = overwrite(attacker, x_w, m_adv);

    const DetectionResult owner_det = detect(owner, x_adv);
    const DetectionResult adv_det = detect(adversary_verifier, x_adv);

    SampleRecord rec;
    rec.clip_id = i;
    rec.detect_fail = !owner_det.detected;
    rec.owner_ber = owner_det.decoded
                        ? ber(m_owner, *owner_det.decoded)
                        : std::numeric_limits<double>::quiet_NaN();
    rec.adv_ber = adv_det.decoded
                      ? ber(m_adv, *adv_det.decoded)
                      : std::numeric_limits<double>::quiet_NaN();
    rec.snr = snr_db(x_w, x_adv);
    samples[i] = rec;
    owner_outcomes[i] = {owner_det.decoded, m_owner};
    adv_outcomes[i] = {adv_det.decoded, m_adv};
    flags[i] = verify_attack(owner, adversary_verifier, x_w, x_adv, m_owner,
                             m_adv, snr_floor_db);
  });

  SuiteResult result;
  result.metrics = aggregate(std::move(samples), owner_outcomes, adv_outcomes,
                             hist_bins);
  size_t ok = 0;
  for (const auto& f : flags)
    if (f.all()) ++ok;
  result.verified_fraction = double(ok) / double(n);
  result.flags = std::move(flags);
  return result;
}

CrossMatrix compute_cross_matrix(const std::vector<WatermarkScheme>& schemes,
                                 const std::vector<AudioClip>& corpus,
                                 uint64_t seed, int jobs) {
  if (schemes.size() < 2)
    throw std::invalid_argument("cross matrix needs at least two schemes");
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  const size_t side = schemes.size();
  CrossMatrix m;
  m.scheme_names.reserve(side);
  for (const auto& s : schemes) m.scheme_names.push_back(family_name(s.family));
  m.values.assign(side * side, 0.0);

  const size_t n = corpus.size();
  parallel_for(side * side, jobs, [&](size_t cell) {
    const size_t i = cell / side;  // owner
    const size_t j = cell % side;  // attacker
    const WatermarkScheme& owner = schemes[i];
    const WatermarkScheme& attacker = schemes[j];
    double acc = 0.0;
    size_t counted = 0;
    for (size_t c = 0; c < n; ++c) {
      Rng rng(seed, (cell << 20) | c);
      const Message m_owner = owner_message(owner, rng);
      Message m_adv = random_message(rng, attacker.message_len);
      while (m_adv == m_owner)
        m_adv = random_message(rng, attacker.message_len);
      const AudioClip x_w = embed(owner, corpus[c], m_owner);
      const AudioClip x_adv = overwrite(attacker, x_w, m_adv);
      const DetectionResult det = detect(owner, x_adv);
      if (det.decoded) {
        acc += ber(m_owner, *det.decoded);
        ++counted;
      }
    }
    m.values[cell] = counted ? acc / double(counted)
                             : std::numeric_limits<double>::quiet_NaN();
  });
  return m;
}

std::vector<StackingRow> run_stacking_suite(
    const WatermarkScheme& owner,
    const std::vector<WatermarkScheme>& candidates,
    const std::vector<AudioClip>& corpus, uint64_t seed, int jobs) {
  if (candidates.empty())
    throw std::invalid_argument("stacking suite needs candidates");
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  const size_t n = corpus.size();
  const size_t stages = candidates.size();

  std::vector<uint8_t> corrupted(n * stages, 0);
  std::vector<double> snrs(n * stages, 0.0);

  parallel_for(n, jobs, [&](size_t i) {
    Rng rng(seed, 0x57ac4 << 8 | i);
    const Message m_owner = owner_message(owner, rng);
    Message m_adv = random_message(rng, owner.message_len);
    while (m_adv == m_owner) m_adv = random_message(rng, owner.message_len);
    const AudioClip x_w = embed(owner, corpus[i], m_owner);
    AudioClip cur = x_w;
    for (size_t s = 0; s < stages; ++s) {
      cur = overwrite(candidates[s], cur, m_adv);
      const DetectionResult det = detect(owner, cur);
      corrupted[i * stages + s] =
          (!det.decoded || !(*det.decoded == m_owner)) ? 1 : 0;
      snrs[i * stages + s] = snr_db(x_w, cur);
    }
  });

  std::vector<StackingRow> rows(stages);
  for (size_t s = 0; s < stages; ++s) {
    double hits = 0.0, snr_acc = 0.0;
    size_t snr_n = 0;
    for (size_t i = 0; i < n; ++i) {
      hits += corrupted[i * stages + s];
      if (std::isfinite(snrs[i * stages + s])) {
        snr_acc += snrs[i * stages + s];
        ++snr_n;
      }
    }
    rows[s].embedders = int(s + 1);
    rows[s].asr = hits / double(n);
    rows[s].mean_snr_db = snr_n ? snr_acc / double(snr_n) : 0.0;
  }
  return rows;
}

void write_stacking_csv(const std::vector<StackingRow>& rows,
                        const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "embedders,asr,mean_snr_db\n";
  for (const auto& r : rows)
    f << r.embedders << ',' << format_metric(r.asr) << ','
      << format_metric(r.mean_snr_db) << '\n';
  if (!f) throw std::runtime_error("short write: " + path);
}

void write_manifest(const std::string& path, const std::string& command,
                    const KeyValueConfig& cfg, uint64_t seed) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "wmlab-manifest v1\n";
  f << "version = " << kWmlabVersion << '\n';
  f << "command = " << command << '\n';
  f << "seed = " << seed << '\n';
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(cfg.content_hash()));
  f << "config_hash = " << hex << '\n';
  f << "config:\n";
  for (const auto& [k, v] : cfg.entries())
    f << "  " << k << " = " << v << '\n';
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace wmlab
