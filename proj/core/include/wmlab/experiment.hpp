// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmlab/attacks.hpp"
#include "wmlab/audio.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/schemes.hpp"

namespace wmlab {

// Flat key-value configuration with dotted nesting ("corpus.count = 200").
// '#' starts a comment; keys are unique, later entries win.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  void set(const std::string& key, const std::string& value);

  // digest over sorted normalized entries; stable across reordering
  uint64_t content_hash() const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct CorpusSpec {
  enum class Kind { synthetic, wav_dir };
  Kind kind = Kind::synthetic;
  uint64_t seed = 1;
  int count = 200;
  double duration_s = 3.0;
  int sample_rate = 16000;
  std::string dir;  // wav_dir

  std::vector<AudioClip> load() const;
  static CorpusSpec from_config(const KeyValueConfig& cfg,
                                const std::string& prefix = "corpus.");
};

// Per-clip overwrite evaluation: the owner embeds, the attacker overwrites,
// both detectors read back, verify_attack gates the three conditions.
struct SuiteResult {
  MetricsRecord metrics;
  double verified_fraction = 0.0;  // clips where all three flags hold
  std::vector<SuccessFlags> flags;
};

SuiteResult run_overwrite_suite(const WatermarkScheme& owner,
                                const WatermarkScheme& attacker,
                                const WatermarkScheme& adversary_verifier,
                                const std::vector<AudioClip>& corpus,
                                uint64_t seed, double snr_floor_db,
                                int jobs = 0, int hist_bins = 10);

CrossMatrix compute_cross_matrix(const std::vector<WatermarkScheme>& schemes,
                                 const std::vector<AudioClip>& corpus,
                                 uint64_t seed, int jobs = 0);

// Zero-query stacking sweep: ASR/SNR after each prefix of the candidates.
struct StackingRow {
  int embedders = 0;
  double asr = 0.0;
  double mean_snr_db = 0.0;
};

std::vector<StackingRow> run_stacking_suite(
    const WatermarkScheme& owner,
    const std::vector<WatermarkScheme>& candidates,
    const std::vector<AudioClip>& corpus, uint64_t seed, int jobs = 0);

void write_stacking_csv(const std::vector<StackingRow>& rows,
                        const std::string& path);

// Execution manifest: config digest, seed, tool version.  Written next to
// every command's outputs so a report can be re-derived exactly.
void write_manifest(const std::string& path, const std::string& command,
                    const KeyValueConfig& cfg, uint64_t seed);

constexpr const char* kWmlabVersion = "0.1.0";

}  // namespace wmlab
