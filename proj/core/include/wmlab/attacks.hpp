// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/message.hpp"
#include "wmlab/metrics.hpp"
#include "wmlab/schemes.hpp"
#include "wmlab/train.hpp"

namespace wmlab {

enum class AttackTier {
  white_box,
  gray_box,
  black_box_zero_query,
  black_box_query
};

std::string tier_name(AttackTier t);
AttackTier tier_from_name(const std::string& name);

struct AttackSpec {
  AttackTier tier = AttackTier::white_box;
  Message adversary_message;
  std::vector<WatermarkScheme> candidates;  // black-box candidate embedders
  int query_budget = 10;
  double snr_floor_db = 20.0;
};

// Success conditions of an overwriting attack:
//   (i)  the owner message is no longer recoverable,
//   (ii) the adversary's detector reads the forged message exactly,
//   (iii) the forged audio stays within the SNR floor of the published one.
struct SuccessFlags {
  bool original_unrecoverable = false;
  bool adversary_verified = false;
  bool imperceptible = false;
  bool all() const {
    return original_unrecoverable && adversary_verified && imperceptible;
  }
};

SuccessFlags verify_attack(const WatermarkScheme& owner_detector,
                           const WatermarkScheme& adversary_detector,
                           const AudioClip& x_w, const AudioClip& x_w_adv,
                           const Message& m_owner, const Message& m_adv,
                           double snr_floor_db);

// One overwriting step: exactly embed(embedder, x_w, m_adv).
AudioClip overwrite(const WatermarkScheme& embedder, const AudioClip& x_w,
                    const Message& m_adv);

// Zero-query stacking: innermost-to-outermost sequential application.
struct StackResult {
  AudioClip clip;
  std::vector<double> snr_after_stage;  // SNR vs x_w after each embedder
};

StackResult stack_overwrite(const std::vector<WatermarkScheme>& embedders,
                            const AudioClip& x_w, const Message& m_adv);

// Query-limited access to the owner's detector.  Each query compares the
// decoded message against a probe and reports only "corrupted or not"
// (plus the decoded bits when full_response is enabled).  Every call is
// counted and logged; exceeding the budget throws.
class DetectorOracle {
 public:
  DetectorOracle(WatermarkScheme owner, int budget, bool full_response = false);

  struct Response {
    bool detected = false;
    bool corrupted = false;
    std::optional<Message> bits;  // full_response mode only
  };

  Response query(const AudioClip& clip, const Message& probe);

  int queries_used() const { return used_; }
  int budget() const { return budget_; }
  int remaining() const { return budget_ - used_; }

  struct LogEntry {
    uint64_t clip_digest = 0;
    bool detected = false;
    bool corrupted = false;
  };
  const std::vector<LogEntry>& log() const { return log_; }

 private:
  WatermarkScheme owner_;
  int budget_;
  bool full_response_;
  int used_ = 0;
  std::vector<LogEntry> log_;
};

struct AttackOutcome {
  AudioClip forged;
  bool success = false;
  int queries_used = 0;
  std::vector<std::string> embedders_applied;
  SuccessFlags flags;
  double snr = 0.0;  // SNR(x_w, forged) in dB
  long training_iterations = 0;
  int selected_candidate = -1;
};

struct QueryAttackConfig {
  int step_iterations = 250;  // partial-training chunk per candidate
  int refine_chunk = 250;
  int max_refine_chunks = 8;
  int verification_query_cap = 5;
  double snr_floor_db = 15.0;
};

// Query-based black-box attack: partially train each candidate, overwrite,
// spend one oracle query per candidate to test whether the owner mark is
// corrupted, then refine the first working candidate until the attack
// verifies (own-detector readback + SNR locally, corruption via capped
// verification queries on the validation clips).  A drained budget yields
// success = false rather than an exception.
AttackOutcome query_attack(
    const std::vector<TrainConfig>& candidates, DetectorOracle& oracle,
    const AudioClip& x_w, const Message& m_owner_probe, const Message& m_adv,
    const QueryAttackConfig& cfg,
    const std::vector<std::pair<AudioClip, Message>>& validation = {});

}  // namespace wmlab
