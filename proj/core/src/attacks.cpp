// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/attacks.hpp"

#include <stdexcept>

namespace wmlab {

std::string tier_name(AttackTier t) {
  switch (t) {
    case AttackTier::white_box: return "white-box";
    case AttackTier::gray_box: return "gray-box";
    case AttackTier::black_box_zero_query: return "black-box-zero-query";
    case AttackTier::black_box_query: return "black-box-query";
  }
  return "unknown";
}

AttackTier tier_from_name(const std::string& name) {
  if (name == "white-box") return AttackTier::white_box;
  if (name == "gray-box") return AttackTier::gray_box;
  if (name == "black-box-zero-query") return AttackTier::black_box_zero_query;
  if (name == "black-box-query") return AttackTier::black_box_query;
  throw std::invalid_argument("unknown attack tier: " + name);
}

SuccessFlags verify_attack(const WatermarkScheme& owner_detector,
                           const WatermarkScheme& adversary_detector,
                           const AudioClip& x_w, const AudioClip& x_w_adv,
                           const Message& m_owner, const Message& m_adv,
                           double snr_floor_db) {
  SuccessFlags flags;
  const DetectionResult owner = detect(owner_detector, x_w_adv);
  flags.original_unrecoverable = !owner.decoded || !(*owner.decoded == m_owner);
  const DetectionResult adv = detect(adversary_detector, x_w_adv);
  flags.adversary_verified = adv.decoded && *adv.decoded == m_adv;
  flags.imperceptible = snr_db(x_w, x_w_adv) >= snr_floor_db;
  return flags;
}

AudioClip overwrite(const WatermarkScheme& embedder, const AudioClip& x_w,
                    const Message& m_adv) {
  return embed(embedder, x_w, m_adv);
}

StackResult stack_overwrite(const std::vector<WatermarkScheme>& embedders,
                            const AudioClip& x_w, const Message& m_adv) {
  if (embedders.empty())
    throw std::invalid_argument("stack_overwrite: empty embedder list");
  StackResult r;
  r.clip = x_w;
  for (const auto& e : embedders) {
    r.clip = embed(e, r.clip, m_adv);
    r.snr_after_stage.push_back(snr_db(x_w, r.clip));
  }
  return r;
}

DetectorOracle::DetectorOracle(WatermarkScheme owner, int budget,
                               bool full_response)
    : owner_(std::move(owner)), budget_(budget),
      full_response_(full_response) {
  if (budget < 0)
    throw std::invalid_argument("oracle budget must be >= 0");
}

DetectorOracle::Response DetectorOracle::query(const AudioClip& clip,
                                               const Message& probe) {
  if (used_ >= budget_)
    throw std::runtime_error("detector oracle budget exhausted");
  ++used_;
  const DetectionResult det = detect(owner_, clip);
  Response resp;
  resp.detected = det.detected;
  resp.corrupted = !det.decoded || !(*det.decoded == probe);
  if (full_response_ && det.decoded) resp.bits = det.decoded;
  log_.push_back({fnv1a(clip.samples.data(),
                        clip.samples.size() * sizeof(double)),
                  resp.detected, resp.corrupted});
  return resp;
}

namespace {

// local (query-free) half of the attack verification
bool local_checks(const SurrogateModel& model, const AudioClip& x_w,
                  const AudioClip& forged, const Message& m_adv,
                  double snr_floor_db) {
  const DetectionResult own = neural_detect(model, forged);
  if (!own.decoded || !(*own.decoded == m_adv)) return false;
  return snr_db(x_w, forged) >= snr_floor_db;
}

}  // namespace

AttackOutcome query_attack(
    const std::vector<TrainConfig>& candidates, DetectorOracle& oracle,
    const AudioClip& x_w, const Message& m_owner_probe, const Message& m_adv,
    const QueryAttackConfig& cfg,
    const std::vector<std::pair<AudioClip, Message>>& validation) {
  if (candidates.empty())
    throw std::invalid_argument("query_attack: no candidate configs");
  if (cfg.step_iterations <= 0 || cfg.refine_chunk <= 0)
    throw std::invalid_argument("query_attack: iteration chunks must be > 0");

  AttackOutcome outcome;
  outcome.forged = x_w;
  if (oracle.remaining() <= 0) return outcome;  // no queries, no attack

  struct Candidate {
    TrainState state;
    std::vector<AudioClip> corpus;
  };
  std::vector<Candidate> pool;
  pool.reserve(candidates.size());
  for (const auto& c : candidates)
    pool.push_back({init_train_state(c), c.make_corpus()});

  int selected = -1;
  AudioClip forged;
  // probe rounds: a partial-training chunk then one query per candidate
  while (selected < 0 && oracle.remaining() > 0) {
    bool any_trained = false;
    for (size_t i = 0; i < pool.size() && oracle.remaining() > 0; ++i) {
      train_steps(candidates[i], pool[i].corpus, pool[i].state,
                  cfg.step_iterations);
      outcome.training_iterations += cfg.step_iterations;
      any_trained = true;
      AudioClip attempt =
          neural_embed(pool[i].state.model, x_w, m_adv);
      const auto resp = oracle.query(attempt, m_owner_probe);
      if (resp.corrupted) {
        selected = int(i);
        forged = std::move(attempt);
        break;
      }
    }
    if (!any_trained) break;
  }
  outcome.queries_used = oracle.queries_used();
  if (selected < 0) return outcome;  // budget drained without a hit

  outcome.selected_candidate = selected;
  outcome.embedders_applied = {"surrogate-candidate-" +
                               std::to_string(selected)};
  Candidate& win = pool[size_t(selected)];

  // refine the winning candidate until the attack verifies locally, then
  // confirm corruption with capped verification queries
  int refinements = 0;
  int verification_spent = 0;
  bool verified = false;
  while (!verified) {
    if (local_checks(win.state.model, x_w, forged, m_adv, cfg.snr_floor_db)) {
      verified = true;
      for (const auto& [vclip, vprobe] : validation) {
        if (verification_spent >= cfg.verification_query_cap) break;
        if (oracle.remaining() <= 0) { verified = false; break; }
        AudioClip vforged = neural_embed(win.state.model, vclip, m_adv);
        ++verification_spent;
        if (!oracle.query(vforged, vprobe).corrupted) {
          verified = false;
          break;
        }
      }
      if (verified) break;
      if (oracle.remaining() <= 0 ||
          verification_spent >= cfg.verification_query_cap)
        break;
    }
    if (refinements >= cfg.max_refine_chunks) break;
    train_steps(candidates[size_t(selected)], win.corpus, win.state,
                cfg.refine_chunk);
    outcome.training_iterations += cfg.refine_chunk;
    ++refinements;
    forged = neural_embed(win.state.model, x_w, m_adv);
  }

  outcome.forged = std::move(forged);
  outcome.queries_used = oracle.queries_used();
  outcome.snr = snr_db(x_w, outcome.forged);
  outcome.success =
      verified &&
      local_checks(win.state.model, x_w, outcome.forged, m_adv,
                   cfg.snr_floor_db);
  return outcome;
}

}  // namespace wmlab
