// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "wmlab/metrics.hpp"
#include "wmlab/schemes.hpp"

using namespace wmlab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

double clean_roundtrip_ber(const WatermarkScheme& scheme,
                           const std::vector<AudioClip>& corpus,
                           uint64_t seed) {
  double acc = 0.0;
  Rng rng(seed);
  for (const auto& clip : corpus) {
    const Message m = owner_message(scheme, rng);
    const AudioClip marked = embed(scheme, clip, m);
    const DetectionResult det = detect(scheme, marked);
    REQUIRE(det.detected);
    acc += ber(m, *det.decoded);
  }
  return acc / double(corpus.size());
}

}  // namespace

TEST_CASE("spread-spectrum at zero strength is the identity and detects at "
          "chance") {
  WatermarkScheme ss = make_scheme(SchemeFamily::spread_spectrum, 77);
  ss.alpha = 0.0;
  const auto corpus = synth_corpus(5, 20, 1.0);
  Rng rng(6);
  const Message fixed = random_message(rng, 16);
  double acc = 0.0;
  for (const auto& clip : corpus) {
    const AudioClip out = embed(ss, clip, fixed);
    CHECK(out.samples == clip.samples);
    acc += ber(fixed, *detect(ss, clip).decoded);
  }
  const double mean = acc / double(corpus.size());
  CHECK(mean > 0.3);
  CHECK(mean < 0.7);
}

TEST_CASE("unwatermarked detection is chance-level for spread-spectrum") {
  const WatermarkScheme ss = make_scheme(SchemeFamily::spread_spectrum, 1234);
  const auto corpus = synth_corpus(7, 200, 1.0);
  Rng rng(8);
  const Message fixed = random_message(rng, 16);
  double acc = 0.0;
  for (const auto& clip : corpus) acc += ber(fixed, *detect(ss, clip).decoded);
  const double mean = acc / double(corpus.size());
  CHECK(mean == doctest::Approx(0.5).epsilon(0.2));  // 0.5 +- 0.1
}

TEST_CASE("wrong-key detection is chance-level") {
  const WatermarkScheme owner = make_scheme(SchemeFamily::spread_spectrum, 1);
  const WatermarkScheme thief = make_scheme(SchemeFamily::spread_spectrum, 2);
  const auto corpus = synth_corpus(9, 100, 1.0);
  Rng rng(10);
  double acc = 0.0;
  for (const auto& clip : corpus) {
    const Message m = random_message(rng, 16);
    const AudioClip marked = embed(owner, clip, m);
    acc += ber(m, *detect(thief, marked).decoded);
  }
  const double mean = acc / double(corpus.size());
  CHECK(mean == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("clean embed/detect round trip has zero BER for every classical "
          "family") {
  const auto short_corpus = synth_corpus(11, 100, 1.0);
  const auto long_corpus = synth_corpus(12, 100, 3.0);
  CHECK(clean_roundtrip_ber(make_scheme(SchemeFamily::lsb, 3),
                            short_corpus, 21) == 0.0);
  CHECK(clean_roundtrip_ber(make_scheme(SchemeFamily::spread_spectrum, 4),
                            short_corpus, 22) == 0.0);
  CHECK(clean_roundtrip_ber(make_scheme(SchemeFamily::qim_freq, 5),
                            long_corpus, 23) == 0.0);
}

TEST_CASE("embed preserves length and meets the declared SNR floor") {
  const auto corpus = synth_corpus(13, 20, 3.0);
  Rng rng(14);
  for (auto family : {SchemeFamily::lsb, SchemeFamily::spread_spectrum,
                      SchemeFamily::qim_freq}) {
    const WatermarkScheme scheme = make_scheme(family, 99);
    double snr_acc = 0.0;
    for (const auto& clip : corpus) {
      const Message m = random_message(rng, 16);
      const AudioClip marked = embed(scheme, clip, m);
      REQUIRE(marked.samples.size() == clip.samples.size());
      snr_acc += snr_db(clip, marked);
    }
    CAPTURE(family_name(family));
    CHECK(snr_acc / double(corpus.size()) >= scheme.snr_floor_db());
  }
}

TEST_CASE("qim-freq with the default step stays above 20 dB SNR") {
  const WatermarkScheme qim = make_scheme(SchemeFamily::qim_freq, 41);
  const auto corpus = synth_corpus(15, 30, 3.0);
  Rng rng(16);
  double snr_acc = 0.0;
  for (const auto& clip : corpus)
    snr_acc += snr_db(clip, embed(qim, clip, random_message(rng, 16)));
  CHECK(snr_acc / double(corpus.size()) >= 20.0);
}

TEST_CASE("same-family overwrite replaces the message") {
  const auto short_corpus = synth_corpus(17, 40, 1.0);
  const auto long_corpus = synth_corpus(18, 40, 3.0);
  Rng rng(19);

  auto second_message_ber =
      [&rng](const WatermarkScheme& scheme,
             const std::vector<AudioClip>& corpus) {
        double acc = 0.0;
        for (const auto& clip : corpus) {
          const Message m1 = random_message(rng, 16);
          Message m2 = random_message(rng, 16);
          while (m2 == m1) m2 = random_message(rng, 16);
          const AudioClip once = embed(scheme, clip, m1);
          const AudioClip twice = embed(scheme, once, m2);
          acc += ber(m2, *detect(scheme, twice).decoded);
        }
        return acc / double(corpus.size());
      };

  CHECK(second_message_ber(make_scheme(SchemeFamily::lsb, 31),
                           short_corpus) == 0.0);
  CHECK(second_message_ber(make_scheme(SchemeFamily::qim_freq, 32),
                           long_corpus) == 0.0);
  CHECK(second_message_ber(make_scheme(SchemeFamily::spread_spectrum, 33),
                           short_corpus) <= 0.05);
}

TEST_CASE("spread-spectrum and qim-freq leave each other mostly intact") {
  const auto corpus = synth_corpus(20, 30, 3.0);
  const WatermarkScheme ss = make_scheme(SchemeFamily::spread_spectrum, 51);
  const WatermarkScheme qim = make_scheme(SchemeFamily::qim_freq, 52);
  Rng rng(21);

  double ss_owner_ber = 0.0, qim_owner_ber = 0.0;
  for (const auto& clip : corpus) {
    const Message m_ss = random_message(rng, 16);
    const Message m_qim = random_message(rng, 16);
    // ss owner, qim attacker
    const AudioClip ss_marked = embed(ss, clip, m_ss);
    const AudioClip ss_attacked = embed(qim, ss_marked, m_qim);
    ss_owner_ber += ber(m_ss, *detect(ss, ss_attacked).decoded);
    // qim owner, ss attacker
    const AudioClip qim_marked = embed(qim, clip, m_qim);
    const AudioClip qim_attacked = embed(ss, qim_marked, m_ss);
    qim_owner_ber += ber(m_qim, *detect(qim, qim_attacked).decoded);
  }
  CHECK(ss_owner_ber / double(corpus.size()) <= 0.15);
  CHECK(qim_owner_ber / double(corpus.size()) <= 0.15);
}

TEST_CASE("pattern-bit detection fails after a same-family overwrite") {
  WatermarkScheme scheme = make_scheme(SchemeFamily::lsb, 61);
  scheme.pattern_bits = {1, 0, 1, 0};
  Rng rng(22);
  const auto clip = synth_clip(23, 0, 1.0, 16000);

  const Message m_owner = owner_message(scheme, rng);
  REQUIRE(m_owner.bits[0] == 1);
  REQUIRE(m_owner.bits[1] == 0);
  const AudioClip marked = embed(scheme, clip, m_owner);
  const DetectionResult good = detect(scheme, marked);
  CHECK(good.detected);
  CHECK(*good.decoded == m_owner);

  Message m_adv = random_message(rng, 16);
  m_adv.bits[0] = 0;  // prefix cannot match the pattern
  const AudioClip overwritten = embed(scheme, marked, m_adv);
  const DetectionResult bad = detect(scheme, overwritten);
  CHECK_FALSE(bad.detected);
  CHECK_FALSE(bad.decoded.has_value());
  CHECK(bad.soft_scores.size() == 16);
}

TEST_CASE("detection result invariants hold") {
  const WatermarkScheme scheme = make_scheme(SchemeFamily::lsb, 71);
  const auto clip = synth_clip(24, 0, 1.0, 16000);
  Rng rng(25);
  const DetectionResult det = detect(scheme, embed(scheme, clip,
                                                   random_message(rng, 16)));
  REQUIRE(det.detected);
  REQUIRE(det.decoded.has_value());
  REQUIRE(det.soft_scores.size() == det.decoded->size());
  for (size_t i = 0; i < det.soft_scores.size(); ++i) {
    CHECK(det.soft_scores[i] >= 0.0);
    CHECK(det.soft_scores[i] <= 1.0);
    CHECK(det.decoded->bits[i] == (det.soft_scores[i] > 0.5 ? 1 : 0));
  }
}

TEST_CASE("embed and detect are deterministic") {
  const WatermarkScheme scheme = make_scheme(SchemeFamily::qim_freq, 81);
  const auto clip = synth_clip(26, 0, 3.0, 16000);
  Rng rng(27);
  const Message m = random_message(rng, 16);
  const AudioClip a = embed(scheme, clip, m);
  const AudioClip b = embed(scheme, clip, m);
  CHECK(a.samples == b.samples);
  CHECK(detect(scheme, a).soft_scores == detect(scheme, b).soft_scores);
}

TEST_CASE("schemes reject clips below their capacity") {
  AudioClip tiny;
  tiny.sample_rate = 16000;
  tiny.samples.assign(8, 0.1);
  Rng rng(28);
  const Message m = random_message(rng, 16);
  for (auto family : {SchemeFamily::lsb, SchemeFamily::spread_spectrum,
                      SchemeFamily::qim_freq}) {
    const WatermarkScheme scheme = make_scheme(family, 5);
    CHECK_THROWS(embed(scheme, tiny, m));
    CHECK_THROWS(detect(scheme, tiny));
  }
  // message length must match the scheme
  const WatermarkScheme ok = make_scheme(SchemeFamily::lsb, 5);
  const auto clip = synth_clip(29, 0, 0.1, 16000);
  CHECK_THROWS(embed(ok, clip, random_message(rng, 8)));
}

TEST_CASE("scheme descriptors round trip through files") {
  WatermarkScheme scheme = make_scheme(SchemeFamily::spread_spectrum, 4242);
  scheme.alpha = 0.02;
  scheme.pattern_bits = {1, 1, 0, 0};
  const std::string path = temp_path("wmlab_scheme.txt");
  save_scheme(scheme, path);
  const WatermarkScheme back = load_scheme(path);
  CHECK(back.family == SchemeFamily::spread_spectrum);
  CHECK(back.key.seed == 4242);
  CHECK(back.alpha == doctest::Approx(0.02));
  CHECK(back.message_len == 16);
  CHECK(back.pattern_bits == std::vector<uint8_t>{1, 1, 0, 0});

  CHECK_THROWS(load_scheme(temp_path("wmlab_missing_scheme.txt")));
  const std::string junk = temp_path("wmlab_junk.txt");
  std::ofstream(junk, std::ios::trunc) << "not a scheme\n";
  CHECK_THROWS(load_scheme(junk));
}

TEST_CASE("neural scheme descriptors reference a checkpoint") {
  auto model = std::make_shared<SurrogateModel>(init_surrogate(7));
  const WatermarkScheme scheme = make_neural_scheme(model);
  const std::string path = temp_path("wmlab_neural_scheme.txt");
  save_scheme(scheme, path);
  const WatermarkScheme back = load_scheme(path);
  CHECK(back.family == SchemeFamily::neural);
  REQUIRE(back.model != nullptr);
  CHECK(back.model->message_len == 16);

  // a bare model checkpoint is also a valid scheme reference
  const WatermarkScheme direct = load_scheme(path + ".model");
  CHECK(direct.family == SchemeFamily::neural);
  REQUIRE(direct.model != nullptr);
}
