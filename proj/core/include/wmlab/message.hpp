// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmlab/rng.hpp"

namespace wmlab {

// Fixed-length binary payload.  bits[i] is 0 or 1; bit 0 is the first bit
// embedded and the most significant bit of the first hex nibble.
struct Message {
  std::vector<uint8_t> bits;

  Message() = default;
  explicit Message(std::vector<uint8_t> b) : bits(std::move(b)) {}

  size_t size() const { return bits.size(); }
  bool operator==(const Message& o) const { return bits == o.bits; }
};

Message random_message(Rng& rng, size_t length);
std::string to_hex(const Message& m);
Message from_hex(const std::string& hex, size_t length);

// Output of a detector.  `decoded` is present iff `detected`; decoded bit i
// is 1 iff soft_scores[i] > 0.5.
struct DetectionResult {
  std::optional<Message> decoded;
  std::vector<double> soft_scores;
  bool detected = false;
};

// Builds a DetectionResult from soft scores, applying the threshold rule.
DetectionResult result_from_scores(std::vector<double> scores);

}  // namespace wmlab
