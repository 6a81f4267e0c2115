// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/message.hpp"

#include <stdexcept>

namespace wmlab {

Message random_message(Rng& rng, size_t length) {
  Message m;
  m.bits.resize(length);
  for (size_t i = 0; i < length; ++i) m.bits[i] = uint8_t(rng.bit());
  return m;
}

std::string to_hex(const Message& m) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  const size_t nibbles = (m.size() + 3) / 4;
  s.reserve(nibbles);
  for (size_t g = 0; g < nibbles; ++g) {
    int v = 0;
    for (size_t b = 0; b < 4; ++b) {
      const size_t i = g * 4 + b;
      v = (v << 1) | (i < m.size() ? m.bits[i] : 0);
    }
    s.push_back(digits[v]);
  }
  return s;
}

Message from_hex(const std::string& hex, size_t length) {
  Message m;
  m.bits.reserve(length);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("bad hex digit in message");
    for (int b = 3; b >= 0; --b) {
      if (m.bits.size() < length) m.bits.push_back(uint8_t((v >> b) & 1));
    }
  }
  if (m.bits.size() != length)
    throw std::invalid_argument("hex message shorter than expected length");
  return m;
}

DetectionResult result_from_scores(std::vector<double> scores) {
  DetectionResult r;
  Message m;
  m.bits.resize(scores.size());
  for (size_t i = 0; i < scores.size(); ++i)
    m.bits[i] = scores[i] > 0.5 ? 1 : 0;
  r.soft_scores = std::move(scores);
  r.decoded = std::move(m);
  r.detected = true;
  return r;
}

}  // namespace wmlab
