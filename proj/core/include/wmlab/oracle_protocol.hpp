// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "wmlab/attacks.hpp"

namespace wmlab {

// Newline-delimited text protocol for out-of-process detector oracles.
//   request:  <id> <wav_path> <probe_message_hex>
//   response: <id> <detected 0/1> <corrupted 0/1> <bits_hex|-> <queries_used>
//   errors:   ERR <id> <reason>   (budget-exhausted, bad-request, io-error)
// Field order is fixed; all values are text-encoded.

struct OracleRequest {
  std::string id;
  std::string wav_path;
  std::string probe_hex;
};

struct OracleResponse {
  std::string id;
  bool detected = false;
  bool corrupted = false;
  std::optional<std::string> bits_hex;
  int queries_used = 0;
};

std::string format_request(const OracleRequest& req);
std::optional<OracleRequest> parse_request(const std::string& line);

std::string format_response(const OracleResponse& resp);
std::string format_error(const std::string& id, const std::string& reason);
std::optional<OracleResponse> parse_response(const std::string& line);

// Serves requests from `in` until EOF, answering on `out`.  Requests past
// the oracle budget are refused with an ERR record.  Returns the number of
// answered (non-error) requests.
int serve_oracle(std::istream& in, std::ostream& out, DetectorOracle& oracle,
                 size_t message_len);

}  // namespace wmlab
