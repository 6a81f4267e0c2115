// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/oracle_protocol.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "wmlab/wav.hpp"

namespace wmlab {

std::string format_request(const OracleRequest& req) {
  return req.id + " " + req.wav_path + " " + req.probe_hex;
}

std::optional<OracleRequest> parse_request(const std::string& line) {
  std::istringstream in(line);
  OracleRequest req;
  if (!(in >> req.id >> req.wav_path >> req.probe_hex)) return std::nullopt;
  std::string extra;
  if (in >> extra) return std::nullopt;
  return req;
}

std::string format_response(const OracleResponse& resp) {
  std::ostringstream out;
  out << resp.id << ' ' << (resp.detected ? 1 : 0) << ' '
      << (resp.corrupted ? 1 : 0) << ' '
      << (resp.bits_hex ? *resp.bits_hex : std::string("-")) << ' '
      << resp.queries_used;
  return out.str();
}

std::string format_error(const std::string& id, const std::string& reason) {
  return "ERR " + id + " " + reason;
}

std::optional<OracleResponse> parse_response(const std::string& line) {
  std::istringstream in(line);
  OracleResponse resp;
  int det = 0, cor = 0;
  std::string bits;
  if (!(in >> resp.id >> det >> cor >> bits >> resp.queries_used))
    return std::nullopt;
  resp.detected = det != 0;
  resp.corrupted = cor != 0;
  if (bits != "-") resp.bits_hex = bits;
  return resp;
}

int serve_oracle(std::istream& in, std::ostream& out, DetectorOracle& oracle,
                 size_t message_len) {
  int answered = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto req = parse_request(line);
    if (!req) {
      out << format_error("-", "bad-request") << '\n' << std::flush;
      continue;
    }
    if (oracle.remaining() <= 0) {
      out << format_error(req->id, "budget-exhausted") << '\n' << std::flush;
      continue;
    }
    try {
      const Message probe = from_hex(req->probe_hex, message_len);
      const AudioClip clip = load_wav(req->wav_path);
      const auto r = oracle.query(clip, probe);
      OracleResponse resp;
      resp.id = req->id;
      resp.detected = r.detected;
      resp.corrupted = r.corrupted;
      if (r.bits) resp.bits_hex = to_hex(*r.bits);
      resp.queries_used = oracle.queries_used();
      out << format_response(resp) << '\n' << std::flush;
      ++answered;
    } catch (const std::exception&) {
      out << format_error(req->id, "io-error") << '\n' << std::flush;
    }
  }
  return answered;
}

}  // namespace wmlab
