// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wmlab {

double ber(const Message& m, const Message& decoded) {
  if (m.size() != decoded.size())
    throw std::invalid_argument("ber: message length mismatch");
  if (m.size() == 0) throw std::invalid_argument("ber: empty messages");
  size_t wrong = 0;
  for (size_t i = 0; i < m.size(); ++i)
    if (m.bits[i] != decoded.bits[i]) ++wrong;
  return double(wrong) / double(m.size());
}

double asr(const std::vector<std::pair<std::optional<Message>, Message>>&
               outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("asr: empty outcome list");
  size_t corrupted = 0;
  for (const auto& [decoded, owner] : outcomes)
    if (!decoded || !(*decoded == owner)) ++corrupted;
  return double(corrupted) / double(outcomes.size());
}

double acc(const std::vector<std::pair<std::optional<Message>, Message>>&
               outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("acc: empty outcome list");
  size_t exact = 0;
  for (const auto& [decoded, expected] : outcomes)
    if (decoded && *decoded == expected) ++exact;
  return double(exact) / double(outcomes.size());
}

double snr_db(const AudioClip& reference, const AudioClip& other) {
  if (reference.samples.size() != other.samples.size())
    throw std::invalid_argument("snr: length mismatch");
  double sig = 0.0, noise = 0.0;
  for (size_t i = 0; i < reference.samples.size(); ++i) {
    sig += reference.samples[i] * reference.samples[i];
    const double d = reference.samples[i] - other.samples[i];
    noise += d * d;
  }
  if (sig <= 0.0) throw std::invalid_argument("snr: silent reference");
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / noise);
}

Histogram ber_histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(size_t(bins), 0);
  h.bin_width = 1.0 / double(bins);
  h.total = values.size();
  double acc = 0.0, acc2 = 0.0;
  for (double v : values) {
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("histogram: values must lie in [0, 1]");
    size_t b = std::min(size_t(bins) - 1, size_t(v * bins));
    h.counts[b] += 1;
    acc += v;
    acc2 += v * v;
  }
  if (!values.empty()) {
    h.mean = acc / double(values.size());
    const double var = std::max(0.0, acc2 / double(values.size()) -
                                         h.mean * h.mean);
    h.stddev = std::sqrt(var);
  }
  return h;
}

MetricsRecord aggregate(std::vector<SampleRecord> samples,
                        const std::vector<std::pair<std::optional<Message>,
                                                    Message>>& owner_outcomes,
                        const std::vector<std::pair<std::optional<Message>,
                                                    Message>>& adv_outcomes,
                        int hist_bins) {
  MetricsRecord rec;
  rec.samples = std::move(samples);
  if (!owner_outcomes.empty()) rec.asr = asr(owner_outcomes);
  if (!adv_outcomes.empty()) rec.acc = acc(adv_outcomes);

  std::vector<double> owner_bers;
  double snr_sum = 0.0;
  size_t snr_n = 0;
  for (const auto& s : rec.samples) {
    if (!s.detect_fail && std::isfinite(s.owner_ber))
      owner_bers.push_back(s.owner_ber);
    if (std::isfinite(s.snr)) {
      snr_sum += s.snr;
      ++snr_n;
    }
  }
  if (!owner_bers.empty()) {
    rec.owner_ber_hist = ber_histogram(owner_bers, hist_bins);
    rec.mean_owner_ber = rec.owner_ber_hist.mean;
    rec.std_owner_ber = rec.owner_ber_hist.stddev;
  }
  if (snr_n) rec.mean_snr = snr_sum / double(snr_n);
  return rec;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_samples_csv(const MetricsRecord& rec, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "clip_id,owner_ber,adv_ber,snr_db,detect_fail\n";
  for (const auto& s : rec.samples) {
    f << s.clip_id << ',';
    f << (s.detect_fail ? "nan" : format_metric(s.owner_ber)) << ',';
    f << format_metric(s.adv_ber) << ',' << format_metric(s.snr) << ','
      << (s.detect_fail ? 1 : 0) << '\n';
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

void write_report(const MetricsRecord& rec, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "samples = " << rec.samples.size() << '\n';
  f << "asr = " << format_metric(rec.asr) << '\n';
  f << "acc = " << format_metric(rec.acc) << '\n';
  f << "mean_owner_ber = " << format_metric(rec.mean_owner_ber) << '\n';
  f << "std_owner_ber = " << format_metric(rec.std_owner_ber) << '\n';
  f << "mean_snr_db = " << format_metric(rec.mean_snr) << '\n';
  f << "ber_hist_bins = " << rec.owner_ber_hist.counts.size() << '\n';
  f << "ber_hist =";
  for (size_t c : rec.owner_ber_hist.counts) f << ' ' << c;
  f << '\n';
  if (!f) throw std::runtime_error("short write: " + path);
}

void write_cross_matrix_csv(const CrossMatrix& m, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "owner\\attacker";
  for (const auto& n : m.scheme_names) f << ',' << n;
  f << '\n';
  const size_t side = m.scheme_names.size();
  for (size_t i = 0; i < side; ++i) {
    f << m.scheme_names[i];
    for (size_t j = 0; j < side; ++j) f << ',' << format_metric(m.at(i, j));
    f << '\n';
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace wmlab
