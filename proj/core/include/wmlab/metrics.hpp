// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wmlab/audio.hpp"
#include "wmlab/message.hpp"

namespace wmlab {

// fraction of differing bits
double ber(const Message& m, const Message& decoded);

// fraction of samples whose decoded message differs from the embedded one;
// a detection failure counts as corrupted
double asr(const std::vector<std::pair<std::optional<Message>, Message>>&
               outcomes);

// fraction of exact recoveries; a detection failure counts as a mismatch
double acc(const std::vector<std::pair<std::optional<Message>, Message>>&
               outcomes);

// 10*log10(|ref|^2 / |ref - other|^2); +inf for identical clips
double snr_db(const AudioClip& reference, const AudioClip& other);

struct Histogram {
  std::vector<size_t> counts;  // equal-width bins over [0, 1]
  double bin_width = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  size_t total = 0;
};

Histogram ber_histogram(const std::vector<double>& values, int bins);

// Per-sample evaluation record.  BER fields are NaN when the detection
// failed (pattern check): failures are excluded from BER aggregates but
// count toward ASR/ACC.
struct SampleRecord {
  size_t clip_id = 0;
  double owner_ber = 0.0;
  double adv_ber = 0.0;
  double snr = 0.0;  // dB, may be +inf
  bool detect_fail = false;
};

struct MetricsRecord {
  std::vector<SampleRecord> samples;
  double asr = 0.0;
  double acc = 0.0;
  double mean_owner_ber = 0.0;  // over successful detections
  double std_owner_ber = 0.0;
  double mean_snr = 0.0;        // over finite SNRs
  Histogram owner_ber_hist;
};

MetricsRecord aggregate(std::vector<SampleRecord> samples,
                        const std::vector<std::pair<std::optional<Message>,
                                                    Message>>& owner_outcomes,
                        const std::vector<std::pair<std::optional<Message>,
                                                    Message>>& adv_outcomes,
                        int hist_bins = 10);

void write_samples_csv(const MetricsRecord& rec, const std::string& path);
void write_report(const MetricsRecord& rec, const std::string& path);

// entry (i, j) = mean owner BER when scheme j overwrites scheme i's mark
struct CrossMatrix {
  std::vector<std::string> scheme_names;
  std::vector<double> values;  // row-major, side = scheme count

  double at(size_t i, size_t j) const {
    return values[i * scheme_names.size() + j];
  }
};

void write_cross_matrix_csv(const CrossMatrix& m, const std::string& path);

// CSV value formatting shared by every writer so reports are byte-stable.
std::string format_metric(double v);

}  // namespace wmlab
