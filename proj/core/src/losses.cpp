// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wmlab {

StftResolutionSet StftResolutionSet::defaults() {
  return {{{64, 16, 64}, {128, 32, 128}, {256, 64, 256}}};
}

double loss_watermark(const Message& m, const std::vector<double>& scores) {
  if (m.size() != scores.size())
    throw std::invalid_argument("loss_watermark: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kEpsNum, 1.0 - kEpsNum);
    acc += m.bits[i] ? -std::log(s) : -std::log(1.0 - s);
  }
  return acc / double(scores.size());
}

double loss_time(const AudioClip& x, const AudioClip& xw) {
  if (x.samples.size() != xw.samples.size())
    throw std::invalid_argument("loss_time: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < x.samples.size(); ++i) {
    const double d = x.samples[i] - xw.samples[i];
    acc += d * d;
  }
  return acc / double(x.samples.size());
}

double loss_stft_multi(const AudioClip& x, const AudioClip& xw,
                       const StftResolutionSet& res) {
  if (x.samples.size() != xw.samples.size())
    throw std::invalid_argument("loss_stft_multi: length mismatch");
  if (res.count() == 0)
    throw std::invalid_argument("loss_stft_multi: empty resolution set");
  double acc = 0.0;
  for (const auto& r : res.resolutions) {
    const Spectrogram sx = stft(x, r.fft_size, r.hop, r.window_length);
    const Spectrogram sy = stft(xw, r.fft_size, r.hop, r.window_length);
    double num = 0.0, den = 0.0, mag = 0.0;
    const size_t n = sx.coeffs.size();
    for (size_t i = 0; i < n; ++i) {
      const double a = std::abs(sx.coeffs[i]);
      const double b = std::abs(sy.coeffs[i]);
      num += (a - b) * (a - b);
      den += a * a;
      mag += std::fabs(std::log(std::max(a, kEpsNum)) -
                       std::log(std::max(b, kEpsNum)));
    }
    if (den <= 0.0)
      throw std::invalid_argument("loss_stft_multi: silent reference");
    acc += std::sqrt(num) / std::sqrt(den) + mag / double(n);
  }
  return acc / double(res.count());
}

namespace {

double clamp_logit(double v) {
  return std::clamp(v, -kLogitClamp, kLogitClamp);
}

double sigma(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double loss_disc(const SurrogateModel& m, const AudioClip& x,
                 const AudioClip& xw) {
  const double lr = clamp_logit(discriminate(m, x));
  const double lf = clamp_logit(discriminate(m, xw));
  return -std::log(sigma(lr)) - std::log(1.0 - sigma(lf));
}

double loss_adv(const SurrogateModel& m, const AudioClip& xw) {
  const double lf = clamp_logit(discriminate(m, xw));
  return -std::log(sigma(lf));
}

double total_loss(const LossComponents& c, const LossWeights& w) {
  return w.watermark * c.watermark + w.time * c.time + w.freq * c.freq +
         w.adversarial * c.adversarial;
}

Tensor bce_graph(const Tensor& bits01, const Tensor& scores) {
  if (bits01.rows() != scores.rows() || bits01.cols() != scores.cols())
    throw std::invalid_argument("bce_graph: shape mismatch");
  const Tensor one = Tensor::scalar(1.0);
  Tensor pos = mul(bits01, log(scores));
  Tensor neg = mul(sub(one, bits01), log(sub(one, scores)));
  return mul(mean(add(pos, neg)), Tensor::scalar(-1.0));
}

Tensor mse_graph(const Tensor& a, const Tensor& b) {
  Tensor d = sub(a, b);
  return mean(mul(d, d));
}

Tensor stft_loss_graph(const Tensor& x_wave, const Tensor& y_wave,
                       const StftResolutionSet& res) {
  if (x_wave.rows() != y_wave.rows() || x_wave.cols() != y_wave.cols())
    throw std::invalid_argument("stft_loss_graph: shape mismatch");
  if (res.count() == 0)
    throw std::invalid_argument("stft_loss_graph: empty resolution set");
  Tensor acc = Tensor::scalar(0.0);
  for (const auto& r : res.resolutions) {
    const Tensor win = Tensor::constant(make_window(Window::hann,
                                                    r.window_length),
                                        1, r.window_length);
    Tensor xf = mul(frame_rows(x_wave, r.window_length, r.hop), win);
    Tensor yf = mul(frame_rows(y_wave, r.window_length, r.hop), win);
    if (r.window_length < r.fft_size) {
      Tensor zx = Tensor::zeros(xf.rows(), r.fft_size - r.window_length);
      xf = concat(xf, zx, 1);
      yf = concat(yf, zx, 1);
    }
    Tensor xm = dft_magnitude(xf, r.fft_size);
    Tensor ym = dft_magnitude(yf, r.fft_size);

    // spectral convergence; the reference norm carries no gradient
    double den = 0.0;
    for (double v : xm.values()) den += v * v;
    Tensor d = sub(xm, ym);
    Tensor sc = mul(sqrt(sum(mul(d, d))),
                    Tensor::scalar(1.0 / std::sqrt(std::max(den, kEpsNum))));

    Tensor magdiff = mean(abs(sub(log(xm), log(ym))));
    acc = add(acc, add(sc, magdiff));
  }
  return mul(acc, Tensor::scalar(1.0 / double(res.count())));
}

Tensor adv_loss_graph(const Tensor& fake_logits) {
  Tensor s = sigmoid(clamp(fake_logits, -kLogitClamp, kLogitClamp));
  return mul(mean(log(s)), Tensor::scalar(-1.0));
}

Tensor disc_loss_graph(const Tensor& real_logits, const Tensor& fake_logits) {
  const Tensor one = Tensor::scalar(1.0);
  Tensor sr = sigmoid(clamp(real_logits, -kLogitClamp, kLogitClamp));
  Tensor sf = sigmoid(clamp(fake_logits, -kLogitClamp, kLogitClamp));
  Tensor a = mean(log(sr));
  Tensor b = mean(log(sub(one, sf)));
  return mul(add(a, b), Tensor::scalar(-1.0));
}

}  // namespace wmlab
