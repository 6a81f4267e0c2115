// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/train.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "wmlab/checkpoint.hpp"

namespace wmlab {

void TrainConfig::check() const {
  if (epochs <= 0 || iterations <= 0 || batch_size <= 0 || crop_frames <= 0 ||
      corpus_count <= 0 || message_len == 0)
    throw std::invalid_argument("train config: all counts must be positive");
  if (!(learning_rate > 0) || !(gamma > 0))
    throw std::invalid_argument("train config: rates must be positive");
  if (!(weights.watermark > 0))
    throw std::invalid_argument("train config: watermark weight must be > 0");
  if (resolutions.count() == 0)
    throw std::invalid_argument("train config: empty STFT resolution set");
}

std::vector<AudioClip> TrainConfig::make_corpus() const {
  return synth_corpus(corpus_seed, corpus_count, corpus_duration_s,
                      sample_rate);
}

TrainState init_train_state(const TrainConfig& cfg) {
  cfg.check();
  TrainState st;
  st.model = init_surrogate(cfg.seed, cfg.message_len, cfg.gamma);
  st.opt_embed_detect.learning_rate = cfg.learning_rate;
  st.opt_disc.learning_rate = cfg.learning_rate;
  auto ed = st.model.embedder_params();
  for (auto& p : st.model.detector_params()) ed.push_back(p);
  st.opt_embed_detect.reset(ed);
  auto dp = st.model.discriminator_params();
  st.opt_disc.reset(dp);
  st.iteration = 0;
  return st;
}

namespace {

struct Batch {
  Tensor x_wave;       // [B x crop*F] const
  Tensor x_frames;     // [B*crop x F] const
  Tensor msgs01;       // [B x L] const, bits as 0/1
  Tensor msgs_pm;      // [B*crop x L] const, bits as +-1
};

Batch make_batch(const TrainConfig& cfg, const std::vector<AudioClip>& corpus,
                 int iteration) {
  const size_t F = SurrogateModel::kFrame;
  const size_t B = size_t(cfg.batch_size);
  const size_t crop = size_t(cfg.crop_frames);
  const size_t L = cfg.message_len;
  Rng rng(mix_seed(cfg.seed, 0xb172c800ULL + uint64_t(iteration)));

  std::vector<double> wave(B * crop * F);
  std::vector<double> m01(B * L);
  std::vector<double> mpm(B * crop * L);
  for (size_t b = 0; b < B; ++b) {
    const AudioClip& clip = corpus[rng.below(corpus.size())];
    const size_t total_frames = clip.samples.size() / F;
    if (total_frames < crop)
      throw std::invalid_argument("training clip shorter than crop window");
    const size_t off = rng.below(total_frames - crop + 1) * F;
    for (size_t i = 0; i < crop * F; ++i)
      wave[b * crop * F + i] = clip.samples[off + i];
    for (size_t i = 0; i < L; ++i) {
      const double bit = double(rng.bit());
      m01[b * L + i] = bit;
      for (size_t t = 0; t < crop; ++t)
        mpm[(b * crop + t) * L + i] = bit > 0.5 ? 1.0 : -1.0;
    }
  }
  Batch batch;
  batch.x_wave = Tensor::constant(wave, B, crop * F);
  batch.x_frames = Tensor::constant(std::move(wave), B * crop, F);
  batch.msgs01 = Tensor::constant(std::move(m01), B, L);
  batch.msgs_pm = Tensor::constant(std::move(mpm), B * crop, L);
  return batch;
}

}  // namespace

void train_steps(const TrainConfig& cfg, const std::vector<AudioClip>& corpus,
                 TrainState& state, int steps) {
  cfg.check();
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  const size_t crop = size_t(cfg.crop_frames);
  SurrogateModel& model = state.model;
  const Tensor gamma_t = Tensor::scalar(model.gamma);

  auto ed_params = model.embedder_params();
  for (auto& p : model.detector_params()) ed_params.push_back(p);
  auto disc_params = model.discriminator_params();

  for (int s = 0; s < steps; ++s) {
    const int iter = state.iteration;
    Batch batch = make_batch(cfg, corpus, iter);

    // discriminator step on detached watermarked audio
    {
      Tensor y_detached;
      {
        NoGradGuard ng;
        Tensor res = embedder_residual(model, batch.x_frames, batch.msgs_pm);
        y_detached = add(batch.x_frames, mul(res, gamma_t));
      }
      Tensor lr = mean_pool_rows(
          discriminator_frame_logits(model, batch.x_frames), crop);
      Tensor lf = mean_pool_rows(
          discriminator_frame_logits(model, y_detached), crop);
      Tensor loss_d = disc_loss_graph(lr, lf);
      backward(loss_d);
      adam_step(disc_params, state.opt_disc);
    }

    // embedder + detector step on the joint loss
    {
      Tensor res = embedder_residual(model, batch.x_frames, batch.msgs_pm);
      Tensor y_frames = add(batch.x_frames, mul(res, gamma_t));
      Tensor det = mean_pool_rows(detector_frame_logits(model, y_frames),
                                  crop);
      Tensor scores = sigmoid(det);
      Tensor l_w = bce_graph(batch.msgs01, scores);
      Tensor l_t = mse_graph(batch.x_frames, y_frames);
      Tensor y_wave = reshape(y_frames, batch.x_wave.rows(),
                              batch.x_wave.cols());
      Tensor l_f = stft_loss_graph(batch.x_wave, y_wave, cfg.resolutions);
      Tensor l_adv = adv_loss_graph(mean_pool_rows(
          discriminator_frame_logits(model, y_frames), crop));

      Tensor total = add(
          add(mul(l_w, Tensor::scalar(cfg.weights.watermark)),
              mul(l_t, Tensor::scalar(cfg.weights.time))),
          add(mul(l_f, Tensor::scalar(cfg.weights.freq)),
              mul(l_adv, Tensor::scalar(cfg.weights.adversarial))));

      LossLogRow row{iter, l_w.item(), l_t.item(), l_f.item(), l_adv.item(),
                     total.item()};
      if (!std::isfinite(row.total)) {
        state.log.push_back(row);
        throw std::runtime_error("training diverged at iteration " +
                                 std::to_string(iter));
      }
      backward(total);
      adam_step(ed_params, state.opt_embed_detect);
      // the adversarial term also deposited gradients on the discriminator
      for (auto& p : disc_params) p.zero_grad();
      state.log.push_back(row);
    }
    state.iteration += 1;
  }
}

TrainResult train_surrogate(const TrainConfig& cfg,
                            const std::vector<AudioClip>& corpus) {
  TrainState st = init_train_state(cfg);
  train_steps(cfg, corpus, st, cfg.total_iterations());
  return {std::move(st.model), std::move(st.log)};
}

TrainResult partial_train(const TrainConfig& cfg,
                          const std::vector<AudioClip>& corpus,
                          int iterations) {
  if (iterations < 0)
    throw std::invalid_argument("partial_train: iterations must be >= 0");
  TrainState st = init_train_state(cfg);
  train_steps(cfg, corpus, st, iterations);
  return {std::move(st.model), std::move(st.log)};
}

namespace {

Tensor vec_tensor(const std::vector<double>& v) {
  return Tensor::constant(v, 1, v.size());
}

void append_opt(std::vector<NamedTensor>& out, const std::string& prefix,
                const OptimizerState& opt) {
  for (size_t i = 0; i < opt.m.size(); ++i) {
    out.push_back({prefix + ".m." + std::to_string(i), vec_tensor(opt.m[i])});
    out.push_back({prefix + ".v." + std::to_string(i), vec_tensor(opt.v[i])});
  }
}

void restore_opt(const std::vector<NamedTensor>& tensors,
                 const std::string& prefix, OptimizerState& opt) {
  for (size_t i = 0; i < opt.m.size(); ++i) {
    const std::string mn = prefix + ".m." + std::to_string(i);
    const std::string vn = prefix + ".v." + std::to_string(i);
    bool found_m = false, found_v = false;
    for (const auto& nt : tensors) {
      if (nt.name == mn) {
        if (nt.tensor.size() != opt.m[i].size())
          throw std::runtime_error("train state moment size mismatch");
        opt.m[i] = nt.tensor.values();
        found_m = true;
      } else if (nt.name == vn) {
        if (nt.tensor.size() != opt.v[i].size())
          throw std::runtime_error("train state moment size mismatch");
        opt.v[i] = nt.tensor.values();
        found_v = true;
      }
    }
    if (!found_m || !found_v)
      throw std::runtime_error("train state missing optimizer moments");
  }
}

}  // namespace

void save_train_state(const TrainState& state, const std::string& path) {
  std::vector<NamedTensor> tensors = state.model.named_params();
  tensors.push_back(
      {"meta", Tensor::constant(
                   {double(state.model.message_len), state.model.gamma,
                    double(uint32_t(state.model.seed & 0xffffffffULL)),
                    double(uint32_t(state.model.seed >> 32)),
                    double(state.iteration),
                    double(state.opt_embed_detect.step_count),
                    double(state.opt_disc.step_count)},
                   1, 7)});
  append_opt(tensors, "opt_ed", state.opt_embed_detect);
  append_opt(tensors, "opt_disc", state.opt_disc);
  save_checkpoint(path, tensors, CheckpointDtype::f64);
}

TrainState load_train_state(const std::string& path, const TrainConfig& cfg) {
  const auto tensors = load_checkpoint(path);
  TrainState st = init_train_state(cfg);

  std::vector<double> meta;
  for (const auto& nt : tensors)
    if (nt.name == "meta") meta = nt.tensor.values();
  if (meta.size() != 7) throw std::runtime_error("bad train state meta");

  // model parameters
  auto named = st.model.named_params();
  for (auto& dst : named) {
    bool found = false;
    for (const auto& nt : tensors)
      if (nt.name == dst.name) {
        if (nt.tensor.size() != dst.tensor.size())
          throw std::runtime_error("train state tensor shape mismatch: " +
                                   dst.name);
        dst.tensor.values_mut() = nt.tensor.values();
        found = true;
        break;
      }
    if (!found)
      throw std::runtime_error("train state missing tensor: " + dst.name);
  }

  st.iteration = int(meta[4]);
  st.opt_embed_detect.step_count = long(meta[5]);
  st.opt_disc.step_count = long(meta[6]);
  restore_opt(tensors, "opt_ed", st.opt_embed_detect);
  restore_opt(tensors, "opt_disc", st.opt_disc);
  return st;
}

void write_loss_log_csv(const std::vector<LossLogRow>& log,
                        const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "iteration,loss_watermark,loss_time,loss_freq,loss_adv,total\n";
  f.precision(17);
  for (const auto& r : log)
    f << r.iteration << ',' << r.watermark << ',' << r.time << ',' << r.freq
      << ',' << r.adversarial << ',' << r.total << '\n';
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace wmlab
