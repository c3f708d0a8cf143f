// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "dsaug/errors.hpp"

namespace dsaug {

using nn::Matrix;
using nn::Tape;

void ModelConfig::validate() const {
  if (d_model <= 0 || n_blocks_enc <= 0 || n_blocks_dec <= 0 || n_heads <= 0 ||
      ffn_conv_width <= 0 || ffn_hidden <= 0 || n_mels <= 0 || n_speakers <= 0 ||
      n_phones <= 0 || max_seq <= 0 || predictor_kernel <= 0 ||
      predictor_hidden <= 0 || n_bins <= 0)
    throw DataError("model config: all dimensions must be positive");
  if (d_model % n_heads != 0)
    throw DataError("model config: d_model must be divisible by n_heads");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw DataError("model config: dropout_rate must be in [0,1)");
  if (frame_seconds <= 0.0)
    throw DataError("model config: frame_seconds must be positive");
  if (pitch_hi <= pitch_lo || energy_hi <= energy_lo)
    throw DataError("model config: quantization ranges must satisfy lo < hi");
}

void ProsodyControls::validate() const {
  if (pitch_coef <= 0.0 || energy_coef <= 0.0 || duration_coef <= 0.0)
    throw DataError("prosody coefficients must be > 0");
  if (severity_coef < 0.0 || severity_coef > 2.0)
    throw DataError("severity coefficient must be in [0,2]");
}

void TrainingExample::validate(const ModelConfig& config) const {
  spec.validate();
  const std::size_t t_len = spec.phones.size();
  if (durations.size() != t_len || pitch.size() != t_len || energy.size() != t_len)
    throw DataError("training example: per-phone target length mismatch");
  long total = 0;
  for (long d : durations) total += d;
  if (total != mel.rows())
    throw DataError("training example: durations must sum to mel frame count");
  if (mel.cols() != config.n_mels)
    throw DataError("training example: mel width != n_mels");
  if (speaker < 0 || speaker >= config.n_speakers)
    throw DataError("training example: speaker index out of range");
  if (severity_class < 0 || severity_class > 2)
    throw DataError("training example: severity class out of range");
}

namespace {

Matrix random_init(long rows, long cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = scale * rng.next_normal();
  return m;
}

void create_fft_block(nn::ParamStore& store, const std::string& prefix,
                      const ModelConfig& config, Rng& rng) {
  const int d = config.d_model;
  const int kw = config.ffn_conv_width;
  const int fh = config.ffn_hidden;
  const double sa = 1.0 / std::sqrt(double(d));
  for (const char* name : {".attn.wq", ".attn.wk", ".attn.wv", ".attn.wo"})
    store.create(prefix + name, d, d) = random_init(d, d, sa, rng);
  store.create(prefix + ".ln1.g", 1, d).setOnes();
  store.create(prefix + ".ln1.b", 1, d);
  store.create(prefix + ".ffn.w1", long(kw) * d, fh) =
      random_init(long(kw) * d, fh, 1.0 / std::sqrt(double(kw * d)), rng);
  store.create(prefix + ".ffn.b1", 1, fh);
  store.create(prefix + ".ffn.w2", long(kw) * fh, d) =
      random_init(long(kw) * fh, d, 1.0 / std::sqrt(double(kw * fh)), rng);
  store.create(prefix + ".ffn.b2", 1, d);
  store.create(prefix + ".ln2.g", 1, d).setOnes();
  store.create(prefix + ".ln2.b", 1, d);
}

int fft_block(Tape& tape, int x, const nn::ParamGraph& graph,
              const std::string& prefix, const ModelConfig& config,
              ForwardHooks* hooks) {
  const int d = config.d_model;
  const int dh = d / config.n_heads;
  int q = tape.matmul(x, graph.id(prefix + ".attn.wq"));
  int k = tape.matmul(x, graph.id(prefix + ".attn.wk"));
  int v = tape.matmul(x, graph.id(prefix + ".attn.wv"));
  std::vector<int> head_outputs;
  for (int h = 0; h < config.n_heads; ++h) {
    int qh = tape.slice_cols(q, h * dh, dh);
    int kh = tape.slice_cols(k, h * dh, dh);
    int vh = tape.slice_cols(v, h * dh, dh);
    int scores = tape.scale(tape.matmul(qh, kh, false, true),
                            1.0 / std::sqrt(double(dh)));
    int attn = tape.softmax_rows(scores);
    if (hooks && hooks->attentions) hooks->attentions->push_back(tape.value(attn));
    head_outputs.push_back(tape.matmul(attn, vh));
  }
  int merged = tape.matmul(tape.concat_cols(head_outputs),
                           graph.id(prefix + ".attn.wo"));
  int x1 = tape.layer_norm(tape.add(x, merged), graph.id(prefix + ".ln1.g"),
                           graph.id(prefix + ".ln1.b"));
  int f1 = tape.relu(va::conv1d(tape, x1, graph.id(prefix + ".ffn.w1"),
                                graph.id(prefix + ".ffn.b1"),
                                config.ffn_conv_width));
  int f2 = va::conv1d(tape, f1, graph.id(prefix + ".ffn.w2"),
                      graph.id(prefix + ".ffn.b2"), config.ffn_conv_width);
  return tape.layer_norm(tape.add(x1, f2), graph.id(prefix + ".ln2.g"),
                         graph.id(prefix + ".ln2.b"));
}

PredictorShape predictor_shape(const ModelConfig& config) {
  return {config.predictor_kernel, config.d_model, config.predictor_hidden,
          config.dropout_rate};
}

int decode_to_mel(Tape& tape, const nn::ParamGraph& graph,
                  const ModelConfig& config, int regulated,
                  ForwardHooks* hooks) {
  int h = tape.add(regulated, tape.constant(sinusoidal_positions(
                                  tape.value(regulated).rows(), config.d_model)));
  for (int i = 0; i < config.n_blocks_dec; ++i)
    h = fft_block(tape, h, graph, "dec" + std::to_string(i), config, hooks);
  return tape.add_row_broadcast(tape.matmul(h, graph.id("mel_out.w")),
                                graph.id("mel_out.b"));
}

std::vector<double> column_values(const Tape& tape, int node) {
  const Matrix& m = tape.value(node);
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

Matrix sinusoidal_positions(long t_len, int width) {
  Matrix pe(t_len, width);
  for (long t = 0; t < t_len; ++t)
    for (int i = 0; i < width; ++i) {
      const double angle =
          double(t) / std::pow(10000.0, double(2 * (i / 2)) / double(width));
      pe(t, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  return pe;
}

ModelParams ModelParams::init(const ModelConfig& config,
                              std::vector<std::string> speakers,
                              std::vector<std::string> phones,
                              std::uint64_t seed) {
  ModelConfig cfg = config;
  cfg.n_speakers = int(speakers.size());
  cfg.n_phones = int(phones.size());
  cfg.validate();
  ModelParams params;
  params.config = cfg;
  params.speakers = std::move(speakers);
  params.phones = std::move(phones);
  Rng rng(stable_hash(seed, "model_init", 0));
  const int d = cfg.d_model;
  const double se = 1.0 / std::sqrt(double(d));
  auto& store = params.store;
  store.create("phone_embed", cfg.n_phones, d) = random_init(cfg.n_phones, d, se, rng);
  store.create("speaker_embed", cfg.n_speakers, d) =
      random_init(cfg.n_speakers, d, se, rng);
  store.create("severity_embed", 3, d) = random_init(3, d, se, rng);
  for (int i = 0; i < cfg.n_blocks_enc; ++i)
    create_fft_block(store, "enc" + std::to_string(i), cfg, rng);
  for (int i = 0; i < cfg.n_blocks_dec; ++i)
    create_fft_block(store, "dec" + std::to_string(i), cfg, rng);
  const PredictorShape shape = predictor_shape(cfg);
  for (const char* head : {"dur", "pitch", "energy", "sev"})
    va::create_predictor_params(store, head, shape, rng);
  store.create("pitch_bins_embed", cfg.n_bins, d) =
      random_init(cfg.n_bins, d, 0.1 * se, rng);
  store.create("energy_bins_embed", cfg.n_bins, d) =
      random_init(cfg.n_bins, d, 0.1 * se, rng);
  store.create("mel_out.w", d, cfg.n_mels) = random_init(d, cfg.n_mels, se, rng);
  store.create("mel_out.b", 1, cfg.n_mels);
  return params;
}

int ModelParams::speaker_index(const std::string& speaker_id) const {
  for (std::size_t i = 0; i < speakers.size(); ++i)
    if (speakers[i] == speaker_id) return int(i);
  throw DataError("unknown speaker: '" + speaker_id + "'");
}

int build_encoder(Tape& tape, const nn::ParamGraph& graph,
                  const ModelConfig& config, const std::vector<int>& phones,
                  int speaker, ForwardHooks* hooks) {
  if (phones.empty()) throw DataError("encoder input is empty");
  if (long(phones.size()) > config.max_seq)
    throw DataError("sequence length " + std::to_string(phones.size()) +
                    " exceeds max_seq " + std::to_string(config.max_seq));
  if (speaker < 0 || speaker >= config.n_speakers)
    throw DataError("speaker index out of range");
  int h = tape.gather_rows(graph.id("phone_embed"), phones);
  h = tape.add(h, tape.constant(sinusoidal_positions(long(phones.size()),
                                                     config.d_model)));
  for (int i = 0; i < config.n_blocks_enc; ++i)
    h = fft_block(tape, h, graph, "enc" + std::to_string(i), config, hooks);
  return tape.add_row_broadcast(
      h, tape.gather_rows(graph.id("speaker_embed"), {speaker}));
}

Matrix encode(const ModelParams& params, const PhraseSpec& spec, int speaker,
              ForwardHooks* hooks) {
  Tape tape;
  nn::ParamGraph graph(tape, params.store);
  return tape.value(
      build_encoder(tape, graph, params.config, spec.phones, speaker, hooks));
}

int build_training_loss(Tape& tape, const nn::ParamGraph& graph,
                        const ModelConfig& config, const TrainingExample& ex,
                        bool train_mode, Rng& rng, ForwardHooks* hooks) {
  ex.validate(config);
  int h = build_encoder(tape, graph, config, ex.spec.phones, ex.speaker, hooks);
  int sev_vec = va::severity_vector(tape, graph.id("severity_embed"),
                                    double(ex.severity_class));
  h = va::inject_severity(tape, h, sev_vec);

  const PredictorShape shape = predictor_shape(config);
  int dur_pred = va::predictor(tape, h, graph, "dur", shape, train_mode, rng);
  int pitch_pred = va::predictor(tape, h, graph, "pitch", shape, train_mode, rng);
  int energy_pred = va::predictor(tape, h, graph, "energy", shape, train_mode, rng);
  int sev_pred = va::predictor(tape, h, graph, "sev", shape, train_mode, rng);

  const long t_len = long(ex.spec.phones.size());
  Matrix dur_target(t_len, 1), pitch_target(t_len, 1), energy_target(t_len, 1);
  for (long i = 0; i < t_len; ++i) {
    dur_target(i, 0) = std::log(double(std::max(1L, ex.durations[std::size_t(i)])));
    pitch_target(i, 0) = ex.pitch[std::size_t(i)];
    energy_target(i, 0) = ex.energy[std::size_t(i)];
  }
  Matrix sev_target(1, 1);
  sev_target(0, 0) = double(ex.severity_class);

  // Teacher forcing: ground-truth pitch/energy drive the embeddings and
  // ground-truth durations drive the length regulator.
  int h2 = va::apply_scalar_embedding(tape, h, ex.pitch, 1.0,
                                      config.pitch_bins(),
                                      graph.id("pitch_bins_embed"));
  h2 = va::apply_scalar_embedding(tape, h2, ex.energy, 1.0,
                                  config.energy_bins(),
                                  graph.id("energy_bins_embed"));
  int regulated = va::length_regulate(tape, h2, ex.durations);
  int mel = decode_to_mel(tape, graph, config, regulated, hooks);

  int loss = tape.l1_loss(mel, ex.mel);
  loss = tape.add(loss, tape.mse_loss(dur_pred, dur_target));
  loss = tape.add(loss, tape.mse_loss(pitch_pred, pitch_target));
  loss = tape.add(loss, tape.mse_loss(energy_pred, energy_target));
  loss = tape.add(loss, tape.mse_loss(tape.mean_all(sev_pred), sev_target));
  return loss;
}

MelSpectrogram synthesize(const ModelParams& params, const PhraseSpec& spec,
                          int speaker, const ProsodyControls& controls,
                          const PauseModel& pause_model, const Lexicon& lexicon,
                          Rng& rng, SynthesisDiagnostics* diag) {
  controls.validate();
  const ModelConfig& config = params.config;

  PhraseSpec working = spec;
  std::set<int> inserted;
  if (controls.pause_insertion) {
    const SeverityClass cls(int(std::lround(controls.severity_coef)));
    const int count = pause_count(pause_model, working.n_words, cls, rng);
    inserted = choose_slots(count, working, rng);
    working = insert_pauses(working, inserted, lexicon);
  }

  Tape tape;
  nn::ParamGraph graph(tape, params.store);
  int h = build_encoder(tape, graph, config, working.phones, speaker, nullptr);
  int sev_vec =
      va::severity_vector(tape, graph.id("severity_embed"), controls.severity_coef);
  h = va::inject_severity(tape, h, sev_vec);

  const PredictorShape shape = predictor_shape(config);
  Rng unused(0);  // dropout disabled at inference
  int dur_pred = va::predictor(tape, h, graph, "dur", shape, false, unused);
  int pitch_pred = va::predictor(tape, h, graph, "pitch", shape, false, unused);
  int energy_pred = va::predictor(tape, h, graph, "energy", shape, false, unused);

  const std::vector<long> durations =
      apply_duration(column_values(tape, dur_pred), controls.duration_coef);
  std::vector<double> pitch = column_values(tape, pitch_pred);
  std::vector<double> energy = column_values(tape, energy_pred);

  int h2 = va::apply_scalar_embedding(tape, h, pitch, controls.pitch_coef,
                                      config.pitch_bins(),
                                      graph.id("pitch_bins_embed"));
  h2 = va::apply_scalar_embedding(tape, h2, energy, controls.energy_coef,
                                  config.energy_bins(),
                                  graph.id("energy_bins_embed"));
  int regulated = va::length_regulate(tape, h2, durations);
  int mel = decode_to_mel(tape, graph, config, regulated, nullptr);

  if (diag) {
    diag->durations = durations;
    for (double& p : pitch) p *= controls.pitch_coef;
    for (double& e : energy) e *= controls.energy_coef;
    diag->pitch = std::move(pitch);
    diag->energy = std::move(energy);
    diag->inserted_slots = inserted;
  }
  MelSpectrogram out;
  out.data = tape.value(mel);
  out.frame_seconds = config.frame_seconds;
  return out;
}

std::vector<double> train(ModelParams& params,
                          const std::vector<TrainingExample>& examples,
                          const TrainOptions& options) {
  if (examples.empty()) throw DataError("train: empty example set");
  for (const auto& ex : examples) ex.validate(params.config);
  nn::AdamOptimizer optimizer(options.learning_rate);
  std::vector<double> curve;
  curve.reserve(std::size_t(options.steps));
  for (long step = 0; step < options.steps; ++step) {
    const TrainingExample& ex = examples[std::size_t(step) % examples.size()];
    Rng step_rng(stable_hash(options.seed, "train_step", std::uint64_t(step)));
    Tape tape;
    nn::ParamGraph graph(tape, params.store);
    int loss = build_training_loss(tape, graph, params.config, ex, true, step_rng);
    const double loss_value = tape.value(loss)(0, 0);
    if (!std::isfinite(loss_value))
      throw InternalError("training diverged at step " + std::to_string(step) +
                          ": loss = " + std::to_string(loss_value));
    tape.backward(loss);
    optimizer.step(params.store, tape, graph);
    curve.push_back(loss_value);
  }
  return curve;
}

namespace {

constexpr char kCkptMagic[4] = {'D', 'S', 'C', 'K'};
constexpr std::uint32_t kCkptVersion = 1;

template <typename T>
void put_raw(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("corrupt checkpoint: truncated file");
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_raw<std::uint32_t>(out, std::uint32_t(s.size()));
  out.write(s.data(), long(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get_raw<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), long(len));
  if (!in) throw DataError("corrupt checkpoint: truncated string");
  return s;
}

void put_config(std::ostream& out, const ModelConfig& c) {
  for (int v : {c.d_model, c.n_blocks_enc, c.n_blocks_dec, c.n_heads,
                c.ffn_conv_width, c.ffn_hidden, c.n_mels, c.n_speakers,
                c.n_phones, c.max_seq, c.predictor_kernel, c.predictor_hidden,
                c.n_bins})
    put_raw<std::int64_t>(out, v);
  for (double v : {c.dropout_rate, c.frame_seconds, c.pitch_lo, c.pitch_hi,
                   c.energy_lo, c.energy_hi})
    put_raw<double>(out, v);
}

ModelConfig get_config(std::istream& in) {
  ModelConfig c;
  int* ints[] = {&c.d_model, &c.n_blocks_enc, &c.n_blocks_dec, &c.n_heads,
                 &c.ffn_conv_width, &c.ffn_hidden, &c.n_mels, &c.n_speakers,
                 &c.n_phones, &c.max_seq, &c.predictor_kernel,
                 &c.predictor_hidden, &c.n_bins};
  for (int* p : ints) *p = int(get_raw<std::int64_t>(in));
  double* doubles[] = {&c.dropout_rate, &c.frame_seconds, &c.pitch_lo,
                       &c.pitch_hi, &c.energy_lo, &c.energy_hi};
  for (double* p : doubles) *p = get_raw<double>(in);
  return c;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InternalError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, 4);
  put_raw<std::uint32_t>(out, kCkptVersion);
  put_config(out, params.config);
  put_raw<std::uint64_t>(out, params.speakers.size());
  for (const auto& s : params.speakers) put_string(out, s);
  put_raw<std::uint64_t>(out, params.phones.size());
  for (const auto& s : params.phones) put_string(out, s);
  put_raw<std::uint64_t>(out, params.store.items().size());
  for (const auto& [name, m] : params.store.items()) {
    put_string(out, name);
    put_raw<std::uint64_t>(out, std::uint64_t(m.rows()));
    put_raw<std::uint64_t>(out, std::uint64_t(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              long(m.size()) * long(sizeof(double)));
  }
  if (!out) throw InternalError("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path,
                            const ModelConfig* expected_config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw DataError("corrupt checkpoint: bad magic: " + path);
  const auto version = get_raw<std::uint32_t>(in);
  if (version != kCkptVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  ModelParams params;
  params.config = get_config(in);
  params.config.validate();
  const auto n_speakers = get_raw<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_speakers; ++i)
    params.speakers.push_back(get_string(in));
  const auto n_phones = get_raw<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_phones; ++i)
    params.phones.push_back(get_string(in));
  if (int(n_speakers) != params.config.n_speakers ||
      int(n_phones) != params.config.n_phones)
    throw DataError("corrupt checkpoint: table sizes disagree with config");
  const auto n_tensors = get_raw<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_tensors; ++i) {
    const std::string name = get_string(in);
    const auto rows = long(get_raw<std::uint64_t>(in));
    const auto cols = long(get_raw<std::uint64_t>(in));
    Matrix& m = params.store.create(name, rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), rows * cols * long(sizeof(double)));
    if (!in) throw DataError("corrupt checkpoint: truncated tensor '" + name + "'");
    if (!m.allFinite())
      throw DataError("corrupt checkpoint: non-finite values in '" + name + "'");
  }
  // Shape audit against a reference layout for this config.
  ModelParams reference =
      ModelParams::init(params.config, params.speakers, params.phones, 0);
  if (reference.store.items().size() != params.store.items().size())
    throw DataError("checkpoint shape mismatch: unexpected tensor count");
  for (const auto& [name, m] : reference.store.items()) {
    if (!params.store.contains(name))
      throw DataError("checkpoint shape mismatch: missing tensor '" + name + "'");
    const Matrix& loaded = params.store.at(name);
    if (loaded.rows() != m.rows() || loaded.cols() != m.cols())
      throw DataError("checkpoint shape mismatch for tensor '" + name + "'");
  }
  if (expected_config && !(params.config == *expected_config))
    throw DataError("checkpoint config does not match the requested config");
  return params;
}

}  // namespace dsaug
