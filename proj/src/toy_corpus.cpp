// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/toy_corpus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dsaug/errors.hpp"

namespace dsaug {
namespace toy {

namespace fs = std::filesystem;

Lexicon lexicon() {
  static const std::map<std::string, std::vector<std::string>> entries = {
      {"we", {"w", "ee"}},
      {"would", {"w", "uh", "d"}},
      {"like", {"l", "ay", "k"}},
      {"to", {"t", "oo"}},
      {"play", {"p", "l", "ay"}},
      {"volleyball", {"v", "aa", "l", "ee", "b", "aa", "l"}},
      {"ball", {"b", "aa", "l"}},
      {"red", {"r", "eh", "d"}},
      {"sun", {"s", "ah", "n"}},
      {"moon", {"m", "oo", "n"}},
      {"cat", {"k", "ae", "t"}},
      {"dog", {"d", "aa", "g"}},
      {"run", {"r", "ah", "n"}},
      {"see", {"s", "ee"}},
      {"the", {"dh", "ah"}},
      {"big", {"b", "ih", "g"}},
      {"can", {"k", "ae", "n"}},
  };
  return Lexicon::from_entries(entries);
}

std::vector<Speaker> speakers() {
  return {{"C01", RawSeverity::kNormal},
          {"D01", RawSeverity::kVeryLow},
          {"D02", RawSeverity::kLow},
          {"D03", RawSeverity::kMedium}};
}

std::vector<std::string> train_sentences() {
  return {
      "we like to play ball",
      "the cat can see the moon",
      "the big dog can run",
      "we see the red sun",
      "the dog can see the cat",
      "we would like the big ball",
      "run to the big red sun",
      "the cat can play",
      "we like the dog",
      "see the moon run",
      "we would play volleyball",
      "the red cat can see",
  };
}

std::vector<std::string> heldout_sentences() {
  return {
      "we would like to play volleyball",
      "the big cat can see the red ball",
      "we run to the moon",
      "the dog would like the sun",
  };
}

long phone_duration(int phone_id, int severity_class) {
  const long base = phone_id == 0 ? 6 : 3 + (phone_id * 7) % 5;
  const double scale = 1.0 + 0.35 * double(severity_class);
  return std::max(1L, std::lround(double(base) * scale));
}

double phone_pitch(int phone_id, int severity_class) {
  const double base = 0.6 + 0.1 * double((phone_id * 3) % 9);
  return base * (1.0 + 0.12 * double(severity_class));
}

double phone_energy(int phone_id, int severity_class) {
  const double base = 0.4 + 0.08 * double((phone_id * 5) % 11);
  return base * (1.0 - 0.08 * double(severity_class));
}

nn::Matrix phone_mel(int phone_id, long duration, int n_mels) {
  nn::Matrix mel(duration, n_mels);
  const double center = double((phone_id * 13) % n_mels);
  for (long f = 0; f < duration; ++f)
    for (int b = 0; b < n_mels; ++b) {
      const double d = (double(b) - center) / 4.0;
      mel(f, b) = std::exp(-0.5 * d * d) + 0.1 * std::sin(0.3 * double(f));
    }
  return mel;
}

ModelConfig config() {
  ModelConfig c;
  c.d_model = 32;
  c.n_blocks_enc = 2;
  c.n_blocks_dec = 2;
  c.n_heads = 2;
  c.ffn_conv_width = 3;
  c.ffn_hidden = 32;
  c.n_mels = 80;
  c.predictor_kernel = 3;
  c.predictor_hidden = 32;
  c.n_bins = 256;
  c.dropout_rate = 0.1;
  c.pitch_lo = 0.0;
  c.pitch_hi = 2.5;
  c.energy_lo = 0.0;
  c.energy_hi = 1.5;
  // Placeholders; ModelParams::init overwrites from the actual tables.
  c.n_speakers = 1;
  c.n_phones = 1;
  return c;
}

namespace {

// Deterministic pause pattern: dysarthric classes pause at a fixed subset of
// inter-word slots, denser for higher severity.
std::set<int> pause_slots_for(int severity_class, int n_slots) {
  std::set<int> slots;
  if (severity_class <= 0) return slots;
  const int stride = severity_class == 1 ? 3 : 2;
  for (int s = 0; s < n_slots; s += stride) slots.insert(s);
  return slots;
}

}  // namespace

TrainingExample example(const Lexicon& lex, const ModelConfig& config,
                        const std::string& sentence, int speaker_index,
                        int severity_class) {
  PhraseSpec spec = phonemize(sentence, lex);
  spec = insert_pauses(spec, pause_slots_for(severity_class, pause_slots(spec)),
                       lex);
  TrainingExample ex;
  ex.spec = spec;
  ex.speaker = speaker_index;
  ex.severity_class = severity_class;
  long total = 0;
  for (int p : spec.phones) {
    const long d = phone_duration(p, severity_class);
    ex.durations.push_back(d);
    ex.pitch.push_back(phone_pitch(p, severity_class));
    ex.energy.push_back(phone_energy(p, severity_class));
    total += d;
  }
  ex.mel.resize(total, config.n_mels);
  long at = 0;
  for (std::size_t i = 0; i < spec.phones.size(); ++i) {
    const long d = ex.durations[i];
    ex.mel.middleRows(at, d) = phone_mel(spec.phones[i], d, config.n_mels);
    at += d;
  }
  return ex;
}

TrainingExample example_from_record(const Lexicon& lex,
                                    const ModelConfig& config,
                                    const UtteranceRecord& record,
                                    int speaker_index) {
  if (!record.alignment)
    throw DataError("utterance '" + record.utterance_id + "' has no alignment");
  const Alignment& ali = *record.alignment;
  const int cls = severity_class(record.severity).index();
  TrainingExample ex;
  ex.speaker = speaker_index;
  ex.severity_class = cls;
  ex.spec.n_words = ali.word_count();
  long total = 0;
  for (const auto& entry : ali.entries) {
    const int pid = lex.phone_id(entry.phone);
    ex.spec.phones.push_back(pid);
    ex.spec.word_of_phone.push_back(entry.word_index);
    ex.durations.push_back(entry.duration_frames);
    ex.pitch.push_back(phone_pitch(pid, cls));
    ex.energy.push_back(phone_energy(pid, cls));
    total += entry.duration_frames;
  }
  ex.spec.validate();
  ex.mel.resize(total, config.n_mels);
  long at = 0;
  for (std::size_t i = 0; i < ex.spec.phones.size(); ++i) {
    const long d = ex.durations[i];
    ex.mel.middleRows(at, d) = phone_mel(ex.spec.phones[i], d, config.n_mels);
    at += d;
  }
  return ex;
}

std::vector<TrainingExample> training_set(const Lexicon& lex,
                                          const ModelConfig& config) {
  std::vector<TrainingExample> examples;
  const auto spk = speakers();
  const auto sentences = train_sentences();
  for (std::size_t s = 0; s < spk.size(); ++s) {
    const int cls = severity_class(spk[s].severity).index();
    for (const auto& sentence : sentences)
      examples.push_back(example(lex, config, sentence, int(s), cls));
  }
  return examples;
}

void write_corpus_files(const std::string& dir) {
  const Lexicon lex = lexicon();
  const ModelConfig cfg = config();
  fs::create_directories(fs::path(dir) / "ali");

  std::vector<UtteranceRecord> records;
  const auto spk = speakers();
  const auto sentences = train_sentences();
  for (std::size_t s = 0; s < spk.size(); ++s) {
    const int cls = severity_class(spk[s].severity).index();
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      TrainingExample ex = example(lex, cfg, sentences[i], int(s), cls);
      Alignment ali;
      for (std::size_t p = 0; p < ex.spec.phones.size(); ++p)
        ali.entries.push_back({lex.inventory()[std::size_t(ex.spec.phones[p])],
                               ex.durations[p], ex.spec.word_of_phone[p]});
      ali.validate();
      char utt_id[32];
      std::snprintf(utt_id, sizeof(utt_id), "%s_s%02zu", spk[s].id.c_str(), i);
      const std::string ali_rel = "ali/" + std::string(utt_id) + ".json";
      write_alignment(ali, (fs::path(dir) / ali_rel).string());
      UtteranceRecord rec;
      rec.utterance_id = utt_id;
      rec.speaker_id = spk[s].id;
      rec.severity = spk[s].severity;
      rec.transcript = sentences[i];
      rec.alignment_path = ali_rel;
      records.push_back(std::move(rec));
    }
  }
  write_manifest(records, (fs::path(dir) / "manifest.jsonl").string());
  write_lexicon(lex, (fs::path(dir) / "lexicon.txt").string());
}

}  // namespace toy

void write_pause_fixture(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "ali");

  struct Group {
    RawSeverity severity;
    long total_pauses;  // per 100 sentences
  };
  const Group groups[] = {{RawSeverity::kNormal, 26},
                          {RawSeverity::kVeryLow, 57},
                          {RawSeverity::kLow, 121},
                          {RawSeverity::kMedium, 251}};
  const int sentences_per_group = 100;
  const int words_per_sentence = 10;

  std::vector<UtteranceRecord> records;
  for (const auto& group : groups) {
    const std::string sev = severity_name(group.severity);
    const long base = group.total_pauses / sentences_per_group;
    const long remainder = group.total_pauses % sentences_per_group;
    for (int s = 0; s < sentences_per_group; ++s) {
      const long pauses = base + (s < remainder ? 1 : 0);
      Alignment ali;
      std::string transcript;
      for (int w = 0; w < words_per_sentence; ++w) {
        ali.entries.push_back({"x", 5, w});
        // One pause after each of the first `pauses` words.
        if (w < pauses) ali.entries.push_back({"sp", 8, -1});
        if (w) transcript += ' ';
        transcript += "word" + std::to_string(w);
      }
      ali.validate();
      const std::string utt_id = sev + "_" + std::to_string(s);
      const std::string ali_rel = "ali/" + utt_id + ".json";
      write_alignment(ali, (fs::path(dir) / ali_rel).string());
      UtteranceRecord rec;
      rec.utterance_id = utt_id;
      rec.speaker_id = "spk_" + sev;
      rec.severity = group.severity;
      rec.transcript = transcript;
      rec.alignment_path = ali_rel;
      records.push_back(std::move(rec));
    }
  }
  write_manifest(records, (fs::path(dir) / "manifest.jsonl").string());
}

}  // namespace dsaug
