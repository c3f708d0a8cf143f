// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dsaug/errors.hpp"
#include "json.hpp"

namespace dsaug {

using nlohmann::json;

RawSeverity parse_severity(const std::string& label) {
  std::string s;
  s.reserve(label.size());
  for (char c : label) s.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  if (s == "normal") return RawSeverity::kNormal;
  if (s == "very_low") return RawSeverity::kVeryLow;
  if (s == "low") return RawSeverity::kLow;
  if (s == "medium") return RawSeverity::kMedium;
  throw DataError("unknown severity label: '" + label + "'");
}

std::string severity_name(RawSeverity s) {
  switch (s) {
    case RawSeverity::kNormal: return "normal";
    case RawSeverity::kVeryLow: return "very_low";
    case RawSeverity::kLow: return "low";
    case RawSeverity::kMedium: return "medium";
  }
  throw InternalError("invalid RawSeverity value");
}

SeverityClass::SeverityClass(int index) : index_(index) {
  if (index < 0 || index > 2)
    throw DataError("severity class must be 0, 1 or 2, got " +
                    std::to_string(index));
}

SeverityClass severity_class(RawSeverity label) {
  switch (label) {
    case RawSeverity::kNormal: return SeverityClass(0);
    case RawSeverity::kVeryLow:
    case RawSeverity::kLow: return SeverityClass(1);
    case RawSeverity::kMedium: return SeverityClass(2);
  }
  throw InternalError("invalid RawSeverity value");
}

void Alignment::validate() const {
  if (frame_seconds <= 0.0)
    throw DataError("alignment frame_seconds must be positive");
  int last_word = -1;
  for (const auto& e : entries) {
    if (e.duration_frames < 0)
      throw DataError("alignment duration_frames must be nonnegative");
    if (e.word_index < -1)
      throw DataError("alignment word_index must be >= -1");
    if (e.word_index >= 0) {
      if (e.word_index < last_word)
        throw DataError("alignment word indices must be nondecreasing");
      last_word = e.word_index;
    }
  }
  if (total_frames() <= 0) throw DataError("alignment total duration must be > 0");
}

long Alignment::total_frames() const {
  long total = 0;
  for (const auto& e : entries) total += e.duration_frames;
  return total;
}

int Alignment::word_count() const {
  std::set<int> words;
  for (const auto& e : entries)
    if (e.word_index >= 0) words.insert(e.word_index);
  return int(words.size());
}

int Alignment::between_word_pauses() const {
  int pauses = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].word_index != -1) continue;
    // Nearest non-silence neighbours on either side.
    int before = -1, after = -1;
    for (std::size_t j = i; j-- > 0;)
      if (entries[j].word_index >= 0) { before = entries[j].word_index; break; }
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (entries[j].word_index >= 0) { after = entries[j].word_index; break; }
    if (before >= 0 && after >= 0 && before != after) ++pauses;
  }
  return pauses;
}

namespace {

bool has_word_token(const std::string& transcript) {
  return std::any_of(transcript.begin(), transcript.end(), [](char c) {
    return !std::isspace(static_cast<unsigned char>(c));
  });
}

Alignment alignment_from_json(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("frame_seconds") || !j.contains("entries"))
    throw DataError(context + ": alignment requires frame_seconds and entries");
  Alignment a;
  a.frame_seconds = j.at("frame_seconds").get<double>();
  for (const auto& t : j.at("entries")) {
    if (!t.is_array() || t.size() != 3)
      throw DataError(context + ": alignment entry must be [phone, frames, word]");
    a.entries.push_back({t[0].get<std::string>(), t[1].get<long>(),
                         t[2].get<int>()});
  }
  a.validate();
  return a;
}

}  // namespace

Alignment parse_alignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alignment file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  return alignment_from_json(j, path);
}

void write_alignment(const Alignment& alignment, const std::string& path) {
  json entries = json::array();
  for (const auto& e : alignment.entries)
    entries.push_back({e.phone, e.duration_frames, e.word_index});
  json j{{"frame_seconds", alignment.frame_seconds}, {"entries", entries}};
  std::ofstream out(path);
  if (!out) throw InternalError("cannot write alignment file: " + path);
  out << j.dump() << '\n';
}

std::vector<UtteranceRecord> parse_manifest(const std::string& path,
                                            bool lenient) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  const auto base_dir = std::filesystem::path(path).parent_path();

  static const std::set<std::string> known_keys = {
      "utterance_id", "speaker_id", "severity", "transcript", "alignment_path"};

  std::vector<UtteranceRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": record must be an object");
    for (const auto& [key, _] : j.items()) {
      if (!lenient && !known_keys.count(key))
        throw DataError(where + ": unknown key '" + key + "'");
    }
    for (const char* key : {"utterance_id", "speaker_id", "severity", "transcript"})
      if (!j.contains(key))
        throw DataError(where + ": missing required key '" + std::string(key) + "'");

    UtteranceRecord rec;
    try {
      rec.utterance_id = j.at("utterance_id").get<std::string>();
      rec.speaker_id = j.at("speaker_id").get<std::string>();
      rec.severity = parse_severity(j.at("severity").get<std::string>());
      rec.transcript = j.at("transcript").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!has_word_token(rec.transcript))
      throw DataError(where + ": transcript must contain at least one word");
    if (!seen_ids.insert(rec.utterance_id).second)
      throw DataError(where + ": duplicate utterance_id '" + rec.utterance_id + "'");
    if (j.contains("alignment_path")) {
      rec.alignment_path = j.at("alignment_path").get<std::string>();
      const auto ali_path = base_dir / *rec.alignment_path;
      try {
        rec.alignment = parse_alignment(ali_path.string());
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_manifest(const std::vector<UtteranceRecord>& records,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InternalError("cannot write manifest: " + path);
  for (const auto& rec : records) {
    json j{{"utterance_id", rec.utterance_id},
           {"speaker_id", rec.speaker_id},
           {"severity", severity_name(rec.severity)},
           {"transcript", rec.transcript}};
    if (rec.alignment_path) j["alignment_path"] = *rec.alignment_path;
    out << j.dump() << '\n';
  }
}

PauseStats pause_statistics(const std::vector<UtteranceRecord>& records) {
  struct Acc {
    long pauses = 0;
    long slots = 0;
    long sentences = 0;
  };
  std::map<RawSeverity, Acc> acc;
  for (const auto& rec : records) {
    if (!rec.alignment)
      throw DataError("utterance '" + rec.utterance_id + "' has no alignment");
    auto& a = acc[rec.severity];
    a.pauses += rec.alignment->between_word_pauses();
    a.slots += std::max(0, rec.alignment->word_count() - 1);
    a.sentences += 1;
  }
  PauseStats stats;
  for (const auto& [sev, a] : acc) {
    GroupPauseStats g;
    g.sentence_count = a.sentences;
    if (a.sentences > 0) {
      g.mean_pauses_per_sentence = double(a.pauses) / double(a.sentences);
      g.mean_slots_per_sentence = double(a.slots) / double(a.sentences);
    }
    stats.per_group[sev] = g;
  }
  return stats;
}

double pause_ratio_vs_normal(const PauseStats& stats, RawSeverity group) {
  auto normal_it = stats.per_group.find(RawSeverity::kNormal);
  if (normal_it == stats.per_group.end() || normal_it->second.sentence_count == 0)
    throw DataError("pause ratio requires a normal group");
  const double normal_mean = normal_it->second.mean_pauses_per_sentence;
  if (normal_mean == 0.0)
    throw DataError("pause ratio undefined: normal group mean is zero");
  auto it = stats.per_group.find(group);
  if (it == stats.per_group.end() || it->second.sentence_count == 0)
    throw DataError("pause ratio: group '" + severity_name(group) + "' absent");
  return 100.0 * (it->second.mean_pauses_per_sentence / normal_mean - 1.0);
}

long display_percent(double percent) {
  return long(std::llround(percent));
}

}  // namespace dsaug
