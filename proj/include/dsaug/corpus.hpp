// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_CORPUS_HPP
#define DSAUG_CORPUS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dsaug {

// Raw corpus severity label. Exactly these four; case-insensitive on parse,
// canonical lowercase on output.
enum class RawSeverity { kNormal, kVeryLow, kLow, kMedium };

RawSeverity parse_severity(const std::string& label);
std::string severity_name(RawSeverity s);
constexpr RawSeverity kAllSeverities[] = {RawSeverity::kNormal,
                                          RawSeverity::kVeryLow,
                                          RawSeverity::kLow,
                                          RawSeverity::kMedium};

// Collapsed conditioning class: normal -> 0, very_low/low -> 1, medium -> 2.
class SeverityClass {
 public:
  explicit SeverityClass(int index);
  int index() const { return index_; }
  bool operator==(const SeverityClass& o) const = default;

 private:
  int index_;
};

SeverityClass severity_class(RawSeverity label);

// Phone-level alignment; word_index == -1 marks silence entries.
struct AlignmentEntry {
  std::string phone;
  long duration_frames = 0;
  int word_index = 0;
};

struct Alignment {
  std::vector<AlignmentEntry> entries;
  double frame_seconds = 256.0 / 22050.0;

  void validate() const;
  long total_frames() const;
  // Number of distinct non-silence words.
  int word_count() const;
  // Silence entries strictly between non-silence entries of different words.
  int between_word_pauses() const;
};

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  RawSeverity severity = RawSeverity::kNormal;
  std::string transcript;
  std::optional<std::string> alignment_path;
  std::optional<Alignment> alignment;
};

struct GroupPauseStats {
  double mean_pauses_per_sentence = 0.0;
  double mean_slots_per_sentence = 0.0;
  long sentence_count = 0;
};

struct PauseStats {
  std::map<RawSeverity, GroupPauseStats> per_group;
};

// One JSON object per line; strict mode rejects unknown keys. Alignments are
// loaded relative to the manifest's directory when `alignment_path` is set.
std::vector<UtteranceRecord> parse_manifest(const std::string& path,
                                            bool lenient = false);
void write_manifest(const std::vector<UtteranceRecord>& records,
                    const std::string& path);

Alignment parse_alignment(const std::string& path);
void write_alignment(const Alignment& alignment, const std::string& path);

PauseStats pause_statistics(const std::vector<UtteranceRecord>& records);

// 100 * (mean_group / mean_normal - 1). Throws if the normal mean is zero.
double pause_ratio_vs_normal(const PauseStats& stats, RawSeverity group);

// Nearest-integer display value of a ratio percentage.
long display_percent(double percent);

}  // namespace dsaug

#endif  // DSAUG_CORPUS_HPP
