// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "dsaug/errors.hpp"
#include "dsaug/evaluation.hpp"

using namespace dsaug;

namespace {

// Independent edit-distance oracle: plain unit-cost Levenshtein with no
// backtrace, O(n*m) but written as directly as possible.
long edit_distance(const std::vector<std::string>& a,
                   const std::vector<std::string>& b) {
  std::vector<long> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = long(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = long(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

UtteranceRecord speaker_record(const std::string& utt, const std::string& spk,
                               RawSeverity sev) {
  UtteranceRecord rec;
  rec.utterance_id = utt;
  rec.speaker_id = spk;
  rec.severity = sev;
  rec.transcript = "x";
  return rec;
}

}  // namespace

TEST_CASE("wer on hand-checked cases") {
  SUBCASE("identical sequences") {
    auto r = wer({"a", "b", "c"}, {"a", "b", "c"});
    CHECK(r.substitutions == 0);
    CHECK(r.deletions == 0);
    CHECK(r.insertions == 0);
    CHECK(r.wer == 0.0);
    CHECK(r.ref_words == 3);
  }
  SUBCASE("single substitution") {
    auto r = wer({"a", "b", "c"}, {"a", "x", "c"});
    CHECK(r.substitutions == 1);
    CHECK(r.wer == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("pure deletion and pure insertion") {
    auto del = wer({"a", "b"}, {"a"});
    CHECK(del.deletions == 1);
    CHECK(del.insertions == 0);
    CHECK(del.wer == 0.5);
    auto ins = wer({"a"}, {"a", "b"});
    CHECK(ins.insertions == 1);
    CHECK(ins.wer == 1.0);
  }
  SUBCASE("empty hypothesis deletes everything") {
    auto r = wer({"a", "b", "c"}, {});
    CHECK(r.deletions == 3);
    CHECK(r.wer == 1.0);
  }
  SUBCASE("empty reference with nonempty hypothesis is an error") {
    CHECK_THROWS_AS(wer({}, {"a"}), DataError);
  }
  SUBCASE("wer can exceed 100 percent") {
    auto r = wer({"a"}, {"x", "y", "z"});
    CHECK(r.wer == 3.0);
  }
  SUBCASE("ties prefer substitutions over insert+delete") {
    auto r = wer({"a", "b"}, {"x", "y"});
    CHECK(r.substitutions == 2);
    CHECK(r.insertions == 0);
    CHECK(r.deletions == 0);
  }
}

TEST_CASE("wer error count matches an independent Levenshtein oracle") {
  const std::vector<std::string> vocab = {"a", "b", "c"};
  std::mt19937 gen(19);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::string> ref(1 + gen() % 6), hyp(gen() % 6);
    for (auto& w : ref) w = vocab[gen() % 3];
    for (auto& w : hyp) w = vocab[gen() % 3];
    auto r = wer(ref, hyp);
    const long total = r.substitutions + r.deletions + r.insertions;
    CHECK(total == edit_distance(ref, hyp));
    CHECK(r.wer == doctest::Approx(double(total) / double(ref.size())));
    // Alignment accounting must balance both sequence lengths.
    CHECK(r.ref_words == long(ref.size()));
    CHECK(long(hyp.size()) == long(ref.size()) - r.deletions + r.insertions);
  }
}

TEST_CASE("loso splits cover each dysarthric speaker once") {
  std::vector<UtteranceRecord> records = {
      speaker_record("u1", "C01", RawSeverity::kNormal),
      speaker_record("u2", "D01", RawSeverity::kVeryLow),
      speaker_record("u3", "D01", RawSeverity::kVeryLow),
      speaker_record("u4", "D02", RawSeverity::kLow),
      speaker_record("u5", "D03", RawSeverity::kMedium),
  };
  auto splits = loso_splits(records);
  REQUIRE(splits.size() == 3);
  std::set<std::string> tested;
  for (const auto& s : splits) {
    tested.insert(s.test_speaker);
    CHECK(s.train_speakers.count(s.test_speaker) == 0);
    // Everyone else, including the control speaker, trains.
    CHECK(s.train_speakers.size() == 3);
    CHECK(s.train_speakers.count("C01") == 1);
  }
  CHECK(tested == std::set<std::string>{"D01", "D02", "D03"});

  SUBCASE("inconsistent severity for one speaker rejected") {
    records.push_back(speaker_record("u6", "D01", RawSeverity::kMedium));
    CHECK_THROWS_AS(loso_splits(records), DataError);
  }
  SUBCASE("no dysarthric speakers yields no splits") {
    std::vector<UtteranceRecord> only_normal = {
        speaker_record("u1", "C01", RawSeverity::kNormal),
        speaker_record("u2", "C02", RawSeverity::kNormal)};
    CHECK(loso_splits(only_normal).empty());
  }
  SUBCASE("a single speaker is not enough to split") {
    std::vector<UtteranceRecord> one = {
        speaker_record("u1", "D01", RawSeverity::kLow)};
    CHECK_THROWS_AS(loso_splits(one), DataError);
  }
}

TEST_CASE("group_average macro-averages speakers and groups") {
  std::map<std::string, double> per_speaker = {
      {"F04", 10.49}, {"M03", 17.21}, {"F03", 46.6},
      {"F01", 66.78}, {"M01", 46.0}};
  std::map<std::string, std::string> groups = {
      {"F04", "very_low"}, {"M03", "very_low"}, {"F03", "low"},
      {"F01", "moderate"}, {"M01", "moderate"}};
  auto report = group_average(per_speaker, groups);
  CHECK(report.per_group.at("very_low") == doctest::Approx(13.85));
  CHECK(report.per_group.at("low") == doctest::Approx(46.6));
  CHECK(report.per_group.at("moderate") == doctest::Approx(56.39));
  CHECK(report.overall ==
        doctest::Approx((10.49 + 17.21 + 46.6 + 66.78 + 46.0) / 5));
  CHECK(report.per_speaker.at("F03") == 46.6);

  SUBCASE("speaker without a group mapping rejected") {
    per_speaker["X99"] = 1.0;
    CHECK_THROWS_AS(group_average(per_speaker, groups), DataError);
  }
}

TEST_CASE("relative improvement and display rounding") {
  CHECK(relative_improvement(44.5, 41.6125) ==
        doctest::Approx(100.0 * (44.5 - 41.6125) / 44.5));
  CHECK(relative_improvement(50.0, 50.0) == 0.0);
  // Degradation is negative.
  CHECK(relative_improvement(40.0, 44.0) == doctest::Approx(-10.0));
  CHECK_THROWS_AS(relative_improvement(0.0, 1.0), DataError);

  CHECK(display_round1(41.6125) == 41.6);
  CHECK(display_round1(39.0875) == 39.1);
  CHECK(display_round1(12.16) == 12.2);
  CHECK(display_round1(-4.7) == -4.7);
  // Round-half-even at the boundary.
  CHECK(display_round1(0.25) == 0.2);
  CHECK(display_round1(0.35) == 0.4);
}
