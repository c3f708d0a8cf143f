// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_TEXT_FRONTEND_HPP
#define DSAUG_TEXT_FRONTEND_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

namespace dsaug {

// The shared pause symbol: alignment silences and inserted pauses both use
// it, so the duration predictor learns pause durations from data.
inline const std::string kPausePhone = "sp";

class Lexicon {
 public:
  // Lines are `word<TAB>phone phone ...`; '#' starts a comment.
  static Lexicon load(const std::string& path);
  static Lexicon from_entries(
      const std::map<std::string, std::vector<std::string>>& entries);

  const std::vector<std::string>& phones_of(const std::string& word) const;
  bool contains(const std::string& word) const;

  // Phone inventory in id order; id 0 is always "sp".
  const std::vector<std::string>& inventory() const { return inventory_; }
  int phone_id(const std::string& phone) const;

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::vector<std::string> inventory_;
  std::map<std::string, int> phone_ids_;

  void build_inventory();
};

// Phoneme sequence with word boundaries; pause phones carry word index -1.
struct PhraseSpec {
  std::vector<int> phones;
  std::vector<int> word_of_phone;
  int n_words = 0;
  std::set<int> pause_slots_used;

  void validate() const;
};

// Whitespace split, strip leading/trailing ASCII punctuation, lowercase.
std::vector<std::string> tokenize(const std::string& transcript);

PhraseSpec phonemize(const std::string& transcript, const Lexicon& lexicon);

// Number of inter-word boundaries eligible for pause insertion.
int pause_slots(const PhraseSpec& spec);

// Insert one "sp" phone at each chosen boundary; slot i sits between word i
// and word i+1.
PhraseSpec insert_pauses(const PhraseSpec& spec, const std::set<int>& slots,
                         const Lexicon& lexicon);

void write_lexicon(const Lexicon& lexicon, const std::string& path);

}  // namespace dsaug

#endif  // DSAUG_TEXT_FRONTEND_HPP
