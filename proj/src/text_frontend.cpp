// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/text_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dsaug/errors.hpp"

namespace dsaug {

namespace {

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon: " + path);
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected `word<TAB>phones`");
    std::string word = line.substr(0, tab);
    std::istringstream rest(line.substr(tab + 1));
    std::vector<std::string> phones;
    std::string phone;
    while (rest >> phone) phones.push_back(phone);
    if (word.empty() || phones.empty())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": empty word or phone list");
    if (!entries.emplace(word, std::move(phones)).second)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": duplicate word '" + word + "'");
  }
  return from_entries(entries);
}

Lexicon Lexicon::from_entries(
    const std::map<std::string, std::vector<std::string>>& entries) {
  Lexicon lex;
  lex.entries_ = entries;
  for (const auto& [word, phones] : lex.entries_) {
    if (phones.empty())
      throw DataError("lexicon entry '" + word + "' has no phones");
    for (const auto& p : phones)
      if (p == kPausePhone)
        throw DataError("lexicon entry '" + word + "' contains reserved '" +
                        kPausePhone + "'");
  }
  lex.build_inventory();
  return lex;
}

void Lexicon::build_inventory() {
  inventory_.clear();
  phone_ids_.clear();
  inventory_.push_back(kPausePhone);
  phone_ids_[kPausePhone] = 0;
  for (const auto& [_, phones] : entries_) {
    for (const auto& p : phones) {
      if (!phone_ids_.count(p)) {
        phone_ids_[p] = int(inventory_.size());
        inventory_.push_back(p);
      }
    }
  }
}

const std::vector<std::string>& Lexicon::phones_of(const std::string& word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    throw DataError("word not in lexicon: '" + word + "'");
  return it->second;
}

bool Lexicon::contains(const std::string& word) const {
  return entries_.count(word) != 0;
}

int Lexicon::phone_id(const std::string& phone) const {
  auto it = phone_ids_.find(phone);
  if (it == phone_ids_.end())
    throw DataError("phone not in inventory: '" + phone + "'");
  return it->second;
}

void PhraseSpec::validate() const {
  if (phones.size() != word_of_phone.size())
    throw InternalError("PhraseSpec: phones/word_of_phone length mismatch");
  if (n_words < 1) throw InternalError("PhraseSpec: n_words must be >= 1");
  int last = -1;
  std::set<int> seen;
  for (std::size_t i = 0; i < word_of_phone.size(); ++i) {
    int w = word_of_phone[i];
    if (w == -1) {
      // A pause must sit strictly between phones of two distinct words.
      if (i == 0 || i + 1 == word_of_phone.size())
        throw InternalError("PhraseSpec: pause phone at sequence edge");
      int before = -1, after = -1;
      for (std::size_t j = i; j-- > 0;)
        if (word_of_phone[j] >= 0) { before = word_of_phone[j]; break; }
      for (std::size_t j = i + 1; j < word_of_phone.size(); ++j)
        if (word_of_phone[j] >= 0) { after = word_of_phone[j]; break; }
      if (before < 0 || after < 0 || before == after)
        throw InternalError("PhraseSpec: pause phone not between two words");
      continue;
    }
    if (w < last) throw InternalError("PhraseSpec: word indices decrease");
    last = w;
    seen.insert(w);
  }
  if (int(seen.size()) != n_words || (n_words > 0 && (*seen.begin() != 0 ||
                                                      *seen.rbegin() != n_words - 1)))
    throw InternalError("PhraseSpec: word indices must cover 0..n_words-1");
}

std::vector<std::string> tokenize(const std::string& transcript) {
  std::istringstream in(transcript);
  std::vector<std::string> tokens;
  std::string raw;
  while (in >> raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && is_ascii_punct(raw[b])) ++b;
    while (e > b && is_ascii_punct(raw[e - 1])) --e;
    if (b == e) continue;
    std::string word = raw.substr(b, e - b);
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
      return char(std::tolower(c));
    });
    tokens.push_back(word);
  }
  return tokens;
}

PhraseSpec phonemize(const std::string& transcript, const Lexicon& lexicon) {
  const auto words = tokenize(transcript);
  if (words.empty())
    throw DataError("transcript is empty after tokenization: '" + transcript + "'");
  PhraseSpec spec;
  spec.n_words = int(words.size());
  for (int w = 0; w < int(words.size()); ++w) {
    for (const auto& phone : lexicon.phones_of(words[w])) {
      spec.phones.push_back(lexicon.phone_id(phone));
      spec.word_of_phone.push_back(w);
    }
  }
  spec.validate();
  return spec;
}

int pause_slots(const PhraseSpec& spec) { return spec.n_words - 1; }

PhraseSpec insert_pauses(const PhraseSpec& spec, const std::set<int>& slots,
                         const Lexicon& lexicon) {
  const int n_slots = pause_slots(spec);
  for (int slot : slots) {
    if (slot < 0 || slot >= n_slots)
      throw DataError("pause slot " + std::to_string(slot) +
                      " out of range 0.." + std::to_string(n_slots - 1));
    if (spec.pause_slots_used.count(slot))
      throw DataError("pause slot " + std::to_string(slot) + " already used");
  }
  const int sp_id = lexicon.phone_id(kPausePhone);
  PhraseSpec out;
  out.n_words = spec.n_words;
  out.pause_slots_used = spec.pause_slots_used;
  out.pause_slots_used.insert(slots.begin(), slots.end());
  for (std::size_t i = 0; i < spec.phones.size(); ++i) {
    out.phones.push_back(spec.phones[i]);
    out.word_of_phone.push_back(spec.word_of_phone[i]);
    // Slot w is the boundary after the last phone of word w.
    int w = spec.word_of_phone[i];
    if (w >= 0 && w < n_slots && slots.count(w) &&
        (i + 1 == spec.phones.size() || spec.word_of_phone[i + 1] != w)) {
      out.phones.push_back(sp_id);
      out.word_of_phone.push_back(-1);
    }
  }
  out.validate();
  return out;
}

void write_lexicon(const Lexicon& lexicon, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InternalError("cannot write lexicon: " + path);
  for (const auto& [word, phones] : lexicon.entries()) {
    out << word << '\t';
    for (std::size_t i = 0; i < phones.size(); ++i)
      out << (i ? " " : "") << phones[i];
    out << '\n';
  }
}

}  // namespace dsaug
