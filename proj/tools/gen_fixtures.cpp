// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

// Regenerates the bundled data/ fixtures (toy corpus, pause-statistics
// manifest). Run from the repository root: ./gen_fixtures <data-dir>

#include <cstdio>
#include <exception>

#include "dsaug/toy_corpus.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: gen_fixtures <data-dir>\n");
    return 1;
  }
  const std::string root = argv[1];
  try {
    dsaug::toy::write_corpus_files(root + "/toy_corpus");
    dsaug::write_pause_fixture(root + "/pause_fixture");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gen_fixtures: %s\n", e.what());
    return 3;
  }
  std::printf("fixtures written under %s\n", root.c_str());
  return 0;
}
