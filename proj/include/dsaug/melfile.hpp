// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_MELFILE_HPP
#define DSAUG_MELFILE_HPP

#include <string>

#include "dsaug/nn.hpp"

namespace dsaug {

struct MelSpectrogram {
  nn::Matrix data;  // frames x n_mels
  double frame_seconds = 256.0 / 22050.0;
};

// MELB container: magic "MELB", u32 version = 1, u32 n_frames, u32 n_mels,
// f32 frame_seconds, then n_frames * n_mels little-endian f32 values in
// row-major order. Total size is exactly 20 + 4 * frames * mels bytes.
void write_melb(const MelSpectrogram& mel, const std::string& path);
MelSpectrogram read_melb(const std::string& path);

}  // namespace dsaug

#endif  // DSAUG_MELFILE_HPP
