// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/melfile.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "dsaug/errors.hpp"

namespace dsaug {

namespace {

constexpr char kMagic[4] = {'M', 'E', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = char((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw DataError("corrupt MELB file: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[i])) << (8 * i);
  return v;
}

float get_f32(std::istream& in) {
  std::uint32_t bits = get_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void write_melb(const MelSpectrogram& mel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InternalError("cannot write MELB file: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, std::uint32_t(mel.data.rows()));
  put_u32(out, std::uint32_t(mel.data.cols()));
  put_f32(out, float(mel.frame_seconds));
  for (long r = 0; r < mel.data.rows(); ++r)
    for (long c = 0; c < mel.data.cols(); ++c)
      put_f32(out, float(mel.data(r, c)));
  if (!out) throw InternalError("write failed: " + path);
}

MelSpectrogram read_melb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open MELB file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("corrupt MELB file: bad magic: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw DataError("unsupported MELB version " + std::to_string(version));
  const std::uint32_t frames = get_u32(in);
  const std::uint32_t mels = get_u32(in);
  MelSpectrogram mel;
  mel.frame_seconds = double(get_f32(in));
  mel.data.resize(long(frames), long(mels));
  for (std::uint32_t r = 0; r < frames; ++r)
    for (std::uint32_t c = 0; c < mels; ++c) {
      float v = get_f32(in);
      if (!in) throw DataError("corrupt MELB file: truncated data: " + path);
      mel.data(long(r), long(c)) = double(v);
    }
  // Anything after the payload means the writer and header disagree.
  char extra;
  if (in.read(&extra, 1))
    throw DataError("corrupt MELB file: trailing bytes: " + path);
  return mel;
}

}  // namespace dsaug
