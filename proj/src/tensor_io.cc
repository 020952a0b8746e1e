/* Copyright 2026 The asymdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "asymdet/tensor_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "asymdet/error.h"

namespace asymdet {
namespace {

constexpr char kMagic[4] = {'A', 'S', 'Y', 'T'};
constexpr std::size_t kHeaderSize = 4 + 4 * 4;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const Tensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * t.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  PutU32(out, kTensorFormatVersion);
  PutU32(out, static_cast<std::uint32_t>(t.channels()));
  PutU32(out, static_cast<std::uint32_t>(t.height()));
  PutU32(out, static_cast<std::uint32_t>(t.width()));
  for (double v : t.data()) {
    PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

Tensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kParse, "tensor: missing ASYT header");
  }
  const std::uint32_t version = GetU32(bytes, 4);
  if (version != kTensorFormatVersion) {
    throw Error(ErrorKind::kParse,
                "tensor: unsupported format version " + std::to_string(version));
  }
  const std::size_t c = GetU32(bytes, 8);
  const std::size_t h = GetU32(bytes, 12);
  const std::size_t w = GetU32(bytes, 16);
  const std::size_t expected = kHeaderSize + 4 * c * h * w;
  if (bytes.size() != expected) {
    throw ShapeError("tensor payload bytes", std::to_string(expected),
                     std::to_string(bytes.size()));
  }
  std::vector<double> data(c * h * w);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(GetU32(bytes, kHeaderSize + 4 * i));
  }
  return Tensor(c, h, w, std::move(data));
}

void SaveTensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = EncodeTensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

Tensor LoadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open tensor file: " + path.string());
  in.seekg(0, std::ios::end);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(in.tellg()));
  in.seekg(0, std::ios::beg);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw Error(ErrorKind::kIo, "read failed: " + path.string());
  try {
    return DecodeTensor(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace asymdet
