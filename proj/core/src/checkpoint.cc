// Copyright 2026 The Tidy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tidy/checkpoint.h"

#include <bit>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "tidy/error.h"
#include "tidy/scene_io.h"

namespace tidy {
namespace {

constexpr char kMagic[4] = {'T', 'D', 'Y', 'C'};
constexpr std::size_t kHeaderSize = 4 + 4 + 1 + 1 + 2 + 8;

template <class T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <class T>
T get_le(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorKind::kCorruptCheckpoint, why);
}

}  // namespace

std::string checkpoint_bytes(const ScorerModel& model) {
  validate(model);
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(model.encoder));
  put_le<std::uint8_t>(out, kBradleyTerryHead);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint64_t>(out, model.params.size());
  for (double v : model.params) {
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  put_le<std::uint32_t>(out, crc32_of(out));
  return out;
}

ScorerModel parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kHeaderSize + 4) corrupt("file too short");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) corrupt("bad magic");
  const std::size_t body = bytes.size() - 4;
  if (get_le<std::uint32_t>(bytes, body) != crc32_of(bytes.substr(0, body))) {
    corrupt("checksum mismatch");
  }
  if (get_le<std::uint32_t>(bytes, 4) != kCheckpointVersion) corrupt("unsupported version");
  const std::uint8_t encoder = get_le<std::uint8_t>(bytes, 8);
  if (encoder > 1) corrupt("unknown encoder tag");
  if (get_le<std::uint8_t>(bytes, 9) != kBradleyTerryHead) corrupt("unknown head tag");
  if (get_le<std::uint16_t>(bytes, 10) != 0) corrupt("reserved field not zero");
  const std::uint64_t count = get_le<std::uint64_t>(bytes, 12);

  ScorerModel model;
  model.encoder = static_cast<EncoderKind>(encoder);
  if (count != param_count(model.encoder)) corrupt("parameter count does not match encoder");
  if (body != kHeaderSize + 4 * count) corrupt("size does not match parameter count");
  model.params.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kHeaderSize + 4 * i));
    if (!std::isfinite(v)) corrupt("non-finite parameter");
    model.params.push_back(static_cast<double>(v));
  }
  return model;
}

void save_checkpoint(const ScorerModel& model, const std::filesystem::path& path) {
  write_file(path, checkpoint_bytes(model));
}

ScorerModel load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace tidy
