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

#ifndef TIDY_CHECKPOINT_H_
#define TIDY_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tidy/scorer.h"

namespace tidy {

// Little-endian layout:
//   "TDYC" | u32 version = 1 | u8 encoder (0 features, 1 cnn) |
//   u8 head (0 bradley-terry) | u16 reserved = 0 | u64 param_count |
//   f32[param_count] | u32 CRC32 of all preceding bytes
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint8_t kBradleyTerryHead = 0;

// Parameters are stored as f32; a model whose values are float-representable
// round-trips exactly.
std::string checkpoint_bytes(const ScorerModel& model);

// Throws kCorruptCheckpoint on any framing, tag, size or checksum problem.
ScorerModel parse_checkpoint(std::string_view bytes);

void save_checkpoint(const ScorerModel& model, const std::filesystem::path& path);
ScorerModel load_checkpoint(const std::filesystem::path& path);

}  // namespace tidy

#endif  // TIDY_CHECKPOINT_H_
