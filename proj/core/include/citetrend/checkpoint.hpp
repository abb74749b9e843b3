// Copyright 2026 The citetrend Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citetrend/experiments.hpp"
#include "citetrend/models.hpp"
#include "citetrend/tensor.hpp"

namespace citetrend {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Trained model plus what is needed to rebuild its inputs.
///
/// Binary layout, little endian: "CTRD", u32 version, then length-prefixed
/// strings kind / model config JSON / train config JSON, u64 config hash,
/// u64 seed, u64 parameter count and per parameter: name, u64 rows,
/// u64 cols, rows * cols raw doubles.
struct Checkpoint {
  std::string kind;
  nn::ModelConfig model;
  TrainConfig train;
  int target_year = 0;
  std::vector<std::pair<std::string, Tensor>> parameters;

  /// FNV-1a over the two config JSON blobs.
  std::uint64_t config_hash() const;
  bool operator==(const Checkpoint&) const = default;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

std::string to_json(const nn::ModelConfig& cfg);
nn::ModelConfig model_config_from_json(const std::string& text);
/// Includes target_year so evaluation can rebuild the same split.
std::string to_json(const TrainConfig& cfg, int target_year);
TrainConfig train_config_from_json(const std::string& text, int* target_year = nullptr);

Checkpoint capture(const nn::NodeClassifier& model, const TrainConfig& train, int target_year);
/// Copies parameters into `model`. Names and shapes must match.
void restore(const Checkpoint& ckpt, nn::NodeClassifier& model);
/// make_model followed by restore.
std::unique_ptr<nn::NodeClassifier> instantiate(const Checkpoint& ckpt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws CheckpointFormat on bad magic, version, hash or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace citetrend
