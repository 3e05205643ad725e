#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixprobe/config.hpp"
#include "mixprobe/game.hpp"

namespace mixprobe {

// On-disk dataset layout (one directory):
//   manifest.json           vocabulary, link map, split sizes, config
//   {split}.jsonl           one sample per line: tokens, label, meta
//   ledger_{split}.jsonl    per-sample audit data (tracked messages and
//                           delivery entropies), line-aligned with {split}.jsonl
// Sequences are stored without the classification marker; its id is in the
// manifest as cls_token.
inline constexpr const char* kDatasetFormat = "mixprobe-dataset/1";
inline constexpr std::array<const char*, 3> kSplitNames{"train", "validation", "test"};

struct DatasetManifest {
  std::string format = kDatasetFormat;
  std::string config_hash;
  std::map<std::string, std::string> config;
  std::uint64_t master_seed = 0;
  std::uint32_t vocab_size = 0;
  std::uint32_t cls_token = 0;
  std::size_t sequence_length = 0;
  std::size_t train = 0, validation = 0, test = 0;
};

struct LoadedDataset {
  DatasetManifest manifest;
  Dataset samples;
};

// Writes the directory (created if missing). Output bytes depend only on the
// config and the samples.
void write_dataset(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const Topology& topology, const Dataset& dataset);

// Throws std::runtime_error on missing files or malformed content.
LoadedDataset read_dataset(const std::filesystem::path& dir);
DatasetManifest read_manifest(const std::filesystem::path& dir);

// Samples of one split ("train", "validation", "test"), or all of them in
// split order for "all".
std::vector<GameInstance> select_split(const Dataset& dataset, const std::string& split);

// Serialization of a single sample, exposed for tests.
std::string sample_json(const GameInstance& game, const std::string& config_hash);
std::string ledger_json(const GameInstance& game);

// Writes bytes to a file, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Human-readable link map: one entry per link id.
std::string link_label(const Endpoint& e);

}  // namespace mixprobe
