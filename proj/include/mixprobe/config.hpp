#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixprobe/game.hpp"
#include "mixprobe/mix_node.hpp"

namespace mixprobe {

// Declarative experiment description. Text form is one `key = value` per
// line; `#` starts a comment. Lists are comma separated, and integer/real
// lists also accept `first:last:step` ranges.
struct ExperimentConfig {
  // population
  std::size_t users = 100;
  double rate = 0.01;

  // mix nodes
  StrategyKind strategy = StrategyKind::Threshold;
  std::uint32_t threshold = 100;
  std::uint32_t pool = 0;
  double lambda = 20.0;
  std::vector<std::size_t> topology{1};                       // nodes per layer
  std::vector<std::pair<std::size_t, std::size_t>> corrupt;   // (layer, slot)

  // game / dataset
  std::size_t length = 4096;
  std::vector<std::size_t> mask_lengths{4096, 2048, 1024, 512, 256};
  std::size_t samples = 1000;
  SplitRatios split;
  bool strict = false;
  std::int64_t burn_in = kBurnInBase;
  std::int64_t burn_in_jitter = kBurnInJitterMax;
  std::string eval_split = "test";

  // simulate command
  double duration = 10000.0;

  // sweep command
  std::vector<std::uint32_t> sweep_thresholds{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<std::uint32_t> sweep_pools{0, 10};
  std::vector<double> sweep_lambdas{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::size_t sweep_rounds = 200;
  std::size_t sweep_length = 2048;
  double latency_duration = 20000.0;

  std::uint64_t seed = 1;
  // Worker count; 0 = hardware concurrency. Never affects outputs.
  unsigned threads = 0;

  // Throws ConfigError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  void load_text(std::string_view text);
  void load_file(const std::filesystem::path& path);

  // Cross-field checks; throws ConfigError.
  void validate() const;

  // Every output-relevant key in canonical form, sorted by key.
  std::map<std::string, std::string> entries() const;
  std::string canonical() const;
  // 16 hex digits of FNV-1a over canonical().
  std::string hash() const;

  MixStrategy mix_strategy() const;
  std::vector<std::vector<NodeConfig>> layers(const MixStrategy& strategy) const;
  GameConfig game_config() const;
  GameConfig game_config(const MixStrategy& strategy, std::size_t observation_length) const;
};

std::string format_double(double v);

}  // namespace mixprobe
