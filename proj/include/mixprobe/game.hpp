#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mixprobe/encoding.hpp"
#include "mixprobe/traffic.hpp"

namespace mixprobe {

// Everything the challenger needs to stage one "One of Two" round.
struct GameConfig {
  std::size_t users = 100;
  double rate = 0.01;
  std::vector<std::vector<NodeConfig>> layers{{NodeConfig{MixStrategy::make_threshold(100), true}}};
  std::size_t observation_length = 4096;
  BurnInOptions burn_in;
  // Strict: nobody but the true suspect sends to the recipient.
  bool strict = false;

  Topology topology() const { return Topology(layers, users); }
  void validate() const;
};

// A message the auditor cares about: sent by a suspect or delivered to the
// recipient, with at least one event inside the observation.
struct TrackedMessage {
  std::int64_t ingress_pos = -1;  // token position of the user -> mix event
  std::int64_t egress_pos = -1;   // token position of the delivery event
  UserId sender = 0;
  UserId recipient = 0;
  double p0 = 0.0;  // delivery posterior mass on suspects[0]
  double p1 = 0.0;  // ... and on suspects[1]
  double entropy = 0.0;

  bool delivered_in_window() const { return egress_pos >= 0; }
};

struct GameInstance {
  std::uint64_t seed = 0;
  std::array<UserId, 2> suspects{};
  UserId recipient = 0;
  int bit = 0;  // 0: suspects[0] is the persistent sender
  TokenSequence observation;
  std::vector<TrackedMessage> tracked;
  // (token position, posterior entropy) of every delivery in the observation.
  std::vector<std::pair<std::int64_t, double>> delivery_entropy;

  UserId true_sender() const { return suspects[static_cast<std::size_t>(bit)]; }
  // True-sender -> recipient messages whose send event lies in the region.
  std::size_t messages_from_true_sender(const MaskRegion& region) const;
};

// One challenger round: pick suspects and recipient, flip b, burn in with the
// suspects silent, run the scenario, encode the observation.
GameInstance play_round(const GameConfig& config, std::uint64_t seed);

// Seed of round `index` under a master seed.
std::uint64_t round_seed(std::uint64_t master, std::uint64_t index);

// Rounds [first, first + count) in parallel; output order is by index.
std::vector<GameInstance> play_rounds(const GameConfig& config, std::uint64_t master,
                                      std::size_t first, std::size_t count, unsigned threads = 0);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct SplitSizes {
  std::size_t train = 0, validation = 0, test = 0;
};

// Throws ConfigError for n < 3 or ratios that do not sum to 1.
SplitSizes split_sizes(std::size_t n_samples, const SplitRatios& ratios);

struct Dataset {
  std::vector<GameInstance> train, validation, test;
};

Dataset build_dataset(const GameConfig& config, std::size_t n_samples, const SplitRatios& ratios,
                      std::uint64_t seed, unsigned threads = 0);

// Fraction of correct guesses. Throws std::invalid_argument on length
// mismatch or empty input.
double score_adversary(std::span<const int> predictions, std::span<const int> labels);

// Runs fn(i) for i in [0, count) across worker threads, rethrowing the first
// failure.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace mixprobe
