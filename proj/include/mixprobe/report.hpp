#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixprobe/game.hpp"
#include "mixprobe/stats.hpp"

namespace mixprobe {

// Region of a stored sequence that stays visible when evaluating at
// `mask_length` observations. Deterministic in the sample seed, so every
// evaluation of the same sample at the same length sees the same region.
MaskRegion evaluation_region(const GameInstance& game, std::size_t mask_length);

struct SampleEvaluation {
  int guess = 0;
  int label = 0;
  std::size_t messages_from_true_sender = 0;
  std::size_t evidence = 0;  // deliveries to the recipient inside the region
  // Mean per-message epsilon over those deliveries; empty if none counted.
  std::optional<double> likelihood_diff;
  std::size_t likelihood_excluded = 0;  // deliveries with p0 = p1 = 0
  // Mean delivery entropy over suspect-sent messages / over all deliveries.
  std::optional<double> entropy_suspects;
  std::optional<double> entropy_all;
};

SampleEvaluation evaluate_sample(const GameInstance& game, std::size_t mask_length);

struct MetricsRow {
  std::size_t observations = 0;
  std::size_t samples = 0;
  double messages_from_true_sender = 0.0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  stats::Interval accuracy_ci;
  double accuracy_p_previous = 1.0;
  bool accuracy_starred = false;
  double likelihood_diff = 0.0;
  std::size_t likelihood_samples = 0;
  std::size_t likelihood_excluded = 0;
  double likelihood_p_previous = 1.0;
  bool likelihood_starred = false;
  double entropy_suspects = 0.0;
  bool entropy_suspects_starred = false;
  double entropy_all = 0.0;
  bool entropy_all_starred = false;

  // Per-sample values behind the means.
  std::vector<double> correct_samples;
  std::vector<double> likelihood_diff_samples;
  std::vector<double> entropy_suspect_samples;
  std::vector<double> entropy_all_samples;
};

struct MetricsReport {
  std::string config_hash;
  std::string split;
  std::vector<MetricsRow> rows;  // in the order of the requested lengths
};

// Rows for each mask length; significance stars compare adjacent rows.
MetricsReport compute_report(std::span<const GameInstance> samples,
                             std::span<const std::size_t> mask_lengths,
                             const std::string& config_hash, const std::string& split,
                             unsigned threads = 0);

std::string metrics_csv(const MetricsReport& report);
std::string metrics_table(const MetricsReport& report);

// One configuration of the anonymity/latency sweep.
struct SweepPoint {
  std::string series;  // "threshold", "pool" or "poisson"
  MixStrategy strategy;
  double latency_x = 0.0;  // n / 2 for batching strategies, lambda for Poisson
  LatencyStats latency;
  std::size_t rounds = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  stats::Interval accuracy_ci;
};

std::string sweep_accuracy_csv(std::span<const SweepPoint> points);
std::string sweep_latency_csv(std::span<const SweepPoint> points);

}  // namespace mixprobe
