#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixprobe/distribution.hpp"
#include "mixprobe/mix_node.hpp"

namespace mixprobe::metrics {

// Floor applied to suspect probabilities before taking log ratios.
inline constexpr double kProbabilityFloor = 1e-6;

// Shannon entropy in bits, 0 log 0 = 0. Throws std::invalid_argument when the
// masses do not sum to 1 within 1e-9.
double entropy_bits(const SenderDistribution& posterior);
double entropy_bits(std::span<const double> probabilities);

// Size of a uniform anonymity set with the given entropy.
double effective_anonymity_set(double bits);

// |ln(p0 / p1)| with both probabilities floored at kProbabilityFloor.
// std::nullopt when both raw probabilities are zero (no information about
// either suspect); such messages are excluded from averages and counted.
std::optional<double> likelihood_diff(double p0, double p1);
std::optional<double> likelihood_diff(const SenderDistribution& posterior, UserId u0, UserId u1);

double total_variation(const SenderDistribution& a, const SenderDistribution& b);

struct MetricGroup {
  std::string key;
  std::vector<double> samples;
};

struct GroupSummary {
  std::string key;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double p_previous = 1.0;      // Welch p-value against the previous group
  bool differs_previous = false;
  bool differs_next = false;
  // Significantly different from every adjacent group.
  bool starred = false;
};

// Per-group means with adjacent-group Welch tests at level alpha. Throws
// std::invalid_argument for groups with fewer than two samples.
std::vector<GroupSummary> aggregate(std::span<const MetricGroup> groups, double alpha = 0.05);

// A small single-node scenario with a known sequence of arrivals.
struct OracleFixture {
  MixStrategy strategy;
  std::vector<std::pair<UserId, VirtualTime>> arrivals;  // (sender, ingress time)
  std::size_t target_egress = 0;       // batching: index of the observed output
  VirtualTime observed_release = 0.0;  // Poisson: observed release time
  double release_window = 0.0;         // Poisson: accepted window [t, t + w)
};

inline constexpr std::size_t kOracleMaxThreshold = 6;
inline constexpr std::size_t kOracleMaxUsers = 6;

struct OracleResult {
  SenderDistribution posterior;
  std::size_t accepted = 0;
};

// Empirical sender distribution of the observed output over n_trials
// independent ground-truth resimulations of the fixture. Throws
// std::invalid_argument for fixtures beyond the small-instance limits and
// std::runtime_error when too few trials were accepted to reach
// `tolerance` at 3 sigma.
OracleResult monte_carlo_posterior_oracle(const OracleFixture& fixture, std::size_t n_trials,
                                          std::uint64_t seed, double tolerance = 0.02);

// The analytic posterior for the same observed output, through the node's
// provenance recursion.
SenderDistribution fixture_posterior(const OracleFixture& fixture);

}  // namespace mixprobe::metrics
