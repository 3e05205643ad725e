#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mixprobe/types.hpp"

namespace mixprobe {

// Sparse probability distribution over senders, sorted by user id.
class SenderDistribution {
 public:
  using Entry = std::pair<UserId, double>;

  SenderDistribution() = default;
  explicit SenderDistribution(std::vector<Entry> entries);

  static SenderDistribution point_mass(UserId user);

  // sum_i weights[i] * parts[i]; weights need not be normalized.
  static SenderDistribution mixture(std::span<const double> weights,
                                    std::span<const SenderDistribution* const> parts);

  double probability(UserId user) const;
  double total() const;
  bool is_normalized(double tol = 1e-9) const;
  std::size_t support_size() const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// Shared, immutable: a flush hands the same mixture to every output.
using Posterior = std::shared_ptr<const SenderDistribution>;

inline Posterior make_posterior(SenderDistribution d) {
  return std::make_shared<const SenderDistribution>(std::move(d));
}

}  // namespace mixprobe
