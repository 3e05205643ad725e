#include "mixprobe/distribution.hpp"

#include <algorithm>
#include <cmath>

namespace mixprobe {

SenderDistribution::SenderDistribution(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& e : entries) {
    if (e.second < 0.0 || !std::isfinite(e.second))
      throw std::invalid_argument("sender distribution: negative or non-finite mass");
    if (e.second == 0.0) continue;
    if (!entries_.empty() && entries_.back().first == e.first)
      entries_.back().second += e.second;
    else
      entries_.push_back(e);
  }
}

SenderDistribution SenderDistribution::point_mass(UserId user) {
  SenderDistribution d;
  d.entries_.emplace_back(user, 1.0);
  return d;
}

SenderDistribution SenderDistribution::mixture(
    std::span<const double> weights, std::span<const SenderDistribution* const> parts) {
  if (weights.size() != parts.size())
    throw std::invalid_argument("mixture: weight/part count mismatch");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (!(wsum > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");

  std::vector<Entry> acc;
  std::size_t n = 0;
  for (const auto* p : parts) n += p->entries_.size();
  acc.reserve(n);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double w = weights[i] / wsum;
    for (const auto& [u, p] : parts[i]->entries_) acc.emplace_back(u, w * p);
  }
  return SenderDistribution(std::move(acc));
}

double SenderDistribution::probability(UserId user) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), user,
                             [](const Entry& e, UserId u) { return e.first < u; });
  return (it != entries_.end() && it->first == user) ? it->second : 0.0;
}

double SenderDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

bool SenderDistribution::is_normalized(double tol) const {
  return !entries_.empty() && std::abs(total() - 1.0) <= tol;
}

std::size_t SenderDistribution::support_size() const { return entries_.size(); }

}  // namespace mixprobe
