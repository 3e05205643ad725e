#include "mixprobe/mix_node.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mixprobe {

MixStrategy MixStrategy::make_threshold(std::uint32_t n) {
  MixStrategy s;
  s.kind = StrategyKind::Threshold;
  s.threshold = n;
  return s;
}

MixStrategy MixStrategy::make_pool(std::uint32_t n, std::uint32_t pool_count) {
  if (pool_count == 0) return make_threshold(n);
  MixStrategy s;
  s.kind = StrategyKind::Pool;
  s.threshold = n;
  s.pool_count = pool_count;
  return s;
}

MixStrategy MixStrategy::make_poisson(double mean_delay) {
  MixStrategy s;
  s.kind = StrategyKind::Poisson;
  s.threshold = 0;
  s.mean_delay = mean_delay;
  return s;
}

double MixStrategy::pool_ratio() const {
  return batching() ? static_cast<double>(pool_count) / threshold : 0.0;
}

void MixStrategy::validate() const {
  switch (kind) {
    case StrategyKind::Threshold:
    case StrategyKind::Pool:
      if (threshold == 0) throw ConfigError("threshold n must be positive");
      if (pool_count >= threshold)
        throw ConfigError("pool count must be smaller than the threshold");
      break;
    case StrategyKind::Poisson:
      if (!(mean_delay > 0.0) || !std::isfinite(mean_delay))
        throw ConfigError("Poisson mean delay must be a positive finite number");
      break;
  }
}

std::string MixStrategy::describe() const {
  char buf[64];
  switch (kind) {
    case StrategyKind::Threshold:
      std::snprintf(buf, sizeof buf, "threshold(%u)", threshold);
      break;
    case StrategyKind::Pool:
      std::snprintf(buf, sizeof buf, "pool(%u,%u)", threshold, pool_count);
      break;
    case StrategyKind::Poisson:
      std::snprintf(buf, sizeof buf, "poisson(%.17g)", mean_delay);
      break;
  }
  return buf;
}

bool operator==(const MixStrategy& a, const MixStrategy& b) {
  return a.kind == b.kind && a.threshold == b.threshold && a.pool_count == b.pool_count &&
         a.mean_delay == b.mean_delay;
}

SenderDistribution batch_posterior(std::span<const Posterior> provenance) {
  if (provenance.empty()) throw SimulationError("batch posterior of an empty batch");
  std::vector<const SenderDistribution*> parts;
  parts.reserve(provenance.size());
  for (const auto& p : provenance) {
    if (!p) throw SimulationError("buffered message without provenance");
    parts.push_back(p.get());
  }
  const std::vector<double> weights(parts.size(), 1.0);
  return SenderDistribution::mixture(weights, parts);
}

SenderDistribution poisson_posterior(std::span<const PoissonCandidate> candidates,
                                     VirtualTime release_time, double mean_delay) {
  // Density ratio exp(-(t - t_i)/lambda) / exp(-(t - t_max)/lambda), taken
  // relative to the latest feasible arrival so nothing underflows to zero.
  VirtualTime latest = -INFINITY;
  for (const auto& c : candidates)
    if (c.ingress <= release_time) latest = std::max(latest, c.ingress);
  if (!std::isfinite(latest))
    throw SimulationError("Poisson release with no feasible input candidate");

  std::vector<double> weights;
  std::vector<const SenderDistribution*> parts;
  for (const auto& c : candidates) {
    if (c.ingress > release_time) continue;
    if (!c.provenance) throw SimulationError("candidate without provenance");
    weights.push_back(std::exp((c.ingress - latest) / mean_delay));
    parts.push_back(c.provenance);
  }
  return SenderDistribution::mixture(weights, parts);
}

MixNode::MixNode(NodeConfig config, std::uint64_t seed) : config_(config), rng_(seed) {
  config_.strategy.validate();
}

std::vector<Egress> MixNode::ingest(const Message& msg, Posterior provenance, VirtualTime t) {
  ++ingested_;
  if (!config_.honest) {
    ++egressed_;
    return {Egress{msg, t, std::move(provenance)}};
  }

  if (config_.strategy.kind == StrategyKind::Poisson) {
    std::exponential_distribution<double> delay(1.0 / config_.strategy.mean_delay);
    const VirtualTime out = t + delay(rng_);
    buffer_.push_back(Held{msg, std::move(provenance), t});
    return {Egress{msg, out, nullptr}};
  }

  buffer_.push_back(Held{msg, std::move(provenance), t});
  if (buffer_.size() >= config_.strategy.threshold) return flush(t);
  return {};
}

std::vector<Egress> MixNode::flush(VirtualTime t) {
  std::vector<Posterior> prov;
  prov.reserve(buffer_.size());
  for (const auto& h : buffer_) prov.push_back(h.provenance);
  auto mixed = make_posterior(batch_posterior(prov));

  std::shuffle(buffer_.begin(), buffer_.end(), rng_);
  const std::size_t out_count = config_.strategy.flush_size();

  std::vector<Egress> out;
  out.reserve(out_count);
  for (std::size_t i = 0; i < out_count; ++i)
    out.push_back(Egress{buffer_[i].message, t, mixed});
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(out_count));
  for (auto& h : buffer_) h.provenance = mixed;

  egressed_ += out_count;
  return out;
}

Posterior MixNode::release(MessageId id, VirtualTime t) {
  if (config_.strategy.kind != StrategyKind::Poisson || !config_.honest)
    throw SimulationError("release() is only meaningful on honest Poisson nodes");
  auto it = std::find_if(buffer_.begin(), buffer_.end(),
                         [id](const Held& h) { return h.message.id == id; });
  if (it == buffer_.end()) throw SimulationError("release of a message that is not resident");

  std::vector<PoissonCandidate> cands;
  cands.reserve(buffer_.size());
  for (const auto& h : buffer_) cands.push_back(PoissonCandidate{h.arrived, h.provenance.get()});
  auto post = make_posterior(poisson_posterior(cands, t, config_.strategy.mean_delay));

  buffer_.erase(it);
  ++egressed_;
  return post;
}

std::vector<Message> MixNode::drain() {
  std::vector<Message> out;
  out.reserve(buffer_.size());
  for (const auto& h : buffer_) out.push_back(h.message);
  buffer_.clear();
  return out;
}

}  // namespace mixprobe
