#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixprobe/distribution.hpp"
#include "mixprobe/rng.hpp"
#include "mixprobe/types.hpp"

namespace mixprobe {

enum class StrategyKind { Threshold, Pool, Poisson };

// Threshold(n) is Pool(n, 0); the factories canonicalize to keep the two
// spellings interchangeable (same describe() string, same derived seeds).
struct MixStrategy {
  StrategyKind kind = StrategyKind::Threshold;
  std::uint32_t threshold = 1;   // n
  std::uint32_t pool_count = 0;  // messages retained per flush
  double mean_delay = 0.0;       // lambda, Poisson only

  static MixStrategy make_threshold(std::uint32_t n);
  static MixStrategy make_pool(std::uint32_t n, std::uint32_t pool_count);
  static MixStrategy make_poisson(double mean_delay);

  bool batching() const { return kind != StrategyKind::Poisson; }
  std::uint32_t flush_size() const { return threshold - pool_count; }
  double pool_ratio() const;

  // Throws ConfigError when the parameters break the strategy invariants.
  void validate() const;

  // Canonical label, e.g. "threshold(100)", "pool(70,10)", "poisson(20)".
  std::string describe() const;
};

bool operator==(const MixStrategy& a, const MixStrategy& b);

struct NodeConfig {
  MixStrategy strategy;
  bool honest = true;
};

struct Egress {
  Message message;
  VirtualTime time = 0.0;
  Posterior posterior;  // null for a Poisson ingest until release()
};

struct PoissonCandidate {
  VirtualTime ingress = 0.0;
  const SenderDistribution* provenance = nullptr;
};

// Output posterior of a batching flush: the uniform mixture of the
// provenance of every buffered item.
SenderDistribution batch_posterior(std::span<const Posterior> provenance);

// Output posterior of a Poisson release at `release_time`: candidates are
// weighted by the exponential density of their implied delay. Throws
// SimulationError when no candidate could have produced the release.
SenderDistribution poisson_posterior(std::span<const PoissonCandidate> candidates,
                                     VirtualTime release_time, double mean_delay);

// One mix node. Deterministic given (config, seed, input schedule).
class MixNode {
 public:
  MixNode(NodeConfig config, std::uint64_t seed);

  // Threshold/Pool: buffers the message and, when the buffer reaches n,
  // flushes n - pool_count uniformly chosen messages at time t.
  // Poisson: returns the message with its sampled release time and a null
  // posterior; the caller must call release() when that time comes.
  // Corrupt nodes forward immediately, FIFO, provenance untouched.
  std::vector<Egress> ingest(const Message& msg, Posterior provenance, VirtualTime t);

  // Poisson only: removes a resident message and returns its posterior.
  Posterior release(MessageId id, VirtualTime t);

  // Everything still held (buffer, pool, or in flight). Empties the node.
  std::vector<Message> drain();

  std::size_t occupancy() const { return buffer_.size(); }
  std::uint64_t ingested() const { return ingested_; }
  std::uint64_t egressed() const { return egressed_; }
  const NodeConfig& config() const { return config_; }

 private:
  struct Held {
    Message message;
    Posterior provenance;
    VirtualTime arrived = 0.0;
  };

  std::vector<Egress> flush(VirtualTime t);

  NodeConfig config_;
  Rng rng_;
  std::vector<Held> buffer_;
  std::uint64_t ingested_ = 0;
  std::uint64_t egressed_ = 0;
};

}  // namespace mixprobe
