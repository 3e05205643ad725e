#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "mixprobe/distribution.hpp"
#include "mixprobe/mix_node.hpp"
#include "mixprobe/rng.hpp"
#include "mixprobe/types.hpp"

namespace mixprobe {

inline constexpr std::size_t kMinUsers = 3;

struct Population {
  std::vector<double> rates;     // messages per virtual second, each in [0, 1]
  std::vector<UserId> contacts;  // persistent contact of every user

  static Population uniform(std::size_t users, double rate);

  std::size_t size() const { return rates.size(); }
  double global_rate() const;

  // Throws ConfigError: N < 3, rate outside [0,1], R > 1, self-contact.
  void validate() const;
};

// Each user's contact drawn uniformly from the other users. Throws ConfigError
// for fewer than three users.
Population assign_contacts(Population population, std::uint64_t seed);

struct Endpoint {
  enum class Kind : std::uint8_t { User, Node };
  Kind kind = Kind::User;
  std::uint32_t index = 0;  // user id or global node index

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Link {
  LinkId id = 0;
  Endpoint from;
  Endpoint to;
  std::uint32_t layer = 0;  // 0 = user ingress, i = out of node layer i-1

  friend bool operator==(const Link&, const Link&) = default;
};

// Stratified mixnet. Link ids start at 1 and grow monotonically: user ->
// first layer, then layer -> layer, then last layer -> user. 0 is reserved
// for "no activity" and vocab_size() - 1 for the classification marker.
class Topology {
 public:
  // Throws ConfigError on empty layers or when an all-corrupt route exists.
  Topology(std::vector<std::vector<NodeConfig>> layers, std::size_t users);

  static Topology single(NodeConfig node, std::size_t users);

  std::size_t users() const { return users_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t layer_width(std::size_t layer) const { return layers_[layer].size(); }
  std::size_t node_count() const { return node_configs_.size(); }
  NodeIndex node_index(std::size_t layer, std::size_t slot) const;
  const NodeConfig& node_config(NodeIndex node) const { return node_configs_[node]; }
  std::size_t node_layer(NodeIndex node) const { return node_layer_[node]; }

  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_.at(id - 1); }
  LinkId user_to_node(UserId u, NodeIndex node) const;
  LinkId node_to_node(NodeIndex from, NodeIndex to) const;
  LinkId node_to_user(NodeIndex node, UserId u) const;

  std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(links_.size()) + 2; }
  std::uint32_t cls_token() const { return vocab_size() - 1; }

 private:
  std::vector<std::vector<NodeConfig>> layers_;
  std::vector<NodeConfig> node_configs_;
  std::vector<std::size_t> node_layer_;
  std::vector<std::size_t> layer_offset_;
  std::size_t users_;
  std::vector<LinkId> layer_base_;  // first link id of each link layer
  std::vector<Link> links_;
};

struct TraceEvent {
  VirtualTime time = 0.0;
  LinkId link = 0;
  MessageId message = 0;
};

struct MessageRecord {
  Message message;
  std::vector<NodeIndex> route;
  VirtualTime delivered = std::numeric_limits<double>::quiet_NaN();
  Posterior posterior;            // adversary posterior at delivery
  std::int64_t first_event = -1;  // index into Trace::events, -1 if unrecorded
  std::int64_t delivery_event = -1;

  bool is_delivered() const { return !std::isnan(delivered); }
};

// Recorded link transmissions plus the full message ledger of the run. The
// event list only carries what the wire shows; ground truth lives in ledger.
struct Trace {
  VirtualTime start = 0.0;
  VirtualTime end = 0.0;
  std::vector<TraceEvent> events;
  std::vector<MessageRecord> ledger;  // indexed by message id
};

struct UserBehaviour {
  double rate = 0.0;
  UserId recipient = 0;
};

// A running network: topology, warmed node states, in-flight messages, and
// user sending behaviour. Single-threaded; separate instances are independent.
class Network {
 public:
  Network(Topology topology, Population population, std::uint64_t seed);

  void set_behaviour(std::vector<UserBehaviour> behaviour);
  const std::vector<UserBehaviour>& behaviour() const { return behaviour_; }

  // Processes whole seconds [now, end). Stops early after the second during
  // which the recorded event count reached max_events (if set).
  void advance(VirtualTime end, std::optional<std::size_t> max_events = std::nullopt,
               std::vector<std::size_t>* occupancy = nullptr);

  // Starts (or stops) appending link events to the pending trace.
  void set_recording(bool on);
  Trace take_trace();

  VirtualTime now() const { return static_cast<VirtualTime>(clock_); }
  const Topology& topology() const { return topology_; }
  const Population& population() const { return population_; }
  const std::vector<MixNode>& nodes() const { return nodes_; }
  std::size_t occupancy() const;

  // Residual messages in node buffers (including scheduled Poisson releases).
  std::vector<Message> drain();

  std::uint64_t messages_sent() const { return ledger_.size(); }
  std::uint64_t messages_delivered() const { return delivered_; }

 private:
  struct Release {
    VirtualTime time;
    std::uint64_t seq;
    NodeIndex node;
    MessageId message;
    bool operator>(const Release& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void resample_next_send(UserId u);
  void send(UserId u, std::int64_t t);
  void arrive(MessageId id, std::size_t layer, Endpoint from, Posterior provenance,
              VirtualTime t);
  void forward(MessageId id, NodeIndex node, VirtualTime t, Posterior posterior);
  void record(VirtualTime t, LinkId link, MessageId id, bool first, bool delivery);
  void process_releases_before(VirtualTime t);

  Topology topology_;
  Population population_;
  std::vector<UserBehaviour> behaviour_;
  std::vector<MixNode> nodes_;
  Rng user_rng_;
  Rng route_rng_;
  std::vector<std::int64_t> next_send_;
  std::vector<Posterior> point_masses_;
  std::priority_queue<Release, std::vector<Release>, std::greater<>> releases_;
  std::uint64_t release_seq_ = 0;
  std::int64_t clock_ = 0;
  bool recording_ = false;
  VirtualTime record_start_ = 0.0;
  std::vector<TraceEvent> events_;
  std::vector<MessageRecord> ledger_;
  std::uint64_t delivered_ = 0;
};

inline constexpr std::int64_t kBurnInBase = 4096;
inline constexpr std::int64_t kBurnInJitterMax = 4096;

struct BurnInOptions {
  std::int64_t base = kBurnInBase;
  std::int64_t jitter_max = kBurnInJitterMax;  // extra U{1..jitter_max}; 0 disables
  bool track_occupancy = false;
};

struct BurnInResult {
  VirtualTime offset = 0.0;  // virtual time at which observation may start
  std::vector<std::size_t> occupancy;  // total buffered messages after each second
};

// Warms the network with background traffic. `silent` users send nothing
// during burn-in; their behaviour is restored afterwards.
BurnInResult run_burn_in(Network& network, std::span<const UserId> silent, std::uint64_t seed,
                         const BurnInOptions& options = {});

struct SimulationLimits {
  VirtualTime duration = 0.0;
  std::optional<std::size_t> max_events;
};

// Records `duration` seconds (or until max_events) of traffic. Throws
// ConfigError when duration <= 0.
Trace simulate(Network& network, const SimulationLimits& limits);

struct LatencyStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

// End-to-end latency over messages sent inside the trace window and
// delivered before it ended. Throws std::invalid_argument if there are none.
LatencyStats latency_stats(const Trace& trace);

}  // namespace mixprobe
