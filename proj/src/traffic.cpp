#include "mixprobe/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixprobe {

Population Population::uniform(std::size_t users, double rate) {
  Population p;
  p.rates.assign(users, rate);
  p.contacts.resize(users);
  // Placeholder ring; callers normally replace it via assign_contacts().
  for (std::size_t u = 0; u < users; ++u)
    p.contacts[u] = static_cast<UserId>((u + 1) % std::max<std::size_t>(users, 1));
  return p;
}

double Population::global_rate() const {
  double r = 0.0;
  for (double x : rates) r += x;
  return r;
}

void Population::validate() const {
  if (size() < kMinUsers) throw ConfigError("population needs at least 3 users");
  if (contacts.size() != rates.size()) throw ConfigError("contact map size mismatch");
  for (std::size_t u = 0; u < size(); ++u) {
    if (!(rates[u] >= 0.0 && rates[u] <= 1.0))
      throw ConfigError("per-user rate must lie in [0, 1]");
    if (contacts[u] >= size()) throw ConfigError("contact out of range");
    if (contacts[u] == u) throw ConfigError("a user cannot be its own contact");
  }
  if (global_rate() > 1.0 + 1e-9) throw ConfigError("global sending rate exceeds 1");
}

Population assign_contacts(Population population, std::uint64_t seed) {
  const std::size_t n = population.size();
  if (n < kMinUsers) throw ConfigError("population needs at least 3 users");
  Rng rng(derive_seed(seed, "contacts"));
  std::uniform_int_distribution<UserId> pick(0, static_cast<UserId>(n - 2));
  population.contacts.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    UserId c = pick(rng);
    if (c >= u) ++c;  // skip self
    population.contacts[u] = c;
  }
  return population;
}

Topology::Topology(std::vector<std::vector<NodeConfig>> layers, std::size_t users)
    : layers_(std::move(layers)), users_(users) {
  if (layers_.empty()) throw ConfigError("topology needs at least one layer");
  bool some_layer_all_honest = false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].empty()) throw ConfigError("topology layer without nodes");
    layer_offset_.push_back(node_configs_.size());
    bool all_honest = true;
    for (const auto& cfg : layers_[l]) {
      cfg.strategy.validate();
      all_honest = all_honest && cfg.honest;
      node_configs_.push_back(cfg);
      node_layer_.push_back(l);
    }
    some_layer_all_honest = some_layer_all_honest || all_honest;
  }
  // A route picks one node per layer, so an all-corrupt route exists unless
  // some layer is entirely honest.
  if (!some_layer_all_honest)
    throw ConfigError("anytrust violated: a route through only corrupt nodes exists");

  LinkId next = 1;
  auto add = [&](Endpoint from, Endpoint to, std::uint32_t layer) {
    links_.push_back(Link{next++, from, to, layer});
  };
  layer_base_.push_back(next);
  for (std::size_t u = 0; u < users_; ++u)
    for (std::size_t s = 0; s < layers_[0].size(); ++s)
      add({Endpoint::Kind::User, static_cast<std::uint32_t>(u)},
          {Endpoint::Kind::Node, static_cast<std::uint32_t>(node_index(0, s))}, 0);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    layer_base_.push_back(next);
    for (std::size_t a = 0; a < layers_[l].size(); ++a)
      for (std::size_t b = 0; b < layers_[l + 1].size(); ++b)
        add({Endpoint::Kind::Node, static_cast<std::uint32_t>(node_index(l, a))},
            {Endpoint::Kind::Node, static_cast<std::uint32_t>(node_index(l + 1, b))},
            static_cast<std::uint32_t>(l + 1));
  }
  layer_base_.push_back(next);
  const std::size_t last = layers_.size() - 1;
  for (std::size_t s = 0; s < layers_[last].size(); ++s)
    for (std::size_t u = 0; u < users_; ++u)
      add({Endpoint::Kind::Node, static_cast<std::uint32_t>(node_index(last, s))},
          {Endpoint::Kind::User, static_cast<std::uint32_t>(u)},
          static_cast<std::uint32_t>(layers_.size()));
}

Topology Topology::single(NodeConfig node, std::size_t users) {
  return Topology({{node}}, users);
}

NodeIndex Topology::node_index(std::size_t layer, std::size_t slot) const {
  return static_cast<NodeIndex>(layer_offset_.at(layer) + slot);
}

LinkId Topology::user_to_node(UserId u, NodeIndex node) const {
  const std::size_t slot = node - layer_offset_[0];
  return layer_base_[0] + static_cast<LinkId>(u * layers_[0].size() + slot);
}

LinkId Topology::node_to_node(NodeIndex from, NodeIndex to) const {
  const std::size_t l = node_layer_[from];
  const std::size_t a = from - layer_offset_[l];
  const std::size_t b = to - layer_offset_[l + 1];
  return layer_base_[l + 1] + static_cast<LinkId>(a * layers_[l + 1].size() + b);
}

LinkId Topology::node_to_user(NodeIndex node, UserId u) const {
  const std::size_t last = layers_.size() - 1;
  const std::size_t slot = node - layer_offset_[last];
  return layer_base_.back() + static_cast<LinkId>(slot * users_ + u);
}

Network::Network(Topology topology, Population population, std::uint64_t seed)
    : topology_(std::move(topology)),
      population_(std::move(population)),
      user_rng_(derive_seed(seed, "users")),
      route_rng_(derive_seed(seed, "routes")) {
  population_.validate();
  if (population_.size() != topology_.users())
    throw ConfigError("topology and population disagree on the user count");
  nodes_.reserve(topology_.node_count());
  for (NodeIndex i = 0; i < topology_.node_count(); ++i)
    nodes_.emplace_back(topology_.node_config(i),
                        derive_seed(seed, "node/" + std::to_string(i)));
  point_masses_.reserve(population_.size());
  for (UserId u = 0; u < population_.size(); ++u)
    point_masses_.push_back(make_posterior(SenderDistribution::point_mass(u)));

  std::vector<UserBehaviour> b(population_.size());
  for (UserId u = 0; u < population_.size(); ++u)
    b[u] = UserBehaviour{population_.rates[u], population_.contacts[u]};
  set_behaviour(std::move(b));
}

void Network::set_behaviour(std::vector<UserBehaviour> behaviour) {
  if (behaviour.size() != population_.size())
    throw ConfigError("behaviour must cover every user");
  for (UserId u = 0; u < behaviour.size(); ++u) {
    if (!(behaviour[u].rate >= 0.0 && behaviour[u].rate <= 1.0))
      throw ConfigError("sending rate must lie in [0, 1]");
    if (behaviour[u].rate > 0.0 &&
        (behaviour[u].recipient == u || behaviour[u].recipient >= population_.size()))
      throw ConfigError("invalid recipient in behaviour");
  }
  behaviour_ = std::move(behaviour);
  next_send_.assign(behaviour_.size(), 0);
  // Bernoulli sending is memoryless, so redrawing from "now" is exact.
  for (UserId u = 0; u < behaviour_.size(); ++u) {
    next_send_[u] = clock_ - 1;
    resample_next_send(u);
  }
}

void Network::resample_next_send(UserId u) {
  const double r = behaviour_[u].rate;
  if (r <= 0.0) {
    next_send_[u] = std::numeric_limits<std::int64_t>::max();
    return;
  }
  std::int64_t gap = 0;
  if (r < 1.0) {
    std::geometric_distribution<std::int64_t> geo(r);
    gap = geo(user_rng_);
  }
  next_send_[u] = next_send_[u] + 1 + gap;
}

void Network::set_recording(bool on) {
  recording_ = on;
  if (on) record_start_ = now();
}

void Network::advance(VirtualTime end, std::optional<std::size_t> max_events,
                      std::vector<std::size_t>* occupancy) {
  const auto end_sec = static_cast<std::int64_t>(std::ceil(end));
  while (clock_ < end_sec) {
    const std::int64_t t = clock_;
    for (UserId u = 0; u < next_send_.size(); ++u) {
      if (next_send_[u] != t) continue;
      send(u, t);
      resample_next_send(u);
    }
    clock_ = t + 1;
    process_releases_before(static_cast<VirtualTime>(clock_));
    if (occupancy) occupancy->push_back(this->occupancy());
    if (max_events && events_.size() >= *max_events) break;
  }
}

void Network::send(UserId u, std::int64_t t) {
  const auto id = static_cast<MessageId>(ledger_.size());
  MessageRecord rec;
  rec.message = Message{id, u, behaviour_[u].recipient, static_cast<VirtualTime>(t)};
  rec.route.reserve(topology_.layer_count());
  for (std::size_t l = 0; l < topology_.layer_count(); ++l) {
    std::size_t slot = 0;
    if (topology_.layer_width(l) > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, topology_.layer_width(l) - 1);
      slot = pick(route_rng_);
    }
    rec.route.push_back(topology_.node_index(l, slot));
  }
  ledger_.push_back(std::move(rec));
  arrive(id, 0, Endpoint{Endpoint::Kind::User, u}, point_masses_[u],
         static_cast<VirtualTime>(t));
}

void Network::arrive(MessageId id, std::size_t layer, Endpoint from, Posterior provenance,
                     VirtualTime t) {
  const NodeIndex node = ledger_[id].route[layer];
  const LinkId link = from.kind == Endpoint::Kind::User
                          ? topology_.user_to_node(from.index, node)
                          : topology_.node_to_node(from.index, node);
  record(t, link, id, layer == 0, false);

  auto out = nodes_[node].ingest(ledger_[id].message, std::move(provenance), t);
  for (auto& e : out) {
    if (!e.posterior)
      releases_.push(Release{e.time, release_seq_++, node, e.message.id});
    else
      forward(e.message.id, node, e.time, std::move(e.posterior));
  }
}

void Network::forward(MessageId id, NodeIndex node, VirtualTime t, Posterior posterior) {
  const std::size_t layer = topology_.node_layer(node);
  if (layer + 1 < topology_.layer_count()) {
    arrive(id, layer + 1, Endpoint{Endpoint::Kind::Node, node}, std::move(posterior), t);
    return;
  }
  auto& rec = ledger_[id];
  record(t, topology_.node_to_user(node, rec.message.recipient), id, false, true);
  rec.delivered = t;
  rec.posterior = std::move(posterior);
  ++delivered_;
}

void Network::record(VirtualTime t, LinkId link, MessageId id, bool first, bool delivery) {
  if (!recording_) return;
  const auto idx = static_cast<std::int64_t>(events_.size());
  events_.push_back(TraceEvent{t, link, id});
  if (first) ledger_[id].first_event = idx;
  if (delivery) ledger_[id].delivery_event = idx;
}

void Network::process_releases_before(VirtualTime t) {
  while (!releases_.empty() && releases_.top().time < t) {
    const Release r = releases_.top();
    releases_.pop();
    auto post = nodes_[r.node].release(r.message, r.time);
    forward(r.message, r.node, r.time, std::move(post));
  }
}

Trace Network::take_trace() {
  Trace tr;
  tr.start = record_start_;
  tr.end = now();
  tr.events = std::move(events_);
  events_.clear();
  tr.ledger = ledger_;
  for (auto& rec : ledger_) rec.first_event = rec.delivery_event = -1;
  return tr;
}

std::size_t Network::occupancy() const {
  std::size_t s = 0;
  for (const auto& n : nodes_) s += n.occupancy();
  return s;
}

std::vector<Message> Network::drain() {
  std::vector<Message> out;
  for (auto& n : nodes_) {
    auto part = n.drain();
    out.insert(out.end(), part.begin(), part.end());
  }
  releases_ = {};
  return out;
}

BurnInResult run_burn_in(Network& network, std::span<const UserId> silent, std::uint64_t seed,
                         const BurnInOptions& options) {
  const auto saved = network.behaviour();
  auto quiet = saved;
  for (UserId u : silent) quiet.at(u).rate = 0.0;
  network.set_behaviour(std::move(quiet));

  std::int64_t length = options.base;
  if (options.jitter_max > 0) {
    Rng rng(derive_seed(seed, "burn-in"));
    std::uniform_int_distribution<std::int64_t> extra(1, options.jitter_max);
    length += extra(rng);
  }

  BurnInResult res;
  network.advance(network.now() + static_cast<VirtualTime>(length), std::nullopt,
                  options.track_occupancy ? &res.occupancy : nullptr);
  network.set_behaviour(saved);
  res.offset = network.now();
  return res;
}

Trace simulate(Network& network, const SimulationLimits& limits) {
  if (!(limits.duration > 0.0)) throw ConfigError("simulation duration must be positive");
  network.set_recording(true);
  network.advance(network.now() + limits.duration, limits.max_events);
  network.set_recording(false);
  return network.take_trace();
}

LatencyStats latency_stats(const Trace& trace) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& rec : trace.ledger) {
    if (rec.message.ingress_time < trace.start || !rec.is_delivered() ||
        rec.delivered > trace.end)
      continue;
    const double l = rec.delivered - rec.message.ingress_time;
    sum += l;
    sq += l * l;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("latency_stats: no delivered messages in trace");
  LatencyStats s;
  s.count = n;
  s.mean = sum / static_cast<double>(n);
  s.stddev = n > 1 ? std::sqrt(std::max(0.0, (sq - n * s.mean * s.mean) / (n - 1.0))) : 0.0;
  return s;
}

}  // namespace mixprobe
