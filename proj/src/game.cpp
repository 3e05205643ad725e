#include "mixprobe/game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "mixprobe/metrics.hpp"

namespace mixprobe {

void GameConfig::validate() const {
  if (users < kMinUsers) throw ConfigError("the game needs at least 3 users");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("per-user rate must lie in (0, 1]");
  if (rate * static_cast<double>(users) > 1.0 + 1e-9)
    throw ConfigError("global sending rate users * rate exceeds 1");
  if (observation_length == 0) throw ConfigError("observation length must be positive");
  if (burn_in.base < 0 || burn_in.jitter_max < 0)
    throw ConfigError("burn-in lengths must be non-negative");
  (void)topology();  // validates layers and anytrust wiring
}

std::size_t GameInstance::messages_from_true_sender(const MaskRegion& region) const {
  const UserId a = true_sender();
  return static_cast<std::size_t>(std::count_if(
      tracked.begin(), tracked.end(), [&](const TrackedMessage& m) {
        return m.sender == a && m.recipient == recipient && region.contains(m.ingress_pos);
      }));
}

namespace {

UserId draw_other(Rng& rng, std::size_t users, UserId self, UserId excluded) {
  std::uniform_int_distribution<UserId> pick(0, static_cast<UserId>(users - 1));
  for (;;) {
    const UserId c = pick(rng);
    if (c != self && c != excluded) return c;
  }
}

}  // namespace

GameInstance play_round(const GameConfig& config, std::uint64_t seed) {
  config.validate();
  const Topology topology = config.topology();
  Rng rng(derive_seed(seed, "challenger"));

  // 1-2. The adversary's picks, re-drawn until pairwise distinct.
  std::uniform_int_distribution<UserId> pick(0, static_cast<UserId>(config.users - 1));
  GameInstance g;
  g.seed = seed;
  do {
    g.suspects = {pick(rng), pick(rng)};
    g.recipient = pick(rng);
  } while (g.suspects[0] == g.suspects[1] || g.suspects[0] == g.recipient ||
           g.suspects[1] == g.recipient);

  // 3. The challenger's coin.
  g.bit = std::uniform_int_distribution<int>(0, 1)(rng);
  const UserId sender = g.true_sender();
  const UserId decoy = g.suspects[static_cast<std::size_t>(1 - g.bit)];

  Population pop = assign_contacts(Population::uniform(config.users, config.rate),
                                   derive_seed(seed, "population"));
  Rng fix(derive_seed(seed, "contact-fix"));
  if (pop.contacts[decoy] == g.recipient)
    pop.contacts[decoy] = draw_other(fix, config.users, decoy, g.recipient);
  if (config.strict)
    for (UserId u = 0; u < config.users; ++u)
      if (u != sender && pop.contacts[u] == g.recipient)
        pop.contacts[u] = draw_other(fix, config.users, u, g.recipient);

  Network net(topology, pop, derive_seed(seed, "network"));
  const std::array<UserId, 2> silent = g.suspects;
  const auto burn = run_burn_in(net, silent, derive_seed(seed, "burn-in"), config.burn_in);

  auto behaviour = net.behaviour();
  behaviour[sender] = UserBehaviour{config.rate, g.recipient};
  behaviour[decoy] = UserBehaviour{config.rate, pop.contacts[decoy]};
  net.set_behaviour(std::move(behaviour));

  // Events arrive at about 2 * R per second on a single node; the horizon is
  // a generous cap, the event limit is what normally stops the run.
  const double global = pop.global_rate();
  const double horizon =
      std::ceil(8.0 * static_cast<double>(config.observation_length) / std::max(global, 1e-3));
  const Trace trace = simulate(net, SimulationLimits{horizon, config.observation_length});

  g.observation = encode(trace, ObservationWindow{burn.offset, trace.end},
                         config.observation_length, topology.vocab_size());

  const std::size_t visible = std::min(trace.events.size(), config.observation_length);
  std::unordered_map<MessageId, std::size_t> index;
  const SenderDistribution* last_post = nullptr;
  double last_entropy = 0.0;
  for (std::size_t pos = 0; pos < visible; ++pos) {
    const auto& ev = trace.events[pos];
    const auto& rec = trace.ledger[ev.message];
    const bool is_delivery = rec.delivery_event == static_cast<std::int64_t>(pos);
    const bool is_first = rec.first_event == static_cast<std::int64_t>(pos);

    if (is_delivery) {
      if (rec.posterior.get() != last_post) {
        last_post = rec.posterior.get();
        last_entropy = metrics::entropy_bits(*last_post);
      }
      g.delivery_entropy.emplace_back(static_cast<std::int64_t>(pos), last_entropy);
    }

    const Message& m = rec.message;
    const bool interesting =
        m.sender == g.suspects[0] || m.sender == g.suspects[1] || m.recipient == g.recipient;
    if (!interesting || (!is_delivery && !is_first)) continue;

    auto [it, fresh] = index.try_emplace(m.id, g.tracked.size());
    if (fresh) g.tracked.push_back(TrackedMessage{-1, -1, m.sender, m.recipient, 0.0, 0.0, 0.0});
    auto& t = g.tracked[it->second];
    if (is_first) t.ingress_pos = static_cast<std::int64_t>(pos);
    if (is_delivery) {
      t.egress_pos = static_cast<std::int64_t>(pos);
      t.p0 = rec.posterior->probability(g.suspects[0]);
      t.p1 = rec.posterior->probability(g.suspects[1]);
      t.entropy = last_entropy;
    }
  }
  return g;
}

std::uint64_t round_seed(std::uint64_t master, std::uint64_t index) {
  return derive_seed(derive_seed(master, "rounds"), index);
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<GameInstance> play_rounds(const GameConfig& config, std::uint64_t master,
                                      std::size_t first, std::size_t count, unsigned threads) {
  config.validate();
  std::vector<GameInstance> out(count);
  parallel_for(count, threads,
               [&](std::size_t i) { out[i] = play_round(config, round_seed(master, first + i)); });
  return out;
}

SplitSizes split_sizes(std::size_t n_samples, const SplitRatios& r) {
  if (n_samples < 3) throw ConfigError("a dataset needs at least 3 samples");
  if (r.train < 0.0 || r.validation < 0.0 || r.test < 0.0 ||
      std::abs(r.train + r.validation + r.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be non-negative and sum to 1");
  const double n = static_cast<double>(n_samples);
  SplitSizes s;
  s.train = static_cast<std::size_t>(std::llround(n * r.train));
  s.validation = static_cast<std::size_t>(std::llround(n * r.validation));
  if (s.train + s.validation > n_samples) s.validation = n_samples - s.train;
  s.test = n_samples - s.train - s.validation;
  return s;
}

Dataset build_dataset(const GameConfig& config, std::size_t n_samples, const SplitRatios& ratios,
                      std::uint64_t seed, unsigned threads) {
  const SplitSizes sizes = split_sizes(n_samples, ratios);
  // Every sample is its own simulation run with its own derived seed, so no
  // two splits can share a run.
  auto all = play_rounds(config, seed, 0, n_samples, threads);
  Dataset d;
  auto it = std::make_move_iterator(all.begin());
  d.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes.train));
  it += static_cast<std::ptrdiff_t>(sizes.train);
  d.validation.assign(it, it + static_cast<std::ptrdiff_t>(sizes.validation));
  it += static_cast<std::ptrdiff_t>(sizes.validation);
  d.test.assign(it, std::make_move_iterator(all.end()));
  return d;
}

double score_adversary(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("score_adversary: prediction/label length mismatch");
  if (labels.empty()) throw std::invalid_argument("score_adversary: no rounds");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace mixprobe
