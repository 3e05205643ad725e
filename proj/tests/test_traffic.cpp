#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "mixprobe/stats.hpp"
#include "mixprobe/traffic.hpp"

using namespace mixprobe;

namespace {

NodeConfig honest(MixStrategy s) { return NodeConfig{s, true}; }

Network warm_single(MixStrategy s, std::size_t users, double rate, std::uint64_t seed,
                    bool node_honest = true) {
  Topology topo = Topology::single(NodeConfig{s, node_honest}, users);
  Population pop = assign_contacts(Population::uniform(users, rate), seed);
  return Network(std::move(topo), std::move(pop), seed + 1);
}

}  // namespace

TEST(Population, Validation) {
  EXPECT_NO_THROW(Population::uniform(100, 0.01).validate());
  EXPECT_THROW(assign_contacts(Population::uniform(2, 0.1), 1), ConfigError);
  EXPECT_THROW(Population::uniform(10, 0.2).validate(), ConfigError);  // R = 2
  auto p = Population::uniform(5, 0.1);
  p.contacts[2] = 2;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_NEAR(Population::uniform(100, 0.01).global_rate(), 1.0, 1e-12);
}

TEST(AssignContacts, ThreeUsersPickTheOtherTwoUniformly) {
  std::map<std::pair<UserId, UserId>, int> counts;
  const int seeds = 6000;
  for (int s = 0; s < seeds; ++s) {
    const auto p = assign_contacts(Population::uniform(3, 0.1), static_cast<std::uint64_t>(s));
    for (UserId u = 0; u < 3; ++u) {
      ASSERT_NE(p.contacts[u], u);
      ++counts[{u, p.contacts[u]}];
    }
  }
  EXPECT_EQ(counts.size(), 6u);
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, seeds / 2.0, 3 * std::sqrt(seeds * 0.25));
}

TEST(AssignContacts, HundredUsersChiSquareUniform) {
  // Marginal of user 0's contact over 10^4 seeds, 99 cells.
  std::vector<double> cells(99, 0.0);
  for (int s = 0; s < 10000; ++s) {
    const auto p = assign_contacts(Population::uniform(100, 0.01), static_cast<std::uint64_t>(s));
    ASSERT_NE(p.contacts[0], 0u);
    cells[p.contacts[0] - 1] += 1.0;
  }
  EXPECT_GT(stats::chi_square_uniform(cells).p_value, 0.01);
}

TEST(Topology, SingleNodeLinkIds) {
  const auto t = Topology::single(honest(MixStrategy::make_threshold(10)), 4);
  ASSERT_EQ(t.links().size(), 8u);
  for (UserId u = 0; u < 4; ++u) {
    EXPECT_EQ(t.user_to_node(u, 0), u + 1);
    EXPECT_EQ(t.node_to_user(0, u), 5 + u);
  }
  for (std::size_t i = 0; i < t.links().size(); ++i) EXPECT_EQ(t.links()[i].id, i + 1);
  EXPECT_EQ(t.vocab_size(), 10u);
  EXPECT_EQ(t.cls_token(), 9u);
}

TEST(Topology, LinkMapIsBijective) {
  std::vector<std::vector<NodeConfig>> layers(3, std::vector<NodeConfig>(2, honest(MixStrategy::make_threshold(5))));
  const Topology t(layers, 5);
  // 5*2 ingress + 2*2 + 2*2 inter-layer + 2*5 egress
  EXPECT_EQ(t.links().size(), 28u);
  std::set<std::tuple<int, std::uint32_t, int, std::uint32_t>> pairs;
  for (const auto& l : t.links())
    pairs.insert({static_cast<int>(l.from.kind), l.from.index, static_cast<int>(l.to.kind), l.to.index});
  EXPECT_EQ(pairs.size(), t.links().size());
  EXPECT_EQ(t.cls_token(), t.links().size() + 1);
  for (const auto& l : t.links()) EXPECT_LT(l.id, t.cls_token());
}

TEST(Topology, AnytrustViolationIsRejected) {
  std::vector<std::vector<NodeConfig>> layers{
      {NodeConfig{MixStrategy::make_threshold(5), false}, honest(MixStrategy::make_threshold(5))},
      {honest(MixStrategy::make_threshold(5)), NodeConfig{MixStrategy::make_threshold(5), false}}};
  EXPECT_THROW(Topology(layers, 5), ConfigError);
  layers[1][1].honest = true;
  EXPECT_NO_THROW(Topology(layers, 5));
  EXPECT_THROW(Topology({}, 5), ConfigError);
}

TEST(Network, ConservationAndRate) {
  auto net = warm_single(MixStrategy::make_threshold(10), 100, 0.01, 3);
  const auto trace = simulate(net, {10000.0, std::nullopt});
  const double sent = static_cast<double>(net.messages_sent());
  // Binomial(10^4 * 100, 0.01)
  const double mean = 1e6 * 0.01, sd = std::sqrt(1e6 * 0.01 * 0.99);
  EXPECT_NEAR(sent, mean, 3 * sd);
  for (const auto& n : net.nodes()) EXPECT_EQ(n.ingested(), n.egressed() + n.occupancy());
  const auto rest = net.drain();
  EXPECT_EQ(net.messages_delivered() + rest.size(), net.messages_sent());
  EXPECT_LT(rest.size(), 10u);
  EXPECT_EQ(trace.events.size(), 2 * net.messages_sent() - rest.size());
}

TEST(Network, EventsAreTimeOrdered) {
  for (const auto& s : {MixStrategy::make_threshold(10), MixStrategy::make_poisson(7.0)}) {
    auto net = warm_single(s, 50, 0.02, 8);
    const auto trace = simulate(net, {3000.0, std::nullopt});
    ASSERT_FALSE(trace.events.empty());
    for (std::size_t i = 1; i < trace.events.size(); ++i)
      ASSERT_LE(trace.events[i - 1].time, trace.events[i].time);
    for (const auto& e : trace.events) {
      ASSERT_GE(e.time, trace.start);
      ASSERT_LT(e.time, trace.end);
      ASSERT_GE(e.link, 1u);
    }
  }
}

TEST(Network, DeliveredMessagesReachTheirRecipient) {
  auto net = warm_single(MixStrategy::make_pool(8, 2), 20, 0.05, 4);
  const auto trace = simulate(net, {2000.0, std::nullopt});
  const auto& topo = net.topology();
  for (const auto& r : trace.ledger) {
    if (r.delivery_event < 0) continue;
    const auto& ev = trace.events[static_cast<std::size_t>(r.delivery_event)];
    const Link& l = topo.link(ev.link);
    EXPECT_EQ(l.to.kind, Endpoint::Kind::User);
    EXPECT_EQ(l.to.index, r.message.recipient);
    EXPECT_NE(r.message.sender, r.message.recipient);
    ASSERT_TRUE(r.posterior);
    EXPECT_TRUE(r.posterior->is_normalized());
  }
}

TEST(Network, CorruptNodeKeepsInputOrder) {
  // A lone corrupt node breaks anytrust, so it sits in front of an honest one.
  std::vector<std::vector<NodeConfig>> layers{{NodeConfig{MixStrategy::make_threshold(10), false}},
                                              {NodeConfig{MixStrategy::make_threshold(10), true}}};
  Network net(Topology(layers, 30), assign_contacts(Population::uniform(30, 0.03), 5), 6);
  const auto trace = simulate(net, {2000.0, std::nullopt});
  std::vector<std::pair<double, MessageId>> in, out;
  for (const auto& e : trace.events) {
    const auto layer = net.topology().link(e.link).layer;
    if (layer == 0) in.emplace_back(e.time, e.message);
    if (layer == 1) out.emplace_back(e.time, e.message);
  }
  EXPECT_EQ(in, out);
  EXPECT_FALSE(in.empty());
}

TEST(Network, Deterministic) {
  auto run = [] {
    auto net = warm_single(MixStrategy::make_poisson(4.0), 40, 0.02, 21);
    run_burn_in(net, {}, 3);
    const auto t = simulate(net, {1500.0, std::nullopt});
    std::vector<std::tuple<double, LinkId, MessageId>> v;
    for (const auto& e : t.events) v.emplace_back(e.time, e.link, e.message);
    return v;
  };
  EXPECT_EQ(run(), run());
}

TEST(Network, MaxEventsStopsAfterTheSecond) {
  auto net = warm_single(MixStrategy::make_threshold(5), 100, 0.01, 2);
  const auto t = simulate(net, {100000.0, std::size_t{300}});
  EXPECT_GE(t.events.size(), 300u);
  EXPECT_LT(t.end, 100000.0);
}

TEST(Simulate, RejectsNonPositiveDuration) {
  auto net = warm_single(MixStrategy::make_threshold(5), 10, 0.05, 2);
  EXPECT_THROW(simulate(net, {0.0, std::nullopt}), ConfigError);
  EXPECT_THROW(simulate(net, {-5.0, std::nullopt}), ConfigError);
}

TEST(LatencyStats, EmptyTraceThrows) {
  Trace t;
  EXPECT_THROW(latency_stats(t), std::invalid_argument);
}

TEST(BurnIn, LengthWithinRangeAndSuspectsSilent) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto net = warm_single(MixStrategy::make_threshold(100), 100, 0.01, s);
    const std::vector<UserId> silent{3, 4};
    const auto before = net.behaviour();
    const auto r = run_burn_in(net, silent, s);
    EXPECT_GE(r.offset, 4097.0);
    EXPECT_LE(r.offset, 8192.0);
    EXPECT_LE(net.occupancy(), 99u);
    for (std::size_t i = 0; i < net.behaviour().size(); ++i)
      EXPECT_EQ(net.behaviour()[i].rate, before[i].rate);
    // Nothing from the silent users was sent.
    net.set_recording(true);
    const auto t = net.take_trace();
    for (const auto& rec : t.ledger) {
      EXPECT_NE(rec.message.sender, 3u);
      EXPECT_NE(rec.message.sender, 4u);
    }
  }
}

TEST(BurnIn, OccupancySeries) {
  auto net = warm_single(MixStrategy::make_poisson(10.0), 100, 0.01, 1);
  BurnInOptions o;
  o.jitter_max = 0;
  o.track_occupancy = true;
  const auto r = run_burn_in(net, {}, 1, o);
  EXPECT_EQ(r.offset, 4096.0);
  EXPECT_EQ(r.occupancy.size(), 4096u);
}

TEST(Latency, ThresholdPerPositionDecreasesWithinBatch) {
  // Latency of the k-th arrival of a batch, averaged over batches.
  const std::uint32_t n = 20;
  auto net = warm_single(MixStrategy::make_threshold(n), 100, 0.01, 6);
  run_burn_in(net, {}, 6);
  const auto trace = simulate(net, {100000.0, std::nullopt});
  // Group deliveries by flush time; order the batch by ingress.
  std::map<double, std::vector<const MessageRecord*>> batches;
  for (const auto& r : trace.ledger)
    if (r.is_delivered() && r.message.ingress_time >= trace.start) batches[r.delivered].push_back(&r);
  std::vector<double> sum(n, 0.0);
  std::vector<int> cnt(n, 0);
  for (auto& [t, b] : batches) {
    if (b.size() != n) continue;
    std::sort(b.begin(), b.end(), [](auto* a, auto* c) { return a->message.id < c->message.id; });
    for (std::uint32_t k = 0; k < n; ++k) {
      sum[k] += b[k]->delivered - b[k]->message.ingress_time;
      ++cnt[k];
    }
  }
  ASSERT_GT(cnt[0], 100);
  for (std::uint32_t k = 1; k < n; ++k) EXPECT_LT(sum[k] / cnt[k], sum[k - 1] / cnt[k - 1]);
  EXPECT_NEAR(sum[n - 1] / cnt[n - 1], 0.0, 1.0);
}

TEST(Latency, ThresholdMatchesTwiceLambdaPoisson) {
  const double lambda = 25.0;
  auto a = warm_single(MixStrategy::make_threshold(static_cast<std::uint32_t>(2 * lambda)), 100, 0.01, 1);
  auto b = warm_single(MixStrategy::make_poisson(lambda), 100, 0.01, 1);
  run_burn_in(a, {}, 1);
  run_burn_in(b, {}, 1);
  const double la = latency_stats(simulate(a, {30000.0, std::nullopt})).mean;
  const double lb = latency_stats(simulate(b, {30000.0, std::nullopt})).mean;
  // Threshold mean latency is (n - 1) / 2 at 1 msg/s, one second below n / 2.
  EXPECT_NEAR(la, lb, 0.05 * lb);
}
