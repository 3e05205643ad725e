#include "mixprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "mixprobe/rng.hpp"
#include "mixprobe/stats.hpp"

namespace mixprobe::metrics {

double entropy_bits(std::span<const double> probabilities) {
  double total = 0.0, h = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("entropy: negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("entropy: unnormalized input");
  return h;
}

double entropy_bits(const SenderDistribution& posterior) {
  std::vector<double> p;
  p.reserve(posterior.support_size());
  for (const auto& e : posterior.entries()) p.push_back(e.second);
  return entropy_bits(p);
}

double effective_anonymity_set(double bits) { return std::exp2(bits); }

std::optional<double> likelihood_diff(double p0, double p1) {
  if (p0 <= 0.0 && p1 <= 0.0) return std::nullopt;
  const double a = std::max(p0, kProbabilityFloor);
  const double b = std::max(p1, kProbabilityFloor);
  return std::abs(std::log(a / b));
}

std::optional<double> likelihood_diff(const SenderDistribution& posterior, UserId u0,
                                      UserId u1) {
  if (u0 == u1) throw std::invalid_argument("likelihood_diff: suspects must be distinct");
  return likelihood_diff(posterior.probability(u0), posterior.probability(u1));
}

double total_variation(const SenderDistribution& a, const SenderDistribution& b) {
  std::set<UserId> users;
  for (const auto& e : a.entries()) users.insert(e.first);
  for (const auto& e : b.entries()) users.insert(e.first);
  double tv = 0.0;
  for (UserId u : users) tv += std::abs(a.probability(u) - b.probability(u));
  return 0.5 * tv;
}

std::vector<GroupSummary> aggregate(std::span<const MetricGroup> groups, double alpha) {
  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.samples.size() < 2)
      throw std::invalid_argument("aggregate: group '" + g.key + "' has fewer than 2 samples");
    GroupSummary s;
    s.key = g.key;
    s.count = g.samples.size();
    s.mean = stats::mean(g.samples);
    s.stddev = std::sqrt(stats::variance(g.samples));
    out.push_back(s);
  }
  for (std::size_t i = 1; i < groups.size(); ++i) {
    const auto t = stats::welch_t_test(groups[i - 1].samples, groups[i].samples);
    out[i].p_previous = t.p_value;
    out[i].differs_previous = t.p_value < alpha;
    out[i - 1].differs_next = out[i].differs_previous;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool has_prev = i > 0, has_next = i + 1 < out.size();
    out[i].starred = (has_prev || has_next) && (!has_prev || out[i].differs_previous) &&
                     (!has_next || out[i].differs_next);
  }
  return out;
}

namespace {

constexpr UserId kNoRecipient = std::numeric_limits<UserId>::max();

void check_small(const OracleFixture& f) {
  f.strategy.validate();
  if (f.strategy.batching() && f.strategy.threshold > kOracleMaxThreshold)
    throw std::invalid_argument("oracle: threshold too large for resimulation");
  std::set<UserId> users;
  for (const auto& a : f.arrivals) users.insert(a.first);
  if (users.size() > kOracleMaxUsers)
    throw std::invalid_argument("oracle: too many users for resimulation");
  if (f.arrivals.empty()) throw std::invalid_argument("oracle: fixture without arrivals");
  if (!std::is_sorted(f.arrivals.begin(), f.arrivals.end(),
                      [](const auto& a, const auto& b) { return a.second < b.second; }))
    throw std::invalid_argument("oracle: arrivals must be in time order");
  if (!f.strategy.batching() && !(f.release_window > 0.0))
    throw std::invalid_argument("oracle: Poisson fixtures need a positive release window");
}

}  // namespace

OracleResult monte_carlo_posterior_oracle(const OracleFixture& fixture, std::size_t n_trials,
                                          std::uint64_t seed, double tolerance) {
  check_small(fixture);
  std::map<UserId, double> tally;
  std::size_t accepted = 0;
  const NodeConfig cfg{fixture.strategy, true};
  std::vector<Message> msgs;
  for (std::size_t i = 0; i < fixture.arrivals.size(); ++i)
    msgs.push_back(Message{i, fixture.arrivals[i].first,
                           kNoRecipient, fixture.arrivals[i].second});
  // Provenance is irrelevant to the resampled ground truth; a shared dummy
  // keeps the node happy.
  const auto dummy = make_posterior(SenderDistribution::point_mass(0));

  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    MixNode node(cfg, derive_seed(seed, trial));
    if (fixture.strategy.batching()) {
      std::vector<MessageId> outputs;
      for (const auto& m : msgs)
        for (const auto& e : node.ingest(m, dummy, m.ingress_time))
          outputs.push_back(e.message.id);
      if (fixture.target_egress >= outputs.size())
        throw std::invalid_argument("oracle: fixture never produces the target output");
      tally[msgs[outputs[fixture.target_egress]].sender] += 1.0;
      ++accepted;
    } else {
      const VirtualTime lo = fixture.observed_release;
      const VirtualTime hi = lo + fixture.release_window;
      std::optional<std::pair<VirtualTime, UserId>> hit;
      for (const auto& m : msgs) {
        const auto out = node.ingest(m, dummy, m.ingress_time).front();
        if (out.time >= lo && out.time < hi && (!hit || out.time < hit->first))
          hit = std::make_pair(out.time, m.sender);
      }
      if (hit) {
        tally[hit->second] += 1.0;
        ++accepted;
      }
    }
  }

  const double required = 2.25 / (tolerance * tolerance);  // 3 * 0.5 / sqrt(n) <= tol
  if (static_cast<double>(accepted) < required)
    throw std::runtime_error("oracle: insufficient accepted trials for the requested tolerance");

  std::vector<SenderDistribution::Entry> entries;
  for (const auto& [u, c] : tally) entries.emplace_back(u, c / static_cast<double>(accepted));
  return OracleResult{SenderDistribution(std::move(entries)), accepted};
}

SenderDistribution fixture_posterior(const OracleFixture& fixture) {
  check_small(fixture);
  std::vector<Posterior> point;
  for (const auto& a : fixture.arrivals)
    point.push_back(make_posterior(SenderDistribution::point_mass(a.first)));

  if (!fixture.strategy.batching()) {
    std::vector<PoissonCandidate> cands;
    for (std::size_t i = 0; i < fixture.arrivals.size(); ++i)
      cands.push_back(PoissonCandidate{fixture.arrivals[i].second, point[i].get()});
    return poisson_posterior(cands, fixture.observed_release, fixture.strategy.mean_delay);
  }

  // Output posteriors of a batching node do not depend on the shuffle, so any
  // seed gives the analytic answer.
  MixNode node(NodeConfig{fixture.strategy, true}, 0);
  std::vector<Posterior> outputs;
  for (std::size_t i = 0; i < fixture.arrivals.size(); ++i) {
    const Message m{i, fixture.arrivals[i].first, kNoRecipient,
                    fixture.arrivals[i].second};
    for (auto& e : node.ingest(m, point[i], m.ingress_time)) outputs.push_back(e.posterior);
  }
  if (fixture.target_egress >= outputs.size())
    throw std::invalid_argument("fixture never produces the target output");
  return *outputs[fixture.target_egress];
}

}  // namespace mixprobe::metrics
