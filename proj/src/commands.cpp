#include "mixprobe/commands.hpp"

#include <algorithm>

#include <json.hpp>

#include "mixprobe/attacker.hpp"
#include "mixprobe/dataset_io.hpp"

namespace mixprobe {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_config(const fs::path& out, const ExperimentConfig& config) {
  write_text(out / "config.txt", config.canonical());
}

json link_map(const Topology& t) {
  json links = json::array();
  for (const auto& l : t.links())
    links.push_back({{"id", l.id}, {"from", link_label(l.from)}, {"to", link_label(l.to)}});
  return links;
}

}  // namespace

ExperimentConfig config_from_entries(const std::map<std::string, std::string>& entries) {
  ExperimentConfig c;
  for (const auto& [k, v] : entries) c.set(k, v);
  return c;
}

ExperimentConfig config_from_dataset(const fs::path& dataset_dir) {
  return config_from_entries(read_manifest(dataset_dir).config);
}

void cmd_simulate(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  fs::create_directories(out);
  const Topology topology(config.layers(config.mix_strategy()), config.users);
  Population pop = assign_contacts(Population::uniform(config.users, config.rate),
                                   derive_seed(config.seed, "population"));
  Network net(topology, pop, derive_seed(config.seed, "network"));
  BurnInOptions burn_opts;
  burn_opts.base = config.burn_in;
  burn_opts.jitter_max = config.burn_in_jitter;
  const auto burn = run_burn_in(net, {}, derive_seed(config.seed, "burn-in"), burn_opts);
  const Trace trace = simulate(net, SimulationLimits{config.duration, std::nullopt});

  std::string events = "time,link,message\n";
  for (const auto& e : trace.events)
    events += format_double(e.time) + "," + std::to_string(e.link) + "," +
              std::to_string(e.message) + "\n";
  write_text(out / "trace.csv", events);

  std::string ledger = "message,sender,recipient,sent,delivered,route\n";
  for (const auto& r : trace.ledger) {
    if (r.message.ingress_time < trace.start) continue;
    std::string route;
    for (std::size_t i = 0; i < r.route.size(); ++i)
      route += (i ? " " : "") + std::to_string(r.route[i]);
    ledger += std::to_string(r.message.id) + "," + std::to_string(r.message.sender) + "," +
              std::to_string(r.message.recipient) + "," + format_double(r.message.ingress_time) +
              "," + (r.is_delivered() ? format_double(r.delivered) : std::string()) + "," + route +
              "\n";
  }
  write_text(out / "ledger.csv", ledger);

  json m;
  m["config_hash"] = config.hash();
  m["config"] = config.entries();
  m["seed"] = config.seed;
  m["burn_in_offset"] = burn.offset;
  m["trace_start"] = trace.start;
  m["trace_end"] = trace.end;
  m["events"] = trace.events.size();
  m["vocab_size"] = topology.vocab_size();
  m["cls_token"] = topology.cls_token();
  m["links"] = link_map(topology);
  try {
    const auto lat = latency_stats(trace);
    m["latency"] = {{"mean", lat.mean}, {"stddev", lat.stddev}, {"messages", lat.count}};
  } catch (const std::invalid_argument&) {
    m["latency"] = nullptr;
  }
  write_text(out / "manifest.json", m.dump(2) + "\n");
  write_config(out, config);
}

void cmd_gen_dataset(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  const GameConfig game = config.game_config();
  const Dataset d = build_dataset(game, config.samples, config.split, config.seed, config.threads);
  write_dataset(out, config, game.topology(), d);
  write_config(out, config);
}

MetricsReport cmd_metrics(const ExperimentConfig& config, const fs::path& dataset_dir,
                          const fs::path& out) {
  const LoadedDataset data = read_dataset(dataset_dir);
  std::vector<std::size_t> lengths;
  for (auto m : config.mask_lengths)
    if (is_supported_length(m) && m <= data.manifest.sequence_length) lengths.push_back(m);
  if (lengths.empty())
    throw ConfigError("metrics: no mask length fits the stored sequence length");
  const auto samples = select_split(data.samples, config.eval_split);
  if (samples.empty()) throw ConfigError("metrics: split '" + config.eval_split + "' is empty");
  MetricsReport report =
      compute_report(samples, lengths, data.manifest.config_hash, config.eval_split, config.threads);
  fs::create_directories(out);
  write_text(out / "metrics.csv", metrics_csv(report));
  write_text(out / "table.txt", metrics_table(report));
  return report;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<SweepPoint> points;
  for (auto pool : config.sweep_pools)
    for (auto n : config.sweep_thresholds) {
      if (pool >= n) continue;
      SweepPoint p;
      p.strategy = MixStrategy::make_pool(n, pool);
      p.series = pool == 0 ? "threshold" : "pool";
      p.latency_x = static_cast<double>(n) / 2.0;
      points.push_back(p);
    }
  for (double lam : config.sweep_lambdas) {
    SweepPoint p;
    p.strategy = MixStrategy::make_poisson(lam);
    p.series = "poisson";
    p.latency_x = lam;
    points.push_back(p);
  }

  // Flatten (point, round) and latency runs into one job list.
  const std::size_t rounds = config.sweep_rounds;
  const std::size_t n_points = points.size();
  std::vector<GameConfig> games;
  for (const auto& p : points) games.push_back(config.game_config(p.strategy, config.sweep_length));
  std::vector<int> correct(n_points * rounds, 0);
  std::vector<LatencyStats> latency(n_points);

  parallel_for(n_points * rounds + n_points, config.threads, [&](std::size_t job) {
    if (job < n_points * rounds) {
      const std::size_t pi = job / rounds, r = job % rounds;
      const std::uint64_t master = derive_seed(config.seed, points[pi].strategy.describe());
      const GameInstance g = play_round(games[pi], round_seed(master, r));
      const MaskRegion full{0, g.observation.length()};
      correct[job] = attack::guess(g, full) == g.bit;
      return;
    }
    const std::size_t pi = job - n_points * rounds;
    const std::uint64_t s = derive_seed(derive_seed(config.seed, points[pi].strategy.describe()),
                                        "latency");
    const Topology topology = games[pi].topology();
    Population pop = assign_contacts(Population::uniform(config.users, config.rate),
                                     derive_seed(s, "population"));
    Network net(topology, pop, derive_seed(s, "network"));
    run_burn_in(net, {}, derive_seed(s, "burn-in"), games[pi].burn_in);
    latency[pi] = latency_stats(simulate(net, SimulationLimits{config.latency_duration, {}}));
  });

  for (std::size_t pi = 0; pi < n_points; ++pi) {
    auto& p = points[pi];
    p.rounds = rounds;
    p.correct = static_cast<std::size_t>(
        std::count(correct.begin() + static_cast<std::ptrdiff_t>(pi * rounds),
                   correct.begin() + static_cast<std::ptrdiff_t>((pi + 1) * rounds), 1));
    p.accuracy = static_cast<double>(p.correct) / static_cast<double>(rounds);
    p.accuracy_ci = stats::wilson_interval(p.correct, rounds);
    p.latency = latency[pi];
  }
  return points;
}

std::vector<SweepPoint> cmd_sweep(const ExperimentConfig& config, const fs::path& out) {
  auto points = run_sweep(config);
  fs::create_directories(out);
  write_text(out / "accuracy.csv", sweep_accuracy_csv(points));
  write_text(out / "latency.csv", sweep_latency_csv(points));
  write_config(out, config);
  return points;
}

}  // namespace mixprobe
