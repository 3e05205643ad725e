#include "mixprobe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixprobe/encoding.hpp"
#include "mixprobe/rng.hpp"

namespace mixprobe {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  v = trim(v);
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || v.empty())
    throw ConfigError("config: bad value '" + std::string(v) + "' for key '" + std::string(key) +
                      "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out))
      throw ConfigError("config: non-finite value for key '" + std::string(key) + "'");
  return out;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
  std::vector<T> out;
  for (auto item : split_on(v, ',')) {
    const auto parts = split_on(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number<T>(key, parts[0]));
    } else if (parts.size() == 3) {
      const T first = parse_number<T>(key, parts[0]);
      const T last = parse_number<T>(key, parts[1]);
      const T step = parse_number<T>(key, parts[2]);
      if (!(step > T{0}) || last < first)
        throw ConfigError("config: bad range for key '" + std::string(key) + "'");
      const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i)
        out.push_back(static_cast<T>(first + static_cast<T>(i) * step));
    } else {
      throw ConfigError("config: bad list item for key '" + std::string(key) + "'");
    }
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for key '" + std::string(key) + "'");
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Threshold: return "threshold";
    case StrategyKind::Pool: return "pool";
    case StrategyKind::Poisson: return "poisson";
  }
  return "?";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "users") users = parse_number<std::size_t>(key, value);
  else if (key == "rate") rate = parse_number<double>(key, value);
  else if (key == "strategy") {
    if (value == "threshold") strategy = StrategyKind::Threshold;
    else if (value == "pool") strategy = StrategyKind::Pool;
    else if (value == "poisson") strategy = StrategyKind::Poisson;
    else throw ConfigError("config: strategy must be threshold, pool or poisson");
  }
  else if (key == "threshold") threshold = parse_number<std::uint32_t>(key, value);
  else if (key == "pool") pool = parse_number<std::uint32_t>(key, value);
  else if (key == "lambda") lambda = parse_number<double>(key, value);
  else if (key == "topology") topology = parse_list<std::size_t>(key, value);
  else if (key == "corrupt") {
    corrupt.clear();
    for (auto item : split_on(value, ',')) {
      const auto parts = split_on(item, ':');
      if (parts.size() != 2) throw ConfigError("config: corrupt entries are layer:slot");
      corrupt.emplace_back(parse_number<std::size_t>(key, parts[0]),
                           parse_number<std::size_t>(key, parts[1]));
    }
  }
  else if (key == "length") length = parse_number<std::size_t>(key, value);
  else if (key == "mask_lengths") mask_lengths = parse_list<std::size_t>(key, value);
  else if (key == "samples") samples = parse_number<std::size_t>(key, value);
  else if (key == "split") {
    const auto r = parse_list<double>(key, value);
    if (r.size() != 3) throw ConfigError("config: split needs train,validation,test");
    split = SplitRatios{r[0], r[1], r[2]};
  }
  else if (key == "strict") strict = parse_bool(key, value);
  else if (key == "burn_in") burn_in = parse_number<std::int64_t>(key, value);
  else if (key == "burn_in_jitter") burn_in_jitter = parse_number<std::int64_t>(key, value);
  else if (key == "eval_split") {
    if (value != "train" && value != "validation" && value != "test" && value != "all")
      throw ConfigError("config: eval_split must be train, validation, test or all");
    eval_split = std::string(value);
  }
  else if (key == "duration") duration = parse_number<double>(key, value);
  else if (key == "sweep_thresholds") sweep_thresholds = parse_list<std::uint32_t>(key, value);
  else if (key == "sweep_pools") sweep_pools = parse_list<std::uint32_t>(key, value);
  else if (key == "sweep_lambdas") sweep_lambdas = parse_list<double>(key, value);
  else if (key == "sweep_rounds") sweep_rounds = parse_number<std::size_t>(key, value);
  else if (key == "sweep_length") sweep_length = parse_number<std::size_t>(key, value);
  else if (key == "latency_duration") latency_duration = parse_number<double>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") threads = parse_number<unsigned>(key, value);
  else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

void ExperimentConfig::load_text(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      set(line.substr(0, eq), line.substr(eq + 1));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
}

void ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str());
}

MixStrategy ExperimentConfig::mix_strategy() const {
  switch (strategy) {
    case StrategyKind::Threshold: return MixStrategy::make_threshold(threshold);
    case StrategyKind::Pool: return MixStrategy::make_pool(threshold, pool);
    case StrategyKind::Poisson: return MixStrategy::make_poisson(lambda);
  }
  return {};
}

std::vector<std::vector<NodeConfig>> ExperimentConfig::layers(const MixStrategy& s) const {
  std::vector<std::vector<NodeConfig>> out;
  for (std::size_t width : topology) out.emplace_back(width, NodeConfig{s, true});
  for (const auto& [layer, slot] : corrupt) {
    if (layer >= out.size() || slot >= out[layer].size())
      throw ConfigError("config: corrupt node outside the topology");
    out[layer][slot].honest = false;
  }
  return out;
}

GameConfig ExperimentConfig::game_config(const MixStrategy& s,
                                         std::size_t observation_length) const {
  GameConfig g;
  g.users = users;
  g.rate = rate;
  g.layers = layers(s);
  g.observation_length = observation_length;
  g.burn_in.base = burn_in;
  g.burn_in.jitter_max = burn_in_jitter;
  g.strict = strict;
  return g;
}

GameConfig ExperimentConfig::game_config() const { return game_config(mix_strategy(), length); }

void ExperimentConfig::validate() const {
  if (users < kMinUsers) throw ConfigError("config: users must be at least 3");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("config: rate must lie in (0, 1]");
  if (rate * static_cast<double>(users) > 1.0 + 1e-9)
    throw ConfigError("config: global rate users * rate must not exceed 1");
  if (strategy == StrategyKind::Pool && pool == 0)
    throw ConfigError("config: pool strategy needs pool > 0 (pool = 0 is threshold)");
  if (strategy != StrategyKind::Pool && pool != 0 && strategy != StrategyKind::Threshold)
    throw ConfigError("config: pool only applies to pool/threshold strategies");
  mix_strategy().validate();
  if (topology.empty() || std::find(topology.begin(), topology.end(), 0) != topology.end())
    throw ConfigError("config: every topology layer needs at least one node");
  (void)Topology(layers(mix_strategy()), users);
  if (!is_supported_length(length)) throw ConfigError("config: length must be 256..4096 (power of 2)");
  if (mask_lengths.empty()) throw ConfigError("config: mask_lengths must not be empty");
  for (auto m : mask_lengths)
    if (!is_supported_length(m) || m > length)
      throw ConfigError("config: mask lengths must be supported and <= length");
  (void)split_sizes(samples, split);
  if (burn_in < 0 || burn_in_jitter < 0) throw ConfigError("config: burn-in must be >= 0");
  if (!(duration > 0.0)) throw ConfigError("config: duration must be positive");
  for (auto n : sweep_thresholds)
    MixStrategy::make_threshold(n).validate();
  for (auto lam : sweep_lambdas) MixStrategy::make_poisson(lam).validate();
  if (sweep_rounds < 2) throw ConfigError("config: sweep_rounds must be at least 2");
  if (!is_supported_length(sweep_length)) throw ConfigError("config: bad sweep_length");
  if (!(latency_duration > 0.0)) throw ConfigError("config: latency_duration must be positive");
}

std::map<std::string, std::string> ExperimentConfig::entries() const {
  std::map<std::string, std::string> m;
  m["users"] = std::to_string(users);
  m["rate"] = format_double(rate);
  m["strategy"] = strategy_name(strategy);
  m["threshold"] = std::to_string(threshold);
  m["pool"] = std::to_string(pool);
  m["lambda"] = format_double(lambda);
  m["topology"] = join(topology);
  std::string c;
  for (std::size_t i = 0; i < corrupt.size(); ++i)
    c += (i ? "," : "") + std::to_string(corrupt[i].first) + ":" + std::to_string(corrupt[i].second);
  m["corrupt"] = c;
  m["length"] = std::to_string(length);
  m["mask_lengths"] = join(mask_lengths);
  m["samples"] = std::to_string(samples);
  m["split"] = join(std::vector<double>{split.train, split.validation, split.test});
  m["strict"] = strict ? "true" : "false";
  m["burn_in"] = std::to_string(burn_in);
  m["burn_in_jitter"] = std::to_string(burn_in_jitter);
  m["eval_split"] = eval_split;
  m["duration"] = format_double(duration);
  m["sweep_thresholds"] = join(sweep_thresholds);
  m["sweep_pools"] = join(sweep_pools);
  m["sweep_lambdas"] = join(sweep_lambdas);
  m["sweep_rounds"] = std::to_string(sweep_rounds);
  m["sweep_length"] = std::to_string(sweep_length);
  m["latency_duration"] = format_double(latency_duration);
  m["seed"] = std::to_string(seed);
  return m;
}

std::string ExperimentConfig::canonical() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
  return s;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

}  // namespace mixprobe
