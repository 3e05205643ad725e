#include "mixprobe/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mixprobe {

using json = nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string link_label(const Endpoint& e) {
  return (e.kind == Endpoint::Kind::User ? "user:" : "node:") + std::to_string(e.index);
}

std::string sample_json(const GameInstance& g, const std::string& config_hash) {
  const MaskRegion full{0, g.observation.length()};
  json j;
  j["tokens"] = g.observation.tokens;
  j["label"] = g.bit;
  j["meta"] = {{"config_hash", config_hash},
               {"seed", g.seed},
               {"suspects", g.suspects},
               {"recipient", g.recipient},
               {"messages_from_true_sender", g.messages_from_true_sender(full)}};
  return j.dump();
}

std::string ledger_json(const GameInstance& g) {
  json tracked = json::array();
  for (const auto& m : g.tracked)
    tracked.push_back({m.ingress_pos, m.egress_pos, m.sender, m.recipient, m.p0, m.p1, m.entropy});
  json deliveries = json::array();
  for (const auto& [pos, h] : g.delivery_entropy) deliveries.push_back({pos, h});
  json j;
  j["seed"] = g.seed;
  j["tracked"] = std::move(tracked);
  j["delivery_entropy"] = std::move(deliveries);
  return j.dump();
}

namespace {

std::string lines(const std::vector<GameInstance>& xs, const std::string& hash, bool ledger) {
  std::string s;
  for (const auto& g : xs) {
    s += ledger ? ledger_json(g) : sample_json(g, hash);
    s += '\n';
  }
  return s;
}

const std::vector<GameInstance>& split_ref(const Dataset& d, std::size_t i) {
  return i == 0 ? d.train : i == 1 ? d.validation : d.test;
}

std::vector<GameInstance>& split_ref(Dataset& d, std::size_t i) {
  return i == 0 ? d.train : i == 1 ? d.validation : d.test;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text(path));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(std::move(line));
  return out;
}

GameInstance parse_sample(const std::string& row, const std::string& ledger, std::uint32_t vocab) {
  const json r = json::parse(row);
  const json l = json::parse(ledger);
  GameInstance g;
  g.observation.tokens = r.at("tokens").get<std::vector<Token>>();
  g.observation.vocab_size = vocab;
  g.bit = r.at("label").get<int>();
  if (g.bit != 0 && g.bit != 1) throw std::runtime_error("dataset: label must be 0 or 1");
  const json& meta = r.at("meta");
  g.seed = meta.at("seed").get<std::uint64_t>();
  g.suspects = meta.at("suspects").get<std::array<UserId, 2>>();
  g.recipient = meta.at("recipient").get<UserId>();
  if (l.at("seed").get<std::uint64_t>() != g.seed)
    throw std::runtime_error("dataset: ledger line does not match its sample");
  for (const auto& t : l.at("tracked")) {
    TrackedMessage m;
    m.ingress_pos = t.at(0).get<std::int64_t>();
    m.egress_pos = t.at(1).get<std::int64_t>();
    m.sender = t.at(2).get<UserId>();
    m.recipient = t.at(3).get<UserId>();
    m.p0 = t.at(4).get<double>();
    m.p1 = t.at(5).get<double>();
    m.entropy = t.at(6).get<double>();
    g.tracked.push_back(m);
  }
  for (const auto& d : l.at("delivery_entropy"))
    g.delivery_entropy.emplace_back(d.at(0).get<std::int64_t>(), d.at(1).get<double>());
  return g;
}

}  // namespace

void write_dataset(const fs::path& dir, const ExperimentConfig& config, const Topology& topology,
                   const Dataset& dataset) {
  fs::create_directories(dir);
  const std::string hash = config.hash();

  json links = json::array();
  for (const auto& l : topology.links())
    links.push_back({{"id", l.id}, {"from", link_label(l.from)}, {"to", link_label(l.to)}});

  json splits = json::object();
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    const std::string name = kSplitNames[i];
    const auto& xs = split_ref(dataset, i);
    splits[name] = {{"file", name + ".jsonl"},
                    {"ledger", "ledger_" + name + ".jsonl"},
                    {"count", xs.size()}};
    write_text(dir / (name + ".jsonl"), lines(xs, hash, false));
    write_text(dir / ("ledger_" + name + ".jsonl"), lines(xs, hash, true));
  }

  json m;
  m["format"] = kDatasetFormat;
  m["config_hash"] = hash;
  m["config"] = config.entries();
  m["master_seed"] = config.seed;
  m["vocab_size"] = topology.vocab_size();
  m["cls_token"] = topology.cls_token();
  m["inactive_token"] = kInactiveToken;
  m["sequence_length"] = config.length;
  m["links"] = std::move(links);
  m["splits"] = std::move(splits);
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

DatasetManifest read_manifest(const fs::path& dir) {
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("dataset manifest: ") + e.what());
  }
  try {
    DatasetManifest out;
    out.format = m.at("format").get<std::string>();
    if (out.format != kDatasetFormat)
      throw std::runtime_error("dataset manifest: unknown format " + out.format);
    out.config_hash = m.at("config_hash").get<std::string>();
    out.config = m.at("config").get<std::map<std::string, std::string>>();
    out.master_seed = m.at("master_seed").get<std::uint64_t>();
    out.vocab_size = m.at("vocab_size").get<std::uint32_t>();
    out.cls_token = m.at("cls_token").get<std::uint32_t>();
    out.sequence_length = m.at("sequence_length").get<std::size_t>();
    const json& s = m.at("splits");
    out.train = s.at("train").at("count").get<std::size_t>();
    out.validation = s.at("validation").at("count").get<std::size_t>();
    out.test = s.at("test").at("count").get<std::size_t>();
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("dataset manifest: ") + e.what());
  }
}

LoadedDataset read_dataset(const fs::path& dir) {
  LoadedDataset out;
  out.manifest = read_manifest(dir);
  const std::array<std::size_t, 3> expected{out.manifest.train, out.manifest.validation,
                                            out.manifest.test};
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    const std::string name = kSplitNames[i];
    const auto rows = read_lines(dir / (name + ".jsonl"));
    const auto ledgers = read_lines(dir / ("ledger_" + name + ".jsonl"));
    if (rows.size() != expected[i] || ledgers.size() != expected[i])
      throw std::runtime_error("dataset: " + name + " split size differs from the manifest");
    auto& dst = split_ref(out.samples, i);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      try {
        dst.push_back(parse_sample(rows[k], ledgers[k], out.manifest.vocab_size));
      } catch (const json::exception& e) {
        throw std::runtime_error("dataset: " + name + " line " + std::to_string(k + 1) + ": " +
                                 e.what());
      }
      if (dst.back().observation.length() != out.manifest.sequence_length)
        throw std::runtime_error("dataset: sequence length differs from the manifest");
    }
  }
  return out;
}

std::vector<GameInstance> select_split(const Dataset& d, const std::string& split) {
  if (split == "all") {
    std::vector<GameInstance> out(d.train);
    out.insert(out.end(), d.validation.begin(), d.validation.end());
    out.insert(out.end(), d.test.begin(), d.test.end());
    return out;
  }
  for (std::size_t i = 0; i < kSplitNames.size(); ++i)
    if (split == kSplitNames[i]) return split_ref(d, i);
  throw ConfigError("unknown split '" + split + "'");
}

}  // namespace mixprobe
