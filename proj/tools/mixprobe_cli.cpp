// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <ctime>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixprobe/mixprobe.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out;
  std::string dataset;
  long long seed = -1;
  int threads = -1;
};

int report(mxp_status s) {
  if (s == MXP_OK) return 0;
  std::cerr << "mixprobe: " << mxp_last_error() << "\n";
  return s == MXP_ERR_RUNTIME ? kExitRuntime : kExitUsage;
}

std::string default_out(const std::string& command) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
  return "runs/" + command + "-" + stamp;
}

int run(const std::string& command, const Options& o) {
  std::unique_ptr<mxp_config, decltype(&mxp_config_destroy)> cfg(nullptr, mxp_config_destroy);
  mxp_config* raw = nullptr;
  if (int rc = report(mxp_config_create(&raw))) return rc;
  cfg.reset(raw);

  if (command == "metrics")
    if (int rc = report(mxp_config_load_dataset(cfg.get(), o.dataset.c_str()))) return rc;
  if (!o.config_file.empty())
    if (int rc = report(mxp_config_load_file(cfg.get(), o.config_file.c_str()))) return rc;
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "mixprobe: --set expects key=value, got '" << kv << "'\n";
      return kExitUsage;
    }
    if (int rc = report(mxp_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                       kv.substr(eq + 1).c_str())))
      return rc;
  }
  if (o.seed >= 0)
    if (int rc = report(mxp_config_set(cfg.get(), "seed", std::to_string(o.seed).c_str())))
      return rc;
  if (o.threads >= 0)
    if (int rc = report(mxp_config_set(cfg.get(), "threads", std::to_string(o.threads).c_str())))
      return rc;
  if (int rc = report(mxp_config_validate(cfg.get()))) return rc;

  const std::string out = o.out.empty() ? default_out(command) : o.out;
  mxp_status s = MXP_OK;
  if (command == "simulate") s = mxp_run_simulate(cfg.get(), out.c_str());
  else if (command == "gen-dataset") s = mxp_run_gen_dataset(cfg.get(), out.c_str());
  else if (command == "metrics") s = mxp_run_metrics(cfg.get(), o.dataset.c_str(), out.c_str());
  else if (command == "sweep") s = mxp_run_sweep(cfg.get(), out.c_str());
  if (int rc = report(s)) return rc;

  char hash[17];
  if (mxp_config_hash(cfg.get(), hash, sizeof hash) == MXP_OK)
    std::cout << command << ": wrote " << out << " (config " << hash << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixprobe: mixnet simulator and anonymity auditing toolkit"};
  app.set_version_flag("--version", std::string(mxp_version()));
  app.require_subcommand(1);

  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_file, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.overrides, "override one key (key=value), repeatable");
    sub->add_option("--out", o.out, "output directory (default runs/<command>-<timestamp>)");
    sub->add_option("--seed", o.seed, "master seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "run the network and write a link trace");
  auto* gen = app.add_subcommand("gen-dataset", "play game rounds and write a labelled dataset");
  auto* metrics = app.add_subcommand("metrics", "evaluate the baseline attacker on a dataset");
  auto* sweep = app.add_subcommand("sweep", "accuracy and latency across mix parameters");
  for (auto* sub : {simulate, gen, metrics, sweep}) common(sub);
  metrics->add_option("--dataset", o.dataset, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  return run(app.get_subcommands().front()->get_name(), o);
}
