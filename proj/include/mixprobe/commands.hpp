#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mixprobe/config.hpp"
#include "mixprobe/report.hpp"

namespace mixprobe {

// Each command writes into `out` (created if missing) and produces the same
// bytes for the same config, whatever the thread count.

// trace.csv, ledger.csv, manifest.json and config.txt for one free-running
// simulation (burn-in excluded from the trace).
void cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out);

// Dataset directory; see dataset_io.hpp for the layout.
void cmd_gen_dataset(const ExperimentConfig& config, const std::filesystem::path& out);

// metrics.csv and table.txt over a stored dataset. Mask lengths come from
// the config; lengths longer than the stored sequences are dropped.
MetricsReport cmd_metrics(const ExperimentConfig& config, const std::filesystem::path& dataset_dir,
                          const std::filesystem::path& out);

// Anonymity/latency trade-off sweep: accuracy.csv and latency.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& config);
std::vector<SweepPoint> cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out);

// Config stored in a dataset manifest; throws ConfigError if it does not parse.
ExperimentConfig config_from_entries(const std::map<std::string, std::string>& entries);
ExperimentConfig config_from_dataset(const std::filesystem::path& dataset_dir);

}  // namespace mixprobe
