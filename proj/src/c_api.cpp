#include "mixprobe/mixprobe.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "mixprobe/attacker.hpp"
#include "mixprobe/commands.hpp"
#include "mixprobe/config.hpp"
#include "mixprobe/metrics.hpp"

struct mxp_config {
  mixprobe::ExperimentConfig value;
};

namespace {

thread_local std::string g_last_error;

mxp_status fail(mxp_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
mxp_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return MXP_OK;
  } catch (const mixprobe::ConfigError& e) {
    return fail(MXP_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MXP_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(MXP_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(MXP_ERR_RUNTIME, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* mxp_version(void) { return "0.1.0"; }

const char* mxp_last_error(void) { return g_last_error.c_str(); }

mxp_status mxp_config_create(mxp_config** out) {
  if (!out) return fail(MXP_ERR_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new mxp_config(); });
}

void mxp_config_destroy(mxp_config* config) { delete config; }

mxp_status mxp_config_load_file(mxp_config* config, const char* path) {
  if (!config || !path) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { config->value.load_file(path); });
}

mxp_status mxp_config_load_dataset(mxp_config* config, const char* dataset_dir) {
  if (!config || !dataset_dir) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { config->value = mixprobe::config_from_dataset(dataset_dir); });
}

mxp_status mxp_config_set(mxp_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { config->value.set(key, value); });
}

mxp_status mxp_config_validate(const mxp_config* config) {
  if (!config) return fail(MXP_ERR_ARGUMENT, "null config");
  return guarded([&] { config->value.validate(); });
}

mxp_status mxp_config_hash(const mxp_config* config, char* buf, size_t buf_len) {
  if (!config || !buf) return fail(MXP_ERR_ARGUMENT, "null argument");
  if (buf_len < 17) return fail(MXP_ERR_ARGUMENT, "hash buffer needs 17 bytes");
  return guarded([&] {
    const std::string h = config->value.hash();
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

mxp_status mxp_config_canonical(const mxp_config* config, char* buf, size_t buf_len,
                                size_t* needed) {
  if (!config) return fail(MXP_ERR_ARGUMENT, "null config");
  return guarded([&] {
    const std::string s = config->value.canonical();
    if (needed) *needed = s.size() + 1;
    if (buf && buf_len > 0) {
      const std::size_t n = std::min(buf_len - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

mxp_status mxp_run_simulate(const mxp_config* config, const char* out_dir) {
  if (!config || !out_dir) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { mixprobe::cmd_simulate(config->value, out_dir); });
}

mxp_status mxp_run_gen_dataset(const mxp_config* config, const char* out_dir) {
  if (!config || !out_dir) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { mixprobe::cmd_gen_dataset(config->value, out_dir); });
}

mxp_status mxp_run_metrics(const mxp_config* config, const char* dataset_dir,
                           const char* out_dir) {
  if (!config || !dataset_dir || !out_dir) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { mixprobe::cmd_metrics(config->value, dataset_dir, out_dir); });
}

mxp_status mxp_run_sweep(const mxp_config* config, const char* out_dir) {
  if (!config || !out_dir) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] { mixprobe::cmd_sweep(config->value, out_dir); });
}

mxp_status mxp_entropy(const double* probabilities, size_t count, double* out_bits) {
  if (!out_bits || (!probabilities && count > 0)) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out_bits = mixprobe::metrics::entropy_bits(std::span<const double>(probabilities, count));
  });
}

mxp_status mxp_likelihood_diff(double p0, double p1, double* out, int* defined) {
  if (!out || !defined) return fail(MXP_ERR_ARGUMENT, "null argument");
  if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0))
    return fail(MXP_ERR_ARGUMENT, "probabilities must lie in [0, 1]");
  return guarded([&] {
    const auto d = mixprobe::metrics::likelihood_diff(p0, p1);
    *defined = d.has_value();
    if (d) *out = *d;
  });
}

mxp_status mxp_play_round(const mxp_config* config, uint64_t seed, mxp_round_summary* summary,
                          uint32_t* tokens, size_t tokens_len) {
  if (!config || !summary) return fail(MXP_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    config->value.validate();
    const auto g = mixprobe::play_round(config->value.game_config(), seed);
    const mixprobe::MaskRegion full{0, g.observation.length()};
    summary->seed = g.seed;
    summary->suspects[0] = g.suspects[0];
    summary->suspects[1] = g.suspects[1];
    summary->recipient = g.recipient;
    summary->bit = g.bit;
    summary->guess = mixprobe::attack::guess(g, full);
    summary->deliveries = mixprobe::attack::accumulate(g, full).evidence_count;
    summary->messages_from_true_sender = g.messages_from_true_sender(full);
    if (tokens) {
      const std::size_t n = std::min(tokens_len, g.observation.length());
      std::copy_n(g.observation.tokens.begin(), n, tokens);
    }
  });
}

}  // extern "C"
