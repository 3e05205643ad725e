#include "mixprobe/report.hpp"

#include <cmath>
#include <cstdio>
#include <string_view>

#include "mixprobe/attacker.hpp"
#include "mixprobe/config.hpp"
#include "mixprobe/metrics.hpp"

namespace mixprobe {

MaskRegion evaluation_region(const GameInstance& game, std::size_t mask_length) {
  const std::size_t len = game.observation.length();
  if (mask_length == len) return MaskRegion{0, len};
  Rng rng(derive_seed(game.seed, "mask/" + std::to_string(mask_length)));
  return choose_mask_region(len, mask_length, rng);
}

SampleEvaluation evaluate_sample(const GameInstance& game, std::size_t mask_length) {
  const MaskRegion region = evaluation_region(game, mask_length);
  SampleEvaluation e;
  e.label = game.bit;
  e.guess = attack::guess(game, region);
  e.messages_from_true_sender = game.messages_from_true_sender(region);

  double eps_sum = 0.0, hs_sum = 0.0;
  std::size_t eps_n = 0, hs_n = 0;
  for (const auto& m : game.tracked) {
    if (!m.delivered_in_window() || !region.contains(m.egress_pos)) continue;
    if (m.recipient == game.recipient) {
      ++e.evidence;
      if (auto d = metrics::likelihood_diff(m.p0, m.p1)) {
        eps_sum += *d;
        ++eps_n;
      } else {
        ++e.likelihood_excluded;
      }
    }
    if (m.sender == game.suspects[0] || m.sender == game.suspects[1]) {
      hs_sum += m.entropy;
      ++hs_n;
    }
  }
  if (eps_n) e.likelihood_diff = eps_sum / static_cast<double>(eps_n);
  if (hs_n) e.entropy_suspects = hs_sum / static_cast<double>(hs_n);

  double h_sum = 0.0;
  std::size_t h_n = 0;
  for (const auto& [pos, h] : game.delivery_entropy)
    if (region.contains(pos)) {
      h_sum += h;
      ++h_n;
    }
  if (h_n) e.entropy_all = h_sum / static_cast<double>(h_n);
  return e;
}

namespace {

struct Column {
  std::vector<double> means;
  std::vector<double> p_previous;
  std::vector<bool> starred;
};

// Adjacent-row significance; rows with fewer than two samples get no star and
// break the comparison with their neighbours.
Column summarize(const std::vector<const std::vector<double>*>& rows) {
  const std::size_t n = rows.size();
  Column c{std::vector<double>(n, std::nan("")), std::vector<double>(n, 1.0),
           std::vector<bool>(n, false)};
  std::vector<bool> diff_prev(n, false), diff_next(n, false), usable(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i]->empty()) c.means[i] = stats::mean(*rows[i]);
    usable[i] = rows[i]->size() >= 2;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!usable[i] || !usable[i - 1]) continue;
    const auto t = stats::welch_t_test(*rows[i - 1], *rows[i]);
    c.p_previous[i] = t.p_value;
    diff_prev[i] = diff_next[i - 1] = t.p_value < 0.05;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!usable[i] || n < 2) continue;
    const bool prev_ok = i == 0 || diff_prev[i];
    const bool next_ok = i + 1 == n || diff_next[i];
    c.starred[i] = prev_ok && next_ok;
  }
  return c;
}

std::string num(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

MetricsReport compute_report(std::span<const GameInstance> samples,
                             std::span<const std::size_t> mask_lengths,
                             const std::string& config_hash, const std::string& split,
                             unsigned threads) {
  if (samples.empty()) throw std::invalid_argument("metrics: no samples to evaluate");
  MetricsReport report{config_hash, split, {}};
  for (std::size_t len : mask_lengths) {
    std::vector<SampleEvaluation> evals(samples.size());
    parallel_for(samples.size(), threads,
                 [&](std::size_t i) { evals[i] = evaluate_sample(samples[i], len); });
    MetricsRow row;
    row.observations = len;
    row.samples = samples.size();
    double msgs = 0.0;
    for (const auto& e : evals) {
      msgs += static_cast<double>(e.messages_from_true_sender);
      row.correct += e.guess == e.label;
      row.correct_samples.push_back(e.guess == e.label ? 1.0 : 0.0);
      row.likelihood_excluded += e.likelihood_excluded;
      if (e.likelihood_diff) row.likelihood_diff_samples.push_back(*e.likelihood_diff);
      if (e.entropy_suspects) row.entropy_suspect_samples.push_back(*e.entropy_suspects);
      if (e.entropy_all) row.entropy_all_samples.push_back(*e.entropy_all);
    }
    row.messages_from_true_sender = msgs / static_cast<double>(samples.size());
    row.accuracy = static_cast<double>(row.correct) / static_cast<double>(samples.size());
    row.accuracy_ci = stats::wilson_interval(row.correct, samples.size());
    row.likelihood_samples = row.likelihood_diff_samples.size();
    report.rows.push_back(std::move(row));
  }

  auto column = [&](std::vector<double> MetricsRow::*field) {
    std::vector<const std::vector<double>*> v;
    for (const auto& r : report.rows) v.push_back(&(r.*field));
    return summarize(v);
  };
  const Column acc = column(&MetricsRow::correct_samples);
  const Column eps = column(&MetricsRow::likelihood_diff_samples);
  const Column hs = column(&MetricsRow::entropy_suspect_samples);
  const Column ha = column(&MetricsRow::entropy_all_samples);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto& r = report.rows[i];
    r.accuracy_p_previous = acc.p_previous[i];
    r.accuracy_starred = acc.starred[i];
    r.likelihood_diff = eps.means[i];
    r.likelihood_p_previous = eps.p_previous[i];
    r.likelihood_starred = eps.starred[i];
    r.entropy_suspects = hs.means[i];
    r.entropy_suspects_starred = hs.starred[i];
    r.entropy_all = ha.means[i];
    r.entropy_all_starred = ha.starred[i];
  }
  return report;
}

std::string metrics_csv(const MetricsReport& report) {
  std::string s =
      "config_hash,split,observations,samples,messages_from_true_sender,accuracy,accuracy_ci_lo,"
      "accuracy_ci_hi,accuracy_p_previous,accuracy_starred,likelihood_diff,likelihood_samples,"
      "likelihood_excluded,likelihood_p_previous,likelihood_starred,entropy_suspects,"
      "entropy_suspects_starred,entropy_all,entropy_all_starred\n";
  for (const auto& r : report.rows) {
    s += report.config_hash + "," + report.split + "," + std::to_string(r.observations) + "," +
         std::to_string(r.samples) + "," + format_double(r.messages_from_true_sender) + "," +
         format_double(r.accuracy) + "," + format_double(r.accuracy_ci.lo) + "," +
         format_double(r.accuracy_ci.hi) + "," + format_double(r.accuracy_p_previous) + "," +
         (r.accuracy_starred ? "1" : "0") + "," + format_double(r.likelihood_diff) + "," +
         std::to_string(r.likelihood_samples) + "," + std::to_string(r.likelihood_excluded) +
         "," + format_double(r.likelihood_p_previous) + "," +
         (r.likelihood_starred ? "1" : "0") + "," + format_double(r.entropy_suspects) + "," +
         (r.entropy_suspects_starred ? "1" : "0") + "," + format_double(r.entropy_all) + "," +
         (r.entropy_all_starred ? "1" : "0") + "\n";
  }
  return s;
}

std::string metrics_table(const MetricsReport& report) {
  std::string s = "config " + report.config_hash + ", split " + report.split + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %-9s %-24s %-10s %-11s %-10s\n", "observations",
                "messages", "accuracy [95% CI]", "epsilon", "H suspects", "H all");
  s += buf;
  for (const auto& r : report.rows) {
    const std::string acc = num(r.accuracy, 3) + (r.accuracy_starred ? "*" : "") + " [" +
                            num(r.accuracy_ci.lo, 3) + ", " + num(r.accuracy_ci.hi, 3) + "]";
    const std::string eps = num(r.likelihood_diff, 3) + (r.likelihood_starred ? "*" : "");
    const std::string hs = num(r.entropy_suspects, 3) + (r.entropy_suspects_starred ? "*" : "");
    const std::string ha = num(r.entropy_all, 3) + (r.entropy_all_starred ? "*" : "");
    std::snprintf(buf, sizeof buf, "%-12zu %-9s %-24s %-10s %-11s %-10s\n", r.observations,
                  num(r.messages_from_true_sender, 2).c_str(), acc.c_str(), eps.c_str(),
                  hs.c_str(), ha.c_str());
    s += buf;
  }
  s += "* differs from every adjacent row (Welch t-test, p < 0.05)\n";
  return s;
}

std::string sweep_accuracy_csv(std::span<const SweepPoint> points) {
  std::string s =
      "series,threshold,pool_count,lambda,latency_x,mean_latency,accuracy,ci_lo,ci_hi,rounds\n";
  for (const auto& p : points) {
    s += p.series + "," + std::to_string(p.strategy.batching() ? p.strategy.threshold : 0) + "," +
         std::to_string(p.strategy.pool_count) + "," + format_double(p.strategy.mean_delay) +
         "," + format_double(p.latency_x) + "," + format_double(p.latency.mean) + "," +
         format_double(p.accuracy) + "," + format_double(p.accuracy_ci.lo) + "," +
         format_double(p.accuracy_ci.hi) + "," + std::to_string(p.rounds) + "\n";
  }
  return s;
}

std::string sweep_latency_csv(std::span<const SweepPoint> points) {
  std::string s = "series,threshold,pool_count,lambda,latency_x,mean_latency,stddev_latency,messages\n";
  for (const auto& p : points) {
    s += p.series + "," + std::to_string(p.strategy.batching() ? p.strategy.threshold : 0) + "," +
         std::to_string(p.strategy.pool_count) + "," + format_double(p.strategy.mean_delay) +
         "," + format_double(p.latency_x) + "," + format_double(p.latency.mean) + "," +
         format_double(p.latency.stddev) + "," + std::to_string(p.latency.count) + "\n";
  }
  return s;
}

}  // namespace mixprobe
