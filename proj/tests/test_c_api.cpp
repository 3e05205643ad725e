#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "mixprobe/mixprobe.h"

namespace fs = std::filesystem;

namespace {

struct ConfigHandle {
  mxp_config* p = nullptr;
  ConfigHandle() { EXPECT_EQ(mxp_config_create(&p), MXP_OK); }
  ~ConfigHandle() { mxp_config_destroy(p); }
};

}  // namespace

TEST(CApi, Version) { EXPECT_STREQ(mxp_version(), "0.1.0"); }

TEST(CApi, ConfigSetValidateHash) {
  ConfigHandle c;
  EXPECT_EQ(mxp_config_validate(c.p), MXP_OK);
  char h1[17], h2[17];
  ASSERT_EQ(mxp_config_hash(c.p, h1, sizeof h1), MXP_OK);
  EXPECT_EQ(std::strlen(h1), 16u);
  ASSERT_EQ(mxp_config_set(c.p, "threshold", "50"), MXP_OK);
  ASSERT_EQ(mxp_config_hash(c.p, h2, sizeof h2), MXP_OK);
  EXPECT_STRNE(h1, h2);
  EXPECT_EQ(mxp_config_hash(c.p, h2, 8), MXP_ERR_ARGUMENT);
}

TEST(CApi, ErrorCodes) {
  ConfigHandle c;
  EXPECT_EQ(mxp_config_set(c.p, "bogus", "1"), MXP_ERR_CONFIG);
  EXPECT_NE(std::string(mxp_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(mxp_config_set(nullptr, "users", "1"), MXP_ERR_ARGUMENT);
  EXPECT_EQ(mxp_config_create(nullptr), MXP_ERR_ARGUMENT);
  ASSERT_EQ(mxp_config_set(c.p, "strategy", "poisson"), MXP_OK);
  ASSERT_EQ(mxp_config_set(c.p, "lambda", "0"), MXP_OK);
  EXPECT_EQ(mxp_config_validate(c.p), MXP_ERR_CONFIG);
  EXPECT_EQ(mxp_run_simulate(c.p, "/tmp/mixprobe_capi_never"), MXP_ERR_CONFIG);
  EXPECT_EQ(mxp_config_load_file(c.p, "/nonexistent.cfg"), MXP_ERR_CONFIG);
  EXPECT_EQ(mxp_config_load_dataset(c.p, "/nonexistent_dir"), MXP_ERR_RUNTIME);
}

TEST(CApi, Canonical) {
  ConfigHandle c;
  std::size_t needed = 0;
  ASSERT_EQ(mxp_config_canonical(c.p, nullptr, 0, &needed), MXP_OK);
  std::vector<char> buf(needed);
  ASSERT_EQ(mxp_config_canonical(c.p, buf.data(), buf.size(), &needed), MXP_OK);
  EXPECT_NE(std::string(buf.data()).find("threshold = 100"), std::string::npos);
}

TEST(CApi, Entropy) {
  std::vector<double> p(1024, 1.0 / 1024);
  double h = 0;
  ASSERT_EQ(mxp_entropy(p.data(), p.size(), &h), MXP_OK);
  EXPECT_NEAR(h, 10.0, 1e-12);
  const double bad[2] = {0.5, 0.2};
  EXPECT_EQ(mxp_entropy(bad, 2, &h), MXP_ERR_ARGUMENT);
}

TEST(CApi, LikelihoodDiff) {
  double e = -1;
  int defined = 0;
  ASSERT_EQ(mxp_likelihood_diff(0.75, 0.25, &e, &defined), MXP_OK);
  EXPECT_EQ(defined, 1);
  EXPECT_NEAR(e, std::log(3.0), 1e-9);
  ASSERT_EQ(mxp_likelihood_diff(0.0, 0.0, &e, &defined), MXP_OK);
  EXPECT_EQ(defined, 0);
  EXPECT_EQ(mxp_likelihood_diff(1.5, 0.0, &e, &defined), MXP_ERR_ARGUMENT);
}

TEST(CApi, PlayRound) {
  ConfigHandle c;
  ASSERT_EQ(mxp_config_set(c.p, "threshold", "10"), MXP_OK);
  ASSERT_EQ(mxp_config_set(c.p, "length", "512"), MXP_OK);
  ASSERT_EQ(mxp_config_set(c.p, "mask_lengths", "512"), MXP_OK);
  mxp_round_summary a{}, b{};
  std::vector<uint32_t> ta(512), tb(512);
  ASSERT_EQ(mxp_play_round(c.p, 5, &a, ta.data(), ta.size()), MXP_OK);
  ASSERT_EQ(mxp_play_round(c.p, 5, &b, tb.data(), tb.size()), MXP_OK);
  EXPECT_EQ(ta, tb);
  EXPECT_EQ(a.bit, b.bit);
  EXPECT_NE(a.suspects[0], a.suspects[1]);
  EXPECT_EQ(a.seed, 5u);
}

TEST(CApi, DatasetAndMetricsRoundTrip) {
  const auto ds = fs::temp_directory_path() / "mixprobe_capi_ds";
  const auto out = fs::temp_directory_path() / "mixprobe_capi_metrics";
  fs::remove_all(ds);
  fs::remove_all(out);
  ConfigHandle c;
  for (auto [k, v] : {std::pair{"length", "256"}, {"mask_lengths", "256"}, {"samples", "10"},
                      {"burn_in", "50"}, {"threshold", "10"}})
    ASSERT_EQ(mxp_config_set(c.p, k, v), MXP_OK);
  ASSERT_EQ(mxp_run_gen_dataset(c.p, ds.c_str()), MXP_OK) << mxp_last_error();
  ConfigHandle loaded;
  ASSERT_EQ(mxp_config_load_dataset(loaded.p, ds.c_str()), MXP_OK);
  char h1[17], h2[17];
  mxp_config_hash(c.p, h1, sizeof h1);
  mxp_config_hash(loaded.p, h2, sizeof h2);
  EXPECT_STREQ(h1, h2);
  ASSERT_EQ(mxp_run_metrics(loaded.p, ds.c_str(), out.c_str()), MXP_OK) << mxp_last_error();
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
}
