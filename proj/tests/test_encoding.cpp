#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "mixprobe/encoding.hpp"

using namespace mixprobe;

namespace {

Topology three_users() {
  return Topology::single(NodeConfig{MixStrategy::make_threshold(3), true}, 3);
}

// Users 0 and 1 send three messages to user 2 through one threshold-3 node.
Trace hand_trace(const Topology& t) {
  Trace tr;
  tr.start = 0.0;
  tr.end = 10.0;
  tr.events = {{1.0, t.user_to_node(0, 0), 0}, {2.0, t.user_to_node(1, 0), 1},
               {3.0, t.user_to_node(0, 0), 2}, {3.0, t.node_to_user(0, 2), 1},
               {3.0, t.node_to_user(0, 2), 0}, {3.0, t.node_to_user(0, 2), 2}};
  return tr;
}

}  // namespace

TEST(Encode, HandBuiltThreeMessageTrace) {
  const auto t = three_users();
  const auto seq = encode(hand_trace(t), {0.0, 10.0}, 256, t.vocab_size());
  ASSERT_EQ(seq.length(), 256u);
  // ingress links 1, 2; egress link to user 2 is 3 + 1 + 2 = 6
  const std::vector<Token> head(seq.tokens.begin(), seq.tokens.begin() + 6);
  EXPECT_EQ(head, (std::vector<Token>{1, 2, 1, 6, 6, 6}));
  EXPECT_TRUE(std::all_of(seq.tokens.begin() + 6, seq.tokens.end(), [](Token x) { return x == 0; }));
}

TEST(Encode, EmptyWindowIsAllZero) {
  const auto t = three_users();
  const auto seq = encode(hand_trace(t), {5.0, 5.0}, 512, t.vocab_size());
  EXPECT_EQ(seq.length(), 512u);
  EXPECT_TRUE(std::all_of(seq.tokens.begin(), seq.tokens.end(), [](Token x) { return x == 0; }));
}

TEST(Encode, WindowMustLieInsideTrace) {
  const auto t = three_users();
  EXPECT_THROW(encode(hand_trace(t), {-1.0, 5.0}, 256, t.vocab_size()), std::invalid_argument);
  EXPECT_THROW(encode(hand_trace(t), {0.0, 11.0}, 256, t.vocab_size()), std::invalid_argument);
  EXPECT_THROW(encode(hand_trace(t), {6.0, 5.0}, 256, t.vocab_size()), std::invalid_argument);
}

TEST(Encode, WindowSelectsEvents) {
  const auto t = three_users();
  const auto seq = encode(hand_trace(t), {2.0, 3.0}, 256, t.vocab_size());
  EXPECT_EQ(seq.tokens[0], 2u);
  EXPECT_EQ(seq.tokens[1], 0u);
}

TEST(Encode, VocabularyCoversLinksPlusZeroAndMarker) {
  const auto t = three_users();
  EXPECT_EQ(t.vocab_size(), t.links().size() + 2);
  for (const auto& l : t.links()) {
    EXPECT_NE(l.id, kInactiveToken);
    EXPECT_NE(l.id, t.cls_token());
  }
}

TEST(Decode, RoundTripsVisibleEvents) {
  const auto t = three_users();
  const auto tr = hand_trace(t);
  const auto seq = encode(tr, {0.0, 10.0}, 256, t.vocab_size());
  const auto links = decode(seq, t);
  ASSERT_EQ(links.size(), tr.events.size());
  for (std::size_t i = 0; i < links.size(); ++i) EXPECT_EQ(links[i], t.link(tr.events[i].link));
  EXPECT_EQ(links[0].from, (Endpoint{Endpoint::Kind::User, 0}));
  EXPECT_EQ(links[3].to, (Endpoint{Endpoint::Kind::User, 2}));
}

TEST(Mask, FullLengthIsIdentity) {
  TokenSequence s{std::vector<Token>(4096, 3), 10};
  Rng rng(1);
  MaskRegion r;
  EXPECT_EQ(mask_to_length(s, 4096, rng, &r), s);
  EXPECT_EQ(r.start, 0u);
}

TEST(Mask, RetainsExactlyTargetPositionsInOrder) {
  TokenSequence s{std::vector<Token>(4096), 5000};
  for (std::size_t i = 0; i < 4096; ++i) s.tokens[i] = static_cast<Token>(i + 1);
  for (std::size_t target : {256u, 512u, 1024u, 2048u}) {
    Rng rng(target);
    MaskRegion r;
    const auto m = mask_to_length(s, target, rng, &r);
    EXPECT_EQ(m.length(), 4096u);
    std::vector<Token> kept;
    for (Token x : m.tokens)
      if (x) kept.push_back(x);
    ASSERT_EQ(kept.size(), target);
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));
    EXPECT_EQ(kept.front(), r.start + 1);
    EXPECT_EQ(kept.back() - kept.front() + 1, target);
  }
}

TEST(Mask, RegionStartIsUniform) {
  Rng rng(3);
  std::vector<int> bins(4, 0);
  for (int i = 0; i < 40000; ++i) ++bins[choose_mask_region(4096, 2048, rng).start * 4 / 2049];
  for (int b : bins) EXPECT_NEAR(b, 10000, 450);
}

TEST(Mask, Errors) {
  Rng rng(1);
  EXPECT_THROW(choose_mask_region(2048, 4096, rng), std::invalid_argument);
  EXPECT_THROW(choose_mask_region(4096, 300, rng), std::invalid_argument);
  EXPECT_FALSE(is_supported_length(8192));
  EXPECT_TRUE(is_supported_length(256));
}

TEST(Cls, ReplacesFirstTokenAndIsIdempotent) {
  TokenSequence s{{5, 7, 7}, 10};
  const auto c = prepend_cls(s);
  EXPECT_EQ(c.tokens, (std::vector<Token>{9, 7, 7}));
  EXPECT_EQ(prepend_cls(c), c);
}
