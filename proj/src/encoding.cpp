#include "mixprobe/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace mixprobe {

bool is_supported_length(std::size_t length) {
  return std::find(kSequenceLengths.begin(), kSequenceLengths.end(), length) !=
         kSequenceLengths.end();
}

TokenSequence encode(const Trace& trace, const ObservationWindow& window, std::size_t length,
                     std::uint32_t vocab_size) {
  if (window.end < window.start) throw std::invalid_argument("encode: inverted window");
  if (window.start < trace.start || window.end > trace.end)
    throw std::invalid_argument("encode: window exceeds the recorded trace");
  if (vocab_size < 2) throw std::invalid_argument("encode: vocabulary too small");

  TokenSequence seq;
  seq.vocab_size = vocab_size;
  seq.tokens.assign(length, kInactiveToken);
  std::size_t pos = 0;
  for (const auto& ev : trace.events) {
    if (pos == length) break;
    if (ev.time < window.start || ev.time >= window.end) continue;
    if (ev.link == kInactiveToken || ev.link >= vocab_size - 1)
      throw std::invalid_argument("encode: link id outside the vocabulary");
    seq.tokens[pos++] = ev.link;
  }
  return seq;
}

std::vector<Link> decode(const TokenSequence& seq, const Topology& topology) {
  std::vector<Link> out;
  for (Token t : seq.tokens) {
    if (t == kInactiveToken || t == seq.cls_token()) continue;
    out.push_back(topology.link(t));
  }
  return out;
}

MaskRegion choose_mask_region(std::size_t sequence_length, std::size_t target, Rng& rng) {
  if (!is_supported_length(target))
    throw std::invalid_argument("mask: unsupported target length");
  if (target > sequence_length)
    throw std::invalid_argument("mask: target longer than the sequence");
  std::uniform_int_distribution<std::size_t> start(0, sequence_length - target);
  return MaskRegion{start(rng), target};
}

TokenSequence apply_mask(TokenSequence seq, const MaskRegion& region) {
  for (std::size_t i = 0; i < seq.tokens.size(); ++i)
    if (!region.contains(static_cast<std::int64_t>(i))) seq.tokens[i] = kInactiveToken;
  return seq;
}

TokenSequence mask_to_length(const TokenSequence& seq, std::size_t target, Rng& rng,
                             MaskRegion* region) {
  const MaskRegion r = choose_mask_region(seq.length(), target, rng);
  if (region) *region = r;
  return apply_mask(seq, r);
}

TokenSequence prepend_cls(TokenSequence seq) {
  if (!seq.tokens.empty()) seq.tokens[0] = seq.cls_token();
  return seq;
}

}  // namespace mixprobe
