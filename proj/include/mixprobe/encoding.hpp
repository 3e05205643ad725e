#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mixprobe/rng.hpp"
#include "mixprobe/traffic.hpp"

namespace mixprobe {

using Token = std::uint32_t;

inline constexpr Token kInactiveToken = 0;
inline constexpr std::array<std::size_t, 5> kSequenceLengths{256, 512, 1024, 2048, 4096};

bool is_supported_length(std::size_t length);

// Link-id sentence: one token per link transmission, 0 for silence/masked.
struct TokenSequence {
  std::vector<Token> tokens;
  std::uint32_t vocab_size = 0;

  std::size_t length() const { return tokens.size(); }
  Token cls_token() const { return vocab_size - 1; }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct ObservationWindow {
  VirtualTime start = 0.0;
  VirtualTime end = 0.0;
};

// First `length` events of the trace falling in [start, end), zero-padded.
// Throws std::invalid_argument if the window is inverted or reaches outside
// the recorded span of the trace.
TokenSequence encode(const Trace& trace, const ObservationWindow& window, std::size_t length,
                     std::uint32_t vocab_size);

// The adversary-visible event list behind a sequence: one link per non-zero,
// non-marker token, in order.
std::vector<Link> decode(const TokenSequence& seq, const Topology& topology);

struct MaskRegion {
  std::size_t start = 0;
  std::size_t length = 0;
  bool contains(std::int64_t pos) const {
    return pos >= static_cast<std::int64_t>(start) &&
           pos < static_cast<std::int64_t>(start + length);
  }
};

// Uniformly placed contiguous region of `target` positions. Throws
// std::invalid_argument if target is unsupported or longer than the sequence.
MaskRegion choose_mask_region(std::size_t sequence_length, std::size_t target, Rng& rng);

// Zeroes every position outside the region; length is preserved.
TokenSequence apply_mask(TokenSequence seq, const MaskRegion& region);

TokenSequence mask_to_length(const TokenSequence& seq, std::size_t target, Rng& rng,
                             MaskRegion* region = nullptr);

// Overwrites position 0 with the classification marker (vocab_size - 1).
TokenSequence prepend_cls(TokenSequence seq);

}  // namespace mixprobe
