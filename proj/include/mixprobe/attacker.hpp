#pragma once

#include <cstddef>

#include "mixprobe/encoding.hpp"
#include "mixprobe/game.hpp"
#include "mixprobe/rng.hpp"

namespace mixprobe::attack {

// Additive smoothing inside the evidence logs.
inline constexpr double kEvidenceSmoothing = 1e-6;

// Log-odds of b = 0 against b = 1; starts at the coin-flip prior.
struct BeliefState {
  double log_odds = 0.0;
  std::size_t evidence_count = 0;
};

// Folds in one message delivered to the recipient:
// log-odds += log(p0 + eta) - log(p1 + eta).
BeliefState update(BeliefState belief, double p0, double p1);

// 0 for positive log-odds, 1 for negative, a fair coin on exact zero.
int decide(const BeliefState& belief, Rng& rng);

// Accumulates every delivery to the game's recipient inside the region.
BeliefState accumulate(const GameInstance& game, const MaskRegion& region);

// accumulate + decide with a tie-break stream derived from the round seed.
int guess(const GameInstance& game, const MaskRegion& region);

}  // namespace mixprobe::attack
