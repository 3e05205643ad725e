#include "mixprobe/attacker.hpp"

#include <cmath>

namespace mixprobe::attack {

BeliefState update(BeliefState belief, double p0, double p1) {
  belief.log_odds += std::log(p0 + kEvidenceSmoothing) - std::log(p1 + kEvidenceSmoothing);
  ++belief.evidence_count;
  return belief;
}

int decide(const BeliefState& belief, Rng& rng) {
  if (belief.log_odds > 0.0) return 0;
  if (belief.log_odds < 0.0) return 1;
  return std::uniform_int_distribution<int>(0, 1)(rng);
}

BeliefState accumulate(const GameInstance& game, const MaskRegion& region) {
  BeliefState b;
  for (const auto& m : game.tracked)
    if (m.recipient == game.recipient && m.delivered_in_window() && region.contains(m.egress_pos))
      b = update(b, m.p0, m.p1);
  return b;
}

int guess(const GameInstance& game, const MaskRegion& region) {
  Rng tie(derive_seed(game.seed, "tie-break/" + std::to_string(region.start) + "/" +
                                     std::to_string(region.length)));
  return decide(accumulate(game, region), tie);
}

}  // namespace mixprobe::attack
