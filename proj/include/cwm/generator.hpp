#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "cwm/manipulation.hpp"

namespace cwm {

// Seeded source of uniform integers.  The engine (mt19937_64) is fully
// specified by the standard and bounded draws use rejection sampling, so a
// seed yields the same stream on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  // Fisher-Yates shuffle of 0..m-1.
  std::vector<Candidate> permutation(int m);

 private:
  std::mt19937_64 engine_;
};

struct GeneratorParams {
  std::uint64_t seed = 0;
  int m = 3;
  int ballots = 4;
  Weight max_weight = 5;
  int coalition_size = 2;
  Weight max_coalition_weight = 5;
  GoalKind goal = GoalKind::Constructive;
  std::string protocol = "plurality";
  TieBreakPolicy tiebreak = TieBreakPolicy::pessimistic();
  // Randomized cup only; drawn from {0, 1/4, 1/2} when absent.
  std::optional<Rational> threshold;
};

// Draw order: per ballot a shuffled order then a weight in [1, max_weight];
// then coalition weights in [1, max_coalition_weight]; then the goal
// candidate; then (randomized cup without a fixed threshold) the threshold.
// Throws InputError when a parameter is out of range.
ManipulationInstance generate_random(const GeneratorParams& params);

}  // namespace cwm
