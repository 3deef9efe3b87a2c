#include "cwm/generator.hpp"

#include <limits>
#include <numeric>

#include "cwm/format.hpp"

namespace cwm {

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw InputError("empty sampling range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::int64_t SeededRng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::vector<Candidate> SeededRng::permutation(int m) {
  std::vector<Candidate> p(m);
  std::iota(p.begin(), p.end(), 0);
  for (int i = m - 1; i > 0; --i) std::swap(p[i], p[below(static_cast<std::uint64_t>(i) + 1)]);
  return p;
}

ManipulationInstance generate_random(const GeneratorParams& params) {
  if (params.m < 1 || params.m > 31) throw InputError("m must lie in [1, 31]");
  if (params.ballots < 0) throw InputError("ballot count must be nonnegative");
  if (params.max_weight < 1 || params.max_coalition_weight < 1) {
    throw InputError("maximum weights must be at least 1");
  }
  if (params.coalition_size < 0) throw InputError("coalition size must be nonnegative");

  SeededRng rng(params.seed);
  std::vector<WeightedBallot> ballots;
  for (int i = 0; i < params.ballots; ++i) {
    auto order = rng.permutation(params.m);
    ballots.push_back({std::move(order), rng.between(1, params.max_weight)});
  }
  ManipulationInstance inst;
  inst.nonmanipulators = Profile(params.m, std::move(ballots));
  for (int i = 0; i < params.coalition_size; ++i) {
    inst.coalition.push_back(rng.between(1, params.max_coalition_weight));
  }
  inst.goal = {params.goal, static_cast<Candidate>(rng.below(params.m))};
  inst.protocol = make_protocol(params.protocol, params.m);
  inst.tiebreak = params.tiebreak;
  if (is_randomized(inst.protocol)) {
    static const Rational kThresholds[] = {Rational(0), Rational(1, 4), Rational(1, 2)};
    inst.threshold = params.threshold ? *params.threshold : kThresholds[rng.below(3)];
  }
  inst.check();
  return inst;
}

}  // namespace cwm
