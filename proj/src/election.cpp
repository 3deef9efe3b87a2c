#include "cwm/election.hpp"

#include <string>

namespace cwm {

void check_order(int m, std::span<const Candidate> order) {
  if (order.size() != static_cast<std::size_t>(m)) {
    throw InputError("ballot ranks " + std::to_string(order.size()) +
                     " candidates, expected " + std::to_string(m));
  }
  std::vector<bool> seen(m, false);
  for (Candidate c : order) {
    if (c < 0 || c >= m) {
      throw InputError("ballot names unknown candidate " + std::to_string(c));
    }
    if (seen[c]) {
      throw InputError("ballot ranks candidate " + std::to_string(c) + " twice");
    }
    seen[c] = true;
  }
}

Profile::Profile(int m, std::vector<WeightedBallot> ballots)
    : m_(m), ballots_(std::move(ballots)) {
  if (m < 1) throw InputError("an election needs at least one candidate");
  for (const auto& b : ballots_) {
    check_order(m, b.order);
    if (b.weight < 1) {
      throw InputError("ballot weight must be a positive integer, got " +
                       std::to_string(b.weight));
    }
    if (b.weight > (kTallyLimit - 1) / m - total_weight_) {
      throw OverflowError("total ballot weight times candidate count exceeds 2^62");
    }
    total_weight_ += b.weight;
  }
}

Profile validate_profile(int m, std::vector<WeightedBallot> ballots) {
  return Profile(m, std::move(ballots));
}

std::vector<int> positions_of(std::span<const Candidate> order) {
  std::vector<int> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  return pos;
}

PairwiseMatrix pairwise_tally(const Profile& profile) {
  const int m = profile.m();
  PairwiseMatrix n(m);
  for (const auto& b : profile.ballots()) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) n(b.order[i], b.order[j]) += b.weight;
    }
  }
  return n;
}

Weight net_preference(const PairwiseMatrix& tally, Candidate x, Candidate y) {
  return tally(x, y) - tally(y, x);
}

Profile expand_weights(const Profile& profile, std::size_t cap) {
  if (static_cast<std::uint64_t>(profile.total_weight()) > cap) {
    throw BudgetExceeded("weight expansion would create " +
                         std::to_string(profile.total_weight()) +
                         " ballots (cap " + std::to_string(cap) + ")");
  }
  std::vector<WeightedBallot> unit;
  unit.reserve(static_cast<std::size_t>(profile.total_weight()));
  for (const auto& b : profile.ballots()) {
    for (Weight k = 0; k < b.weight; ++k) unit.push_back({b.order, 1});
  }
  return Profile(profile.m(), std::move(unit));
}

}  // namespace cwm
