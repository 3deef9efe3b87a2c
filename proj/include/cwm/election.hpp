#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cwm/error.hpp"

namespace cwm {

// Candidates are dense 0-based indices; labels only exist at the I/O boundary.
using Candidate = int;
using Weight = std::int64_t;

// Every tally must stay strictly below this bound.
inline constexpr std::int64_t kTallyLimit = std::int64_t{1} << 62;

// A strict linear order over all candidates (most preferred first) with a
// positive integer weight.
struct WeightedBallot {
  std::vector<Candidate> order;
  Weight weight = 1;

  friend bool operator==(const WeightedBallot&, const WeightedBallot&) = default;
};

// A validated list of weighted ballots over candidates 0..m-1.  Ballots keep
// their insertion order.
class Profile {
 public:
  Profile() = default;

  // Throws InputError on a malformed ballot, OverflowError if
  // total_weight * m would not fit the checked tally range.
  Profile(int m, std::vector<WeightedBallot> ballots);

  int m() const { return m_; }
  const std::vector<WeightedBallot>& ballots() const { return ballots_; }
  Weight total_weight() const { return total_weight_; }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  int m_ = 0;
  std::vector<WeightedBallot> ballots_;
  Weight total_weight_ = 0;
};

// Throws InputError unless `order` is a permutation of 0..m-1.
void check_order(int m, std::span<const Candidate> order);

Profile validate_profile(int m, std::vector<WeightedBallot> ballots);

// N(i, j): total weight of ballots ranking i above j.
class PairwiseMatrix {
 public:
  explicit PairwiseMatrix(int m) : m_(m), n_(static_cast<std::size_t>(m) * m, 0) {}

  int m() const { return m_; }
  Weight operator()(Candidate i, Candidate j) const { return n_[index(i, j)]; }
  Weight& operator()(Candidate i, Candidate j) { return n_[index(i, j)]; }

  friend bool operator==(const PairwiseMatrix&, const PairwiseMatrix&) = default;

 private:
  std::size_t index(Candidate i, Candidate j) const {
    return static_cast<std::size_t>(i) * m_ + j;
  }

  int m_;
  std::vector<Weight> n_;
};

PairwiseMatrix pairwise_tally(const Profile& profile);

// D(x, y) = N(x, y) - N(y, x).
Weight net_preference(const PairwiseMatrix& tally, Candidate x, Candidate y);

inline constexpr std::size_t kDefaultExpansionCap = 1'000'000;

// Replaces each weight-k ballot by k unit-weight copies.  Throws
// BudgetExceeded if the result would hold more than `cap` ballots.
Profile expand_weights(const Profile& profile, std::size_t cap = kDefaultExpansionCap);

// Position (0-based) of every candidate within `order`.
std::vector<int> positions_of(std::span<const Candidate> order);

}  // namespace cwm
