#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

#include "cwm/election.hpp"

namespace cwm {

using Rational = boost::rational<std::int64_t>;

// Positional score vector, non-increasing.
class ScoringVector {
 public:
  explicit ScoringVector(std::vector<std::int64_t> alpha);

  static ScoringVector borda(int m);
  static ScoringVector plurality(int m);
  static ScoringVector veto(int m);

  const std::vector<std::int64_t>& alpha() const { return alpha_; }
  int size() const { return static_cast<int>(alpha_.size()); }

  // alpha_1 > alpha_2 = ... = alpha_m, i.e. an affine image of plurality.
  bool is_plurality_like() const;

  friend bool operator==(const ScoringVector&, const ScoringVector&) = default;

 private:
  std::vector<std::int64_t> alpha_;
};

// Balanced binary bracket.  Leaves hold candidates; internal nodes have two
// children.  Node 0 is the root.
class CupTree {
 public:
  struct Node {
    Candidate candidate = -1;  // leaves only
    int left = -1;
    int right = -1;
    bool is_leaf() const { return left < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  static CupTree leaf(Candidate c);
  static CupTree join(const CupTree& left, const CupTree& right);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  // Leaf candidates, left to right.
  std::vector<Candidate> leaves() const;
  // Depth of every leaf, left to right (root has depth 0).
  std::vector<int> leaf_depths() const;

  // Throws InputError unless the leaves are a permutation of 0..m-1 and the
  // leaf depths differ by at most one.
  void check(int m) const;

  friend bool operator==(const CupTree&, const CupTree&) = default;

 private:
  std::vector<Node> nodes_;
};

// Splits m into ceil(m/2) / floor(m/2) recursively; leaves 0..m-1 left to right.
CupTree build_balanced_tree(int m);

// Explicit treatment of ties.  Lexicographic resolves every tie with a fixed
// priority order (first entry = highest priority).  Pessimistic and Optimistic
// explore every resolution; winner queries then return the set of achievable
// winners, and the manipulation layer reads that set as "wins under every
// resolution" or "wins under some resolution" respectively.
class TieBreakPolicy {
 public:
  enum class Kind { Lexicographic, Pessimistic, Optimistic };

  TieBreakPolicy() = default;

  static TieBreakPolicy lexicographic(std::vector<Candidate> priority = {});
  static TieBreakPolicy pessimistic() { return TieBreakPolicy(Kind::Pessimistic); }
  static TieBreakPolicy optimistic() { return TieBreakPolicy(Kind::Optimistic); }

  Kind kind() const { return kind_; }
  bool branching() const { return kind_ != Kind::Lexicographic; }

  // Empty means the identity order 0, 1, ..., m-1.
  const std::vector<Candidate>& priority() const { return priority_; }

  // Priority rank of every candidate (0 = highest).  Throws InputError if an
  // explicit priority order is not a permutation of 0..m-1.
  std::vector<int> ranks(int m) const;

  friend bool operator==(const TieBreakPolicy&, const TieBreakPolicy&) = default;

 private:
  explicit TieBreakPolicy(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Lexicographic;
  std::vector<Candidate> priority_;
};

std::string to_string(TieBreakPolicy::Kind kind);

namespace protocol {
struct Scoring {
  ScoringVector alpha;
  friend bool operator==(const Scoring&, const Scoring&) = default;
};
struct Maximin {
  friend bool operator==(const Maximin&, const Maximin&) = default;
};
struct Copeland {
  friend bool operator==(const Copeland&, const Copeland&) = default;
};
struct Stv {
  friend bool operator==(const Stv&, const Stv&) = default;
};
struct PluralityRunoff {
  friend bool operator==(const PluralityRunoff&, const PluralityRunoff&) = default;
};
struct Cup {
  CupTree tree;
  friend bool operator==(const Cup&, const Cup&) = default;
};
struct RandomizedCup {
  friend bool operator==(const RandomizedCup&, const RandomizedCup&) = default;
};
}  // namespace protocol

using ProtocolSpec =
    std::variant<protocol::Scoring, protocol::Maximin, protocol::Copeland, protocol::Stv,
                 protocol::PluralityRunoff, protocol::Cup, protocol::RandomizedCup>;

// Short display name: "plurality", "borda", "veto", "scoring", "maximin", ...
std::string protocol_name(const ProtocolSpec& spec);

// Throws InputError if the spec does not fit an m-candidate election.
void check_protocol(const ProtocolSpec& spec, int m);

bool is_randomized(const ProtocolSpec& spec);

// Sorted, duplicate-free.
using WinnerSet = std::vector<Candidate>;

// Winner lottery of the randomized cup, as exact counts over the m! leaf
// assignments.  Under a lexicographic policy lower == upper.  Under branching
// policies lower[c] counts assignments where c wins under every tie
// resolution and upper[c] those where c wins under some resolution.
struct WinnerDistribution {
  std::int64_t denominator = 1;
  std::vector<std::int64_t> lower;
  std::vector<std::int64_t> upper;

  Rational lower_probability(Candidate c) const { return {lower[c], denominator}; }
  Rational upper_probability(Candidate c) const { return {upper[c], denominator}; }
  // Exact probability; only meaningful when lower == upper.
  Rational probability(Candidate c) const { return lower_probability(c); }
  bool exact() const { return lower == upper; }

  static WinnerDistribution point_mass(int m, Candidate c);

  friend bool operator==(const WinnerDistribution&, const WinnerDistribution&) = default;
};

// Result of winner().  For the randomized cup `winners` is the support of the
// distribution (every candidate with a nonzero upper probability).
struct Outcome {
  WinnerSet winners;
  std::optional<WinnerDistribution> distribution;
};

std::vector<std::int64_t> scoring_scores(const Profile& profile, const ScoringVector& alpha);
std::vector<std::int64_t> maximin_scores(const Profile& profile);
std::vector<std::int64_t> copeland_scores(const Profile& profile);

// Highest-score candidates after tie-breaking.
WinnerSet select_top(std::span<const std::int64_t> scores, const TieBreakPolicy& tb);

WinnerSet stv_winner(const Profile& profile, const TieBreakPolicy& tb);
WinnerSet runoff_winner(const Profile& profile, const TieBreakPolicy& tb);
WinnerSet cup_winner(const Profile& profile, const CupTree& tree, const TieBreakPolicy& tb);

inline constexpr int kRandomizedCupMaxCandidates = 8;

WinnerDistribution randomized_cup_distribution(const Profile& profile, const TieBreakPolicy& tb,
                                               int max_candidates = kRandomizedCupMaxCandidates);

Outcome winner(const Profile& profile, const ProtocolSpec& spec, const TieBreakPolicy& tb);

// Bracket evaluation on a precomputed margin matrix D(x, y).  `slot` maps each
// leaf's candidate in `tree` to the candidate actually placed there.  Returns
// the achievable winners as a bitmask.
std::uint32_t cup_winner_mask(const PairwiseMatrix& tally, const CupTree& tree,
                              std::span<const Candidate> slot, const TieBreakPolicy& tb,
                              std::span<const int> ranks);

WinnerSet mask_to_set(std::uint32_t mask);

}  // namespace cwm
