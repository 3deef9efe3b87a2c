#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwm/election.hpp"
#include "cwm/protocols.hpp"

namespace cwm {

enum class GoalKind { Constructive, Destructive };

// Constructive: make `candidate` win.  Destructive: make `candidate` not win.
struct Goal {
  GoalKind kind = GoalKind::Constructive;
  Candidate candidate = 0;

  static Goal constructive(Candidate p) { return {GoalKind::Constructive, p}; }
  static Goal destructive(Candidate h) { return {GoalKind::Destructive, h}; }

  friend bool operator==(const Goal&, const Goal&) = default;
};

std::string to_string(GoalKind kind);

// Coalitional weighted manipulation instance: fixed nonmanipulator ballots,
// open coalition ballots with known weights, a goal, a protocol and a tie
// policy.  `threshold` is required exactly for the randomized cup.
struct ManipulationInstance {
  Profile nonmanipulators;
  std::vector<Weight> coalition;
  Goal goal;
  ProtocolSpec protocol = protocol::Scoring{ScoringVector::plurality(1)};
  TieBreakPolicy tiebreak = TieBreakPolicy::pessimistic();
  std::optional<Rational> threshold;

  int m() const { return nonmanipulators.m(); }
  Weight coalition_weight() const;

  // Throws InputError when an invariant is violated.
  void check() const;
};

enum class SolverMethod {
  PluralityTrivial,
  IdenticalVoteSearch,
  CupConstructive,
  CupDestructive,
  DestructiveMonotone,
  ExactSearchConstructive,
  ExactSearchDestructive,
};

std::string to_string(SolverMethod method);

// Coalition ballots, positionally matched to the instance's coalition weights.
using Witness = std::vector<std::vector<Candidate>>;

struct ManipulationResult {
  bool decision = false;
  Witness witness;
  SolverMethod method = SolverMethod::ExactSearchConstructive;
  // False only for identical-vote search outside the sizes where it is known
  // to be complete; a "no" from an incomplete run is not a proof.
  bool complete = true;
  // Randomized cup: the probability compared against the threshold.
  std::optional<Rational> probability;
  std::uint64_t nodes = 0;

  // "identical_vote_search" or "identical_vote_search(incomplete)", etc.
  std::string method_label() const;
};

struct SearchBudget {
  int max_candidates = 5;
  std::size_t max_coalition = 10;
  std::uint64_t max_nodes = 50'000'000;
};

struct ExactSearchOptions {
  SearchBudget budget;
  bool memoize = true;
  // Equal-weight manipulators take non-decreasing ordering indices.
  bool symmetry = true;
};

// True when the outcome meets the goal under the instance's tie policy (and,
// for the randomized cup, the strict threshold comparison).  `probability`
// receives the compared probability for randomized protocols.
bool goal_met(const ManipulationInstance& inst, const Outcome& outcome,
              std::optional<Rational>* probability = nullptr);

// Nonmanipulator ballots followed by the witness ballots.
Profile merge_witness(const ManipulationInstance& inst, const Witness& witness);

struct WitnessVerdict {
  bool accepted = false;
  // Outcome of the merged election.
  Outcome outcome;
  std::optional<Rational> probability;
};

// Throws InputError on a length mismatch or malformed ballot.
WitnessVerdict validate_witness(const ManipulationInstance& inst, const Witness& witness);

ManipulationResult solve_constructive(const ManipulationInstance& inst,
                                      const SearchBudget& budget = {});
ManipulationResult solve_destructive(const ManipulationInstance& inst,
                                     const SearchBudget& budget = {});
// The solver solve() routes this instance to.
SolverMethod dispatch_method(const ManipulationInstance& inst);
// Dispatches on the goal kind.
ManipulationResult solve(const ManipulationInstance& inst, const SearchBudget& budget = {});

ManipulationResult plurality_trivial(const ManipulationInstance& inst);
ManipulationResult identical_vote_search(const ManipulationInstance& inst);
// Sizes where identical-vote search decides constructive manipulation exactly.
bool identical_votes_complete(const ProtocolSpec& spec, int m);
ManipulationResult cup_constructive(const ManipulationInstance& inst);
ManipulationResult cup_destructive(const ManipulationInstance& inst);
ManipulationResult destructive_monotone(const ManipulationInstance& inst);
ManipulationResult exact_search_constructive(const ManipulationInstance& inst,
                                             const ExactSearchOptions& options = {});
ManipulationResult exact_search_destructive(const ManipulationInstance& inst,
                                            const ExactSearchOptions& options = {});

// All m! orderings of 0..m-1 in lexicographic order.
std::vector<std::vector<Candidate>> all_orderings(int m);

}  // namespace cwm
