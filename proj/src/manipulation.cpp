#include "cwm/manipulation.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <boost/functional/hash.hpp>

namespace cwm {

std::string to_string(GoalKind kind) {
  return kind == GoalKind::Constructive ? "constructive" : "destructive";
}

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::PluralityTrivial: return "plurality_trivial";
    case SolverMethod::IdenticalVoteSearch: return "identical_vote_search";
    case SolverMethod::CupConstructive: return "cup_constructive";
    case SolverMethod::CupDestructive: return "cup_destructive";
    case SolverMethod::DestructiveMonotone: return "destructive_monotone";
    case SolverMethod::ExactSearchConstructive: return "exact_search_constructive";
    case SolverMethod::ExactSearchDestructive: return "exact_search_destructive";
  }
  return "?";
}

std::string ManipulationResult::method_label() const {
  return complete ? to_string(method) : to_string(method) + "(incomplete)";
}

Weight ManipulationInstance::coalition_weight() const {
  return std::accumulate(coalition.begin(), coalition.end(), Weight{0});
}

void ManipulationInstance::check() const {
  const int n = m();
  if (goal.candidate < 0 || goal.candidate >= n) {
    throw InputError("goal candidate " + std::to_string(goal.candidate) + " out of range");
  }
  Weight total = nonmanipulators.total_weight();
  for (Weight w : coalition) {
    if (w < 1) throw InputError("coalition weights must be positive integers");
    if (w > (kTallyLimit - 1) / n - total) {
      throw OverflowError("coalition weight pushes the tally past 2^62");
    }
    total += w;
  }
  check_protocol(protocol, n);
  tiebreak.ranks(n);
  if (is_randomized(protocol)) {
    if (!threshold) throw InputError("the randomized cup needs a probability threshold r");
    if (*threshold < Rational(0) || *threshold > Rational(1)) throw InputError("threshold r must lie in [0, 1]");
  } else if (threshold) {
    throw InputError("a probability threshold only applies to the randomized cup");
  }
}

std::vector<std::vector<Candidate>> all_orderings(int m) {
  std::vector<std::vector<Candidate>> out;
  std::vector<Candidate> order(m);
  std::iota(order.begin(), order.end(), 0);
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

// --- Goal evaluation --------------------------------------------------------

namespace {

bool contains(const WinnerSet& s, Candidate c) {
  return std::binary_search(s.begin(), s.end(), c);
}

bool deterministic_goal_met(const ManipulationInstance& inst, const WinnerSet& winners) {
  const Candidate c = inst.goal.candidate;
  const bool sole = winners.size() == 1 && winners.front() == c;
  const bool optimistic = inst.tiebreak.kind() == TieBreakPolicy::Kind::Optimistic;
  if (inst.goal.kind == GoalKind::Constructive) return optimistic ? contains(winners, c) : sole;
  return optimistic ? !sole : !contains(winners, c);
}

bool randomized_goal_met(const ManipulationInstance& inst, const WinnerDistribution& dist,
                         std::optional<Rational>* probability) {
  const Candidate c = inst.goal.candidate;
  const bool constructive = inst.goal.kind == GoalKind::Constructive;
  // The bound that must clear the threshold: for "p wins with probability > r"
  // under pessimistic ties only the guaranteed share counts, and so on.
  Rational p;
  switch (inst.tiebreak.kind()) {
    case TieBreakPolicy::Kind::Lexicographic: p = dist.probability(c); break;
    case TieBreakPolicy::Kind::Pessimistic:
      p = constructive ? dist.lower_probability(c) : dist.upper_probability(c);
      break;
    case TieBreakPolicy::Kind::Optimistic:
      p = constructive ? dist.upper_probability(c) : dist.lower_probability(c);
      break;
  }
  if (probability) *probability = p;
  return constructive ? p > *inst.threshold : p < *inst.threshold;
}

}  // namespace

bool goal_met(const ManipulationInstance& inst, const Outcome& outcome,
              std::optional<Rational>* probability) {
  if (outcome.distribution) return randomized_goal_met(inst, *outcome.distribution, probability);
  return deterministic_goal_met(inst, outcome.winners);
}

Profile merge_witness(const ManipulationInstance& inst, const Witness& witness) {
  if (witness.size() != inst.coalition.size()) {
    throw InputError("witness has " + std::to_string(witness.size()) + " ballots, coalition has " +
                     std::to_string(inst.coalition.size()) + " members");
  }
  auto ballots = inst.nonmanipulators.ballots();
  ballots.reserve(ballots.size() + witness.size());
  for (std::size_t i = 0; i < witness.size(); ++i) {
    ballots.push_back({witness[i], inst.coalition[i]});
  }
  return Profile(inst.m(), std::move(ballots));
}

WitnessVerdict validate_witness(const ManipulationInstance& inst, const Witness& witness) {
  inst.check();
  const Profile merged = merge_witness(inst, witness);
  const Outcome outcome = winner(merged, inst.protocol, inst.tiebreak);
  WitnessVerdict verdict;
  verdict.accepted = goal_met(inst, outcome, &verdict.probability);
  verdict.outcome = outcome;
  return verdict;
}

// --- Helpers ---------------------------------------------------------------

namespace {

void require_goal(const ManipulationInstance& inst, GoalKind kind, const char* solver) {
  if (inst.goal.kind != kind) {
    throw InputError(std::string(solver) + " handles " + to_string(kind) + " goals only");
  }
}

// `first` on top, `last` (if any) at the bottom, everything else ascending.
std::vector<Candidate> ballot_with(int m, Candidate first, Candidate last = -1) {
  std::vector<Candidate> order{first};
  for (Candidate c = 0; c < m; ++c) {
    if (c != first && c != last) order.push_back(c);
  }
  if (last >= 0 && last != first) order.push_back(last);
  return order;
}

struct Evaluation {
  bool met = false;
  std::optional<Rational> probability;
};

Evaluation evaluate(const ManipulationInstance& inst, const Witness& witness) {
  Evaluation e;
  e.met = goal_met(inst, winner(merge_witness(inst, witness), inst.protocol, inst.tiebreak),
                   &e.probability);
  return e;
}

ManipulationResult identical_ballots(const ManipulationInstance& inst, SolverMethod method,
                                     std::vector<std::vector<Candidate>> candidates) {
  ManipulationResult result;
  result.method = method;
  for (auto& order : candidates) {
    ++result.nodes;
    Witness witness(inst.coalition.size(), order);
    auto e = evaluate(inst, witness);
    if (e.met) {
      result.decision = true;
      result.witness = std::move(witness);
      result.probability = e.probability;
      return result;
    }
  }
  return result;
}

}  // namespace

// --- Polynomial solvers ----------------------------------------------------

ManipulationResult plurality_trivial(const ManipulationInstance& inst) {
  inst.check();
  require_goal(inst, GoalKind::Constructive, "plurality_trivial");
  const auto* s = std::get_if<protocol::Scoring>(&inst.protocol);
  if (!s || (inst.m() > 1 && !s->alpha.is_plurality_like())) {
    throw InputError("plurality_trivial needs a plurality scoring vector");
  }
  return identical_ballots(inst, SolverMethod::PluralityTrivial,
                           {ballot_with(inst.m(), inst.goal.candidate)});
}

bool identical_votes_complete(const ProtocolSpec& spec, int m) {
  if (m <= 2) return true;
  if (std::holds_alternative<protocol::Copeland>(spec) ||
      std::holds_alternative<protocol::Maximin>(spec)) {
    return m == 3;
  }
  if (std::holds_alternative<protocol::RandomizedCup>(spec)) return m <= 6;
  return false;
}

ManipulationResult identical_vote_search(const ManipulationInstance& inst) {
  inst.check();
  require_goal(inst, GoalKind::Constructive, "identical_vote_search");
  auto result =
      identical_ballots(inst, SolverMethod::IdenticalVoteSearch, all_orderings(inst.m()));
  result.complete = identical_votes_complete(inst.protocol, inst.m());
  return result;
}

namespace {

// Possible-winner recursion for a regular cup.  x survives a node iff it
// survives its own child and beats some survivor of the other child with the
// whole coalition weight on its side.  Returns the witness order when
// `target` can be made to win.
std::optional<std::vector<Candidate>> cup_plan(const ManipulationInstance& inst,
                                               const CupTree& tree, Candidate target) {
  const int m = inst.m();
  const auto n = pairwise_tally(inst.nonmanipulators);
  const Weight k = inst.coalition_weight();
  const auto ranks = inst.tiebreak.ranks(m);
  const auto kind = inst.tiebreak.kind();

  auto beats = [&](Candidate x, Candidate y) {
    const Weight margin = net_preference(n, x, y) + k;
    switch (kind) {
      case TieBreakPolicy::Kind::Pessimistic: return margin > 0;
      case TieBreakPolicy::Kind::Optimistic: return margin >= 0;
      case TieBreakPolicy::Kind::Lexicographic:
        return margin > 0 || (margin == 0 && ranks[x] < ranks[y]);
    }
    return false;
  };

  const auto& nodes = tree.nodes();
  std::vector<std::uint32_t> alive(nodes.size(), 0);
  std::vector<std::uint32_t> members(nodes.size(), 0);
  // opponent[node][x]: a survivor of the other child that x beats.
  std::vector<std::vector<Candidate>> opponent(nodes.size(), std::vector<Candidate>(m, -1));

  auto solve = [&](auto&& self, int idx) -> std::uint32_t {
    const auto& node = nodes[idx];
    if (node.is_leaf()) {
      members[idx] = 1u << node.candidate;
      return alive[idx] = members[idx];
    }
    const std::uint32_t sides[2] = {self(self, node.left), self(self, node.right)};
    members[idx] = members[node.left] | members[node.right];
    std::uint32_t out = 0;
    for (int side = 0; side < 2; ++side) {
      for (std::uint32_t xs = sides[side]; xs; xs &= xs - 1) {
        const Candidate x = std::countr_zero(xs);
        for (std::uint32_t ys = sides[1 - side]; ys; ys &= ys - 1) {
          const Candidate y = std::countr_zero(ys);
          if (beats(x, y)) {
            out |= 1u << x;
            opponent[idx][x] = y;
            break;
          }
        }
      }
    }
    return alive[idx] = out;
  };
  if (!(solve(solve, 0) & (1u << target))) return std::nullopt;

  // Depth at which each candidate is knocked out along the planned bracket;
  // ranking by that depth puts every planned match winner above its loser.
  std::vector<int> out_depth(m, 0);
  out_depth[target] = -1;
  auto plan = [&](auto&& self, int idx, Candidate x, int depth) -> void {
    const auto& node = nodes[idx];
    if (node.is_leaf()) return;
    const Candidate y = opponent[idx][x];
    out_depth[y] = depth;
    const bool x_left = members[node.left] & (1u << x);
    self(self, x_left ? node.left : node.right, x, depth + 1);
    self(self, x_left ? node.right : node.left, y, depth + 1);
  };
  plan(plan, 0, target, 0);

  std::vector<Candidate> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Candidate a, Candidate b) { return out_depth[a] < out_depth[b]; });
  return order;
}

const CupTree& regular_cup_tree(const ManipulationInstance& inst, const char* solver) {
  const auto* cup = std::get_if<protocol::Cup>(&inst.protocol);
  if (!cup) throw InputError(std::string(solver) + " needs a regular cup protocol");
  return cup->tree;
}

}  // namespace

ManipulationResult cup_constructive(const ManipulationInstance& inst) {
  inst.check();
  require_goal(inst, GoalKind::Constructive, "cup_constructive");
  const auto& tree = regular_cup_tree(inst, "cup_constructive");
  if (inst.coalition.empty()) {
    auto r = identical_ballots(inst, SolverMethod::CupConstructive, {{}});
    r.witness.clear();
    return r;
  }
  ManipulationResult result;
  result.method = SolverMethod::CupConstructive;
  result.nodes = 1;
  if (auto order = cup_plan(inst, tree, inst.goal.candidate)) {
    result.decision = true;
    result.witness.assign(inst.coalition.size(), *order);
  }
  return result;
}

ManipulationResult cup_destructive(const ManipulationInstance& inst) {
  inst.check();
  require_goal(inst, GoalKind::Destructive, "cup_destructive");
  const auto& tree = regular_cup_tree(inst, "cup_destructive");
  ManipulationResult result;
  result.method = SolverMethod::CupDestructive;
  if (inst.coalition.empty()) {
    result.nodes = 1;
    result.decision = evaluate(inst, {}).met;
    return result;
  }
  for (Candidate c = 0; c < inst.m(); ++c) {
    if (c == inst.goal.candidate) continue;
    ++result.nodes;
    if (auto order = cup_plan(inst, tree, c)) {
      result.decision = true;
      result.witness.assign(inst.coalition.size(), *order);
      return result;
    }
  }
  return result;
}

ManipulationResult destructive_monotone(const ManipulationInstance& inst) {
  inst.check();
  require_goal(inst, GoalKind::Destructive, "destructive_monotone");
  if (!std::holds_alternative<protocol::Scoring>(inst.protocol) &&
      !std::holds_alternative<protocol::Maximin>(inst.protocol) &&
      !std::holds_alternative<protocol::Copeland>(inst.protocol)) {
    throw InputError("destructive_monotone needs a monotone score-based protocol");
  }
  const Candidate h = inst.goal.candidate;
  std::vector<std::vector<Candidate>> ballots;
  for (Candidate c = 0; c < inst.m(); ++c) {
    if (c != h) ballots.push_back(ballot_with(inst.m(), c, h));
  }
  if (inst.coalition.empty()) ballots = {{}};
  auto r = identical_ballots(inst, SolverMethod::DestructiveMonotone, std::move(ballots));
  if (inst.coalition.empty()) r.witness.clear();
  return r;
}

// --- Exact search ----------------------------------------------------------

namespace {

// Linear per-ordering statistic that fully determines the protocol's outcome:
// positional scores, pairwise counts, or first-choice counts within every
// candidate subset (enough for STV and runoff).
std::vector<std::vector<Weight>> ordering_features(const ProtocolSpec& spec,
                                                   const std::vector<std::vector<Candidate>>& orders,
                                                   int m) {
  std::vector<std::vector<Weight>> out;
  out.reserve(orders.size());
  for (const auto& order : orders) {
    std::vector<Weight> f;
    if (const auto* s = std::get_if<protocol::Scoring>(&spec)) {
      f.assign(m, 0);
      for (int pos = 0; pos < m; ++pos) f[order[pos]] = s->alpha.alpha()[pos];
    } else if (std::holds_alternative<protocol::Stv>(spec) ||
               std::holds_alternative<protocol::PluralityRunoff>(spec)) {
      for (std::uint32_t subset = 1; subset < (1u << m); ++subset) {
        if (std::has_single_bit(subset)) continue;
        Candidate top = -1;
        for (Candidate c : order) {
          if (subset & (1u << c)) {
            top = c;
            break;
          }
        }
        for (std::uint32_t rest = subset; rest; rest &= rest - 1) {
          f.push_back(std::countr_zero(rest) == top ? 1 : 0);
        }
      }
    } else {
      f.assign(static_cast<std::size_t>(m) * m, 0);
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) f[order[i] * m + order[j]] = 1;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

struct KeyHash {
  std::size_t operator()(const std::vector<Weight>& v) const {
    return boost::hash_range(v.begin(), v.end());
  }
};

class ExactSearch {
 public:
  ExactSearch(const ManipulationInstance& inst, const ExactSearchOptions& options)
      : inst_(inst), options_(options), orders_(all_orderings(inst.m())) {
    features_ = ordering_features(inst.protocol, orders_, inst.m());
    members_.resize(inst.coalition.size());
    std::iota(members_.begin(), members_.end(), 0);
    std::stable_sort(members_.begin(), members_.end(), [&](std::size_t a, std::size_t b) {
      return inst.coalition[a] > inst.coalition[b];
    });
    choice_.assign(inst.coalition.size(), 0);
    acc_.assign(features_.front().size(), 0);
  }

  ManipulationResult run(SolverMethod method) {
    ManipulationResult result;
    result.method = method;
    if (dfs(0, 0)) {
      result.decision = true;
      result.witness.resize(inst_.coalition.size());
      for (std::size_t d = 0; d < members_.size(); ++d) {
        result.witness[members_[d]] = orders_[choice_[d]];
      }
      result.probability = probability_;
    }
    result.nodes = nodes_;
    return result;
  }

 private:
  bool dfs(std::size_t depth, std::size_t first) {
    if (++nodes_ > options_.budget.max_nodes) {
      throw BudgetExceeded("exact search exceeded its node budget of " +
                           std::to_string(options_.budget.max_nodes));
    }
    if (depth == members_.size()) return leaf();

    std::vector<Weight> key;
    if (options_.memoize) {
      key = acc_;
      key.push_back(static_cast<Weight>(depth));
      key.push_back(static_cast<Weight>(first));
      if (failed_.contains(key)) return false;
    }

    const Weight w = inst_.coalition[members_[depth]];
    for (std::size_t o = first; o < orders_.size(); ++o) {
      choice_[depth] = o;
      add(o, w);
      std::size_t next_first = 0;
      if (options_.symmetry && depth + 1 < members_.size() &&
          inst_.coalition[members_[depth + 1]] == w) {
        next_first = o;
      }
      const bool found = dfs(depth + 1, next_first);
      add(o, -w);
      if (found) return true;
    }
    if (options_.memoize) failed_.insert(std::move(key));
    return false;
  }

  void add(std::size_t o, Weight w) {
    const auto& f = features_[o];
    for (std::size_t i = 0; i < f.size(); ++i) acc_[i] += w * f[i];
  }

  bool leaf() {
    Witness witness(inst_.coalition.size());
    for (std::size_t d = 0; d < members_.size(); ++d) witness[members_[d]] = orders_[choice_[d]];
    auto e = evaluate(inst_, witness);
    if (e.met) probability_ = e.probability;
    return e.met;
  }

  const ManipulationInstance& inst_;
  ExactSearchOptions options_;
  std::vector<std::vector<Candidate>> orders_;
  std::vector<std::vector<Weight>> features_;
  std::vector<std::size_t> members_;  // coalition indices, heaviest first
  std::vector<std::size_t> choice_;   // ordering index per search depth
  std::vector<Weight> acc_;
  std::unordered_set<std::vector<Weight>, KeyHash> failed_;
  std::uint64_t nodes_ = 0;
  std::optional<Rational> probability_;
};

ManipulationResult exact_search(const ManipulationInstance& inst, const ExactSearchOptions& options,
                                SolverMethod method) {
  inst.check();
  if (inst.m() > options.budget.max_candidates) {
    throw BudgetExceeded("exact search is capped at " +
                         std::to_string(options.budget.max_candidates) + " candidates");
  }
  if (inst.coalition.size() > options.budget.max_coalition) {
    throw BudgetExceeded("exact search is capped at " +
                         std::to_string(options.budget.max_coalition) + " coalition members");
  }
  return ExactSearch(inst, options).run(method);
}

}  // namespace

ManipulationResult exact_search_constructive(const ManipulationInstance& inst,
                                             const ExactSearchOptions& options) {
  require_goal(inst, GoalKind::Constructive, "exact_search_constructive");
  return exact_search(inst, options, SolverMethod::ExactSearchConstructive);
}

ManipulationResult exact_search_destructive(const ManipulationInstance& inst,
                                            const ExactSearchOptions& options) {
  require_goal(inst, GoalKind::Destructive, "exact_search_destructive");
  return exact_search(inst, options, SolverMethod::ExactSearchDestructive);
}

// --- Dispatch --------------------------------------------------------------

SolverMethod dispatch_method(const ManipulationInstance& inst) {
  const auto& spec = inst.protocol;
  if (inst.goal.kind == GoalKind::Constructive) {
    if (const auto* s = std::get_if<protocol::Scoring>(&spec);
        s && (inst.m() == 1 || s->alpha.is_plurality_like())) {
      return SolverMethod::PluralityTrivial;
    }
    if (std::holds_alternative<protocol::Cup>(spec)) return SolverMethod::CupConstructive;
    const bool identical_route = std::holds_alternative<protocol::Copeland>(spec) ||
                                 std::holds_alternative<protocol::Maximin>(spec) ||
                                 std::holds_alternative<protocol::RandomizedCup>(spec);
    if (identical_route && identical_votes_complete(spec, inst.m())) {
      return SolverMethod::IdenticalVoteSearch;
    }
    return SolverMethod::ExactSearchConstructive;
  }
  if (std::holds_alternative<protocol::Scoring>(spec) ||
      std::holds_alternative<protocol::Maximin>(spec) ||
      std::holds_alternative<protocol::Copeland>(spec)) {
    return SolverMethod::DestructiveMonotone;
  }
  if (std::holds_alternative<protocol::Cup>(spec)) return SolverMethod::CupDestructive;
  return SolverMethod::ExactSearchDestructive;
}

namespace {
ManipulationResult run_method(const ManipulationInstance& inst, const SearchBudget& budget) {
  switch (dispatch_method(inst)) {
    case SolverMethod::PluralityTrivial: return plurality_trivial(inst);
    case SolverMethod::IdenticalVoteSearch: return identical_vote_search(inst);
    case SolverMethod::CupConstructive: return cup_constructive(inst);
    case SolverMethod::CupDestructive: return cup_destructive(inst);
    case SolverMethod::DestructiveMonotone: return destructive_monotone(inst);
    case SolverMethod::ExactSearchConstructive:
      return exact_search_constructive(inst, ExactSearchOptions{budget});
    case SolverMethod::ExactSearchDestructive:
      return exact_search_destructive(inst, ExactSearchOptions{budget});
  }
  throw std::logic_error("unhandled solver method");
}
}  // namespace

ManipulationResult solve_constructive(const ManipulationInstance& inst,
                                      const SearchBudget& budget) {
  inst.check();
  require_goal(inst, GoalKind::Constructive, "solve_constructive");
  return run_method(inst, budget);
}

ManipulationResult solve_destructive(const ManipulationInstance& inst,
                                     const SearchBudget& budget) {
  inst.check();
  require_goal(inst, GoalKind::Destructive, "solve_destructive");
  return run_method(inst, budget);
}

ManipulationResult solve(const ManipulationInstance& inst, const SearchBudget& budget) {
  return inst.goal.kind == GoalKind::Constructive ? solve_constructive(inst, budget)
                                                  : solve_destructive(inst, budget);
}

}  // namespace cwm
