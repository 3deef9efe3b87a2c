#include "cwm/protocols.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_map>

namespace cwm {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r) || r >= kTallyLimit || r <= -kTallyLimit) {
    throw OverflowError("score tally leaves the checked 62-bit range");
  }
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r >= kTallyLimit || r <= -kTallyLimit) {
    throw OverflowError("score tally leaves the checked 62-bit range");
  }
  return r;
}

void require_pairwise(const Profile& profile, const char* what) {
  if (profile.m() < 2) throw InputError(std::string(what) + " needs at least two candidates");
}

// Plurality weight of each candidate in `alive` when ballots count toward their
// highest-ranked surviving candidate.
std::vector<Weight> transferred_plurality(const Profile& profile, std::uint32_t alive) {
  std::vector<Weight> tally(profile.m(), 0);
  for (const auto& b : profile.ballots()) {
    for (Candidate c : b.order) {
      if (alive & (1u << c)) {
        tally[c] += b.weight;
        break;
      }
    }
  }
  return tally;
}

std::uint32_t all_mask(int m) { return m >= 32 ? ~0u : (1u << m) - 1u; }

void check_size_for_masks(int m) {
  if (m > 31) throw InputError("at most 31 candidates are supported");
}

// Winner(s) of the pairwise election x vs y.
std::uint32_t pairwise_result(const PairwiseMatrix& n, Candidate x, Candidate y,
                              const TieBreakPolicy& tb, std::span<const int> ranks) {
  const Weight d = net_preference(n, x, y);
  if (d > 0) return 1u << x;
  if (d < 0) return 1u << y;
  if (tb.branching()) return (1u << x) | (1u << y);
  return ranks[x] < ranks[y] ? (1u << x) : (1u << y);
}

}  // namespace

// --- ScoringVector ---------------------------------------------------------

ScoringVector::ScoringVector(std::vector<std::int64_t> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw InputError("scoring vector is empty");
  for (std::size_t i = 1; i < alpha_.size(); ++i) {
    if (alpha_[i] > alpha_[i - 1]) throw InputError("scoring vector must be non-increasing");
  }
  for (auto a : alpha_) {
    if (a >= kTallyLimit || a <= -kTallyLimit) throw OverflowError("scoring vector entry too large");
  }
}

ScoringVector ScoringVector::borda(int m) {
  std::vector<std::int64_t> a(m);
  for (int i = 0; i < m; ++i) a[i] = m - 1 - i;
  return ScoringVector(std::move(a));
}

ScoringVector ScoringVector::plurality(int m) {
  std::vector<std::int64_t> a(m, 0);
  a.at(0) = 1;
  return ScoringVector(std::move(a));
}

ScoringVector ScoringVector::veto(int m) {
  std::vector<std::int64_t> a(m, 1);
  a.at(m - 1) = 0;
  return ScoringVector(std::move(a));
}

bool ScoringVector::is_plurality_like() const {
  if (alpha_.size() < 2 || alpha_[0] == alpha_[1]) return false;
  return alpha_[1] == alpha_.back();
}

// --- CupTree ---------------------------------------------------------------

CupTree CupTree::leaf(Candidate c) {
  CupTree t;
  t.nodes_.push_back(Node{c, -1, -1});
  return t;
}

CupTree CupTree::join(const CupTree& left, const CupTree& right) {
  CupTree t;
  const int left_base = 1;
  const int right_base = 1 + static_cast<int>(left.nodes_.size());
  t.nodes_.push_back(Node{-1, left_base, right_base});
  auto append = [&t](const CupTree& sub, int base) {
    for (Node n : sub.nodes_) {
      if (!n.is_leaf()) {
        n.left += base;
        n.right += base;
      }
      t.nodes_.push_back(n);
    }
  };
  append(left, left_base);
  append(right, right_base);
  return t;
}

std::vector<Candidate> CupTree::leaves() const {
  std::vector<Candidate> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.is_leaf()) {
      out.push_back(n.candidate);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

std::vector<int> CupTree::leaf_depths() const {
  std::vector<int> out;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes_[idx];
    if (n.is_leaf()) {
      out.push_back(depth);
    } else {
      stack.push_back({n.right, depth + 1});
      stack.push_back({n.left, depth + 1});
    }
  }
  return out;
}

void CupTree::check(int m) const {
  if (nodes_.empty()) throw InputError("cup tree is empty");
  const auto l = leaves();
  check_order(m, l);
  const auto d = leaf_depths();
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  if (*hi - *lo > 1) throw InputError("cup tree is not balanced");
}

namespace {
CupTree balanced_range(Candidate first, int count) {
  if (count == 1) return CupTree::leaf(first);
  const int left = (count + 1) / 2;
  return CupTree::join(balanced_range(first, left), balanced_range(first + left, count - left));
}
}  // namespace

CupTree build_balanced_tree(int m) {
  if (m < 1) throw InputError("a cup needs at least one candidate");
  return balanced_range(0, m);
}

// --- TieBreakPolicy --------------------------------------------------------

TieBreakPolicy TieBreakPolicy::lexicographic(std::vector<Candidate> priority) {
  TieBreakPolicy tb(Kind::Lexicographic);
  tb.priority_ = std::move(priority);
  return tb;
}

std::vector<int> TieBreakPolicy::ranks(int m) const {
  std::vector<int> r(m);
  if (priority_.empty()) {
    std::iota(r.begin(), r.end(), 0);
    return r;
  }
  check_order(m, priority_);
  for (int i = 0; i < m; ++i) r[priority_[i]] = i;
  return r;
}

std::string to_string(TieBreakPolicy::Kind kind) {
  switch (kind) {
    case TieBreakPolicy::Kind::Lexicographic: return "lexicographic";
    case TieBreakPolicy::Kind::Pessimistic: return "pessimistic";
    case TieBreakPolicy::Kind::Optimistic: return "optimistic";
  }
  return "?";
}

// --- ProtocolSpec helpers --------------------------------------------------

std::string protocol_name(const ProtocolSpec& spec) {
  struct Visitor {
    std::string operator()(const protocol::Scoring& s) const {
      const int m = s.alpha.size();
      if (s.alpha == ScoringVector::plurality(m)) return "plurality";
      if (s.alpha == ScoringVector::borda(m)) return "borda";
      if (m >= 2 && s.alpha == ScoringVector::veto(m)) return "veto";
      return "scoring";
    }
    std::string operator()(const protocol::Maximin&) const { return "maximin"; }
    std::string operator()(const protocol::Copeland&) const { return "copeland"; }
    std::string operator()(const protocol::Stv&) const { return "stv"; }
    std::string operator()(const protocol::PluralityRunoff&) const { return "runoff"; }
    std::string operator()(const protocol::Cup&) const { return "cup"; }
    std::string operator()(const protocol::RandomizedCup&) const { return "randomized-cup"; }
  };
  return std::visit(Visitor{}, spec);
}

void check_protocol(const ProtocolSpec& spec, int m) {
  if (const auto* s = std::get_if<protocol::Scoring>(&spec)) {
    if (s->alpha.size() != m) {
      throw InputError("scoring vector has " + std::to_string(s->alpha.size()) +
                       " entries for " + std::to_string(m) + " candidates");
    }
  } else if (const auto* c = std::get_if<protocol::Cup>(&spec)) {
    c->tree.check(m);
  }
}

bool is_randomized(const ProtocolSpec& spec) {
  return std::holds_alternative<protocol::RandomizedCup>(spec);
}

WinnerDistribution WinnerDistribution::point_mass(int m, Candidate c) {
  WinnerDistribution d;
  d.denominator = 1;
  d.lower.assign(m, 0);
  d.upper.assign(m, 0);
  d.lower[c] = d.upper[c] = 1;
  return d;
}

WinnerSet mask_to_set(std::uint32_t mask) {
  WinnerSet out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// --- Scores ----------------------------------------------------------------

std::vector<std::int64_t> scoring_scores(const Profile& profile, const ScoringVector& alpha) {
  const int m = profile.m();
  if (alpha.size() != m) throw InputError("scoring vector length does not match candidate count");
  std::vector<std::int64_t> score(m, 0);
  for (const auto& b : profile.ballots()) {
    for (int pos = 0; pos < m; ++pos) {
      const Candidate c = b.order[pos];
      score[c] = checked_add(score[c], checked_mul(b.weight, alpha.alpha()[pos]));
    }
  }
  return score;
}

std::vector<std::int64_t> maximin_scores(const Profile& profile) {
  require_pairwise(profile, "maximin");
  const auto n = pairwise_tally(profile);
  const int m = profile.m();
  std::vector<std::int64_t> score(m);
  for (int i = 0; i < m; ++i) {
    Weight worst = kTallyLimit;
    for (int j = 0; j < m; ++j) {
      if (j != i) worst = std::min(worst, n(i, j));
    }
    score[i] = worst;
  }
  return score;
}

std::vector<std::int64_t> copeland_scores(const Profile& profile) {
  require_pairwise(profile, "Copeland");
  const auto n = pairwise_tally(profile);
  const int m = profile.m();
  std::vector<std::int64_t> score(m, 0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const Weight d = net_preference(n, i, j);
      score[i] += (d > 0) - (d < 0);
    }
  }
  return score;
}

WinnerSet select_top(std::span<const std::int64_t> scores, const TieBreakPolicy& tb) {
  const int m = static_cast<int>(scores.size());
  const auto best = *std::max_element(scores.begin(), scores.end());
  WinnerSet top;
  for (int c = 0; c < m; ++c) {
    if (scores[c] == best) top.push_back(c);
  }
  if (tb.branching() || top.size() == 1) return top;
  const auto r = tb.ranks(m);
  return {*std::min_element(top.begin(), top.end(),
                            [&](Candidate a, Candidate b) { return r[a] < r[b]; })};
}

// --- STV and runoff --------------------------------------------------------

WinnerSet stv_winner(const Profile& profile, const TieBreakPolicy& tb) {
  const int m = profile.m();
  check_size_for_masks(m);
  const auto ranks = tb.ranks(m);

  // Achievable winners from a set of surviving candidates.
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto solve = [&](auto&& self, std::uint32_t alive) -> std::uint32_t {
    if (std::has_single_bit(alive)) return alive;
    if (auto it = memo.find(alive); it != memo.end()) return it->second;
    const auto tally = transferred_plurality(profile, alive);
    Weight lowest = kTallyLimit;
    for (std::uint32_t rest = alive; rest; rest &= rest - 1) {
      lowest = std::min(lowest, tally[std::countr_zero(rest)]);
    }
    std::uint32_t result = 0;
    Candidate last = -1;
    for (std::uint32_t rest = alive; rest; rest &= rest - 1) {
      const Candidate c = std::countr_zero(rest);
      if (tally[c] != lowest) continue;
      if (tb.branching()) {
        result |= self(self, alive & ~(1u << c));
      } else if (last < 0 || ranks[c] > ranks[last]) {
        last = c;
      }
    }
    if (!tb.branching()) result = self(self, alive & ~(1u << last));
    memo.emplace(alive, result);
    return result;
  };
  return mask_to_set(solve(solve, all_mask(m)));
}

WinnerSet runoff_winner(const Profile& profile, const TieBreakPolicy& tb) {
  require_pairwise(profile, "plurality with runoff");
  const int m = profile.m();
  check_size_for_masks(m);
  const auto ranks = tb.ranks(m);
  const auto tally = transferred_plurality(profile, all_mask(m));
  const auto n = pairwise_tally(profile);

  // Candidates that can take a finalist spot among `pool` under tie-breaking.
  auto leaders = [&](std::uint32_t pool) {
    Weight best = -1;
    for (std::uint32_t rest = pool; rest; rest &= rest - 1) {
      best = std::max(best, tally[std::countr_zero(rest)]);
    }
    std::vector<Candidate> out;
    for (std::uint32_t rest = pool; rest; rest &= rest - 1) {
      const Candidate c = std::countr_zero(rest);
      if (tally[c] == best) out.push_back(c);
    }
    if (!tb.branching()) {
      out = {*std::min_element(out.begin(), out.end(),
                               [&](Candidate a, Candidate b) { return ranks[a] < ranks[b]; })};
    }
    return out;
  };

  std::uint32_t result = 0;
  for (Candidate first : leaders(all_mask(m))) {
    for (Candidate second : leaders(all_mask(m) & ~(1u << first))) {
      result |= pairwise_result(n, first, second, tb, ranks);
    }
  }
  return mask_to_set(result);
}

// --- Cups ------------------------------------------------------------------

std::uint32_t cup_winner_mask(const PairwiseMatrix& tally, const CupTree& tree,
                              std::span<const Candidate> slot, const TieBreakPolicy& tb,
                              std::span<const int> ranks) {
  const auto& nodes = tree.nodes();
  auto eval = [&](auto&& self, int idx) -> std::uint32_t {
    const auto& node = nodes[idx];
    if (node.is_leaf()) return 1u << slot[node.candidate];
    const std::uint32_t left = self(self, node.left);
    const std::uint32_t right = self(self, node.right);
    std::uint32_t out = 0;
    for (std::uint32_t l = left; l; l &= l - 1) {
      for (std::uint32_t r = right; r; r &= r - 1) {
        out |= pairwise_result(tally, std::countr_zero(l), std::countr_zero(r), tb, ranks);
      }
    }
    return out;
  };
  return eval(eval, 0);
}

WinnerSet cup_winner(const Profile& profile, const CupTree& tree, const TieBreakPolicy& tb) {
  const int m = profile.m();
  check_size_for_masks(m);
  tree.check(m);
  std::vector<Candidate> identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  const auto ranks = tb.ranks(m);
  return mask_to_set(cup_winner_mask(pairwise_tally(profile), tree, identity, tb, ranks));
}

WinnerDistribution randomized_cup_distribution(const Profile& profile, const TieBreakPolicy& tb,
                                               int max_candidates) {
  const int m = profile.m();
  if (m > max_candidates) {
    throw BudgetExceeded("randomized cup enumerates m! brackets; m = " + std::to_string(m) +
                         " exceeds the cap of " + std::to_string(max_candidates));
  }
  const auto tree = build_balanced_tree(m);
  const auto tally = pairwise_tally(profile);
  const auto ranks = tb.ranks(m);

  WinnerDistribution dist;
  dist.lower.assign(m, 0);
  dist.upper.assign(m, 0);
  dist.denominator = 0;
  std::vector<Candidate> slot(m);
  std::iota(slot.begin(), slot.end(), 0);
  do {
    const std::uint32_t mask = cup_winner_mask(tally, tree, slot, tb, ranks);
    ++dist.denominator;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) ++dist.upper[std::countr_zero(rest)];
    if (std::has_single_bit(mask)) ++dist.lower[std::countr_zero(mask)];
  } while (std::next_permutation(slot.begin(), slot.end()));
  return dist;
}

// --- Dispatch --------------------------------------------------------------

Outcome winner(const Profile& profile, const ProtocolSpec& spec, const TieBreakPolicy& tb) {
  check_protocol(spec, profile.m());
  struct Visitor {
    const Profile& p;
    const TieBreakPolicy& tb;
    Outcome operator()(const protocol::Scoring& s) const {
      return {select_top(scoring_scores(p, s.alpha), tb), {}};
    }
    Outcome operator()(const protocol::Maximin&) const {
      return {select_top(maximin_scores(p), tb), {}};
    }
    Outcome operator()(const protocol::Copeland&) const {
      return {select_top(copeland_scores(p), tb), {}};
    }
    Outcome operator()(const protocol::Stv&) const { return {stv_winner(p, tb), {}}; }
    Outcome operator()(const protocol::PluralityRunoff&) const {
      return {runoff_winner(p, tb), {}};
    }
    Outcome operator()(const protocol::Cup& c) const { return {cup_winner(p, c.tree, tb), {}}; }
    Outcome operator()(const protocol::RandomizedCup&) const {
      auto dist = randomized_cup_distribution(p, tb);
      WinnerSet support;
      for (int c = 0; c < p.m(); ++c) {
        if (dist.upper[c] > 0) support.push_back(c);
      }
      return {std::move(support), std::move(dist)};
    }
  };
  return std::visit(Visitor{profile, tb}, spec);
}

}  // namespace cwm
