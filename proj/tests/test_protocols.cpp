#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "cwm/protocols.hpp"
#include "oracles.hpp"

using namespace cwm;

namespace {

Profile random_profile(std::mt19937_64& rng, int m, int max_ballots, Weight max_weight) {
  std::vector<WeightedBallot> out;
  const int n = static_cast<int>(rng() % max_ballots) + 1;
  for (int i = 0; i < n; ++i) {
    std::vector<Candidate> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    out.push_back({order, static_cast<Weight>(rng() % max_weight) + 1});
  }
  return Profile(m, std::move(out));
}

std::vector<ProtocolSpec> all_specs(int m) {
  return {protocol::Scoring{ScoringVector::plurality(m)},
          protocol::Scoring{ScoringVector::borda(m)},
          protocol::Scoring{ScoringVector::veto(m)},
          protocol::Maximin{},
          protocol::Copeland{},
          protocol::Stv{},
          protocol::PluralityRunoff{},
          protocol::Cup{build_balanced_tree(m)},
          protocol::RandomizedCup{}};
}

std::vector<TieBreakPolicy> all_policies() {
  return {TieBreakPolicy::lexicographic(), TieBreakPolicy::pessimistic(),
          TieBreakPolicy::optimistic()};
}

WinnerSet majority(const Profile& prof, const TieBreakPolicy& tb) {
  const auto n = pairwise_tally(prof);
  if (n(0, 1) > n(1, 0)) return {0};
  if (n(1, 0) > n(0, 1)) return {1};
  if (tb.branching()) return {0, 1};
  return {tb.ranks(2)[0] < tb.ranks(2)[1] ? 0 : 1};
}

}  // namespace

TEST_CASE("scoring vectors") {
  CHECK(ScoringVector::borda(4).alpha() == std::vector<std::int64_t>{3, 2, 1, 0});
  CHECK(ScoringVector::plurality(3).alpha() == std::vector<std::int64_t>{1, 0, 0});
  CHECK(ScoringVector::veto(3).alpha() == std::vector<std::int64_t>{1, 1, 0});
  CHECK_THROWS_AS(ScoringVector({0, 1}), InputError);
  CHECK(ScoringVector({5, 2, 2, 2}).is_plurality_like());
  CHECK_FALSE(ScoringVector::veto(3).is_plurality_like());
  CHECK(ScoringVector::veto(2).is_plurality_like());
}

TEST_CASE("scoring_scores") {
  const Profile prof(3, {{{0, 1, 2}, 2}});
  CHECK(scoring_scores(prof, ScoringVector::borda(3)) == std::vector<std::int64_t>{4, 2, 0});
  CHECK(scoring_scores(prof, ScoringVector::veto(3)) == std::vector<std::int64_t>{2, 2, 0});
  CHECK(scoring_scores(prof, ScoringVector::plurality(3)) == std::vector<std::int64_t>{2, 0, 0});
  CHECK_THROWS_AS(scoring_scores(prof, ScoringVector::borda(4)), InputError);
  const Profile heavy(2, {{{0, 1}, Weight{1} << 40}});
  CHECK_THROWS_AS(scoring_scores(heavy, ScoringVector({Weight{1} << 30, 0})), OverflowError);
}

TEST_CASE("maximin_scores") {
  const Profile example(3, {{{0, 1, 2}, 3}, {{2, 0, 1}, 2}});
  CHECK(maximin_scores(example) == std::vector<std::int64_t>{3, 0, 2});
  CHECK(maximin_scores(Profile(2, {{{0, 1}, 1}, {{1, 0}, 1}})) == std::vector<std::int64_t>{1, 1});
  CHECK(maximin_scores(Profile(3, {{{0, 1, 2}, 1}})) == std::vector<std::int64_t>{1, 0, 0});
  CHECK_THROWS_AS(maximin_scores(Profile(1, {{{0}, 1}})), InputError);
}

TEST_CASE("copeland_scores") {
  const Profile example(3, {{{0, 1, 2}, 3}, {{2, 0, 1}, 2}});
  CHECK(copeland_scores(example) == std::vector<std::int64_t>{2, 0, -2});
  CHECK(copeland_scores(Profile(2, {{{0, 1}, 1}, {{1, 0}, 1}})) ==
        std::vector<std::int64_t>{0, 0});
  CHECK(copeland_scores(Profile(4, {{{2, 0, 3, 1}, 5}})) ==
        std::vector<std::int64_t>{1, -3, 3, -1});
}

TEST_CASE("stv_winner") {
  constexpr Candidate a = 0, b = 1, h = 2;
  const Profile prof(3, {{{a, h, b}, 6}, {{b, h, a}, 6}, {{h, a, b}, 7}});
  // a and b tie on 6; the tie goes against a (lowest priority), then h 13 vs b 6.
  CHECK(stv_winner(prof, TieBreakPolicy::lexicographic({h, b, a})) == WinnerSet{h});
  CHECK(stv_winner(prof, TieBreakPolicy::lexicographic()) == WinnerSet{h});
  CHECK(stv_winner(prof, TieBreakPolicy::pessimistic()) == WinnerSet{h});

  CHECK(stv_winner(Profile(1, {{{0}, 3}}), TieBreakPolicy::lexicographic()) == WinnerSet{0});
  CHECK(stv_winner(Profile(2, {{{1, 0}, 3}, {{0, 1}, 2}}), TieBreakPolicy::lexicographic()) ==
        WinnerSet{1});

  // Three-way first-round tie: every candidate is achievable under branching.
  const Profile cycle(3, {{{0, 1, 2}, 1}, {{1, 2, 0}, 1}, {{2, 0, 1}, 1}});
  CHECK(stv_winner(cycle, TieBreakPolicy::optimistic()) == WinnerSet{0, 1, 2});
}

TEST_CASE("runoff_winner") {
  constexpr Candidate a = 0, b = 1, h = 2;
  const Profile prof(3, {{{a, h, b}, 6}, {{b, h, a}, 6}, {{h, a, b}, 7},
                         {{a, b, h}, 2}, {{b, a, h}, 2}});
  for (const auto& tb : all_policies()) CHECK(runoff_winner(prof, tb) == WinnerSet{a});
  CHECK(runoff_winner(Profile(2, {{{1, 0}, 2}, {{0, 1}, 1}}), TieBreakPolicy::lexicographic()) ==
        WinnerSet{1});
  CHECK_THROWS_AS(runoff_winner(Profile(1, {}), TieBreakPolicy::lexicographic()), InputError);
}

TEST_CASE("build_balanced_tree") {
  const auto t4 = build_balanced_tree(4);
  CHECK(t4 == CupTree::join(CupTree::join(CupTree::leaf(0), CupTree::leaf(1)),
                            CupTree::join(CupTree::leaf(2), CupTree::leaf(3))));
  CHECK(t4.leaf_depths() == std::vector<int>{2, 2, 2, 2});
  const auto t3 = build_balanced_tree(3);
  CHECK(t3 == CupTree::join(CupTree::join(CupTree::leaf(0), CupTree::leaf(1)), CupTree::leaf(2)));
  CHECK(t3.leaf_depths() == std::vector<int>{2, 2, 1});
  CHECK(build_balanced_tree(2) == CupTree::join(CupTree::leaf(0), CupTree::leaf(1)));
  CHECK(build_balanced_tree(7).leaves() == std::vector<Candidate>{0, 1, 2, 3, 4, 5, 6});
  CHECK_THROWS_AS(build_balanced_tree(0), InputError);

  const auto lopsided = CupTree::join(
      CupTree::join(CupTree::join(CupTree::leaf(0), CupTree::leaf(1)), CupTree::leaf(2)),
      CupTree::leaf(3));
  CHECK_THROWS_AS(lopsided.check(4), InputError);
}

TEST_CASE("cup_winner") {
  const Profile prof(4, {{{0, 1, 2, 3}, 2}, {{2, 3, 0, 1}, 1}});
  CHECK(cup_winner(prof, build_balanced_tree(4), TieBreakPolicy::lexicographic()) == WinnerSet{0});
  const Profile tie(2, {{{0, 1}, 1}, {{1, 0}, 1}});
  CHECK(cup_winner(tie, build_balanced_tree(2), TieBreakPolicy::lexicographic({1, 0})) ==
        WinnerSet{1});
  CHECK(cup_winner(tie, build_balanced_tree(2), TieBreakPolicy::pessimistic()) == WinnerSet{0, 1});
}

TEST_CASE("randomized_cup_distribution on a strict cycle") {
  // a beats b 5:2, b beats c 5:2, c beats a 4:3; the bye-holder always wins.
  const Profile cycle(3, {{{0, 1, 2}, 3}, {{1, 2, 0}, 2}, {{2, 0, 1}, 2}});
  const auto d = randomized_cup_distribution(cycle, TieBreakPolicy::lexicographic());
  CHECK(d.denominator == 6);
  CHECK(d.lower == std::vector<std::int64_t>{2, 2, 2});
  CHECK(d.exact());
  CHECK(d.probability(0) == Rational(1, 3));
  CHECK(oracle::randomized_cup_counts(cycle) == d.lower);

  const Profile majority2(2, {{{1, 0}, 3}, {{0, 1}, 1}});
  const auto d2 = randomized_cup_distribution(majority2, TieBreakPolicy::lexicographic());
  CHECK(d2.probability(1) == Rational(1));

  CHECK_THROWS_AS(randomized_cup_distribution(Profile(9, {}), TieBreakPolicy::lexicographic()),
                  BudgetExceeded);
}

TEST_CASE("winner dispatch") {
  const Profile one(2, {{{0, 1}, 1}});
  CHECK(winner(one, protocol::Scoring{ScoringVector::plurality(2)},
               TieBreakPolicy::lexicographic()).winners == WinnerSet{0});
  const Profile sym(2, {{{0, 1}, 1}, {{1, 0}, 1}});
  CHECK(winner(sym, protocol::Copeland{}, TieBreakPolicy::optimistic()).winners == WinnerSet{0, 1});
  CHECK(winner(sym, protocol::Copeland{}, TieBreakPolicy::pessimistic()).winners == WinnerSet{0, 1});
  CHECK(winner(sym, protocol::Copeland{}, TieBreakPolicy::lexicographic()).winners == WinnerSet{0});
  CHECK_THROWS_AS(winner(sym, protocol::Scoring{ScoringVector::borda(3)},
                         TieBreakPolicy::lexicographic()),
                  InputError);
  CHECK_THROWS_AS(winner(sym, protocol::Scoring{ScoringVector::borda(2)},
                         TieBreakPolicy::lexicographic({0, 0})),
                  InputError);
}

TEST_CASE("lexicographic oracles agree on random profiles") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const auto prof = random_profile(rng, m, 6, 4);
    const auto lex = TieBreakPolicy::lexicographic();
    CHECK(stv_winner(prof, lex) == WinnerSet{oracle::stv(prof)});
    std::vector<Candidate> slots(m);
    std::iota(slots.begin(), slots.end(), 0);
    CHECK(cup_winner(prof, build_balanced_tree(m), lex) == WinnerSet{oracle::bracket(prof, slots)});
    CHECK(randomized_cup_distribution(prof, lex).lower == oracle::randomized_cup_counts(prof));
  }
}

TEST_CASE("two candidates: every protocol is weighted majority") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto prof = random_profile(rng, 2, 5, 4);
    for (const auto& tb : {TieBreakPolicy::lexicographic(), TieBreakPolicy::lexicographic({1, 0}),
                           TieBreakPolicy::pessimistic(), TieBreakPolicy::optimistic()}) {
      const auto expected = majority(prof, tb);
      for (const auto& spec : all_specs(2)) {
        CHECK_MESSAGE(winner(prof, spec, tb).winners == expected, protocol_name(spec));
      }
    }
  }
}

TEST_CASE("structural invariants on random profiles") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 150; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const auto prof = random_profile(rng, m, 5, 3);
    auto shuffled = prof.ballots();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Profile permuted(m, shuffled);
    const auto expanded = expand_weights(prof);
    for (const auto& tb : all_policies()) {
      for (const auto& spec : all_specs(m)) {
        const auto base = winner(prof, spec, tb);
        CHECK(winner(permuted, spec, tb).winners == base.winners);
        CHECK(winner(expanded, spec, tb).winners == base.winners);
        if (!tb.branching() && !base.distribution) CHECK(base.winners.size() == 1);
        if (base.distribution) {
          const auto& d = *base.distribution;
          CHECK(winner(permuted, spec, tb).distribution == d);
          CHECK(winner(expanded, spec, tb).distribution == d);
          if (!tb.branching()) {
            CHECK(std::accumulate(d.lower.begin(), d.lower.end(), std::int64_t{0}) == d.denominator);
          }
        }
      }
      if (m == 3) CHECK(runoff_winner(prof, tb) == stv_winner(prof, tb));
    }
  }
}

TEST_CASE("a Condorcet winner wins every bracket") {
  std::mt19937_64 rng(11);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 60; ++trial) {
    const int m = 3 + static_cast<int>(rng() % 3);
    const auto prof = random_profile(rng, m, 5, 5);
    const auto n = pairwise_tally(prof);
    Candidate cw = -1;
    for (Candidate c = 0; c < m && cw < 0; ++c) {
      bool beats_all = true;
      for (Candidate d = 0; d < m; ++d) {
        if (d != c && n(c, d) <= n(d, c)) beats_all = false;
      }
      if (beats_all) cw = c;
    }
    if (cw < 0) continue;
    ++found;
    for (const auto& tb : all_policies()) {
      std::vector<Candidate> leaves(m);
      std::iota(leaves.begin(), leaves.end(), 0);
      do {
        // Balanced tree shape with this leaf assignment.
        std::function<CupTree(int, int)> make = [&](int first, int count) {
          if (count == 1) return CupTree::leaf(leaves[first]);
          const int left = (count + 1) / 2;
          return CupTree::join(make(first, left), make(first + left, count - left));
        };
        CHECK(cup_winner(prof, make(0, m), tb) == WinnerSet{cw});
      } while (std::next_permutation(leaves.begin(), leaves.end()));
      const auto d = randomized_cup_distribution(prof, tb);
      CHECK(d.lower_probability(cw) == Rational(1));
      CHECK(d.upper_probability(cw) == Rational(1));
    }
  }
  CHECK(found >= 20);
}

TEST_CASE("raising a candidate never lowers its positional score") {
  std::mt19937_64 rng(21);
  for (int m : {3, 4, 5}) {
    for (const auto& alpha : {ScoringVector::borda(m), ScoringVector::plurality(m),
                              ScoringVector::veto(m)}) {
      for (int trial = 0; trial < 200; ++trial) {
        const auto prof = random_profile(rng, m, 5, 5);
        const std::size_t which = rng() % prof.ballots().size();
        const int pos = 1 + static_cast<int>(rng() % (m - 1));
        auto ballots = prof.ballots();
        const Candidate raised = ballots[which].order[pos];
        std::swap(ballots[which].order[pos], ballots[which].order[pos - 1]);
        CHECK(scoring_scores(Profile(m, ballots), alpha)[raised] >=
              scoring_scores(prof, alpha)[raised]);
      }
    }
  }
}
