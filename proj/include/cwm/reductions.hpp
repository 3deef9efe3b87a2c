#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwm/manipulation.hpp"

namespace cwm {

// Multiset of positive integers with an even sum 2K.
class PartitionInstance {
 public:
  // Throws InputError on a nonpositive value, an empty list or an odd sum.
  explicit PartitionInstance(std::vector<std::int64_t> values);

  const std::vector<std::int64_t>& values() const { return values_; }
  std::int64_t total() const { return total_; }
  std::int64_t half() const { return total_ / 2; }

  friend bool operator==(const PartitionInstance&, const PartitionInstance&) = default;

 private:
  std::vector<std::int64_t> values_;
  std::int64_t total_ = 0;
};

struct PartitionAnswer {
  bool yes = false;
  // Indices into values() of a subset summing to K (when yes).
  std::vector<std::size_t> subset;
};

inline constexpr std::int64_t kPartitionTableCap = 10'000'000;

// Subset-sum table over 0..K.  Throws BudgetExceeded if K > table_cap.
PartitionAnswer solve_partition(const PartitionInstance& inst,
                                std::int64_t table_cap = kPartitionTableCap);

enum class Encoder { VetoConstructive, StvDestructive, RunoffDestructive };

std::string to_string(Encoder encoder);
// Accepts "veto", "stv", "runoff".
Encoder parse_encoder(const std::string& name);

// Candidates a = 0, b = 1 and p = 2: S is one (a, b, p) ballot of weight
// 2K - 1, the coalition has a weight 2k_i member per value, goal: p wins
// under veto.
ManipulationInstance encode_veto_constructive(const PartitionInstance& inst,
                                              TieBreakPolicy tb = TieBreakPolicy::pessimistic());

// Candidates a = 0, b = 1 and h = 2: S is (a, h, b) x 6K, (b, h, a) x 6K and
// (h, a, b) x (8K - 1) as merged weighted ballots, coalition weights 2k_i,
// goal: h does not win under STV.
ManipulationInstance encode_stv_destructive(const PartitionInstance& inst,
                                            TieBreakPolicy tb = TieBreakPolicy::pessimistic());

// Same electorate as the STV encoding, plurality with runoff.
ManipulationInstance encode_runoff_destructive(const PartitionInstance& inst,
                                               TieBreakPolicy tb = TieBreakPolicy::pessimistic());

ManipulationInstance encode(const PartitionInstance& inst, Encoder encoder,
                            TieBreakPolicy tb = TieBreakPolicy::pessimistic());

// Coalition ballots built from a partition half: members in `subset` vote
// (p, a, b) and the rest (p, b, a) for veto; (a, b, h) and (b, a, h) for the
// elimination encodings.
Witness transport_witness(const PartitionInstance& inst, const std::vector<std::size_t>& subset,
                          Encoder encoder);

struct ReductionReport {
  Encoder encoder = Encoder::VetoConstructive;
  PartitionAnswer partition;
  ManipulationResult manipulation;
  bool agreement = false;
  // Whether the ballots transported from the partition subset were accepted
  // (set only when the partition answer is yes).
  std::optional<bool> transport_accepted;
};

// Runs the subset-sum oracle and the exact manipulation search on the
// encoded instance and compares the answers.
ReductionReport verify_reduction(const PartitionInstance& inst, Encoder encoder,
                                 TieBreakPolicy tb = TieBreakPolicy::pessimistic(),
                                 const SearchBudget& budget = {});

// Every multiset {k_i} with t_min <= t <= t_max and 1 <= k_i <= k_max whose
// sum is even, each listed in non-decreasing order.
std::vector<PartitionInstance> partition_multisets(int t_min, int t_max, std::int64_t k_max);

struct SweepSummary {
  std::size_t instances = 0;
  std::size_t agreements = 0;
  std::size_t partition_yes = 0;
  std::size_t transports_checked = 0;
  std::size_t transports_accepted = 0;
  std::vector<PartitionInstance> disagreements;

  bool all_agree() const {
    return agreements == instances && transports_accepted == transports_checked;
  }
};

// verify_reduction over every instance, in parallel when threads > 1.
SweepSummary run_sweep(const std::vector<PartitionInstance>& instances, Encoder encoder,
                       TieBreakPolicy tb = TieBreakPolicy::pessimistic(),
                       const SearchBudget& budget = {}, unsigned threads = 1);

}  // namespace cwm
