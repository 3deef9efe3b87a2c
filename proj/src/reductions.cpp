#include "cwm/reductions.hpp"

#include <algorithm>

#include "cwm/parallel.hpp"

namespace cwm {

namespace {
constexpr Candidate kA = 0;
constexpr Candidate kB = 1;
constexpr Candidate kP = 2;  // p in the veto encoding, h in the elimination ones

std::vector<Weight> doubled(const PartitionInstance& inst) {
  std::vector<Weight> out;
  out.reserve(inst.values().size());
  for (auto k : inst.values()) out.push_back(2 * k);
  return out;
}

ManipulationInstance elimination_encoding(const PartitionInstance& inst, ProtocolSpec spec,
                                          TieBreakPolicy tb) {
  const Weight k = inst.half();
  ManipulationInstance out;
  out.nonmanipulators = Profile(3, {{{kA, kP, kB}, 6 * k},
                                    {{kB, kP, kA}, 6 * k},
                                    {{kP, kA, kB}, 8 * k - 1}});
  out.coalition = doubled(inst);
  out.goal = Goal::destructive(kP);
  out.protocol = std::move(spec);
  out.tiebreak = std::move(tb);
  return out;
}
}  // namespace

PartitionInstance::PartitionInstance(std::vector<std::int64_t> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InputError("PARTITION needs at least one value");
  for (auto v : values_) {
    if (v < 1) throw InputError("PARTITION values must be positive integers");
    if (v > (kTallyLimit / 16) - total_) throw OverflowError("PARTITION values too large");
    total_ += v;
  }
  if (total_ % 2 != 0) {
    throw InputError("PARTITION values must have an even sum, got " + std::to_string(total_));
  }
}

PartitionAnswer solve_partition(const PartitionInstance& inst, std::int64_t table_cap) {
  const std::int64_t target = inst.half();
  if (target > table_cap) {
    throw BudgetExceeded("subset-sum table of size " + std::to_string(target) +
                         " exceeds the cap of " + std::to_string(table_cap));
  }
  const auto& v = inst.values();
  // via[s]: index of the value whose addition first reached sum s (-1 = unreached).
  // Sweeping s downwards keeps each value used at most once, and via[] along
  // a reconstruction path is strictly decreasing.
  std::vector<std::int64_t> via(static_cast<std::size_t>(target) + 1, -1);
  via[0] = static_cast<std::int64_t>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::int64_t s = target; s >= v[i]; --s) {
      if (via[s] < 0 && via[s - v[i]] >= 0) {
        via[s] = static_cast<std::int64_t>(i);
      }
    }
  }
  PartitionAnswer ans;
  ans.yes = via[target] >= 0;
  if (ans.yes) {
    for (std::int64_t s = target; s > 0; s -= v[via[s]]) {
      ans.subset.push_back(static_cast<std::size_t>(via[s]));
    }
    std::sort(ans.subset.begin(), ans.subset.end());
  }
  return ans;
}

std::string to_string(Encoder encoder) {
  switch (encoder) {
    case Encoder::VetoConstructive: return "veto";
    case Encoder::StvDestructive: return "stv";
    case Encoder::RunoffDestructive: return "runoff";
  }
  return "?";
}

Encoder parse_encoder(const std::string& name) {
  if (name == "veto") return Encoder::VetoConstructive;
  if (name == "stv") return Encoder::StvDestructive;
  if (name == "runoff") return Encoder::RunoffDestructive;
  throw InputError("unknown encoder '" + name + "' (expected veto, stv or runoff)");
}

ManipulationInstance encode_veto_constructive(const PartitionInstance& inst, TieBreakPolicy tb) {
  ManipulationInstance out;
  out.nonmanipulators = Profile(3, {{{kA, kB, kP}, 2 * inst.half() - 1}});
  out.coalition = doubled(inst);
  out.goal = Goal::constructive(kP);
  out.protocol = protocol::Scoring{ScoringVector::veto(3)};
  out.tiebreak = std::move(tb);
  return out;
}

ManipulationInstance encode_stv_destructive(const PartitionInstance& inst, TieBreakPolicy tb) {
  return elimination_encoding(inst, protocol::Stv{}, std::move(tb));
}

ManipulationInstance encode_runoff_destructive(const PartitionInstance& inst, TieBreakPolicy tb) {
  return elimination_encoding(inst, protocol::PluralityRunoff{}, std::move(tb));
}

ManipulationInstance encode(const PartitionInstance& inst, Encoder encoder, TieBreakPolicy tb) {
  switch (encoder) {
    case Encoder::VetoConstructive: return encode_veto_constructive(inst, std::move(tb));
    case Encoder::StvDestructive: return encode_stv_destructive(inst, std::move(tb));
    case Encoder::RunoffDestructive: return encode_runoff_destructive(inst, std::move(tb));
  }
  throw InputError("unknown encoder");
}

Witness transport_witness(const PartitionInstance& inst, const std::vector<std::size_t>& subset,
                          Encoder encoder) {
  std::vector<bool> in_subset(inst.values().size(), false);
  for (auto i : subset) in_subset.at(i) = true;
  Witness out;
  for (bool in : in_subset) {
    if (encoder == Encoder::VetoConstructive) {
      out.push_back(in ? std::vector<Candidate>{kP, kA, kB} : std::vector<Candidate>{kP, kB, kA});
    } else {
      out.push_back(in ? std::vector<Candidate>{kA, kB, kP} : std::vector<Candidate>{kB, kA, kP});
    }
  }
  return out;
}

ReductionReport verify_reduction(const PartitionInstance& inst, Encoder encoder,
                                 TieBreakPolicy tb, const SearchBudget& budget) {
  ReductionReport report;
  report.encoder = encoder;
  report.partition = solve_partition(inst);
  const auto encoded = encode(inst, encoder, std::move(tb));
  const ExactSearchOptions options{budget};
  report.manipulation = encoder == Encoder::VetoConstructive
                            ? exact_search_constructive(encoded, options)
                            : exact_search_destructive(encoded, options);
  report.agreement = report.partition.yes == report.manipulation.decision;
  if (report.partition.yes) {
    report.transport_accepted =
        validate_witness(encoded, transport_witness(inst, report.partition.subset, encoder))
            .accepted;
  }
  return report;
}

std::vector<PartitionInstance> partition_multisets(int t_min, int t_max, std::int64_t k_max) {
  std::vector<PartitionInstance> out;
  std::vector<std::int64_t> values;
  auto extend = [&](auto&& self, int t, std::int64_t min_value, std::int64_t sum) -> void {
    if (static_cast<int>(values.size()) == t) {
      if (sum % 2 == 0) out.emplace_back(values);
      return;
    }
    for (std::int64_t k = min_value; k <= k_max; ++k) {
      values.push_back(k);
      self(self, t, k, sum + k);
      values.pop_back();
    }
  };
  for (int t = std::max(1, t_min); t <= t_max; ++t) extend(extend, t, 1, 0);
  return out;
}

SweepSummary run_sweep(const std::vector<PartitionInstance>& instances, Encoder encoder,
                       TieBreakPolicy tb, const SearchBudget& budget, unsigned threads) {
  std::vector<ReductionReport> reports(instances.size());
  parallel_for(instances.size(), threads, [&](std::size_t i) {
    reports[i] = verify_reduction(instances[i], encoder, tb, budget);
  });
  SweepSummary summary;
  summary.instances = instances.size();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (r.agreement) {
      ++summary.agreements;
    } else {
      summary.disagreements.push_back(instances[i]);
    }
    if (r.partition.yes) ++summary.partition_yes;
    if (r.transport_accepted) {
      ++summary.transports_checked;
      if (*r.transport_accepted) ++summary.transports_accepted;
    }
  }
  return summary;
}

}  // namespace cwm
