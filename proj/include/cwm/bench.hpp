#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwm/generator.hpp"

namespace cwm {

// One row of benchmark output.
struct BenchRecord {
  std::string protocol;
  int m = 0;
  Weight s_weight = 0;
  std::size_t t_count = 0;
  std::string goal;
  std::string method;
  std::string decision;  // "yes", "no" or "timeout"
  std::int64_t wall_time_us = 0;
  std::uint64_t nodes = 0;
};

// Instances are the product protocols x goals x m x coalition sizes x seeds,
// in that nesting order.
struct BenchConfig {
  std::vector<std::string> protocols;
  std::vector<GoalKind> goals{GoalKind::Constructive};
  std::vector<int> m_values;
  std::vector<int> coalition_sizes;
  std::vector<std::uint64_t> seeds;
  int ballots = 4;
  Weight max_weight = 5;
  Weight max_coalition_weight = 5;
  TieBreakPolicy tiebreak = TieBreakPolicy::pessimistic();
  SearchBudget budget;
};

// JSON object with optional keys protocols, goals, m, coalition_sizes, seeds,
// ballots, max_weight, max_coalition_weight, tiebreak, budget_nodes.
// Throws InputError on malformed input.
BenchConfig parse_bench_config(const std::string& json_text);

struct BenchOptions {
  unsigned threads = 1;
  // Report wall time as 0 so output is byte-for-byte reproducible.
  bool omit_timing = false;
};

// Rows come back in instance order whatever the thread count.
std::vector<BenchRecord> run_bench(const BenchConfig& config, const BenchOptions& options = {});

inline constexpr const char* kBenchHeader =
    "protocol,m,s_weight,t_count,goal,method,decision,wall_time_us,nodes";

void write_csv(std::ostream& os, const std::vector<BenchRecord>& rows);

}  // namespace cwm
