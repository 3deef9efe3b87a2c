#include "cwm/bench.hpp"

#include <chrono>
#include <ostream>
#include <set>

#include <json.hpp>

#include "cwm/format.hpp"
#include "cwm/parallel.hpp"

namespace cwm {

BenchConfig parse_bench_config(const std::string& json_text) {
  BenchConfig cfg;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw InputError("bench config must be a JSON object");
    static const std::set<std::string> known = {
        "protocols", "goals", "m", "coalition_sizes", "seeds", "ballots",
        "max_weight", "max_coalition_weight", "tiebreak", "budget_nodes"};
    for (const auto& item : j.items()) {
      if (!known.contains(item.key())) throw InputError("unknown bench config key '" + item.key() + "'");
    }
    if (j.contains("protocols")) cfg.protocols = j.at("protocols").get<std::vector<std::string>>();
    if (j.contains("goals")) {
      cfg.goals.clear();
      for (const auto& g : j.at("goals").get<std::vector<std::string>>()) {
        if (g == "constructive") {
          cfg.goals.push_back(GoalKind::Constructive);
        } else if (g == "destructive") {
          cfg.goals.push_back(GoalKind::Destructive);
        } else {
          throw InputError("unknown goal kind '" + g + "'");
        }
      }
    }
    if (j.contains("m")) cfg.m_values = j.at("m").get<std::vector<int>>();
    if (j.contains("coalition_sizes")) {
      cfg.coalition_sizes = j.at("coalition_sizes").get<std::vector<int>>();
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("ballots")) cfg.ballots = j.at("ballots").get<int>();
    if (j.contains("max_weight")) cfg.max_weight = j.at("max_weight").get<Weight>();
    if (j.contains("max_coalition_weight")) {
      cfg.max_coalition_weight = j.at("max_coalition_weight").get<Weight>();
    }
    if (j.contains("tiebreak")) cfg.tiebreak = parse_tiebreak(j.at("tiebreak").get<std::string>());
    if (j.contains("budget_nodes")) cfg.budget.max_nodes = j.at("budget_nodes").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bench config: ") + e.what());
  }
  for (const auto& p : cfg.protocols) make_protocol(p, 3);
  return cfg;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config, const BenchOptions& options) {
  std::vector<GeneratorParams> jobs;
  for (const auto& proto : config.protocols) {
    for (GoalKind goal : config.goals) {
      for (int m : config.m_values) {
        for (int t : config.coalition_sizes) {
          for (auto seed : config.seeds) {
            GeneratorParams p;
            p.seed = seed;
            p.m = m;
            p.ballots = config.ballots;
            p.max_weight = config.max_weight;
            p.coalition_size = t;
            p.max_coalition_weight = config.max_coalition_weight;
            p.goal = goal;
            p.protocol = proto;
            p.tiebreak = config.tiebreak;
            jobs.push_back(std::move(p));
          }
        }
      }
    }
  }
  // Generate up front so input errors surface before any solving.
  std::vector<ManipulationInstance> instances;
  instances.reserve(jobs.size());
  for (const auto& p : jobs) instances.push_back(generate_random(p));

  std::vector<BenchRecord> rows(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    const auto& inst = instances[i];
    BenchRecord& row = rows[i];
    row.protocol = jobs[i].protocol;
    row.m = inst.m();
    row.s_weight = inst.nonmanipulators.total_weight();
    row.t_count = inst.coalition.size();
    row.goal = to_string(inst.goal.kind);
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = solve(inst, config.budget);
      row.method = result.method_label();
      row.decision = result.decision ? "yes" : "no";
      row.nodes = result.nodes;
    } catch (const BudgetExceeded&) {
      row.method = to_string(dispatch_method(inst));
      row.decision = "timeout";
      row.nodes = config.budget.max_nodes;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    row.wall_time_us =
        options.omit_timing
            ? 0
            : std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
  });
  return rows;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    os << r.protocol << ',' << r.m << ',' << r.s_weight << ',' << r.t_count << ',' << r.goal << ','
       << r.method << ',' << r.decision << ',' << r.wall_time_us << ',' << r.nodes << '\n';
  }
}

}  // namespace cwm
