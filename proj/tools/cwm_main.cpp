// Command-line front end: winner determination, manipulation solving,
// witness checking, PARTITION reductions, sweeps, benchmarks and generation.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cwm/bench.hpp"
#include "cwm/format.hpp"
#include "cwm/generator.hpp"
#include "cwm/reductions.hpp"

namespace {

constexpr int kExitAnswered = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cwm::InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cwm::InputError("cannot write '" + path + "'");
  out << text;
}

std::optional<cwm::TieBreakPolicy> tiebreak_flag(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return cwm::parse_tiebreak(name);
}

std::string label_set(const cwm::WinnerSet& set, const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) out += (i ? "," : "") + labels.at(set[i]);
  return out;
}

int cmd_winner(const std::string& file, const std::string& tb_name) {
  const auto doc = cwm::parse_election(read_file(file));
  const auto tb = tiebreak_flag(tb_name).value_or(
      doc.tiebreak.value_or(cwm::TieBreakPolicy::lexicographic()));
  const auto outcome = cwm::winner(doc.profile(), doc.protocol, tb);
  std::cout << "protocol: " << cwm::protocol_name(doc.protocol) << "\n"
            << "tiebreak: " << cwm::to_string(tb.kind()) << "\n"
            << "winners: " << label_set(outcome.winners, doc.labels) << "\n";
  if (outcome.distribution) {
    const auto& d = *outcome.distribution;
    for (int c = 0; c < doc.m(); ++c) {
      std::cout << "  " << doc.labels[c] << " ";
      if (d.exact()) {
        std::cout << cwm::format_rational(d.probability(c)) << "\n";
      } else {
        std::cout << "[" << cwm::format_rational(d.lower_probability(c)) << ", "
                  << cwm::format_rational(d.upper_probability(c)) << "]\n";
      }
    }
  }
  return kExitAnswered;
}

int cmd_solve(const std::string& file, const std::string& tb_name, std::uint64_t budget_nodes,
              const std::string& witness_out) {
  const auto doc = cwm::parse_election(read_file(file));
  const auto inst = doc.instance(tiebreak_flag(tb_name));
  cwm::SearchBudget budget;
  budget.max_nodes = budget_nodes;
  const auto result = cwm::solve(inst, budget);
  std::cout << "decision: " << (result.decision ? "yes" : "no") << "\n"
            << "method: " << result.method_label() << "\n"
            << "nodes: " << result.nodes << "\n";
  if (result.probability) {
    std::cout << "probability: " << cwm::format_rational(*result.probability) << "\n";
  }
  if (result.decision) {
    const auto text = cwm::serialize_witness(result.witness, doc.labels);
    std::cout << "witness:\n" << text;
    if (!witness_out.empty()) write_file(witness_out, text);
  }
  return kExitAnswered;
}

int cmd_verify(const std::string& file, const std::string& witness_file,
               const std::string& tb_name) {
  const auto doc = cwm::parse_election(read_file(file));
  const auto inst = doc.instance(tiebreak_flag(tb_name));
  const auto witness = cwm::parse_witness(read_file(witness_file), doc.labels);
  const auto verdict = cwm::validate_witness(inst, witness);
  std::cout << (verdict.accepted ? "accepted" : "rejected") << "\n"
            << "winners: " << label_set(verdict.outcome.winners, doc.labels) << "\n"
            << "goal: " << cwm::to_string(inst.goal.kind) << " " << doc.labels[inst.goal.candidate]
            << "\n";
  if (verdict.probability) {
    std::cout << "probability: " << cwm::format_rational(*verdict.probability)
              << " (threshold " << cwm::format_rational(*inst.threshold) << ")\n";
  }
  return kExitAnswered;
}

int cmd_reduce(const std::vector<std::int64_t>& values, const std::string& encoder_name,
               const std::string& tb_name, std::uint64_t budget_nodes, const std::string& emit) {
  const cwm::PartitionInstance inst(values);
  const auto encoder = cwm::parse_encoder(encoder_name);
  const auto tb = tiebreak_flag(tb_name).value_or(cwm::TieBreakPolicy::pessimistic());
  cwm::SearchBudget budget;
  budget.max_nodes = budget_nodes;
  const auto encoded = cwm::encode(inst, encoder, tb);
  if (!emit.empty()) {
    const std::vector<std::string> labels =
        encoder == cwm::Encoder::VetoConstructive ? std::vector<std::string>{"a", "b", "p"}
                                                  : std::vector<std::string>{"a", "b", "h"};
    write_file(emit, cwm::serialize_election(cwm::document_for(encoded, labels)));
  }
  const auto report = cwm::verify_reduction(inst, encoder, tb, budget);
  std::cout << "encoder: " << cwm::to_string(encoder) << "\n"
            << "partition: " << (report.partition.yes ? "yes" : "no") << "\n"
            << "manipulation: " << (report.manipulation.decision ? "yes" : "no") << " ("
            << report.manipulation.method_label() << ", " << report.manipulation.nodes
            << " nodes)\n"
            << "agreement: " << (report.agreement ? "true" : "false") << "\n";
  if (report.transport_accepted) {
    std::cout << "transported witness: " << (*report.transport_accepted ? "accepted" : "rejected")
              << "\n";
  }
  return report.agreement ? kExitAnswered : kExitCheckFailed;
}

int cmd_sweep(const std::string& encoder_name, int t_min, int t_max, int k_max,
              const std::string& tb_name, std::uint64_t budget_nodes, unsigned threads) {
  std::vector<cwm::Encoder> encoders;
  if (encoder_name == "all") {
    encoders = {cwm::Encoder::VetoConstructive, cwm::Encoder::StvDestructive,
                cwm::Encoder::RunoffDestructive};
  } else {
    encoders = {cwm::parse_encoder(encoder_name)};
  }
  const auto tb = tiebreak_flag(tb_name).value_or(cwm::TieBreakPolicy::pessimistic());
  cwm::SearchBudget budget;
  budget.max_nodes = budget_nodes;
  bool ok = true;
  for (auto encoder : encoders) {
    // Default ranges per encoder unless given explicitly.
    const bool veto = encoder == cwm::Encoder::VetoConstructive;
    const int tmax = t_max > 0 ? t_max : (veto ? 6 : 5);
    const int kmax = k_max > 0 ? k_max : (veto ? 5 : 4);
    const auto instances = cwm::partition_multisets(t_min, tmax, kmax);
    const auto s = cwm::run_sweep(instances, encoder, tb, budget, threads);
    std::cout << cwm::to_string(encoder) << ": " << s.agreements << "/" << s.instances
              << " agree, " << s.partition_yes << " yes-instances, " << s.transports_accepted << "/"
              << s.transports_checked << " transported witnesses accepted\n";
    for (const auto& bad : s.disagreements) {
      std::cout << "  disagreement on {";
      for (std::size_t i = 0; i < bad.values().size(); ++i) {
        std::cout << (i ? "," : "") << bad.values()[i];
      }
      std::cout << "}\n";
    }
    ok = ok && s.all_agree();
  }
  return ok ? kExitAnswered : kExitCheckFailed;
}

int cmd_bench(const std::string& config_file, unsigned threads, bool no_timing,
              std::uint64_t budget_nodes) {
  auto config = cwm::parse_bench_config(read_file(config_file));
  if (budget_nodes) config.budget.max_nodes = budget_nodes;
  const auto rows = cwm::run_bench(config, {threads, no_timing});
  cwm::write_csv(std::cout, rows);
  return kExitAnswered;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalitional weighted manipulation toolkit"};
  app.require_subcommand(1);

  std::string file, witness_file, tiebreak, encoder = "veto", witness_out, emit, config;
  std::uint64_t budget_nodes = cwm::SearchBudget{}.max_nodes;
  unsigned threads = 1;

  auto* winner = app.add_subcommand("winner", "Winner determination for an election file");
  winner->add_option("file", file, "Election file")->required();
  winner->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");

  auto* solve = app.add_subcommand("solve", "Decide the file's manipulation question");
  solve->add_option("file", file, "Election file with a MANIPULATION section")->required();
  solve->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");
  solve->add_option("--budget-nodes", budget_nodes, "Exact-search node budget");
  solve->add_option("--witness-out", witness_out, "Also write the witness ballots here");

  auto* verify = app.add_subcommand("verify", "Check coalition ballots against the goal");
  verify->add_option("file", file, "Election file with a MANIPULATION section")->required();
  verify->add_option("witness", witness_file, "Witness file")->required();
  verify->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");

  std::vector<std::int64_t> values;
  auto* reduce = app.add_subcommand("reduce", "Encode a PARTITION instance and cross-check it");
  reduce->add_option("values", values, "PARTITION values")->required();
  reduce->add_option("--encoder", encoder, "veto | stv | runoff");
  reduce->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");
  reduce->add_option("--budget-nodes", budget_nodes, "Exact-search node budget");
  reduce->add_option("--emit", emit, "Write the encoded election file here");

  int t_min = 2, t_max = 0, k_max = 0;
  std::string sweep_encoder = "all";
  auto* sweep = app.add_subcommand("sweep", "Reduction-equivalence sweep over small multisets");
  sweep->add_option("--encoder", sweep_encoder, "veto | stv | runoff | all");
  sweep->add_option("--t-min", t_min, "Smallest multiset size");
  sweep->add_option("--t-max", t_max, "Largest multiset size (default 6 veto, 5 otherwise)");
  sweep->add_option("--k-max", k_max, "Largest value (default 5 veto, 4 otherwise)");
  sweep->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");
  sweep->add_option("--budget-nodes", budget_nodes, "Exact-search node budget");
  sweep->add_option("--threads", threads, "Worker threads");

  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "Solve generated instances and emit CSV");
  bench->add_option("config", config, "JSON bench config")->required();
  bench->add_option("--threads", threads, "Worker threads");
  bench->add_flag("--no-timing", no_timing, "Report wall time as 0 (reproducible output)");
  std::uint64_t bench_budget = 0;
  bench->add_option("--budget-nodes", bench_budget, "Override the config's node budget");

  cwm::GeneratorParams gen_params;
  std::string goal = "constructive", threshold;
  auto* gen = app.add_subcommand("gen", "Print a seeded random election file");
  gen->add_option("--seed", gen_params.seed, "Generator seed");
  gen->add_option("--m", gen_params.m, "Candidate count");
  gen->add_option("--ballots", gen_params.ballots, "Nonmanipulator ballot count");
  gen->add_option("--max-weight", gen_params.max_weight, "Largest nonmanipulator weight");
  gen->add_option("--coalition", gen_params.coalition_size, "Coalition size");
  gen->add_option("--max-coalition-weight", gen_params.max_coalition_weight,
                  "Largest coalition weight");
  gen->add_option("--goal", goal, "constructive | destructive");
  gen->add_option("--protocol", gen_params.protocol, "Protocol name");
  gen->add_option("--tiebreak", tiebreak, "lexicographic | pessimistic | optimistic");
  gen->add_option("--threshold", threshold, "Randomized-cup threshold num/den");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*winner) return cmd_winner(file, tiebreak);
    if (*solve) return cmd_solve(file, tiebreak, budget_nodes, witness_out);
    if (*verify) return cmd_verify(file, witness_file, tiebreak);
    if (*reduce) return cmd_reduce(values, encoder, tiebreak, budget_nodes, emit);
    if (*sweep) {
      return cmd_sweep(sweep_encoder, t_min, t_max, k_max, tiebreak, budget_nodes, threads);
    }
    if (*bench) return cmd_bench(config, threads, no_timing, bench_budget);
    if (*gen) {
      if (goal == "constructive") {
        gen_params.goal = cwm::GoalKind::Constructive;
      } else if (goal == "destructive") {
        gen_params.goal = cwm::GoalKind::Destructive;
      } else {
        throw cwm::InputError("goal must be constructive or destructive");
      }
      if (auto tb = tiebreak_flag(tiebreak)) gen_params.tiebreak = *tb;
      if (!threshold.empty()) gen_params.threshold = cwm::parse_rational(threshold);
      std::cout << cwm::serialize_election(cwm::document_for(cwm::generate_random(gen_params)));
      return kExitAnswered;
    }
  } catch (const cwm::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const cwm::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
