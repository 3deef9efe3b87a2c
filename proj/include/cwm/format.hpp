#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwm/manipulation.hpp"

namespace cwm {

// Syntax or consistency error in a text document, positioned 1-based.
class ParseError : public InputError {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ManipulationBlock {
  std::vector<Weight> weights;
  Goal goal;
  std::optional<Rational> threshold;

  friend bool operator==(const ManipulationBlock&, const ManipulationBlock&) = default;
};

// In-memory form of an election file.  Ballots and goals use candidate
// indices; labels map indices to names.
struct ElectionDocument {
  int version = 1;
  std::vector<std::string> labels;
  ProtocolSpec protocol = protocol::Scoring{ScoringVector::plurality(1)};
  std::optional<TieBreakPolicy> tiebreak;
  std::vector<WeightedBallot> ballots;
  std::optional<ManipulationBlock> manipulation;

  int m() const { return static_cast<int>(labels.size()); }

  // Nonmanipulator profile.
  Profile profile() const;
  // Throws InputError if there is no MANIPULATION section.  Unless the file
  // or `override_tb` says otherwise ties are pessimistic.
  ManipulationInstance instance(const std::optional<TieBreakPolicy>& override_tb = {}) const;

  friend bool operator==(const ElectionDocument&, const ElectionDocument&) = default;
};

inline constexpr int kFormatVersion = 1;

ElectionDocument parse_election(std::string_view text);
// Canonical text form: fixed section order, canonical protocol names, an
// explicit cup tree, no comments.
std::string serialize_election(const ElectionDocument& doc);

// Document for an instance, with labels a, b, c, ... unless given.
ElectionDocument document_for(const ManipulationInstance& inst,
                              std::vector<std::string> labels = {});

// One ballot per line, comma-separated labels.
Witness parse_witness(std::string_view text, const std::vector<std::string>& labels);
std::string serialize_witness(const Witness& witness, const std::vector<std::string>& labels);

// "num/den" or an integer.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

// "lexicographic", "pessimistic" or "optimistic" (identity priority).
TieBreakPolicy parse_tiebreak(std::string_view name);

// plurality, borda, veto, maximin, copeland, stv, runoff, cup (balanced tree)
// or randomized-cup, sized for m candidates.
ProtocolSpec make_protocol(std::string_view name, int m);

// Default labels: a..z, then c26, c27, ...
std::vector<std::string> default_labels(int m);

}  // namespace cwm
