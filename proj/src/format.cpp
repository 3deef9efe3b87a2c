#include "cwm/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace cwm {

ParseError::ParseError(int line, int column, const std::string& message)
    : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                 message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

struct Line {
  int number;
  std::string text;  // comment stripped
  std::vector<Token> tokens;

  [[noreturn]] void fail(int column, const std::string& msg) const {
    throw ParseError(number, column, msg);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    fail(tokens.empty() ? 1 : tokens.front().column, msg);
  }
};

// Splits on whitespace and commas; commas are dropped.
std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') {
      ++j;
    }
    out.push_back({text.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tokens = tokenize(line);
    if (!tokens.empty()) out.push_back({number, line, std::move(tokens)});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

class LabelMap {
 public:
  explicit LabelMap(const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i) index_[labels[i]] = static_cast<Candidate>(i);
  }
  Candidate resolve(const Line& line, const Token& tok) const {
    auto it = index_.find(tok.text);
    if (it == index_.end()) line.fail(tok.column, "unknown candidate label '" + tok.text + "'");
    return it->second;
  }

 private:
  std::map<std::string, Candidate> index_;
};

// tree := label | '(' tree ',' tree ')'
class TreeParser {
 public:
  TreeParser(const Line& line, std::size_t pos, const LabelMap& labels)
      : line_(line), pos_(pos), labels_(labels) {}

  CupTree parse_all() {
    CupTree t = parse();
    skip_space();
    if (pos_ < line_.text.size()) fail("unexpected text after cup tree");
    return t;
  }

 private:
  CupTree parse() {
    skip_space();
    if (pos_ >= line_.text.size()) fail("cup tree ends early");
    if (line_.text[pos_] == '(') {
      ++pos_;
      CupTree left = parse();
      expect(',');
      CupTree right = parse();
      expect(')');
      return CupTree::join(left, right);
    }
    const std::size_t start = pos_;
    while (pos_ < line_.text.size() && valid_label(std::string_view(&line_.text[pos_], 1))) ++pos_;
    if (pos_ == start) fail("expected a candidate label or '('");
    Token tok{line_.text.substr(start, pos_ - start), static_cast<int>(start) + 1};
    return CupTree::leaf(labels_.resolve(line_, tok));
  }

  void skip_space() {
    while (pos_ < line_.text.size() && std::isspace(static_cast<unsigned char>(line_.text[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= line_.text.size() || line_.text[pos_] != c) {
      fail(std::string("expected '") + c + "' in cup tree");
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    line_.fail(static_cast<int>(pos_) + 1, msg);
  }

  const Line& line_;
  std::size_t pos_;
  const LabelMap& labels_;
};

const std::set<std::string> kSections = {"CANDIDATES", "PROTOCOL", "TIEBREAK", "BALLOTS",
                                         "MANIPULATION"};

ProtocolSpec parse_protocol(const Line& line, int m, const LabelMap& labels) {
  const auto& name = line.tokens.front();
  const auto args = std::vector<Token>(line.tokens.begin() + 1, line.tokens.end());
  if (name.text == "scoring") {
    if (args.empty()) line.fail(name.column, "scoring needs a vector of integers");
    std::vector<std::int64_t> alpha;
    for (const auto& a : args) {
      auto v = parse_int(a.text);
      if (!v) line.fail(a.column, "scoring entry '" + a.text + "' is not an integer");
      alpha.push_back(*v);
    }
    try {
      return protocol::Scoring{ScoringVector(std::move(alpha))};
    } catch (const InputError& e) {
      line.fail(args.front().column, e.what());
    }
  }
  if (name.text == "cup" && !args.empty()) {
    const std::size_t pos = static_cast<std::size_t>(args.front().column) - 1;
    return protocol::Cup{TreeParser(line, pos, labels).parse_all()};
  }
  if (!args.empty()) {
    line.fail(args.front().column, "protocol '" + name.text + "' takes no parameters");
  }
  try {
    return make_protocol(name.text, m);
  } catch (const InputError& e) {
    line.fail(name.column, e.what());
  }
}

TieBreakPolicy parse_tiebreak_line(const Line& line, const LabelMap& labels) {
  const auto& name = line.tokens.front();
  if (name.text != "lexicographic") {
    if (line.tokens.size() > 1) line.fail(line.tokens[1].column, "unexpected tie-break argument");
    try {
      return parse_tiebreak(name.text);
    } catch (const InputError& e) {
      line.fail(name.column, e.what());
    }
  }
  std::vector<Candidate> priority;
  for (std::size_t i = 1; i < line.tokens.size(); ++i) {
    priority.push_back(labels.resolve(line, line.tokens[i]));
  }
  return TieBreakPolicy::lexicographic(std::move(priority));
}

}  // namespace

// --- Small value formats ---------------------------------------------------

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = parse_int(text.substr(0, slash));
  std::optional<std::int64_t> den = 1;
  if (slash != std::string_view::npos) den = parse_int(text.substr(slash + 1));
  if (!num || !den || *den <= 0) {
    throw InputError("'" + std::string(text) + "' is not an exact fraction num/den");
  }
  return Rational(*num, *den);
}

std::string format_rational(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

TieBreakPolicy parse_tiebreak(std::string_view name) {
  if (name == "lexicographic") return TieBreakPolicy::lexicographic();
  if (name == "pessimistic") return TieBreakPolicy::pessimistic();
  if (name == "optimistic") return TieBreakPolicy::optimistic();
  throw InputError("unknown tie-break policy '" + std::string(name) + "'");
}

ProtocolSpec make_protocol(std::string_view name, int m) {
  if (m < 1) throw InputError("an election needs at least one candidate");
  if (name == "plurality") return protocol::Scoring{ScoringVector::plurality(m)};
  if (name == "borda") return protocol::Scoring{ScoringVector::borda(m)};
  if (name == "veto") return protocol::Scoring{ScoringVector::veto(m)};
  if (name == "maximin") return protocol::Maximin{};
  if (name == "copeland") return protocol::Copeland{};
  if (name == "stv") return protocol::Stv{};
  if (name == "runoff") return protocol::PluralityRunoff{};
  if (name == "cup") return protocol::Cup{build_balanced_tree(m)};
  if (name == "randomized-cup") return protocol::RandomizedCup{};
  throw InputError("unknown protocol '" + std::string(name) + "'");
}

std::vector<std::string> default_labels(int m) {
  std::vector<std::string> out;
  for (int i = 0; i < m; ++i) {
    out.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "c" + std::to_string(i));
  }
  return out;
}

// --- Document --------------------------------------------------------------

Profile ElectionDocument::profile() const { return Profile(m(), ballots); }

ManipulationInstance ElectionDocument::instance(
    const std::optional<TieBreakPolicy>& override_tb) const {
  if (!manipulation) throw InputError("the election file has no MANIPULATION section");
  ManipulationInstance inst;
  inst.nonmanipulators = profile();
  inst.coalition = manipulation->weights;
  inst.goal = manipulation->goal;
  inst.protocol = protocol;
  inst.tiebreak = override_tb.value_or(tiebreak.value_or(TieBreakPolicy::pessimistic()));
  inst.threshold = manipulation->threshold;
  inst.check();
  return inst;
}

ElectionDocument parse_election(std::string_view text) {
  const auto lines = split_lines(text);
  ElectionDocument doc;

  std::map<std::string, std::vector<const Line*>> sections;
  std::map<std::string, const Line*> headers;
  std::string current;
  bool seen_version = false;
  for (const auto& line : lines) {
    const auto& head = line.tokens.front();
    if (head.text == "VERSION") {
      if (seen_version || !current.empty()) line.fail("VERSION must be the first line, once");
      if (line.tokens.size() != 2) line.fail("expected 'VERSION <n>'");
      auto v = parse_int(line.tokens[1].text);
      if (!v || *v != kFormatVersion) {
        line.fail(line.tokens[1].column, "unsupported format version '" + line.tokens[1].text + "'");
      }
      doc.version = static_cast<int>(*v);
      seen_version = true;
      continue;
    }
    if (kSections.contains(head.text)) {
      if (line.tokens.size() != 1) line.fail(line.tokens[1].column, "section headers stand alone");
      if (headers.contains(head.text)) line.fail("duplicate section " + head.text);
      headers[head.text] = &line;
      current = head.text;
      sections[current];
      continue;
    }
    if (current.empty()) line.fail("content before the first section header");
    sections[current].push_back(&line);
  }

  if (!headers.contains("CANDIDATES")) throw ParseError(1, 1, "missing CANDIDATES section");
  if (!headers.contains("PROTOCOL")) throw ParseError(1, 1, "missing PROTOCOL section");

  for (const Line* line : sections["CANDIDATES"]) {
    for (const auto& tok : line->tokens) {
      if (!valid_label(tok.text)) line->fail(tok.column, "invalid candidate label '" + tok.text + "'");
      if (std::find(doc.labels.begin(), doc.labels.end(), tok.text) != doc.labels.end()) {
        line->fail(tok.column, "duplicate candidate label '" + tok.text + "'");
      }
      doc.labels.push_back(tok.text);
    }
  }
  if (doc.labels.empty()) headers["CANDIDATES"]->fail("no candidates listed");
  if (doc.labels.size() > 31) headers["CANDIDATES"]->fail("at most 31 candidates are supported");
  const LabelMap labels(doc.labels);
  const int m = doc.m();

  const auto& proto = sections["PROTOCOL"];
  if (proto.size() != 1) headers["PROTOCOL"]->fail("PROTOCOL takes exactly one line");
  doc.protocol = parse_protocol(*proto.front(), m, labels);
  try {
    check_protocol(doc.protocol, m);
  } catch (const InputError& e) {
    proto.front()->fail(e.what());
  }

  if (headers.contains("TIEBREAK")) {
    const auto& tb = sections["TIEBREAK"];
    if (tb.size() != 1) headers["TIEBREAK"]->fail("TIEBREAK takes exactly one line");
    doc.tiebreak = parse_tiebreak_line(*tb.front(), labels);
    try {
      doc.tiebreak->ranks(m);
    } catch (const InputError& e) {
      tb.front()->fail(e.what());
    }
  }

  for (const Line* line : sections["BALLOTS"]) {
    const auto& toks = line->tokens;
    if (toks.size() < 2) line->fail("a ballot line is '<label>,<label>,... <weight>'");
    const Token& wtok = toks.back();
    auto w = parse_int(wtok.text);
    if (!w) line->fail(wtok.column, "ballot weight '" + wtok.text + "' is not an integer");
    if (*w < 1) line->fail(wtok.column, "ballot weight must be positive");
    WeightedBallot b;
    b.weight = *w;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) b.order.push_back(labels.resolve(*line, toks[i]));
    try {
      check_order(m, b.order);
    } catch (const InputError& e) {
      line->fail(e.what());
    }
    doc.ballots.push_back(std::move(b));
  }
  try {
    doc.profile();
  } catch (const InputError& e) {
    throw ParseError(headers.contains("BALLOTS") ? headers["BALLOTS"]->number : 1, 1, e.what());
  }

  if (headers.contains("MANIPULATION")) {
    ManipulationBlock block;
    bool has_goal = false;
    bool has_weights = false;
    for (const Line* line : sections["MANIPULATION"]) {
      const auto& toks = line->tokens;
      const auto& key = toks.front().text;
      if (key == "weights") {
        if (has_weights) line->fail("duplicate weights line");
        has_weights = true;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          auto w = parse_int(toks[i].text);
          if (!w) line->fail(toks[i].column, "coalition weight '" + toks[i].text + "' is not an integer");
          if (*w < 1) line->fail(toks[i].column, "coalition weights must be positive");
          block.weights.push_back(*w);
        }
      } else if (key == "goal") {
        if (has_goal) line->fail("duplicate goal line");
        if (toks.size() != 3) line->fail("expected 'goal constructive|destructive <label>'");
        Candidate c = labels.resolve(*line, toks[2]);
        if (toks[1].text == "constructive") {
          block.goal = Goal::constructive(c);
        } else if (toks[1].text == "destructive") {
          block.goal = Goal::destructive(c);
        } else {
          line->fail(toks[1].column, "goal kind must be constructive or destructive");
        }
        has_goal = true;
      } else if (key == "threshold") {
        if (block.threshold) line->fail("duplicate threshold line");
        if (toks.size() != 2) line->fail("expected 'threshold <num>/<den>'");
        try {
          block.threshold = parse_rational(toks[1].text);
        } catch (const InputError& e) {
          line->fail(toks[1].column, e.what());
        }
        if (*block.threshold < Rational(0) || *block.threshold > Rational(1)) {
          line->fail(toks[1].column, "threshold must lie in [0, 1]");
        }
      } else {
        line->fail("unknown MANIPULATION entry '" + key + "'");
      }
    }
    if (!has_goal) headers["MANIPULATION"]->fail("MANIPULATION needs a goal line");
    if (is_randomized(doc.protocol) != block.threshold.has_value()) {
      headers["MANIPULATION"]->fail(is_randomized(doc.protocol)
                                        ? "the randomized cup needs a threshold line"
                                        : "threshold only applies to the randomized cup");
    }
    doc.manipulation = std::move(block);
  }
  return doc;
}

namespace {
void write_tree(std::ostream& os, const CupTree& tree, int idx,
                const std::vector<std::string>& labels) {
  const auto& node = tree.nodes()[idx];
  if (node.is_leaf()) {
    os << labels[node.candidate];
    return;
  }
  os << '(';
  write_tree(os, tree, node.left, labels);
  os << ',';
  write_tree(os, tree, node.right, labels);
  os << ')';
}

void write_order(std::ostream& os, const std::vector<Candidate>& order,
                 const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < order.size(); ++i) os << (i ? "," : "") << labels.at(order[i]);
}
}  // namespace

std::string serialize_election(const ElectionDocument& doc) {
  std::ostringstream os;
  os << "VERSION " << doc.version << "\nCANDIDATES\n";
  for (int i = 0; i < doc.m(); ++i) os << (i ? " " : "") << doc.labels[i];
  os << "\nPROTOCOL\n";
  const auto name = protocol_name(doc.protocol);
  if (name == "scoring") {
    os << "scoring ";
    const auto& a = std::get<protocol::Scoring>(doc.protocol).alpha.alpha();
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  } else if (const auto* cup = std::get_if<protocol::Cup>(&doc.protocol)) {
    os << "cup ";
    write_tree(os, cup->tree, 0, doc.labels);
  } else {
    os << name;
  }
  os << '\n';
  if (doc.tiebreak) {
    os << "TIEBREAK\n" << to_string(doc.tiebreak->kind());
    for (Candidate c : doc.tiebreak->priority()) os << ' ' << doc.labels.at(c);
    os << '\n';
  }
  os << "BALLOTS\n";
  for (const auto& b : doc.ballots) {
    write_order(os, b.order, doc.labels);
    os << ' ' << b.weight << '\n';
  }
  if (doc.manipulation) {
    const auto& mb = *doc.manipulation;
    os << "MANIPULATION\nweights";
    for (Weight w : mb.weights) os << ' ' << w;
    os << "\ngoal " << to_string(mb.goal.kind) << ' ' << doc.labels.at(mb.goal.candidate) << '\n';
    if (mb.threshold) os << "threshold " << format_rational(*mb.threshold) << '\n';
  }
  return os.str();
}

ElectionDocument document_for(const ManipulationInstance& inst, std::vector<std::string> labels) {
  ElectionDocument doc;
  doc.labels = labels.empty() ? default_labels(inst.m()) : std::move(labels);
  if (doc.m() != inst.m()) throw InputError("label count does not match the candidate count");
  doc.protocol = inst.protocol;
  doc.tiebreak = inst.tiebreak;
  doc.ballots = inst.nonmanipulators.ballots();
  doc.manipulation = ManipulationBlock{inst.coalition, inst.goal, inst.threshold};
  return doc;
}

Witness parse_witness(std::string_view text, const std::vector<std::string>& labels) {
  const LabelMap map(labels);
  Witness out;
  for (const auto& line : split_lines(text)) {
    std::vector<Candidate> order;
    for (const auto& tok : line.tokens) order.push_back(map.resolve(line, tok));
    try {
      check_order(static_cast<int>(labels.size()), order);
    } catch (const InputError& e) {
      line.fail(e.what());
    }
    out.push_back(std::move(order));
  }
  return out;
}

std::string serialize_witness(const Witness& witness, const std::vector<std::string>& labels) {
  std::ostringstream os;
  for (const auto& order : witness) {
    write_order(os, order, labels);
    os << '\n';
  }
  return os.str();
}

}  // namespace cwm
