#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treebench/model.hpp"

namespace treebench::check {

// R1 root, R2 main verb, R3 fragmentation, R4 form and lemma, R5 declared
// tags, R6 POS/morph compatibility, R7 cycles and single heads, R8 encoding.
enum class Rule : int { R1 = 1, R2, R3, R4, R5, R6, R7, R8 };

inline constexpr std::array<Rule, 8> kAllRules = {Rule::R1, Rule::R2, Rule::R3, Rule::R4,
                                                  Rule::R5, Rule::R6, Rule::R7, Rule::R8};

std::string to_string(Rule r);
// Accepts "R1".."R8" (case-insensitive). Throws Error("BadRule").
Rule parse_rule(const std::string& s);

enum class Severity { kError, kWarning };
std::string to_string(Severity s);

struct Locus {
  enum class Kind { kSentence, kToken, kEdge };
  Kind kind = Kind::kSentence;
  TokenId token = 0;  // token, or dependent of an edge
  TokenId head = 0;   // edges only

  static Locus sentence() { return {}; }
  static Locus at_token(TokenId t) { return {Kind::kToken, t, 0}; }
  static Locus at_edge(TokenId h, TokenId d) { return {Kind::kEdge, d, h}; }

  bool operator==(const Locus&) const = default;
  bool operator<(const Locus& o) const;
};

// "sentence", "token:3" or "edge:ROOT->2".
std::string to_string(const Locus& l);

struct Finding {
  Rule rule = Rule::R1;
  Severity severity = Severity::kError;
  Locus locus;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct CheckConfig {
  // Empty means every rule.
  std::set<Rule> enabled;
  Tagset tagset;

  bool enables(Rule r) const { return enabled.empty() || enabled.count(r) > 0; }
  bool operator==(const CheckConfig&) const = default;
};

struct CheckReport {
  std::string sentence_id;
  std::vector<Finding> findings;  // sorted by (rule, locus)
  // Rules actually evaluated, in order.
  std::vector<Rule> executed;

  bool passed() const;
  std::set<Rule> failed_rules() const;
  bool operator==(const CheckReport&) const = default;
};

// Never throws except Error("CheckerInternal") if R8 serialization fails
// unexpectedly.
CheckReport run_checks(const DepGraph& g, const CheckConfig& cfg);

struct CorpusCheck {
  std::vector<CheckReport> reports;
  // Error findings per rule, summed over reports. Every rule has an entry.
  std::map<Rule, int> summary;

  bool passed() const;
};

CorpusCheck check_corpus(const std::vector<DepGraph>& graphs, const CheckConfig& cfg);

// One line per finding: sentence_id, rule, severity, locus, message
// separated by tabs.
std::string format_report(const CheckReport& r);
std::string format_summary(const std::map<Rule, int>& summary);

}  // namespace treebench::check
