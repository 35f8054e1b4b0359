#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treebench/model.hpp"

namespace treebench::merge {

class MergeError : public Error {
 public:
  using Error::Error;
};

class TokenizationMismatch : public MergeError {
 public:
  TokenizationMismatch(std::size_t position, std::string parser_a, std::vector<std::string> forms_a,
                       std::string parser_b, std::vector<std::string> forms_b);

  // 1-based position of the first divergent token.
  std::size_t position() const noexcept { return position_; }
  const std::string& parser_a() const noexcept { return parser_a_; }
  const std::string& parser_b() const noexcept { return parser_b_; }
  const std::vector<std::string>& forms_a() const noexcept { return forms_a_; }
  const std::vector<std::string>& forms_b() const noexcept { return forms_b_; }

 private:
  std::size_t position_;
  std::string parser_a_;
  std::vector<std::string> forms_a_;
  std::string parser_b_;
  std::vector<std::string> forms_b_;
};

// Parser outputs for one sentence, all sharing one tokenization.
struct ParseSet {
  std::string sentence_id;
  std::map<std::string, DepGraph> parses;

  bool operator==(const ParseSet&) const = default;
};

// Throws MergeError("NoParses") or TokenizationMismatch. The first parser
// (in id order) is the reference for the comparison.
ParseSet align(std::map<std::string, DepGraph> parses);

struct ParserView {
  std::optional<TokenId> head;
  std::string label;
  std::string pos;

  bool operator==(const ParserView&) const = default;
};

struct TokenAgreement {
  TokenId token = 0;
  std::string form;
  std::map<std::string, ParserView> by_parser;
  bool pos_agree = false;
  bool head_agree = false;
  bool label_agree = false;  // head and label both agree

  bool operator==(const TokenAgreement&) const = default;
};

struct AgreementReport {
  double pos = 1.0;
  double unlabeled = 1.0;
  double labeled = 1.0;
  std::vector<TokenAgreement> rows;

  bool operator==(const AgreementReport&) const = default;
};

// Throws MergeError("NeedTwoParses").
AgreementReport agreement(const ParseSet& ps);

// Copy of the chosen parser's graph. Throws MergeError("UnknownParser").
DepGraph initial_tree(const ParseSet& ps, const std::string& base);

enum class Aspect { kHead, kLabel, kPos, kMorph, kLemma };
std::string to_string(Aspect a);
Aspect parse_aspect(const std::string& s);

struct Alternative {
  std::string value;                 // head as decimal (0 = ROOT), or the tag value
  std::optional<TokenId> head;       // head conflicts only; nullopt = unattached
  std::string label;                 // head conflicts only: that parser's label
  bool operator==(const Alternative&) const = default;
};

struct Conflict {
  TokenId token = 0;
  Aspect aspect = Aspect::kHead;
  std::map<std::string, Alternative> alternatives;  // by parser id

  bool operator==(const Conflict&) const = default;
};

struct MergeResult {
  DepGraph merged;
  std::vector<Conflict> conflicts;  // sorted by token, then aspect

  bool operator==(const MergeResult&) const = default;
};

// Unanimity voting per token and aspect. A disputed head leaves the token
// unattached and its head conflict carries every parser's (head, label)
// pair; a unanimous head with disputed labels yields an unlabeled edge plus
// a label conflict. Throws MergeError("NeedTwoParses").
MergeResult combine(const ParseSet& ps);

}  // namespace treebench::merge
