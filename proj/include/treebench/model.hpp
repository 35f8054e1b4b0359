#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "treebench/error.hpp"

namespace treebench {

// Sentence-local token position, 1-based. Zero is reserved for the virtual
// root node, which is a head target but never a token.
using TokenId = std::uint32_t;
inline constexpr TokenId kRoot = 0;

// A terminal node. Empty strings mean "unset" for lemma, pos and morph so
// that partial parser output can be held without placeholders.
struct Token {
  TokenId id = 0;
  std::string form;
  std::string lemma;
  std::string pos;
  std::string morph;

  bool operator==(const Token&) const = default;
};

struct DepEdge {
  TokenId head = kRoot;
  TokenId dependent = 0;
  std::string label;

  bool operator==(const DepEdge&) const = default;
};

class GraphError : public Error {
 public:
  GraphError(std::string kind, std::vector<TokenId> ids, const std::string& message)
      : Error(std::move(kind), message), ids_(std::move(ids)) {}

  // Offending token ids; for edge errors this is {head, dependent}.
  const std::vector<TokenId>& ids() const noexcept { return ids_; }

 private:
  std::vector<TokenId> ids_;
};

// One sentence's dependency structure. The class enforces the structural
// invariants that hold for every graph (positional ids, at most one head per
// dependent, no duplicate pairs); completeness is a separate diagnostic since
// parsers routinely leave heads unspecified.
class DepGraph {
 public:
  DepGraph() = default;

  // Throws GraphError (BadTokenIds, DuplicateEdge, MultipleHeads).
  static DepGraph build(std::string sentence_id, std::vector<Token> tokens,
                        std::vector<DepEdge> edges);

  const std::string& sentence_id() const noexcept { return sentence_id_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const Token& token(TokenId id) const;

  // Edges ordered by dependent.
  std::vector<DepEdge> edges() const;
  std::size_t edge_count() const noexcept { return heads_.size(); }

  // The incoming edge of a token, if any.
  std::optional<DepEdge> head_edge(TokenId dependent) const;
  bool has_token(TokenId id) const noexcept { return id >= 1 && id <= tokens_.size(); }

  void set_sentence_id(std::string id) { sentence_id_ = std::move(id); }

  bool operator==(const DepGraph&) const = default;

 private:
  friend class GraphEditor;

  struct Attachment {
    TokenId head = kRoot;
    std::string label;
    bool operator==(const Attachment&) const = default;
  };

  std::string sentence_id_;
  std::vector<Token> tokens_;
  std::map<TokenId, Attachment> heads_;  // keyed by dependent
};

inline DepGraph build_graph(std::string sentence_id, std::vector<Token> tokens,
                            std::vector<DepEdge> edges) {
  return DepGraph::build(std::move(sentence_id), std::move(tokens), std::move(edges));
}

struct CompletenessReport {
  bool complete = false;
  std::vector<TokenId> missing_heads;
  int root_count = 0;
  // Tokens whose head chain does not end at ROOT (includes missing heads and
  // everything hanging below a cycle).
  std::vector<TokenId> unreachable;
  // Tokens lying on a cycle.
  std::vector<TokenId> cyclic;

  bool operator==(const CompletenessReport&) const = default;
};

CompletenessReport is_complete(const DepGraph& g);

// The tokens attached directly to ROOT.
std::vector<TokenId> roots(const DepGraph& g);

// Dependents of every token, index 0 being ROOT.
std::vector<std::vector<TokenId>> children(const DepGraph& g);

// ---------------------------------------------------------------------------
// Editing

enum class TokenField { kForm, kLemma, kPos, kMorph };

std::string to_string(TokenField f);
// Throws Error("BadField") for anything outside {form, lemma, pos, morph}.
TokenField parse_token_field(const std::string& name);

struct SetTokenField {
  TokenId token = 0;
  TokenField field = TokenField::kForm;
  std::string value;
  bool operator==(const SetTokenField&) const = default;
};

struct AddEdge {
  TokenId head = kRoot;
  TokenId dependent = 0;
  std::string label;
  bool operator==(const AddEdge&) const = default;
};

struct RemoveEdge {
  TokenId head = kRoot;
  TokenId dependent = 0;
  bool operator==(const RemoveEdge&) const = default;
};

// Moves the edge head->dependent to new_head->dependent, keeping its label.
struct RerouteEdge {
  TokenId head = kRoot;
  TokenId dependent = 0;
  TokenId new_head = kRoot;
  bool operator==(const RerouteEdge&) const = default;
};

struct RelabelEdge {
  TokenId head = kRoot;
  TokenId dependent = 0;
  std::string label;
  bool operator==(const RelabelEdge&) const = default;
};

using EditOp = std::variant<SetTokenField, AddEdge, RemoveEdge, RerouteEdge, RelabelEdge>;

// Returns the edited graph. Throws GraphError (UnknownToken, UnknownEdge,
// MultipleHeads, DuplicateEdge). The result may be incomplete.
DepGraph edit_graph(const DepGraph& g, const EditOp& op);

// ---------------------------------------------------------------------------
// Tag inventories

struct Tagset {
  std::set<std::string> pos_tags;
  std::set<std::string> morph_tags;
  std::set<std::string> dep_labels;
  std::set<std::string> verb_pos;
  // POS -> permitted morph values. A POS without an entry is unrestricted.
  std::map<std::string, std::set<std::string>> compat;

  bool operator==(const Tagset&) const = default;
};

// Human-readable violations of the Tagset invariants; empty when consistent.
std::vector<std::string> tagset_problems(const Tagset& ts);

// Dependency label reserved by the TIGER encoding for the head edge.
inline constexpr const char* kHeadEdgeLabel = "HD";

}  // namespace treebench
