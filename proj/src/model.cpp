#include "treebench/model.hpp"

#include <algorithm>
#include <sstream>

namespace treebench {

namespace {

std::string edge_text(TokenId head, TokenId dep) {
  std::ostringstream os;
  if (head == kRoot) {
    os << "ROOT";
  } else {
    os << head;
  }
  os << "->" << dep;
  return os.str();
}

}  // namespace

// Internal mutation helper shared by build() and edit_graph().
class GraphEditor {
 public:
  explicit GraphEditor(DepGraph& g) : g_(g) {}

  void check_token(TokenId id, const char* what) const {
    if (!g_.has_token(id)) {
      std::ostringstream os;
      os << what << " token " << id << " does not exist in sentence '" << g_.sentence_id_
         << "' (" << g_.tokens_.size() << " tokens)";
      throw GraphError("UnknownToken", {id}, os.str());
    }
  }

  void add(TokenId head, TokenId dep, std::string label) {
    auto it = g_.heads_.find(dep);
    if (it != g_.heads_.end()) {
      if (it->second.head == head) {
        throw GraphError("DuplicateEdge", {head, dep},
                         "duplicate edge " + edge_text(head, dep));
      }
      throw GraphError("MultipleHeads", {dep},
                       "token " + std::to_string(dep) + " already has head " +
                           edge_text(it->second.head, dep) + "; cannot add " +
                           edge_text(head, dep));
    }
    g_.heads_.emplace(dep, DepGraph::Attachment{head, std::move(label)});
  }

  DepGraph::Attachment& find(TokenId head, TokenId dep) {
    auto it = g_.heads_.find(dep);
    if (it == g_.heads_.end() || it->second.head != head) {
      throw GraphError("UnknownEdge", {head, dep}, "no edge " + edge_text(head, dep));
    }
    return it->second;
  }

  void erase(TokenId head, TokenId dep) {
    find(head, dep);
    g_.heads_.erase(dep);
  }

  Token& token(TokenId id) {
    check_token(id, "edited");
    return g_.tokens_[id - 1];
  }

 private:
  DepGraph& g_;
};

DepGraph DepGraph::build(std::string sentence_id, std::vector<Token> tokens,
                         std::vector<DepEdge> edges) {
  DepGraph g;
  g.sentence_id_ = std::move(sentence_id);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].id != i + 1) {
      std::ostringstream os;
      os << "token at position " << i + 1 << " carries id " << tokens[i].id;
      throw GraphError("BadTokenIds", {tokens[i].id}, os.str());
    }
  }
  g.tokens_ = std::move(tokens);

  GraphEditor editor(g);
  for (auto& e : edges) {
    if (e.dependent == kRoot || !g.has_token(e.dependent) ||
        (e.head != kRoot && !g.has_token(e.head))) {
      throw GraphError("BadTokenIds", {e.head, e.dependent},
                       "edge " + edge_text(e.head, e.dependent) +
                           " references a token outside 1.." +
                           std::to_string(g.tokens_.size()));
    }
    editor.add(e.head, e.dependent, std::move(e.label));
  }
  return g;
}

const Token& DepGraph::token(TokenId id) const {
  if (!has_token(id)) {
    throw GraphError("UnknownToken", {id}, "token " + std::to_string(id) + " does not exist");
  }
  return tokens_[id - 1];
}

std::vector<DepEdge> DepGraph::edges() const {
  std::vector<DepEdge> out;
  out.reserve(heads_.size());
  for (const auto& [dep, att] : heads_) {
    out.push_back(DepEdge{att.head, dep, att.label});
  }
  return out;
}

std::optional<DepEdge> DepGraph::head_edge(TokenId dependent) const {
  auto it = heads_.find(dependent);
  if (it == heads_.end()) return std::nullopt;
  return DepEdge{it->second.head, dependent, it->second.label};
}

std::vector<TokenId> roots(const DepGraph& g) {
  std::vector<TokenId> out;
  for (const auto& e : g.edges()) {
    if (e.head == kRoot) out.push_back(e.dependent);
  }
  return out;
}

std::vector<std::vector<TokenId>> children(const DepGraph& g) {
  std::vector<std::vector<TokenId>> out(g.size() + 1);
  for (const auto& e : g.edges()) out[e.head].push_back(e.dependent);
  return out;
}

CompletenessReport is_complete(const DepGraph& g) {
  CompletenessReport r;
  const auto n = static_cast<TokenId>(g.size());

  // Walk each head chain; with single heads every token has at most one
  // successor, so a chain either reaches ROOT, dead-ends, or loops.
  enum class State : std::uint8_t { kUnknown, kOnStack, kReaches, kFails };
  std::vector<State> state(n + 1, State::kUnknown);
  std::vector<TokenId> head(n + 1, kRoot);
  std::vector<bool> has_head(n + 1, false);
  for (const auto& e : g.edges()) {
    head[e.dependent] = e.head;
    has_head[e.dependent] = true;
    if (e.head == kRoot) ++r.root_count;
  }

  std::vector<bool> on_cycle(n + 1, false);
  for (TokenId start = 1; start <= n; ++start) {
    if (!has_head[start]) r.missing_heads.push_back(start);
    if (state[start] != State::kUnknown) continue;
    std::vector<TokenId> path;
    TokenId cur = start;
    State verdict = State::kFails;
    while (true) {
      if (cur == kRoot) {
        verdict = State::kReaches;
        break;
      }
      if (state[cur] == State::kReaches || state[cur] == State::kFails) {
        verdict = state[cur];
        break;
      }
      if (state[cur] == State::kOnStack) {
        // Everything from cur's first occurrence onward forms the cycle.
        auto first = std::find(path.begin(), path.end(), cur);
        for (auto it = first; it != path.end(); ++it) on_cycle[*it] = true;
        verdict = State::kFails;
        break;
      }
      state[cur] = State::kOnStack;
      path.push_back(cur);
      if (!has_head[cur]) {
        verdict = State::kFails;
        break;
      }
      cur = head[cur];
    }
    for (TokenId t : path) state[t] = verdict;
  }

  for (TokenId t = 1; t <= n; ++t) {
    if (state[t] != State::kReaches) r.unreachable.push_back(t);
    if (on_cycle[t]) r.cyclic.push_back(t);
  }
  r.complete = r.root_count == 1 && r.missing_heads.empty() && r.unreachable.empty() &&
               r.cyclic.empty();
  return r;
}

std::string to_string(TokenField f) {
  switch (f) {
    case TokenField::kForm:
      return "form";
    case TokenField::kLemma:
      return "lemma";
    case TokenField::kPos:
      return "pos";
    case TokenField::kMorph:
      return "morph";
  }
  return "?";
}

TokenField parse_token_field(const std::string& name) {
  if (name == "form") return TokenField::kForm;
  if (name == "lemma") return TokenField::kLemma;
  if (name == "pos") return TokenField::kPos;
  if (name == "morph") return TokenField::kMorph;
  throw Error("BadField", "unknown token field '" + name + "'");
}

DepGraph edit_graph(const DepGraph& g, const EditOp& op) {
  DepGraph out = g;
  GraphEditor editor(out);
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SetTokenField>) {
          Token& t = editor.token(o.token);
          switch (o.field) {
            case TokenField::kForm:
              t.form = o.value;
              break;
            case TokenField::kLemma:
              t.lemma = o.value;
              break;
            case TokenField::kPos:
              t.pos = o.value;
              break;
            case TokenField::kMorph:
              t.morph = o.value;
              break;
          }
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          editor.check_token(o.dependent, "dependent");
          if (o.head != kRoot) editor.check_token(o.head, "head");
          editor.add(o.head, o.dependent, o.label);
        } else if constexpr (std::is_same_v<T, RemoveEdge>) {
          editor.check_token(o.dependent, "dependent");
          editor.erase(o.head, o.dependent);
        } else if constexpr (std::is_same_v<T, RerouteEdge>) {
          editor.check_token(o.dependent, "dependent");
          auto& att = editor.find(o.head, o.dependent);
          if (o.new_head != kRoot) editor.check_token(o.new_head, "new head");
          att.head = o.new_head;
        } else if constexpr (std::is_same_v<T, RelabelEdge>) {
          editor.check_token(o.dependent, "dependent");
          editor.find(o.head, o.dependent).label = o.label;
        }
      },
      op);
  return out;
}

std::vector<std::string> tagset_problems(const Tagset& ts) {
  std::vector<std::string> out;
  for (const auto& v : ts.verb_pos) {
    if (!ts.pos_tags.count(v)) out.push_back("verb POS '" + v + "' is not a declared POS tag");
  }
  for (const auto& [pos, morphs] : ts.compat) {
    if (!ts.pos_tags.count(pos)) {
      out.push_back("compatibility entry for undeclared POS '" + pos + "'");
    }
    for (const auto& m : morphs) {
      if (!ts.morph_tags.count(m)) {
        out.push_back("compatibility entry " + pos + "/" + m + " uses undeclared morph tag");
      }
    }
  }
  if (ts.dep_labels.count(kHeadEdgeLabel)) {
    out.push_back(std::string("dependency label '") + kHeadEdgeLabel +
                  "' is reserved for head edges");
  }
  for (const auto* set : {&ts.pos_tags, &ts.morph_tags, &ts.dep_labels}) {
    if (set->count("")) out.push_back("empty string declared as a tag");
  }
  return out;
}

}  // namespace treebench
