#pragma once

// Shared fixtures, random generators and brute-force oracles for the test
// suites. Oracles here deliberately avoid the library's own graph walks.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "treebench/model.hpp"

namespace treebench::testing {

using Rng = std::mt19937_64;

// Head per token (index 0 unused); nullopt = no head, 0 = ROOT.
using HeadVector = std::vector<std::optional<TokenId>>;

inline Tagset finnish_tagset() {
  Tagset ts;
  ts.pos_tags = {"N", "V", "A", "ADV", "PRON"};
  ts.morph_tags = {"sg-nom",     "sg-gen",     "pl-nom", "pl-par", "pres-tense",
                   "past-tense", "pos-degree", "cmp-degree", "none"};
  ts.dep_labels = {"main", "subj", "obj", "attr", "adv", "det", "mod", "conj", "cc", "punct"};
  ts.verb_pos = {"V"};
  ts.compat = {{"N", {"sg-nom", "sg-gen", "pl-nom", "pl-par"}},
               {"PRON", {"sg-nom", "sg-gen", "pl-nom", "pl-par"}},
               {"V", {"pres-tense", "past-tense"}},
               {"A", {"sg-nom", "pl-nom", "pos-degree", "cmp-degree"}},
               {"ADV", {"none"}}};
  return ts;
}

inline std::vector<std::string> label_alphabet() {
  return {"main", "subj", "obj", "attr", "adv", "det", "mod", "conj", "cc", "punct"};
}

inline Token token(TokenId id, std::string form, std::string lemma = "", std::string pos = "",
                   std::string morph = "") {
  return Token{id, std::move(form), std::move(lemma), std::move(pos), std::move(morph)};
}

// kissa nukkuu sohvalla: N V N, rooted at token 2.
inline DepGraph three_token_tree(std::string sid = "s1") {
  return DepGraph::build(std::move(sid),
                         {token(1, "kissa", "kissa", "N", "sg-nom"),
                          token(2, "nukkuu", "nukkua", "V", "pres-tense"),
                          token(3, "sohvalla", "sohva", "N", "sg-gen")},
                         {{kRoot, 2, "main"}, {2, 1, "subj"}, {2, 3, "adv"}});
}

inline HeadVector heads_of(const DepGraph& g) {
  HeadVector h(g.size() + 1);
  for (const auto& e : g.edges()) h[e.dependent] = e.head;
  return h;
}

// Reachability by DFS from ROOT over child adjacency lists.
inline std::vector<bool> oracle_reachable(const HeadVector& heads) {
  const std::size_t n = heads.size() - 1;
  std::vector<std::vector<TokenId>> kids(n + 1);
  for (TokenId t = 1; t <= n; ++t) {
    if (heads[t]) kids[*heads[t]].push_back(t);
  }
  std::vector<bool> seen(n + 1, false);
  std::vector<TokenId> stack{kRoot};
  seen[kRoot] = true;
  while (!stack.empty()) {
    TokenId cur = stack.back();
    stack.pop_back();
    for (TokenId c : kids[cur]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return seen;
}

// A token lies on a cycle iff n+1 head steps can bring it back to itself.
inline std::set<TokenId> oracle_cyclic(const HeadVector& heads) {
  const std::size_t n = heads.size() - 1;
  std::set<TokenId> out;
  for (TokenId t = 1; t <= n; ++t) {
    std::optional<TokenId> cur = heads[t];
    for (std::size_t step = 0; step <= n && cur && *cur != kRoot; ++step) {
      if (*cur == t) {
        out.insert(t);
        break;
      }
      cur = heads[*cur];
    }
  }
  return out;
}

struct OracleCompleteness {
  bool complete = false;
  std::vector<TokenId> missing;
  int roots = 0;
  std::vector<TokenId> unreachable;
  std::set<TokenId> cyclic;
};

inline OracleCompleteness oracle_completeness(const HeadVector& heads) {
  OracleCompleteness o;
  const std::size_t n = heads.size() - 1;
  auto seen = oracle_reachable(heads);
  o.cyclic = oracle_cyclic(heads);
  for (TokenId t = 1; t <= n; ++t) {
    if (!heads[t]) o.missing.push_back(t);
    if (heads[t] && *heads[t] == kRoot) ++o.roots;
    if (!seen[t]) o.unreachable.push_back(t);
  }
  o.complete = o.roots == 1 && o.missing.empty() && o.unreachable.empty() && o.cyclic.empty();
  return o;
}

inline DepGraph graph_from_heads(const std::string& sid, const HeadVector& heads,
                                 const std::vector<std::string>& labels = {}) {
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  for (TokenId t = 1; t < heads.size(); ++t) {
    tokens.push_back(token(t, "w" + std::to_string(t), "l" + std::to_string(t)));
    if (heads[t]) edges.push_back({*heads[t], t, labels.empty() ? "" : labels[t - 1]});
  }
  return DepGraph::build(sid, std::move(tokens), std::move(edges));
}

// Calls f for every single-head assignment over n tokens: each token's head
// is ROOT, another token, itself, or none.
inline void for_each_head_vector(std::size_t n, const std::function<void(const HeadVector&)>& f) {
  HeadVector h(n + 1);
  // choice c in [0, n+1]: 0..n is a head, n+1 means none.
  std::vector<std::size_t> choice(n + 1, 0);
  while (true) {
    for (TokenId t = 1; t <= n; ++t) {
      h[t] = choice[t] == n + 1 ? std::nullopt : std::optional<TokenId>(static_cast<TokenId>(choice[t]));
    }
    f(h);
    std::size_t k = 1;
    while (k <= n && ++choice[k] == n + 2) choice[k++] = 0;
    if (k > n) break;
  }
}

// All complete trees (exactly one ROOT attachment, acyclic) over n tokens,
// found by filtering every total head assignment through the oracle.
inline std::vector<HeadVector> all_complete_trees(std::size_t n) {
  std::vector<HeadVector> out;
  HeadVector h(n + 1);
  std::vector<TokenId> choice(n + 1, 0);
  while (true) {
    for (TokenId t = 1; t <= n; ++t) h[t] = choice[t];
    bool self = false;
    for (TokenId t = 1; t <= n; ++t) self = self || choice[t] == t;
    if (!self && oracle_completeness(h).complete) out.push_back(h);
    std::size_t k = 1;
    while (k <= n && ++choice[k] == n + 1) choice[k++] = 0;
    if (k > n) break;
  }
  return out;
}

// Uniform random recursive tree: tokens join in random order, each attaching
// to a uniformly chosen earlier token.
inline HeadVector random_tree_heads(Rng& rng, std::size_t n) {
  std::vector<TokenId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<TokenId>(i + 1);
  std::shuffle(order.begin(), order.end(), rng);
  HeadVector h(n + 1);
  h[order[0]] = kRoot;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    h[order[i]] = order[pick(rng)];
  }
  return h;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

template <typename T>
const T& pick(Rng& rng, const std::set<T>& s) {
  std::uniform_int_distribution<std::size_t> d(0, s.size() - 1);
  return *std::next(s.begin(), static_cast<long>(d(rng)));
}

// Random complete tree with random forms, lemmas and labels; pos/morph are
// arbitrary strings (no tagset semantics).
inline DepGraph random_tree(Rng& rng, const std::string& sid, std::size_t n,
                            const std::vector<std::string>& labels) {
  auto heads = random_tree_heads(rng, n);
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<int> letter(0, 25);
  auto word = [&] {
    std::string w;
    for (int i = len(rng); i > 0; --i) w += static_cast<char>('a' + letter(rng));
    return w;
  };
  std::vector<std::string> odd = {"ä", "ö", "<&>", "\"q\"", "a b", "tab\there", ""};
  for (TokenId t = 1; t <= n; ++t) {
    std::string form = word();
    if (letter(rng) == 0) form += pick(rng, odd);
    tokens.push_back(token(t, form, letter(rng) < 3 ? "" : word(), "P" + std::to_string(letter(rng) % 5),
                           letter(rng) < 2 ? "" : "m" + std::to_string(letter(rng) % 7)));
    edges.push_back({*heads[t], t, pick(rng, labels)});
  }
  return DepGraph::build(sid, std::move(tokens), std::move(edges));
}

// A sentence that passes every check against finnish_tagset(): token 1..n,
// random tree shape, the root is a verb, labels drawn from the tagset.
inline DepGraph clean_sentence(Rng& rng, const std::string& sid, std::size_t n) {
  const Tagset ts = finnish_tagset();
  auto heads = random_tree_heads(rng, n);
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  const std::vector<std::string> pos = {"N", "V", "A", "ADV", "PRON"};
  const std::vector<std::string> labels = {"subj", "obj", "attr", "adv", "det", "mod", "conj"};
  for (TokenId t = 1; t <= n; ++t) {
    const bool is_root = *heads[t] == kRoot;
    std::string p = is_root ? "V" : pick(rng, pos);
    std::string m = pick(rng, ts.compat.at(p));
    tokens.push_back(token(t, "w" + std::to_string(t), "lemma" + std::to_string(t), p, m));
    edges.push_back({*heads[t], t, is_root ? "main" : pick(rng, labels)});
  }
  return DepGraph::build(sid, std::move(tokens), std::move(edges));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("treebench-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace treebench::testing
