#include "treebench/merge.hpp"

#include <algorithm>
#include <sstream>

namespace treebench::merge {

namespace {

std::vector<std::string> forms(const DepGraph& g) {
  std::vector<std::string> out;
  out.reserve(g.size());
  for (const auto& t : g.tokens()) out.push_back(t.form);
  return out;
}

std::string quoted(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << '"' << v[i] << '"';
  os << ']';
  return os.str();
}

void require_two(const ParseSet& ps) {
  if (ps.parses.size() < 2) {
    throw MergeError("NeedTwoParses", "sentence '" + ps.sentence_id + "' has " +
                                          std::to_string(ps.parses.size()) +
                                          " parse(s); comparison needs at least two");
  }
}

template <typename Get>
bool unanimous(const ParseSet& ps, Get get) {
  auto it = ps.parses.begin();
  const auto first = get(it->second);
  return std::all_of(std::next(it), ps.parses.end(),
                     [&](const auto& kv) { return get(kv.second) == first; });
}

}  // namespace

TokenizationMismatch::TokenizationMismatch(std::size_t position, std::string parser_a,
                                           std::vector<std::string> forms_a, std::string parser_b,
                                           std::vector<std::string> forms_b)
    : MergeError("TokenizationMismatch",
                 "tokenization of '" + parser_b + "' diverges from '" + parser_a +
                     "' at token " + std::to_string(position) + ": " + quoted(forms_a) +
                     " vs " + quoted(forms_b)),
      position_(position),
      parser_a_(std::move(parser_a)),
      forms_a_(std::move(forms_a)),
      parser_b_(std::move(parser_b)),
      forms_b_(std::move(forms_b)) {}

ParseSet align(std::map<std::string, DepGraph> parses) {
  if (parses.empty()) throw MergeError("NoParses", "align needs at least one parse");
  const auto& [ref_id, ref] = *parses.begin();
  const auto ref_forms = forms(ref);
  for (const auto& [id, g] : parses) {
    auto f = forms(g);
    if (f == ref_forms) continue;
    auto [a, b] = std::mismatch(ref_forms.begin(), ref_forms.end(), f.begin(), f.end());
    auto position = static_cast<std::size_t>(a - ref_forms.begin()) + 1;
    throw TokenizationMismatch(position, ref_id, ref_forms, id, std::move(f));
  }
  ParseSet ps;
  ps.sentence_id = ref.sentence_id();
  ps.parses = std::move(parses);
  return ps;
}

AgreementReport agreement(const ParseSet& ps) {
  require_two(ps);
  AgreementReport r;
  const DepGraph& ref = ps.parses.begin()->second;
  std::size_t pos_ok = 0, head_ok = 0, labeled_ok = 0;
  for (const auto& tok : ref.tokens()) {
    TokenAgreement row;
    row.token = tok.id;
    row.form = tok.form;
    for (const auto& [id, g] : ps.parses) {
      ParserView v;
      v.pos = g.token(tok.id).pos;
      if (auto e = g.head_edge(tok.id)) {
        v.head = e->head;
        v.label = e->label;
      }
      row.by_parser.emplace(id, std::move(v));
    }
    const auto& first = row.by_parser.begin()->second;
    row.pos_agree = row.head_agree = row.label_agree = true;
    for (const auto& [id, v] : row.by_parser) {
      row.pos_agree = row.pos_agree && v.pos == first.pos;
      row.head_agree = row.head_agree && v.head == first.head;
      row.label_agree = row.label_agree && v.label == first.label;
    }
    row.label_agree = row.label_agree && row.head_agree;
    pos_ok += row.pos_agree;
    head_ok += row.head_agree;
    labeled_ok += row.label_agree;
    r.rows.push_back(std::move(row));
  }
  if (!r.rows.empty()) {
    const double n = static_cast<double>(r.rows.size());
    r.pos = static_cast<double>(pos_ok) / n;
    r.unlabeled = static_cast<double>(head_ok) / n;
    r.labeled = static_cast<double>(labeled_ok) / n;
  }
  return r;
}

DepGraph initial_tree(const ParseSet& ps, const std::string& base) {
  auto it = ps.parses.find(base);
  if (it == ps.parses.end()) {
    throw MergeError("UnknownParser",
                     "sentence '" + ps.sentence_id + "' has no parse from '" + base + "'");
  }
  return it->second;
}

std::string to_string(Aspect a) {
  switch (a) {
    case Aspect::kHead:
      return "head";
    case Aspect::kLabel:
      return "label";
    case Aspect::kPos:
      return "pos";
    case Aspect::kMorph:
      return "morph";
    case Aspect::kLemma:
      return "lemma";
  }
  return "?";
}

Aspect parse_aspect(const std::string& s) {
  for (Aspect a : {Aspect::kHead, Aspect::kLabel, Aspect::kPos, Aspect::kMorph, Aspect::kLemma}) {
    if (to_string(a) == s) return a;
  }
  throw Error("BadAspect", "unknown merge aspect '" + s + "'");
}

MergeResult combine(const ParseSet& ps) {
  require_two(ps);
  const DepGraph& ref = ps.parses.begin()->second;
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  std::vector<Conflict> conflicts;

  for (const auto& ref_tok : ref.tokens()) {
    const TokenId id = ref_tok.id;
    Token tok{id, ref_tok.form, "", "", ""};

    auto head_of = [id](const DepGraph& g) -> std::optional<TokenId> {
      if (auto e = g.head_edge(id)) return e->head;
      return std::nullopt;
    };
    auto label_of = [id](const DepGraph& g) {
      auto e = g.head_edge(id);
      return e ? e->label : std::string();
    };

    if (unanimous(ps, head_of)) {
      if (auto h = head_of(ref)) {
        if (unanimous(ps, label_of)) {
          edges.push_back(DepEdge{*h, id, label_of(ref)});
        } else {
          edges.push_back(DepEdge{*h, id, ""});
          Conflict c{id, Aspect::kLabel, {}};
          for (const auto& [pid, g] : ps.parses) c.alternatives[pid] = Alternative{label_of(g), {}, {}};
          conflicts.push_back(std::move(c));
        }
      }
    } else {
      Conflict c{id, Aspect::kHead, {}};
      for (const auto& [pid, g] : ps.parses) {
        auto h = head_of(g);
        c.alternatives[pid] = Alternative{h ? std::to_string(*h) : std::string(), h, label_of(g)};
      }
      conflicts.push_back(std::move(c));
    }

    auto vote = [&](Aspect aspect, std::string Token::*field) {
      auto get = [&](const DepGraph& g) { return g.token(id).*field; };
      if (unanimous(ps, get)) {
        tok.*field = get(ref);
        return;
      }
      Conflict c{id, aspect, {}};
      for (const auto& [pid, g] : ps.parses) c.alternatives[pid] = Alternative{get(g), {}, {}};
      conflicts.push_back(std::move(c));
    };
    vote(Aspect::kPos, &Token::pos);
    vote(Aspect::kMorph, &Token::morph);
    vote(Aspect::kLemma, &Token::lemma);
    tokens.push_back(std::move(tok));
  }

  MergeResult out;
  out.merged = DepGraph::build(ps.sentence_id, std::move(tokens), std::move(edges));
  out.conflicts = std::move(conflicts);
  return out;
}

}  // namespace treebench::merge
