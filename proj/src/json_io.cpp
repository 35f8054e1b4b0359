#include "treebench/json_io.hpp"

namespace treebench {

void to_json(Json& j, const Token& t) {
  j = Json{{"id", t.id}, {"form", t.form}, {"lemma", t.lemma}, {"pos", t.pos}, {"morph", t.morph}};
}

void from_json(const Json& j, Token& t) {
  t.id = j.at("id").get<TokenId>();
  t.form = j.value("form", "");
  t.lemma = j.value("lemma", "");
  t.pos = j.value("pos", "");
  t.morph = j.value("morph", "");
}

void to_json(Json& j, const DepEdge& e) {
  j = Json{{"head", e.head}, {"dependent", e.dependent}, {"label", e.label}};
}

void from_json(const Json& j, DepEdge& e) {
  e.head = j.at("head").get<TokenId>();
  e.dependent = j.at("dependent").get<TokenId>();
  e.label = j.value("label", "");
}

void to_json(Json& j, const DepGraph& g) {
  j = Json{{"sentence_id", g.sentence_id()}, {"tokens", g.tokens()}, {"edges", g.edges()}};
}

void from_json(const Json& j, DepGraph& g) {
  g = DepGraph::build(j.at("sentence_id").get<std::string>(),
                      j.at("tokens").get<std::vector<Token>>(),
                      j.value("edges", std::vector<DepEdge>{}));
}

void to_json(Json& j, const Tagset& ts) {
  j = Json{{"pos_tags", ts.pos_tags},   {"morph_tags", ts.morph_tags},
           {"dep_labels", ts.dep_labels}, {"verb_pos", ts.verb_pos},
           {"compat", ts.compat}};
}

void from_json(const Json& j, Tagset& ts) {
  using Set = std::set<std::string>;
  ts.pos_tags = j.value("pos_tags", Set{});
  ts.morph_tags = j.value("morph_tags", Set{});
  ts.dep_labels = j.value("dep_labels", Set{});
  ts.verb_pos = j.value("verb_pos", Set{});
  ts.compat = j.value("compat", std::map<std::string, Set>{});
}

void to_json(Json& j, const EditOp& op) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SetTokenField>) {
          j = Json{{"op", "set_token_field"},
                   {"token", o.token},
                   {"field", to_string(o.field)},
                   {"value", o.value}};
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          j = Json{{"op", "add_edge"}, {"head", o.head}, {"dependent", o.dependent}, {"label", o.label}};
        } else if constexpr (std::is_same_v<T, RemoveEdge>) {
          j = Json{{"op", "remove_edge"}, {"head", o.head}, {"dependent", o.dependent}};
        } else if constexpr (std::is_same_v<T, RerouteEdge>) {
          j = Json{{"op", "reroute_edge"},
                   {"head", o.head},
                   {"dependent", o.dependent},
                   {"new_head", o.new_head}};
        } else {
          j = Json{{"op", "relabel_edge"}, {"head", o.head}, {"dependent", o.dependent}, {"label", o.label}};
        }
      },
      op);
}

void from_json(const Json& j, EditOp& op) {
  const auto name = j.at("op").get<std::string>();
  if (name == "set_token_field") {
    op = SetTokenField{j.at("token").get<TokenId>(),
                       parse_token_field(j.at("field").get<std::string>()),
                       j.value("value", "")};
  } else if (name == "add_edge") {
    op = AddEdge{j.at("head").get<TokenId>(), j.at("dependent").get<TokenId>(), j.value("label", "")};
  } else if (name == "remove_edge") {
    op = RemoveEdge{j.at("head").get<TokenId>(), j.at("dependent").get<TokenId>()};
  } else if (name == "reroute_edge") {
    op = RerouteEdge{j.at("head").get<TokenId>(), j.at("dependent").get<TokenId>(),
                     j.at("new_head").get<TokenId>()};
  } else if (name == "relabel_edge") {
    op = RelabelEdge{j.at("head").get<TokenId>(), j.at("dependent").get<TokenId>(), j.value("label", "")};
  } else {
    throw Error("BadEditOp", "unknown edit operation '" + name + "'");
  }
}

namespace check {

void to_json(Json& j, const Rule& r) { j = to_string(r); }
void from_json(const Json& j, Rule& r) { r = parse_rule(j.get<std::string>()); }

void to_json(Json& j, const Locus& l) {
  switch (l.kind) {
    case Locus::Kind::kSentence:
      j = Json{{"kind", "sentence"}};
      break;
    case Locus::Kind::kToken:
      j = Json{{"kind", "token"}, {"token", l.token}};
      break;
    case Locus::Kind::kEdge:
      j = Json{{"kind", "edge"}, {"head", l.head}, {"dependent", l.token}};
      break;
  }
}

void to_json(Json& j, const Finding& f) {
  j = Json{{"rule", f.rule},
           {"severity", to_string(f.severity)},
           {"locus", f.locus},
           {"locus_text", to_string(f.locus)},
           {"message", f.message}};
}

void to_json(Json& j, const CheckReport& r) {
  j = Json{{"sentence_id", r.sentence_id},
           {"passed", r.passed()},
           {"findings", r.findings},
           {"executed", r.executed}};
}

}  // namespace check

namespace merge {

void to_json(Json& j, const ParseSet& ps) {
  j = Json{{"sentence_id", ps.sentence_id}, {"parses", ps.parses}};
}

void from_json(const Json& j, ParseSet& ps) {
  ps.sentence_id = j.at("sentence_id").get<std::string>();
  ps.parses = j.at("parses").get<std::map<std::string, DepGraph>>();
}

void to_json(Json& j, const AgreementReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json parsers = Json::object();
    for (const auto& [id, v] : row.by_parser) {
      parsers[id] = Json{{"head", v.head ? Json(*v.head) : Json(nullptr)},
                         {"label", v.label},
                         {"pos", v.pos}};
    }
    rows.push_back(Json{{"token", row.token},
                        {"form", row.form},
                        {"pos_agree", row.pos_agree},
                        {"head_agree", row.head_agree},
                        {"label_agree", row.label_agree},
                        {"parsers", std::move(parsers)}});
  }
  j = Json{{"pos", r.pos}, {"unlabeled", r.unlabeled}, {"labeled", r.labeled}, {"rows", std::move(rows)}};
}

void to_json(Json& j, const Conflict& c) {
  Json alts = Json::object();
  for (const auto& [id, a] : c.alternatives) {
    Json alt{{"value", a.value}};
    if (c.aspect == Aspect::kHead) {
      alt["head"] = a.head ? Json(*a.head) : Json(nullptr);
      alt["label"] = a.label;
    }
    alts[id] = std::move(alt);
  }
  j = Json{{"token", c.token}, {"aspect", to_string(c.aspect)}, {"alternatives", std::move(alts)}};
}

void to_json(Json& j, const MergeResult& m) {
  j = Json{{"merged", m.merged}, {"conflicts", m.conflicts}};
}

}  // namespace merge

namespace store {

void to_json(Json& j, const AnnotationRecord& r) {
  j = Json{{"sentence_id", r.sentence_id},
           {"current", r.current},
           {"comment", r.comment},
           {"ready", r.ready},
           {"base_parser", r.base_parser ? Json(*r.base_parser) : Json(nullptr)},
           {"revision", r.revision}};
}

void from_json(const Json& j, AnnotationRecord& r) {
  r.sentence_id = j.at("sentence_id").get<std::string>();
  r.current = j.at("current").get<DepGraph>();
  r.comment = j.value("comment", "");
  r.ready = j.value("ready", false);
  const auto& base = j.at("base_parser");
  r.base_parser = base.is_null() ? std::nullopt : std::optional<std::string>(base.get<std::string>());
  r.revision = j.at("revision").get<std::uint64_t>();
}

void to_json(Json& j, const ProjectSettings& s) {
  j = Json{{"enabled_rules", s.enabled_rules}, {"export_requires_checks", s.export_requires_checks}};
}

void from_json(const Json& j, ProjectSettings& s) {
  s.enabled_rules = j.value("enabled_rules", std::set<check::Rule>{});
  s.export_requires_checks = j.value("export_requires_checks", true);
}

}  // namespace store

}  // namespace treebench
