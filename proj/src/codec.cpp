#include "treebench/codec.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace treebench::codec {

namespace {

const char* const kWord = "word";
const char* const kLemma = "lemma";

[[noreturn]] void malformed(const std::string& sid, const std::string& what) {
  throw CodecError("MalformedSentence", sid,
                   "malformed sentence '" + sid + "': " + what);
}

const std::string& require_attr(const xml::Element& e, const char* name, const std::string& sid) {
  const std::string* v = e.attr(name);
  if (v == nullptr) {
    std::string where = "<" + e.name + ">";
    if (e.line > 0) where += " (line " + std::to_string(e.line) + ")";
    malformed(sid, where + " lacks attribute '" + name + "'");
  }
  return *v;
}

}  // namespace

std::map<std::string, std::set<std::string>> declared_features(const Tagset& ts) {
  return {{kPosFeature, ts.pos_tags},
          {kMorphFeature, ts.morph_tags},
          {kLabelFeature, ts.dep_labels}};
}

std::string terminal_id(const std::string& sentence_id, TokenId t) {
  return sentence_id + "_" + std::to_string(t);
}

std::string nonterminal_id(const std::string& sentence_id, TokenId head) {
  return sentence_id + "_nt" + std::to_string(head);
}

xml::Element to_tiger(const DepGraph& g) {
  const auto& sid = g.sentence_id();
  auto report = is_complete(g);
  if (!report.complete) {
    throw CodecError("IncompleteGraph", sid,
                     "sentence '" + sid + "' is not a complete dependency tree");
  }
  for (const auto& e : g.edges()) {
    if (e.label == kHeadEdgeLabel) {
      throw CodecError("ReservedLabel", sid,
                       "sentence '" + sid + "': token " + std::to_string(e.dependent) +
                           " uses the reserved label " + kHeadEdgeLabel);
    }
  }

  const auto kids = children(g);
  auto node_ref = [&](TokenId t) {
    return kids[t].empty() ? terminal_id(sid, t) : nonterminal_id(sid, t);
  };

  xml::Element s("s");
  s.set("id", sid);
  auto& graph = s.add(xml::Element("graph"));
  const TokenId root = roots(g).front();
  graph.set("root", node_ref(root));
  graph.set("rootlabel", g.head_edge(root)->label);

  auto& terminals = graph.add(xml::Element("terminals"));
  for (const auto& tok : g.tokens()) {
    xml::Element t("t");
    t.set("id", terminal_id(sid, tok.id));
    t.set(kWord, tok.form);
    t.set(kLemma, tok.lemma);
    t.set("pos", tok.pos);
    t.set("morph", tok.morph);
    terminals.add(std::move(t));
  }

  auto& nonterminals = graph.add(xml::Element("nonterminals"));
  for (TokenId h = 1; h < kids.size(); ++h) {
    if (kids[h].empty()) continue;
    xml::Element nt("nt");
    nt.set("id", nonterminal_id(sid, h));
    xml::Element hd("edge");
    hd.set("label", kHeadEdgeLabel);
    hd.set("idref", terminal_id(sid, h));
    nt.add(std::move(hd));
    for (TokenId d : kids[h]) {
      xml::Element edge("edge");
      edge.set("label", g.head_edge(d)->label);
      edge.set("idref", node_ref(d));
      nt.add(std::move(edge));
    }
    nonterminals.add(std::move(nt));
  }
  return s;
}

DepGraph from_tiger(const xml::Element& sentence) {
  const std::string sid = sentence.attr("id") ? *sentence.attr("id") : std::string();
  if (sentence.name != "s") malformed(sid, "expected <s>, found <" + sentence.name + ">");
  if (sid.empty()) malformed(sid, "<s> lacks attribute 'id'");
  const xml::Element* graph = sentence.child("graph");
  if (graph == nullptr) malformed(sid, "missing <graph>");
  const xml::Element* terminals = graph->child("terminals");
  if (terminals == nullptr) malformed(sid, "missing <terminals>");

  std::vector<Token> tokens;
  std::unordered_map<std::string, TokenId> node_token;  // t or nt id -> token
  for (const auto* t : terminals->children_named("t")) {
    const std::string& id = require_attr(*t, "id", sid);
    Token tok;
    tok.id = static_cast<TokenId>(tokens.size() + 1);
    tok.form = require_attr(*t, kWord, sid);
    if (const auto* v = t->attr(kLemma)) tok.lemma = *v;
    if (const auto* v = t->attr("pos")) tok.pos = *v;
    if (const auto* v = t->attr("morph")) tok.morph = *v;
    if (!node_token.emplace(id, tok.id).second) malformed(sid, "duplicate terminal id '" + id + "'");
    tokens.push_back(std::move(tok));
  }
  if (tokens.empty()) malformed(sid, "terminal count is 0");
  std::unordered_set<std::string> terminal_ids;
  for (const auto& [id, tok] : node_token) terminal_ids.insert(id);

  // First pass: every nonterminal's HD edge names the token it stands for.
  std::vector<const xml::Element*> nts;
  if (const auto* section = graph->child("nonterminals")) nts = section->children_named("nt");
  std::vector<TokenId> nt_head(nts.size(), kRoot);
  std::unordered_set<TokenId> grouped;
  for (std::size_t i = 0; i < nts.size(); ++i) {
    const std::string& id = require_attr(*nts[i], "id", sid);
    const xml::Element* hd = nullptr;
    for (const auto* e : nts[i]->children_named("edge")) {
      if (require_attr(*e, "label", sid) != kHeadEdgeLabel) continue;
      if (hd != nullptr) malformed(sid, "nonterminal '" + id + "' has more than one HD edge");
      hd = e;
    }
    if (hd == nullptr) malformed(sid, "nonterminal '" + id + "' lacks an HD edge");
    const std::string& ref = require_attr(*hd, "idref", sid);
    if (!terminal_ids.count(ref)) {
      malformed(sid, "HD edge of '" + id + "' points to '" + ref + "', which is not a terminal");
    }
    nt_head[i] = node_token.at(ref);
    if (!grouped.insert(nt_head[i]).second) {
      malformed(sid, "token " + std::to_string(nt_head[i]) + " heads two nonterminals");
    }
    if (!node_token.emplace(id, nt_head[i]).second) malformed(sid, "duplicate node id '" + id + "'");
  }

  auto resolve = [&](const std::string& ref) {
    auto it = node_token.find(ref);
    if (it == node_token.end()) malformed(sid, "dangling reference to '" + ref + "'");
    return it->second;
  };

  std::vector<DepEdge> edges;
  for (std::size_t i = 0; i < nts.size(); ++i) {
    for (const auto* e : nts[i]->children_named("edge")) {
      const std::string& label = require_attr(*e, "label", sid);
      if (label == kHeadEdgeLabel) continue;
      edges.push_back(DepEdge{nt_head[i], resolve(require_attr(*e, "idref", sid)), label});
    }
  }
  const std::string& root_ref = require_attr(*graph, "root", sid);
  std::string root_label;
  if (const auto* v = graph->attr("rootlabel")) root_label = *v;
  edges.push_back(DepEdge{kRoot, resolve(root_ref), root_label});

  DepGraph g;
  try {
    g = DepGraph::build(sid, std::move(tokens), std::move(edges));
  } catch (const GraphError& err) {
    malformed(sid, err.what());
  }
  if (!is_complete(g).complete) malformed(sid, "encoded structure is not a single rooted tree");
  return g;
}

xml::Element corpus_element(const TigerDocument& doc) {
  xml::Element corpus("corpus");
  corpus.set("id", doc.corpus_id);

  auto& head = corpus.add(xml::Element("head"));
  auto& meta = head.add(xml::Element("meta"));
  xml::Element name("name");
  name.text = doc.corpus_id;
  meta.add(std::move(name));
  xml::Element format("format");
  format.text = std::string(kFormatName) + " " + std::to_string(kFormatVersion);
  meta.add(std::move(format));

  auto& annotation = head.add(xml::Element("annotation"));
  auto feature = [&](const std::string& fname, const std::set<std::string>* values) {
    xml::Element f("feature");
    f.set("name", fname);
    f.set("domain", "T");
    if (values != nullptr) {
      for (const auto& v : *values) f.add(xml::Element("value")).set("name", v);
    }
    annotation.add(std::move(f));
  };
  feature(kWord, nullptr);
  feature(kLemma, nullptr);
  for (const auto& [fname, values] : doc.declared_features) {
    if (fname != kLabelFeature) feature(fname, &values);
  }
  auto& edgelabel = annotation.add(xml::Element("edgelabel"));
  edgelabel.add(xml::Element("value")).set("name", kHeadEdgeLabel);
  if (auto it = doc.declared_features.find(kLabelFeature); it != doc.declared_features.end()) {
    for (const auto& v : it->second) edgelabel.add(xml::Element("value")).set("name", v);
  }

  auto& body = corpus.add(xml::Element("body"));
  for (const auto& g : doc.sentences) body.add(to_tiger(g));
  return corpus;
}

TigerDocument corpus_from_element(const xml::Element& corpus) {
  if (corpus.name != "corpus") {
    throw CodecError("MalformedCorpus", "", "root element is <" + corpus.name + ">, expected <corpus>");
  }
  TigerDocument doc;
  if (const auto* id = corpus.attr("id")) doc.corpus_id = *id;
  if (const auto* head = corpus.child("head")) {
    if (const auto* annotation = head->child("annotation")) {
      for (const auto* f : annotation->children_named("feature")) {
        const auto* fname = f->attr("name");
        if (fname == nullptr || *fname == kWord || *fname == kLemma) continue;
        auto& values = doc.declared_features[*fname];
        for (const auto* v : f->children_named("value")) {
          if (const auto* n = v->attr("name")) values.insert(*n);
        }
      }
      if (const auto* el = annotation->child("edgelabel")) {
        auto& values = doc.declared_features[kLabelFeature];
        for (const auto* v : el->children_named("value")) {
          const auto* n = v->attr("name");
          if (n != nullptr && *n != kHeadEdgeLabel) values.insert(*n);
        }
      }
    }
  }
  const auto* body = corpus.child("body");
  if (body == nullptr) throw CodecError("MalformedCorpus", "", "corpus has no <body>");
  for (const auto* s : body->children_named("s")) doc.sentences.push_back(from_tiger(*s));
  return doc;
}

void write_corpus(const TigerDocument& doc, std::ostream& out) {
  // corpus_element() throws before anything reaches the stream.
  xml::write(out, corpus_element(doc));
}

std::string write_corpus(const TigerDocument& doc) {
  std::ostringstream os;
  write_corpus(doc, os);
  return os.str();
}

void write_corpus(const TigerDocument& doc, const std::filesystem::path& path) {
  std::string text = write_corpus(doc);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw Error("IoError", "write to '" + path.string() + "' failed");
}

TigerDocument read_corpus(std::istream& in) { return corpus_from_element(xml::parse(in)); }

TigerDocument read_corpus_string(const std::string& text) {
  return corpus_from_element(xml::parse(text));
}

TigerDocument read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open '" + path.string() + "'");
  return read_corpus(in);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class SchemaValidator {
 public:
  std::vector<EncodingViolation> run(const xml::Element& corpus) {
    if (corpus.name != "corpus") {
      flag("", corpus.name, "", "", "root element must be <corpus>");
      return std::move(out_);
    }
    check_text("", corpus);
    const auto* cid = corpus.attr("id");
    if (cid == nullptr) {
      flag("", "corpus", "id", "", "missing required attribute");
    } else if (!xml::is_ncname(*cid)) {
      flag("", "corpus", "id", *cid, "not a valid XML ID");
    }

    const xml::Element* head = nullptr;
    const xml::Element* body = nullptr;
    for (const auto& c : corpus.children) {
      if (c.name == "head" && head == nullptr) {
        head = &c;
      } else if (c.name == "body" && body == nullptr) {
        body = &c;
      } else {
        flag("", c.name, "", "", "unexpected element in <corpus>");
      }
    }
    if (head != nullptr) read_head(*head);
    if (body == nullptr) {
      flag("", "body", "", "", "missing <body>");
      return std::move(out_);
    }
    for (const auto& s : body->children) {
      if (s.name != "s") {
        flag("", s.name, "", "", "unexpected element in <body>");
        continue;
      }
      sentence(s);
    }
    return std::move(out_);
  }

 private:
  void flag(std::string sid, std::string element, std::string attribute, std::string value,
            std::string message) {
    out_.push_back(EncodingViolation{std::move(sid), std::move(element), std::move(attribute),
                                     std::move(value), std::move(message)});
  }

  void check_text(const std::string& sid, const xml::Element& e) {
    for (const auto& [k, v] : e.attributes) {
      if (!xml::is_xml_text(v)) flag(sid, e.name, k, v, "illegal XML character");
    }
    if (!xml::is_xml_text(e.text)) flag(sid, e.name, "", e.text, "illegal XML character");
  }

  void read_head(const xml::Element& head) {
    const auto* annotation = head.child("annotation");
    if (annotation == nullptr) return;
    for (const auto& f : annotation->children) {
      check_text("", f);
      if (f.name == "feature") {
        const auto* fname = f.attr("name");
        const auto* domain = f.attr("domain");
        if (fname == nullptr) {
          flag("", "feature", "name", "", "missing required attribute");
          continue;
        }
        if (domain == nullptr || (*domain != "T" && *domain != "NT" && *domain != "FREC")) {
          flag("", "feature", "domain", domain ? *domain : "", "domain must be T, NT or FREC");
        }
        if (domain != nullptr && *domain != "T" && *domain != "FREC") continue;
        terminal_features_.insert(*fname);
        if (*fname == kWord || *fname == kLemma) continue;
        auto& values = declared_[*fname];
        for (const auto& v : f.children) values_into(v, values);
      } else if (f.name == "edgelabel") {
        auto& values = declared_[kLabelFeature];
        for (const auto& v : f.children) values_into(v, values);
      } else if (f.name != "secedgelabel") {
        flag("", f.name, "", "", "unexpected element in <annotation>");
      }
    }
  }

  void values_into(const xml::Element& v, std::set<std::string>& values) {
    check_text("", v);
    const auto* n = v.attr("name");
    if (v.name != "value" || n == nullptr) {
      flag("", v.name, "name", "", "expected <value name=...>");
      return;
    }
    values.insert(*n);
  }

  bool register_id(const std::string& sid, const xml::Element& e, std::string& id) {
    const auto* v = e.attr("id");
    if (v == nullptr) {
      flag(sid, e.name, "id", "", "missing required attribute");
      return false;
    }
    id = *v;
    if (!xml::is_ncname(id)) {
      flag(sid, e.name, "id", id, "not a valid XML ID");
      return false;
    }
    if (!ids_.insert(id).second) {
      flag(sid, e.name, "id", id, "duplicate ID");
      return false;
    }
    return true;
  }

  void declared(const std::string& sid, const std::string& element, const std::string& attribute,
                const std::string& feature, const std::string& value) {
    if (value.empty()) return;
    auto it = declared_.find(feature);
    if (it == declared_.end() || !it->second.count(value)) {
      flag(sid, element, attribute, value, "value not declared for feature '" + feature + "'");
    }
  }

  void sentence(const xml::Element& s) {
    check_text("", s);
    std::string sid;
    if (!register_id(s.attr("id") ? *s.attr("id") : "", s, sid)) {
      // A duplicate sentence derives duplicate inner ids; one report is enough.
      return;
    }
    const std::size_t before = out_.size();
    std::set<std::string> local;

    auto graphs = s.children_named("graph");
    if (graphs.size() != 1) {
      flag(sid, "s", "", "", "expected exactly one <graph>");
      return;
    }
    const xml::Element& graph = *graphs.front();
    check_text(sid, graph);
    for (const auto& [k, v] : graph.attributes) {
      if (k != "root" && k != "rootlabel" && k != "discontinuous") {
        flag(sid, "graph", k, v, "undeclared attribute");
      }
    }
    const auto* terminals = graph.child("terminals");
    if (terminals == nullptr || terminals->children.empty()) {
      flag(sid, "terminals", "", "", "a sentence needs at least one terminal");
    }
    if (terminals != nullptr) {
      for (const auto& t : terminals->children) {
        check_text(sid, t);
        if (t.name != "t") {
          flag(sid, t.name, "", "", "unexpected element in <terminals>");
          continue;
        }
        std::string id;
        if (register_id(sid, t, id)) local.insert(id);
        if (t.attr(kWord) == nullptr) flag(sid, "t", kWord, "", "missing required attribute");
        for (const auto& [k, v] : t.attributes) {
          if (k == "id") continue;
          if (!terminal_features_.count(k)) {
            flag(sid, "t", k, v, "attribute is not a declared terminal feature");
          } else if (k != kWord && k != kLemma) {
            declared(sid, "t", k, k, v);
          }
        }
      }
    }
    std::vector<std::pair<const xml::Element*, std::string>> refs;
    if (const auto* nts = graph.child("nonterminals")) {
      for (const auto& nt : nts->children) {
        check_text(sid, nt);
        if (nt.name != "nt") {
          flag(sid, nt.name, "", "", "unexpected element in <nonterminals>");
          continue;
        }
        std::string id;
        if (register_id(sid, nt, id)) local.insert(id);
        for (const auto& e : nt.children) {
          check_text(sid, e);
          const auto* label = e.attr("label");
          const auto* idref = e.attr("idref");
          if (e.name != "edge" || label == nullptr || idref == nullptr) {
            flag(sid, e.name, "", "", "expected <edge label=... idref=...>");
            continue;
          }
          if (*label != kHeadEdgeLabel) declared(sid, "edge", "label", kLabelFeature, *label);
          refs.emplace_back(&e, *idref);
        }
      }
    }
    const auto* root = graph.attr("root");
    if (root == nullptr) {
      flag(sid, "graph", "root", "", "missing required attribute");
    } else {
      refs.emplace_back(&graph, *root);
    }
    if (const auto* rl = graph.attr("rootlabel")) declared(sid, "graph", "rootlabel", kLabelFeature, *rl);
    for (const auto& [e, ref] : refs) {
      if (!local.count(ref)) {
        flag(sid, e->name, e->name == "graph" ? "root" : "idref", ref,
             "reference does not resolve within the sentence");
      }
    }

    // The schema alone admits graphs that are not dependency trees.
    if (out_.size() == before) {
      try {
        from_tiger(s);
      } catch (const CodecError& err) {
        flag(sid, "s", "", "", err.what());
      }
    }
  }

  std::vector<EncodingViolation> out_;
  std::map<std::string, std::set<std::string>> declared_;
  std::set<std::string> terminal_features_;
  std::unordered_set<std::string> ids_;
};

}  // namespace

std::vector<EncodingViolation> validate_element(const xml::Element& corpus) {
  return SchemaValidator().run(corpus);
}

std::vector<EncodingViolation> validate_encoding(const TigerDocument& doc) {
  std::vector<EncodingViolation> structural;
  TigerDocument encodable = doc;
  encodable.sentences.clear();
  for (const auto& g : doc.sentences) {
    try {
      to_tiger(g);
      encodable.sentences.push_back(g);
    } catch (const CodecError& err) {
      structural.push_back(EncodingViolation{g.sentence_id(), "s", "", "", err.what()});
    }
  }

  auto dom = corpus_element(encodable);
  auto out = validate_element(dom);
  if (out.empty()) {
    // Documents with only legal characters must survive a parse of their
    // serialized text; anything else is a writer defect worth surfacing.
    try {
      if (!(xml::parse(xml::to_string(dom)) == dom)) {
        out.push_back(EncodingViolation{"", "corpus", "", "", "serialized form does not re-parse identically"});
      }
    } catch (const xml::XmlError& err) {
      out.push_back(EncodingViolation{"", "corpus", "", "", err.what()});
    }
  }
  structural.insert(structural.end(), out.begin(), out.end());
  return structural;
}

std::string to_string(const EncodingViolation& v) {
  std::ostringstream os;
  os << (v.sentence_id.empty() ? "-" : v.sentence_id) << '\t' << v.element << '\t'
     << (v.attribute.empty() ? "-" : v.attribute) << '\t' << v.value << '\t' << v.message;
  return os.str();
}

}  // namespace treebench::codec
