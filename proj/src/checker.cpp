#include "treebench/checker.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "treebench/codec.hpp"

namespace treebench::check {

std::string to_string(Rule r) { return "R" + std::to_string(static_cast<int>(r)); }

Rule parse_rule(const std::string& s) {
  if (s.size() == 2 && std::toupper(static_cast<unsigned char>(s[0])) == 'R' && s[1] >= '1' &&
      s[1] <= '8') {
    return static_cast<Rule>(s[1] - '0');
  }
  throw Error("BadRule", "unknown check rule '" + s + "' (expected R1..R8)");
}

std::string to_string(Severity s) { return s == Severity::kError ? "error" : "warning"; }

bool Locus::operator<(const Locus& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (token != o.token) return token < o.token;
  return head < o.head;
}

std::string to_string(const Locus& l) {
  switch (l.kind) {
    case Locus::Kind::kSentence:
      return "sentence";
    case Locus::Kind::kToken:
      return "token:" + std::to_string(l.token);
    case Locus::Kind::kEdge:
      return "edge:" + (l.head == kRoot ? std::string("ROOT") : std::to_string(l.head)) + "->" +
             std::to_string(l.token);
  }
  return "?";
}

bool CheckReport::passed() const {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.severity == Severity::kError; });
}

std::set<Rule> CheckReport::failed_rules() const {
  std::set<Rule> out;
  for (const auto& f : findings) {
    if (f.severity == Severity::kError) out.insert(f.rule);
  }
  return out;
}

namespace {

std::string join(const std::vector<TokenId>& ids) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
  return os.str();
}

class RuleRunner {
 public:
  RuleRunner(const DepGraph& g, const CheckConfig& cfg)
      : g_(g), ts_(cfg.tagset), completeness_(is_complete(g)) {}

  void run(Rule r, std::vector<Finding>& out) {
    out_ = &out;
    switch (r) {
      case Rule::R1:
        root();
        break;
      case Rule::R2:
        main_verb();
        break;
      case Rule::R3:
        fragmentation();
        break;
      case Rule::R4:
        form_and_lemma();
        break;
      case Rule::R5:
        declared_tags();
        break;
      case Rule::R6:
        compatibility();
        break;
      case Rule::R7:
        structure();
        break;
      case Rule::R8:
        encoding();
        break;
    }
  }

 private:
  void error(Rule r, Locus l, std::string msg) {
    out_->push_back(Finding{r, Severity::kError, l, std::move(msg)});
  }

  void root() {
    const int n = completeness_.root_count;
    if (n == 0) {
      error(Rule::R1, Locus::sentence(), "sentence has no root");
    } else if (n > 1) {
      error(Rule::R1, Locus::sentence(),
            "sentence has " + std::to_string(n) + " roots (tokens " + join(roots(g_)) + ")");
    }
  }

  void main_verb() {
    for (const auto& t : g_.tokens()) {
      if (ts_.verb_pos.count(t.pos)) return;
    }
    error(Rule::R2, Locus::sentence(), "sentence has no main verb");
  }

  void fragmentation() {
    if (completeness_.unreachable.empty()) return;
    error(Rule::R3, Locus::sentence(),
          "sentence is fragmented; tokens not reachable from the root: " +
              join(completeness_.unreachable));
  }

  void form_and_lemma() {
    for (const auto& t : g_.tokens()) {
      if (t.form.empty()) error(Rule::R4, Locus::at_token(t.id), "word form missing");
      if (t.lemma.empty()) error(Rule::R4, Locus::at_token(t.id), "lemma missing");
    }
  }

  void declared_tags() {
    for (const auto& t : g_.tokens()) {
      tag(Locus::at_token(t.id), "POS", t.pos, ts_.pos_tags);
      tag(Locus::at_token(t.id), "morphological tag", t.morph, ts_.morph_tags);
    }
    for (const auto& e : g_.edges()) {
      tag(Locus::at_edge(e.head, e.dependent), "dependency label", e.label, ts_.dep_labels);
    }
  }

  void tag(Locus l, const char* what, const std::string& v, const std::set<std::string>& decl) {
    if (v.empty()) {
      error(Rule::R5, l, std::string(what) + " unset");
    } else if (!decl.count(v)) {
      error(Rule::R5, l, std::string(what) + " '" + v + "' is not in the tagset");
    }
  }

  void compatibility() {
    for (const auto& t : g_.tokens()) {
      // Unset or undeclared values are R5's business.
      if (!ts_.pos_tags.count(t.pos) || !ts_.morph_tags.count(t.morph)) continue;
      auto it = ts_.compat.find(t.pos);
      if (it == ts_.compat.end() || it->second.count(t.morph)) continue;
      error(Rule::R6, Locus::at_token(t.id),
            "morphological tag '" + t.morph + "' does not combine with POS '" + t.pos + "'");
    }
  }

  void structure() {
    std::vector<int> heads(g_.size() + 1, 0);
    for (const auto& e : g_.edges()) {
      if (++heads[e.dependent] == 2) {
        error(Rule::R7, Locus::at_token(e.dependent), "token has more than one head");
      }
    }
    std::set<TokenId> seen;
    for (TokenId t : completeness_.cyclic) {
      if (seen.count(t)) continue;
      std::vector<TokenId> cycle;
      TokenId cur = t;
      do {
        cycle.push_back(cur);
        seen.insert(cur);
        cur = g_.head_edge(cur)->head;
      } while (cur != t);
      std::sort(cycle.begin(), cycle.end());
      error(Rule::R7, Locus::at_token(cycle.front()), "cycle through tokens " + join(cycle));
    }
  }

  void encoding() {
    codec::TigerDocument doc{"check", codec::declared_features(ts_), {g_}};
    std::vector<codec::EncodingViolation> violations;
    try {
      violations = codec::validate_encoding(doc);
    } catch (const std::exception& e) {
      throw Error("CheckerInternal", std::string("encoding check failed: ") + e.what());
    }
    for (const auto& v : violations) {
      std::string msg = "<" + v.element + ">";
      if (!v.attribute.empty()) msg += " @" + v.attribute + "='" + v.value + "'";
      error(Rule::R8, Locus::sentence(), msg + ": " + v.message);
    }
  }

  const DepGraph& g_;
  const Tagset& ts_;
  CompletenessReport completeness_;
  std::vector<Finding>* out_ = nullptr;
};

}  // namespace

CheckReport run_checks(const DepGraph& g, const CheckConfig& cfg) {
  CheckReport report;
  report.sentence_id = g.sentence_id();
  RuleRunner runner(g, cfg);
  for (Rule r : kAllRules) {
    if (!cfg.enables(r)) continue;
    // Encoding is only validated once the structural phase is clean.
    if (r == Rule::R8 && !report.passed()) continue;
    report.executed.push_back(r);
    runner.run(r, report.findings);
  }
  std::stable_sort(report.findings.begin(), report.findings.end(),
                   [](const Finding& a, const Finding& b) {
                     if (a.rule != b.rule) return a.rule < b.rule;
                     return a.locus < b.locus;
                   });
  return report;
}

bool CorpusCheck::passed() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const CheckReport& r) { return r.passed(); });
}

CorpusCheck check_corpus(const std::vector<DepGraph>& graphs, const CheckConfig& cfg) {
  CorpusCheck out;
  for (Rule r : kAllRules) out.summary[r] = 0;
  out.reports.reserve(graphs.size());
  for (const auto& g : graphs) {
    out.reports.push_back(run_checks(g, cfg));
    for (const auto& f : out.reports.back().findings) {
      if (f.severity == Severity::kError) ++out.summary[f.rule];
    }
  }
  return out;
}

std::string format_report(const CheckReport& r) {
  std::ostringstream os;
  for (const auto& f : r.findings) {
    os << r.sentence_id << '\t' << to_string(f.rule) << '\t' << to_string(f.severity) << '\t'
       << to_string(f.locus) << '\t' << f.message << '\n';
  }
  return os.str();
}

std::string format_summary(const std::map<Rule, int>& summary) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [rule, count] : summary) {
    os << (first ? "" : " ") << to_string(rule) << '=' << count;
    first = false;
  }
  return os.str();
}

}  // namespace treebench::check
