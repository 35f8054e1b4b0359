#include "treebench/converters.hpp"

#include <charconv>
#include <sstream>

namespace treebench::convert {

namespace {

constexpr std::string_view kUnset = "_";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<TokenId> parse_number(std::string_view s) {
  TokenId v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string value(std::string_view field) {
  return field == kUnset ? std::string() : std::string(field);
}

std::string cell(const std::string& v) { return v.empty() ? std::string(kUnset) : v; }

struct PendingRow {
  TabularRow row;
  long line = 0;
  std::string head_text;
};

}  // namespace

std::vector<TabularParse> parse_tabular(std::string_view text, const std::string& parser_id) {
  std::vector<TabularParse> out;
  std::vector<PendingRow> block;
  long block_line = 0;

  auto flush = [&] {
    if (block.empty()) return;
    const long ordinal = static_cast<long>(out.size()) + 1;
    const auto n = static_cast<TokenId>(block.size());
    TabularParse tp;
    tp.parser_id = parser_id;
    tp.first_line = block_line;
    for (TokenId i = 0; i < n; ++i) {
      auto& p = block[i];
      if (p.row.index != i + 1) {
        std::ostringstream os;
        os << "sentence " << ordinal << ": line " << p.line << " has index " << p.row.index
           << ", expected " << i + 1;
        throw TabularError("NonContiguousIndices", p.line, ordinal, os.str());
      }
      if (p.head_text != kUnset) {
        auto h = parse_number(p.head_text);
        if (!h || *h > n) {
          std::ostringstream os;
          os << "line " << p.line << ": head '" << p.head_text << "' is outside 0.." << n;
          throw TabularError("BadHeadIndex", p.line, ordinal, os.str());
        }
        p.row.head = *h;
      }
      tp.rows.push_back(std::move(p.row));
    }
    out.push_back(std::move(tp));
    block.clear();
  };

  long line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      flush();
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '#') continue;

    auto cols = split_tabs(line);
    if (cols.size() != 7) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 7 tab-separated columns, found " << cols.size();
      throw TabularError("BadColumnCount", line_no, static_cast<long>(out.size()) + 1, os.str());
    }
    auto index = parse_number(cols[0]);
    if (!index) {
      std::ostringstream os;
      os << "line " << line_no << ": token index '" << cols[0] << "' is not a number";
      throw TabularError("NonContiguousIndices", line_no, static_cast<long>(out.size()) + 1,
                         os.str());
    }
    if (block.empty()) block_line = line_no;
    PendingRow p;
    p.line = line_no;
    p.row.index = *index;
    p.row.form = value(cols[1]);
    p.row.lemma = value(cols[2]);
    p.row.pos = value(cols[3]);
    p.row.morph = value(cols[4]);
    p.head_text = std::string(cols[5]);
    p.row.label = value(cols[6]);
    block.push_back(std::move(p));
    if (nl == text.size()) break;
  }
  flush();
  return out;
}

std::string render_tabular(const std::vector<TabularParse>& parses) {
  std::ostringstream os;
  bool first = true;
  for (const auto& tp : parses) {
    if (!first) os << '\n';
    first = false;
    for (const auto& r : tp.rows) {
      os << r.index << '\t' << cell(r.form) << '\t' << cell(r.lemma) << '\t' << cell(r.pos)
         << '\t' << cell(r.morph) << '\t'
         << (r.head ? std::to_string(*r.head) : std::string(kUnset)) << '\t' << cell(r.label)
         << '\n';
    }
  }
  return os.str();
}

DepGraph tabular_to_graph(const TabularParse& tp, const std::string& sentence_id) {
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;
  tokens.reserve(tp.rows.size());
  for (const auto& r : tp.rows) {
    tokens.push_back(Token{r.index, r.form, r.lemma, r.pos, r.morph});
    if (r.head) edges.push_back(DepEdge{*r.head, r.index, r.label});
  }
  return DepGraph::build(sentence_id, std::move(tokens), std::move(edges));
}

TabularParse graph_to_tabular(const DepGraph& g, const std::string& parser_id) {
  TabularParse tp;
  tp.parser_id = parser_id;
  for (const auto& t : g.tokens()) {
    TabularRow r{t.id, t.form, t.lemma, t.pos, t.morph, std::nullopt, ""};
    if (auto e = g.head_edge(t.id)) {
      r.head = e->head;
      r.label = e->label;
    }
    tp.rows.push_back(std::move(r));
  }
  return tp;
}

std::string sentence_id_for(std::size_t ordinal) { return "s" + std::to_string(ordinal); }

}  // namespace treebench::convert
