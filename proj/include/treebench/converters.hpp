#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treebench/model.hpp"

namespace treebench::convert {

// Seven tab-separated columns per token:
//   index  form  lemma  pos  morph  head  label
// "_" marks an unset value, head 0 is ROOT, a blank line ends a sentence and
// lines starting with '#' are comments.
struct TabularRow {
  TokenId index = 0;
  std::string form;
  std::string lemma;
  std::string pos;
  std::string morph;
  std::optional<TokenId> head;
  std::string label;

  bool operator==(const TabularRow&) const = default;
};

struct TabularParse {
  std::string parser_id;
  std::vector<TabularRow> rows;
  long first_line = 0;  // 1-based line of the first row, for diagnostics

  bool operator==(const TabularParse& o) const {
    return parser_id == o.parser_id && rows == o.rows;
  }
};

class TabularError : public Error {
 public:
  // line is 0 when the error concerns a whole sentence (see ordinal).
  TabularError(std::string kind, long line, long ordinal, const std::string& message)
      : Error(std::move(kind), message), line_(line), ordinal_(ordinal) {}

  long line() const noexcept { return line_; }
  long ordinal() const noexcept { return ordinal_; }

 private:
  long line_;
  long ordinal_;
};

// Throws TabularError (BadColumnCount, NonContiguousIndices, BadHeadIndex).
std::vector<TabularParse> parse_tabular(std::string_view text, const std::string& parser_id);

std::string render_tabular(const std::vector<TabularParse>& parses);

DepGraph tabular_to_graph(const TabularParse& tp, const std::string& sentence_id);
TabularParse graph_to_tabular(const DepGraph& g, const std::string& parser_id);

// Sentence ids assigned to converted input: "s1", "s2", ... by ordinal.
std::string sentence_id_for(std::size_t ordinal);

}  // namespace treebench::convert
