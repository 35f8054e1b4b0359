#include <doctest.h>

#include "treebench/converters.hpp"
#include "support/fixtures.hpp"

using namespace treebench;
using namespace treebench::testing;
namespace convert = treebench::convert;

namespace {

std::string error_kind(const std::string& text, long* line = nullptr) {
  try {
    convert::parse_tabular(text, "p");
  } catch (const convert::TabularError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  return "none";
}

}  // namespace

TEST_CASE("parse_tabular: one-token sentence") {
  auto ps = convert::parse_tabular("1\tkissa\tkissa\tN\tsg-nom\t0\tmain\n", "fdg");
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].parser_id == "fdg");
  REQUIRE(ps[0].rows.size() == 1);
  CHECK(ps[0].rows[0] == convert::TabularRow{1, "kissa", "kissa", "N", "sg-nom", kRoot, "main"});
  auto g = convert::tabular_to_graph(ps[0], "s1");
  CHECK(is_complete(g).complete);
  CHECK(g.token(1).form == "kissa");
}

TEST_CASE("parse_tabular: sentence blocks, comments, CRLF and unset markers") {
  const std::string text =
      "# sent 1\r\n"
      "1\tKissa\tkissa\tN\tsg-nom\t2\tsubj\r\n"
      "2\tnukkuu\tnukkua\tV\tpres-tense\t0\tmain\r\n"
      "3\tsohvalla\tsohva\tN\tsg-gen\t2\tadv\r\n"
      "\r\n"
      "\n"
      "1\tSataa\t_\t_\t_\t_\t_\n";
  auto ps = convert::parse_tabular(text, "cg");
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].first_line == 2);
  CHECK(ps[1].first_line == 7);
  CHECK(ps[1].rows[0] == convert::TabularRow{1, "Sataa", "", "", "", std::nullopt, ""});

  auto g = convert::tabular_to_graph(ps[0], "s1");
  CHECK(g.edges() == std::vector<DepEdge>{{2, 1, "subj"}, {kRoot, 2, "main"}, {2, 3, "adv"}});

  auto partial = convert::tabular_to_graph(ps[1], "s2");
  CHECK(is_complete(partial).missing_heads == std::vector<TokenId>{1});
}

TEST_CASE("parse_tabular errors") {
  long line = 0;
  CHECK(error_kind("1\ta\ta\tN\t_\t0\tmain\n2\tb\tb\tN\t_\t9\tx\n3\tc\tc\tN\t_\t1\tx\n", &line) ==
        "BadHeadIndex");
  CHECK(line == 2);
  CHECK(error_kind("1\ta\ta\tN\t_\t0\n", &line) == "BadColumnCount");
  CHECK(line == 1);
  CHECK(error_kind("1\ta\ta\tN\t_\t0\tx\n\n1\ta\ta\tN\t_\t0\tx\n3\tb\tb\tN\t_\t1\tx\n", &line) ==
        "NonContiguousIndices");
  CHECK(line == 4);
  CHECK(error_kind("1\ta\ta\tN\t_\tx\tmain\n") == "BadHeadIndex");
  CHECK(error_kind("one\ta\ta\tN\t_\t0\tmain\n") == "NonContiguousIndices");
  CHECK(error_kind("") == "none");
  CHECK(convert::parse_tabular("# only a comment\n\n", "p").empty());
}

TEST_CASE("render_tabular is inverted by parse_tabular on random parses") {
  Rng rng(99);
  std::uniform_int_distribution<int> blocks(1, 5), rows(1, 12), coin(0, 3);
  const std::vector<std::string> values = {"kissa", "Ä", "x y", "#hash", "a_b", "", "sg-nom"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<convert::TabularParse> parses;
    for (int b = blocks(rng); b > 0; --b) {
      convert::TabularParse tp;
      tp.parser_id = "p";
      const int n = rows(rng);
      std::uniform_int_distribution<TokenId> head(0, static_cast<TokenId>(n));
      for (int i = 1; i <= n; ++i) {
        convert::TabularRow r;
        r.index = static_cast<TokenId>(i);
        r.form = "w" + std::to_string(i) + pick(rng, values);
        r.lemma = pick(rng, values);
        r.pos = pick(rng, values);
        r.morph = pick(rng, values);
        if (coin(rng) != 0) r.head = head(rng);
        r.label = pick(rng, values);
        tp.rows.push_back(r);
      }
      parses.push_back(tp);
    }
    REQUIRE(convert::parse_tabular(convert::render_tabular(parses), "p") == parses);
  }
}

TEST_CASE("tabular_to_graph preserves token count, order and values") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 30);
    auto g = random_tree(rng, "s", size(rng), label_alphabet());
    auto tp = convert::graph_to_tabular(g, "p");
    REQUIRE(tp.rows.size() == g.size());
    for (std::size_t i = 0; i < tp.rows.size(); ++i) {
      const auto& r = tp.rows[i];
      const auto& t = g.tokens()[i];
      REQUIRE(r.index == t.id);
      REQUIRE(r.form == t.form);
      REQUIRE(r.lemma == t.lemma);
      REQUIRE(r.pos == t.pos);
      REQUIRE(r.morph == t.morph);
      REQUIRE(r.head == g.head_edge(t.id)->head);
      REQUIRE(r.label == g.head_edge(t.id)->label);
    }
    REQUIRE(convert::tabular_to_graph(tp, "s") == g);
  }
}

TEST_CASE("sentence ids follow input order") {
  CHECK(convert::sentence_id_for(1) == "s1");
  CHECK(convert::sentence_id_for(20) == "s20");
}
