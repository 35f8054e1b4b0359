#include <doctest.h>

#include <fstream>
#include <sstream>

#include "treebench/codec.hpp"
#include "support/fixtures.hpp"

using namespace treebench;
using namespace treebench::testing;
namespace codec = treebench::codec;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(TREEBENCH_TEST_DATA) / "golden" / name;
}

// (label, idref) pairs of one nonterminal, in document order.
std::vector<std::pair<std::string, std::string>> edges_of(const xml::Element& nt) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto* e : nt.children_named("edge")) out.emplace_back(*e->attr("label"), *e->attr("idref"));
  return out;
}

codec::TigerDocument doc_of(std::vector<DepGraph> gs, const Tagset& ts = finnish_tagset()) {
  return codec::TigerDocument{"demo", codec::declared_features(ts), std::move(gs)};
}

}  // namespace

TEST_CASE("to_tiger: single token has no nonterminal and the graph root is the terminal") {
  auto g = build_graph("s1", {token(1, "kissa", "kissa", "N", "sg-nom")}, {{kRoot, 1, "main"}});
  auto s = codec::to_tiger(g);
  const auto* graph = s.child("graph");
  REQUIRE(graph != nullptr);
  CHECK(graph->child("terminals")->children.size() == 1);
  CHECK(graph->child("nonterminals")->children.empty());
  CHECK(*graph->attr("root") == "s1_1");
  CHECK(codec::from_tiger(s) == g);
}

TEST_CASE("to_tiger: three-token tree gives one nonterminal headed by token 2") {
  auto g = build_graph("s1", {token(1, "a"), token(2, "b"), token(3, "c")},
                       {{kRoot, 2, "main"}, {2, 1, "subj"}, {2, 3, "obj"}});
  auto s = codec::to_tiger(g);
  const auto* graph = s.child("graph");
  auto nts = graph->child("nonterminals")->children_named("nt");
  REQUIRE(nts.size() == 1);
  CHECK(*nts[0]->attr("id") == "s1_nt2");
  using P = std::pair<std::string, std::string>;
  CHECK(edges_of(*nts[0]) == std::vector<P>{{"HD", "s1_2"}, {"subj", "s1_1"}, {"obj", "s1_3"}});
  CHECK(*graph->attr("root") == "s1_nt2");
  CHECK(codec::from_tiger(s) == g);
}

TEST_CASE("to_tiger: chain links nonterminal to nonterminal") {
  auto g = build_graph("c", {token(1, "a"), token(2, "b"), token(3, "c")},
                       {{kRoot, 1, "x"}, {1, 2, "a"}, {2, 3, "b"}});
  auto s = codec::to_tiger(g);
  auto nts = s.child("graph")->child("nonterminals")->children_named("nt");
  REQUIRE(nts.size() == 2);
  using P = std::pair<std::string, std::string>;
  CHECK(edges_of(*nts[0]) == std::vector<P>{{"HD", "c_1"}, {"a", "c_nt2"}});
  CHECK(edges_of(*nts[1]) == std::vector<P>{{"HD", "c_2"}, {"b", "c_3"}});
  CHECK(codec::from_tiger(s) == g);
}

TEST_CASE("to_tiger refuses incomplete graphs and the reserved head label") {
  auto partial = build_graph("s", {token(1, "a"), token(2, "b")}, {{kRoot, 1, ""}});
  try {
    codec::to_tiger(partial);
    FAIL("expected IncompleteGraph");
  } catch (const codec::CodecError& e) {
    CHECK(e.kind() == "IncompleteGraph");
    CHECK(e.sentence_id() == "s");
  }
  auto reserved = build_graph("s", {token(1, "a"), token(2, "b")}, {{kRoot, 1, ""}, {1, 2, "HD"}});
  CHECK_THROWS_WITH_AS(codec::to_tiger(reserved), doctest::Contains("HD"), codec::CodecError);
}

TEST_CASE("from_tiger reports malformed sentences") {
  auto kind_of = [](const std::string& text) {
    try {
      codec::from_tiger(xml::parse(text));
    } catch (const codec::CodecError& e) {
      return e.kind() + ": " + e.what();
    }
    return std::string("ok");
  };
  const std::string no_hd =
      R"(<s id="s9"><graph root="s9_nt1"><terminals><t id="s9_1" word="a"/><t id="s9_2" word="b"/></terminals>)"
      R"(<nonterminals><nt id="s9_nt1"><edge label="x" idref="s9_2"/></nt></nonterminals></graph></s>)";
  auto r = kind_of(no_hd);
  CHECK(r.rfind("MalformedSentence", 0) == 0);
  CHECK(r.find("s9") != std::string::npos);
  CHECK(r.find("s9_nt1") != std::string::npos);

  const std::string dangling =
      R"(<s id="s9"><graph root="s9_nt1"><terminals><t id="s9_1" word="a"/><t id="s9_2" word="b"/></terminals>)"
      R"(<nonterminals><nt id="s9_nt1"><edge label="HD" idref="s9_1"/><edge label="x" idref="s9_7"/></nt></nonterminals></graph></s>)";
  CHECK(kind_of(dangling).find("s9_7") != std::string::npos);

  CHECK(kind_of(R"(<s id="e"><graph root="e_1"><terminals/></graph></s>)").find("terminal count is 0") !=
        std::string::npos);

  // Both tokens attached to each other: the edges are legal but form no tree.
  const std::string cycle =
      R"(<s id="k"><graph root="k_1"><terminals><t id="k_1" word="a"/><t id="k_2" word="b"/></terminals>)"
      R"(<nonterminals><nt id="k_nt2"><edge label="HD" idref="k_2"/><edge label="x" idref="k_1"/></nt></nonterminals></graph></s>)";
  CHECK(kind_of(cycle).rfind("MalformedSentence", 0) == 0);
}

TEST_CASE("round trip on random trees of 1 to 50 tokens") {
  Rng rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  for (int i = 0; i < 300; ++i) {
    auto g = random_tree(rng, "r" + std::to_string(i), size(rng), label_alphabet());
    REQUIRE(codec::from_tiger(codec::to_tiger(g)) == g);
  }
}

TEST_CASE("round trip on every complete tree up to 5 tokens with two labels") {
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& heads : all_complete_trees(n)) {
      // Every label assignment over {a, b}.
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back((mask >> i) & 1 ? "b" : "a");
        auto g = graph_from_heads("x", heads, labels);
        REQUIRE(codec::from_tiger(codec::to_tiger(g)) == g);
        ++checked;
      }
    }
  }
  CHECK(checked == 1 * 2 + 2 * 4 + 9 * 8 + 64 * 16 + 625 * 32);
}

TEST_CASE("write_corpus / read_corpus") {
  SUBCASE("empty corpus") {
    auto d = doc_of({});
    auto text = codec::write_corpus(d);
    CHECK(codec::read_corpus_string(text) == d);
    CHECK(codec::validate_encoding(d).empty());
    CHECK(text == slurp(golden("empty.xml")));
  }
  SUBCASE("two sentences") {
    auto d = doc_of({three_token_tree("s1"),
                     build_graph("s2", {token(1, "Sataa", "sataa", "V", "pres-tense")}, {{kRoot, 1, "main"}})});
    auto text = codec::write_corpus(d);
    CHECK(text == slurp(golden("two_sentences.xml")));
    CHECK(codec::read_corpus_string(text) == d);
    CHECK(codec::validate_encoding(d).empty());
  }
  SUBCASE("file round trip with awkward text") {
    TempDir dir;
    Rng rng(5);
    std::vector<DepGraph> gs;
    for (int i = 0; i < 20; ++i) gs.push_back(random_tree(rng, "q" + std::to_string(i), 1 + i, label_alphabet()));
    codec::TigerDocument d{"rand", codec::declared_features(Tagset{}), gs};
    codec::write_corpus(d, dir / "out.xml");
    CHECK(codec::read_corpus(dir / "out.xml") == d);
  }
  SUBCASE("incomplete sentence aborts before writing") {
    auto d = doc_of({three_token_tree("s1"), build_graph("s2", {token(1, "a")}, {})});
    std::ostringstream os;
    CHECK_THROWS_AS(codec::write_corpus(d, os), codec::CodecError);
    CHECK(os.str().empty());
  }
  SUBCASE("XML syntax errors carry a position") {
    try {
      codec::read_corpus_string("<corpus id=\"x\">\n<head>\n</corpus>");
      FAIL("expected XmlError");
    } catch (const xml::XmlError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 0);
    }
  }
}

TEST_CASE("validate_encoding") {
  SUBCASE("undeclared pos") {
    auto g = edit_graph(three_token_tree("s1"), SetTokenField{1, TokenField::kPos, "X"});
    auto v = codec::validate_encoding(doc_of({g}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].sentence_id == "s1");
    CHECK(v[0].element == "t");
    CHECK(v[0].attribute == "pos");
    CHECK(v[0].value == "X");
  }
  SUBCASE("undeclared label and morph") {
    auto g = edit_graph(three_token_tree("s1"), RelabelEdge{2, 3, "nsubj"});
    g = edit_graph(g, SetTokenField{3, TokenField::kMorph, "du-abl"});
    auto v = codec::validate_encoding(doc_of({g}));
    REQUIRE(v.size() == 2);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& x : v) got.insert({x.attribute, x.value});
    CHECK(got == std::set<std::pair<std::string, std::string>>{{"label", "nsubj"}, {"morph", "du-abl"}});
  }
  SUBCASE("duplicate sentence ids give one violation per duplicate") {
    auto v = codec::validate_encoding(doc_of({three_token_tree("s1"), three_token_tree("s1"), three_token_tree("s1")}));
    CHECK(v.size() == 2);
    for (const auto& x : v) {
      CHECK(x.attribute == "id");
      CHECK(x.value == "s1");
    }
  }
  SUBCASE("incomplete graphs are reported structurally") {
    auto v = codec::validate_encoding(doc_of({build_graph("s5", {token(1, "a")}, {})}));
    REQUIRE(v.size() == 1);
    CHECK(v[0].sentence_id == "s5");
  }
  SUBCASE("illegal characters and bad ids") {
    auto g = edit_graph(three_token_tree("s1"), SetTokenField{1, TokenField::kForm, "a\x01"});
    CHECK(codec::validate_encoding(doc_of({g})).size() == 1);
    auto bad_id = three_token_tree("9 x");
    CHECK_FALSE(codec::validate_encoding(doc_of({bad_id})).empty());
  }
  SUBCASE("every written random corpus validates against a covering tagset") {
    Rng rng(11);
    Tagset ts;
    for (int i = 0; i < 5; ++i) ts.pos_tags.insert("P" + std::to_string(i));
    for (int i = 0; i < 7; ++i) ts.morph_tags.insert("m" + std::to_string(i));
    for (const auto& l : label_alphabet()) ts.dep_labels.insert(l);
    std::vector<DepGraph> gs;
    for (int i = 0; i < 50; ++i) gs.push_back(random_tree(rng, "v" + std::to_string(i), 1 + i % 17, label_alphabet()));
    CHECK(codec::validate_encoding(doc_of(gs, ts)).empty());
  }
}

TEST_CASE("validate_element on files: schema problems") {
  auto dom = codec::corpus_element(doc_of({three_token_tree("s1")}));
  CHECK(codec::validate_element(dom).empty());

  auto& t1 = dom.children[1].children[0].children[0].children[0].children[0];
  REQUIRE(t1.name == "t");
  t1.set("colour", "red");
  auto v = codec::validate_element(dom);
  REQUIRE(v.size() == 1);
  CHECK(v[0].attribute == "colour");

  CHECK(codec::to_string(v[0]).find("s1\tt\tcolour\tred\t") == 0);
}
