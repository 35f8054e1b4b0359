// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "treebench/checker.hpp"
#include "treebench/codec.hpp"
#include "treebench/workbench.hpp"
#include "support/cli_matrix.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/merge_oracle.hpp"
#include "support/mutations.hpp"
#include "support/store_harness.hpp"

using namespace treebench;
using namespace treebench::testing;
using check::Rule;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Failure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

bool round_trips(const std::vector<DepGraph>& graphs) {
  codec::TigerDocument doc{"acceptance", codec::declared_features(Tagset{}), graphs};
  for (const auto& g : graphs) {
    if (!(codec::from_tiger(codec::to_tiger(g)) == g)) return false;
  }
  return codec::read_corpus_string(codec::write_corpus(doc)) == doc;
}

Outcome codec_round_trip() {
  const auto labels = label_alphabet();
  require(labels.size() == 10, "label alphabet size");
  Rng rng(1001);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  std::vector<DepGraph> random;
  for (int i = 0; i < 1000; ++i) random.push_back(random_tree(rng, "r" + std::to_string(i), size(rng), labels));
  require(round_trips(random), "random tree round trip");

  std::size_t exhaustive = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<DepGraph> trees;
    const auto all = all_complete_trees(n);
    for (std::size_t k = 0; k < all.size(); ++k) {
      std::vector<std::string> ls;
      for (std::size_t t = 1; t <= n; ++t) ls.push_back(labels[(k + t) % labels.size()]);
      trees.push_back(graph_from_heads("e" + std::to_string(n) + "_" + std::to_string(k), all[k], ls));
    }
    require(round_trips(trees), "exhaustive round trip at n=" + std::to_string(n));
    exhaustive += trees.size();
  }
  require(exhaustive == 1 + 2 + 9 + 64 + 625, "complete tree count on <=5 tokens");
  return {true, "1000 random trees, " + std::to_string(exhaustive) + " exhaustive trees"};
}

Outcome seeded_defects() {
  const check::CheckConfig cfg{{}, finnish_tagset()};
  Rng rng(2002);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  int detected = 0, exact = 0, total = 0;
  for (Rule rule : check::kAllRules) {
    for (int v = 0; v < 20; ++v) {
      auto clean = clean_sentence(rng, "d" + std::to_string(total), size(rng));
      auto m = mutate(rng, clean, rule, v);
      auto failed = check::run_checks(m.graph, cfg).failed_rules();
      ++total;
      detected += failed.count(rule) == 1;
      exact += failed == m.expected;
      require(failed == m.expected, check::to_string(rule) + " " + m.description);
    }
  }
  int spurious = 0;
  for (int i = 0; i < 50; ++i) {
    spurious += !check::run_checks(clean_sentence(rng, "c" + std::to_string(i), size(rng)), cfg).findings.empty();
  }
  require(spurious == 0, std::to_string(spurious) + " clean fixtures with findings");
  return {true, "detected " + std::to_string(detected) + "/" + std::to_string(total) + ", exact rule sets " +
                    std::to_string(exact) + "/" + std::to_string(total) + ", 0/50 clean fixtures flagged"};
}

Outcome two_phase_order() {
  const check::CheckConfig cfg{{}, finnish_tagset()};
  Rng rng(3003);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  std::vector<DepGraph> failing;
  for (Rule rule : check::kAllRules) {
    if (rule == Rule::R8) continue;
    for (int v = 0; v < 20; ++v) {
      auto g = clean_sentence(rng, "t" + std::to_string(failing.size()), size(rng));
      g = mutate(rng, g, rule, v).graph;
      // Stack an R8 defect on half of them so R8 would have something to report.
      if (v % 2 == 0) g = mutate(rng, g, Rule::R8, v).graph;
      failing.push_back(g);
    }
  }
  for (const auto& g : read_tab("fdg.tab", "fdg")) failing.push_back(g);
  for (const auto& g : read_tab("cg.tab", "cg")) failing.push_back(g);

  int considered = 0;
  for (const auto& g : failing) {
    auto r = check::run_checks(g, cfg);
    bool phase_one_error = false;
    for (const auto& f : r.findings) {
      phase_one_error = phase_one_error || (f.rule != Rule::R8 && f.severity == check::Severity::kError);
    }
    if (!phase_one_error) continue;
    ++considered;
    require(std::find(r.executed.begin(), r.executed.end(), Rule::R8) == r.executed.end(),
            "R8 executed on " + g.sentence_id());
  }
  require(considered >= 140, "too few fixtures fail R1-R7");
  return {true, "R8 absent from the trace on " + std::to_string(considered) + " fixtures failing R1-R7"};
}

Outcome merge_oracle() {
  const std::vector<std::string> labels = {"a", "b"};
  std::size_t pairs = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<DepGraph> trees;
    const auto all = all_complete_trees(n);
    for (std::size_t k = 0; k < all.size(); ++k) {
      std::vector<std::string> ls;
      for (std::size_t t = 1; t <= n; ++t) ls.push_back(labels[(k >> (t - 1)) & 1u]);
      trees.push_back(graph_from_heads("m", all[k], ls));
    }
    for (const auto& a : trees) {
      for (const auto& b : trees) {
        auto ps = merge::align({{"A", a}, {"B", b}});
        auto m = merge::combine(ps);
        std::string err = check_partition(ps, m);
        if (err.empty()) err = check_reconstruction(ps, m);
        if (err.empty()) err = check_agreement(ps, merge::agreement(ps));
        if (err.empty()) err = check_symmetry(a, b);
        require(err.empty(), "n=" + std::to_string(n) + ": " + err);
        ++pairs;
      }
    }
  }
  require(pairs == 1 + 4 + 81 + 4096, "pair count");
  return {true, std::to_string(pairs) + " ordered pairs: partition, reconstruction, symmetry, recount"};
}

// Runs the whole annotation flow in `dir` and returns the exported bytes.
std::string pipeline(const std::filesystem::path& dir, std::size_t* conflicts_resolved) {
  const auto p = (dir / "project").string();
  require(run_cli({"convert", "-p", p, "--name", "pipeline", "--parser", "fdg", "--tagset",
                   fixture_path("tagset.json").string(), fixture_path("fdg.tab").string()})
                  .code == 0,
          "convert fdg");
  require(run_cli({"convert", "-p", p, "--parser", "cg", fixture_path("cg.tab").string()}).code == 0, "convert cg");

  auto store = store::open_project(p);
  api::Workbench wb(*store);
  const auto gold = read_tab("gold.tab", "gold");
  const auto ids = store->sentence_ids();
  require(ids.size() == 20 && gold.size() == 20, "20 sentences");

  *conflicts_resolved = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& id = ids[i];
    auto base = wb.select_base(id, 0, "fdg");
    const auto bundle = wb.bundle(id);
    require(bundle.merge.has_value(), id + " has two parses");
    *conflicts_resolved += bundle.merge->conflicts.size();
    auto ops = resolve_conflicts(base.record.current, *bundle.merge, gold[i]);
    auto done = wb.apply({id, base.record.revision, ops, std::string("resolved"), true});
    require(done.record.ready && done.check.passed(), id + " ready and passing");
    require(done.record.current == gold[i], id + " equals the reference annotation");
  }

  std::vector<DepGraph> finals;
  for (const auto& id : ids) finals.push_back(store->get_record(id).current);
  require(check::check_corpus(finals, store->check_config()).passed(), "all sentences pass checks");

  const auto out = dir / "treebank.xml";
  auto exported = wb.export_treebank(out, true);
  require(exported.sentences == 20, "20 sentences exported");
  auto back = codec::read_corpus(out);
  require(back.corpus_id == "pipeline", "corpus id");
  require(back.sentences == finals, "re-read export equals final records");
  require(codec::validate_encoding(back).empty(), "export validates");
  return slurp(out);
}

// Disagreements between the two parser files, counted token by token: a
// head difference covers the label too.
std::size_t expected_conflicts() {
  const auto fdg = read_tab("fdg.tab", "fdg");
  const auto cg = read_tab("cg.tab", "cg");
  std::size_t n = 0;
  for (std::size_t i = 0; i < fdg.size(); ++i) {
    for (TokenId t = 1; t <= fdg[i].size(); ++t) {
      const auto &a = fdg[i].token(t), &b = cg[i].token(t);
      if (head_in(fdg[i], t) != head_in(cg[i], t)) {
        ++n;
      } else if (label_in(fdg[i], t) != label_in(cg[i], t)) {
        ++n;
      }
      n += (a.pos != b.pos) + (a.morph != b.morph) + (a.lemma != b.lemma);
    }
  }
  return n;
}

Outcome end_to_end() {
  TempDir a, b;
  std::size_t resolved = 0, again = 0;
  const auto first = pipeline(a.path(), &resolved);
  const auto second = pipeline(b.path(), &again);
  require(first == second && resolved == again, "two runs differ");
  require(resolved > 0, "fixtures carry no disagreements");
  require(resolved == expected_conflicts(), "conflict count differs from a direct diff of the inputs");
  return {true, "20 sentences, " + std::to_string(resolved) + " conflicts resolved, byte-identical reruns"};
}

Outcome store_safety() {
  int interrupted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TempDir dir;
    std::uint64_t reached = 0;
    const auto err = crash_trial(dir / "p", 5000 + seed, &reached);
    require(err.empty(), "crash trial " + std::to_string(seed) + ": " + err);
    interrupted += reached > 0;
  }
  require(interrupted > 0, "no trial interrupted a commit stream");
  TempDir dir;
  const auto err = store_map_oracle(dir / "p", 6006, 1000);
  require(err.empty(), "map oracle: " + err);
  return {true, "100 crash trials (" + std::to_string(interrupted) +
                    " killed mid-stream), map oracle over 1000 operations"};
}

Outcome cli_contract() {
  TempDir dir;
  int cells = 0, failing = 0;
  const auto err = cli_contract_matrix(dir.path(), &cells, &failing);
  require(err.empty(), err);
  require(failing > 0 && failing < cells, "matrix must contain passing and failing runs");
  return {true, std::to_string(cells) + " commands, " + std::to_string(failing) + " expected nonzero"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;  // 0 = no time limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"codec-round-trip", codec_round_trip, 30.0},
      {"checker-seeded-defects", seeded_defects, 0},
      {"checker-two-phase-order", two_phase_order, 0},
      {"merge-oracle", merge_oracle, 0},
      {"end-to-end-pipeline", end_to_end, 10.0},
      {"store-crash-safety", store_safety, 0},
      {"cli-exit-contract", cli_contract, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o = {false, o.detail + "; over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget"};
    }
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (o.ok ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << secs << " s]";
    std::cout << line.str() << std::endl;
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
