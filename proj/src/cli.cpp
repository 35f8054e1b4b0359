#include "treebench/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "treebench/checker.hpp"
#include "treebench/codec.hpp"
#include "treebench/converters.hpp"
#include "treebench/http_service.hpp"
#include "treebench/json_io.hpp"
#include "treebench/merge.hpp"
#include "treebench/store.hpp"
#include "treebench/workbench.hpp"

namespace fs = std::filesystem;

namespace treebench::cli {

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

Tagset read_tagset(const fs::path& p) {
  Tagset ts;
  try {
    ts = Json::parse(read_text(p)).get<Tagset>();
  } catch (const Json::exception& e) {
    throw Error("InvalidTagset", p.string() + ": " + e.what());
  }
  auto problems = tagset_problems(ts);
  if (!problems.empty()) throw Error("InvalidTagset", p.string() + ": " + problems.front());
  return ts;
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

std::set<check::Rule> parse_rules(const std::vector<std::string>& names) {
  std::set<check::Rule> out;
  for (const auto& n : names) out.insert(check::parse_rule(n));
  return out;
}

struct Options {
  std::string project;
  std::string parser;
  std::string tagset;
  std::string name = "treebank";
  std::vector<std::string> inputs;
  std::vector<std::string> rules;
  std::string output;
  bool all = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

int cmd_init(const Options& o, std::ostream& out) {
  Tagset ts = o.tagset.empty() ? Tagset{} : read_tagset(o.tagset);
  auto store = store::init_project(o.project, o.name, ts);
  out << "initialized project '" << o.name << "' at " << store->dir().string() << "\n";
  return 0;
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream& err) {
  std::unique_ptr<store::FileStore> store;
  if (fs::exists(fs::path(o.project) / "manifest.json")) {
    store = store::open_project(o.project);
  } else {
    Tagset ts;
    if (o.tagset.empty()) {
      err << "warning: new project created without a tagset; tag checks will fail until one is set\n";
    } else {
      ts = read_tagset(o.tagset);
    }
    store = store::init_project(o.project, o.name, ts);
  }

  int errors = 0;
  std::vector<DepGraph> graphs;
  std::map<std::string, std::string> origin;  // sentence id -> "file:line"
  std::size_t ordinal = 0;
  for (const auto& input : o.inputs) {
    std::vector<convert::TabularParse> parses;
    try {
      parses = convert::parse_tabular(read_text(input), o.parser);
    } catch (const convert::TabularError& e) {
      err << input << ":" << e.line() << ": error: " << e.kind() << ": " << e.what() << "\n";
      ++errors;
      continue;
    }
    for (const auto& tp : parses) {
      const auto id = convert::sentence_id_for(++ordinal);
      try {
        graphs.push_back(convert::tabular_to_graph(tp, id));
        origin[id] = input + ":" + std::to_string(tp.first_line);
      } catch (const Error& e) {
        err << input << ":" << tp.first_line << ": error: " << e.kind() << ": " << e.what() << "\n";
        ++errors;
      }
    }
  }

  auto report = store->import_parses(o.parser, graphs);
  for (const auto& [id, reason] : report.rejected) {
    err << origin[id] << ": error: " << id << ": " << reason << "\n";
    ++errors;
  }
  out << "parser " << o.parser << ": " << graphs.size() - report.rejected.size()
      << " sentence(s) imported, " << report.added.size() << " new";
  if (!report.replaced.empty()) {
    out << ", replaced existing " << o.parser << " parse for " << report.replaced.size()
        << " sentence(s)";
  }
  out << "\n";
  return errors == 0 ? 0 : 1;
}

int cmd_check(const Options& o, std::ostream& out) {
  auto store = store::open_project(o.project);
  auto cfg = store->check_config();
  if (!o.rules.empty()) cfg.enabled = parse_rules(o.rules);
  std::vector<DepGraph> graphs;
  for (const auto& id : store->sentence_ids()) graphs.push_back(store->get_record(id).current);
  auto result = check::check_corpus(graphs, cfg);
  std::size_t passed = 0;
  for (const auto& r : result.reports) {
    out << check::format_report(r);
    passed += r.passed();
  }
  out << "checked " << result.reports.size() << " sentence(s), " << passed << " passed\n";
  out << "summary " << check::format_summary(result.summary) << "\n";
  return result.passed() ? 0 : 1;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  xml::Element root;
  try {
    root = xml::parse(read_text(o.inputs.front()));
  } catch (const xml::XmlError& e) {
    err << o.inputs.front() << ":" << e.line() << ":" << e.column() << ": error: " << e.description()
        << "\n";
    return 1;
  }
  auto violations = codec::validate_element(root);
  for (const auto& v : violations) out << codec::to_string(v) << "\n";
  out << violations.size() << " violation(s)\n";
  return violations.empty() ? 0 : 1;
}

int cmd_export(const Options& o, std::ostream& out) {
  auto store = store::open_project(o.project);
  auto doc = store::export_treebank(*store, o.output, !o.all);
  out << "exported " << doc.sentences.size() << " sentence(s) to " << o.output << "\n";
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  auto store = store::open_project(o.project);
  const auto ids = store->sentence_ids();
  std::size_t ready = 0, commented = 0;
  std::map<std::string, std::size_t> parser_counts;
  std::size_t compared = 0, tokens = 0;
  double pos = 0, unlabeled = 0, labeled = 0;
  std::ostringstream per_sentence;
  for (const auto& id : ids) {
    auto rec = store->get_record(id);
    ready += rec.ready;
    commented += !rec.comment.empty();
    auto ps = store->parse_set(id);
    for (const auto& [pid, g] : ps.parses) ++parser_counts[pid];
    if (ps.parses.size() < 2) continue;
    auto a = merge::agreement(ps);
    const double n = static_cast<double>(a.rows.size());
    ++compared;
    tokens += a.rows.size();
    pos += a.pos * n;
    unlabeled += a.unlabeled * n;
    labeled += a.labeled * n;
    per_sentence << id << "\tpos=" << fixed(a.pos) << "\tunlabeled=" << fixed(a.unlabeled)
                 << "\tlabeled=" << fixed(a.labeled) << "\n";
  }
  out << "project " << store->name() << "\n";
  out << "ready " << ready << "/" << ids.size() << "\n";
  out << "commented " << commented << "/" << ids.size() << "\n";
  out << "parsers";
  for (const auto& [pid, n] : parser_counts) out << " " << pid << "=" << n;
  out << "\n";
  if (tokens > 0) {
    const double t = static_cast<double>(tokens);
    out << "agreement sentences=" << compared << " tokens=" << tokens << " pos=" << fixed(pos / t)
        << " unlabeled=" << fixed(unlabeled / t) << " labeled=" << fixed(labeled / t) << "\n";
  } else {
    out << "agreement n/a (no sentence has two parses)\n";
  }
  out << per_sentence.str();
  return 0;
}

api::HttpService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto store = store::open_project(o.project);
  api::Workbench wb(*store);
  api::ServiceOptions opts;
  opts.host = o.host;
  opts.port = o.port;
  if (!o.static_dir.empty()) opts.static_dir = o.static_dir;
  opts.export_dir = o.project;
  api::HttpService service(wb, opts);
  const int port = service.bind();
  out << "serving project '" << store->name() << "' on http://" << o.host << ":" << port
      << api::kApiPrefix << std::endl;
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.serve();
  g_service = nullptr;
  return 0;
}

}  // namespace

int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err) {
  CLI::App app{"Dependency treebank annotation workbench", "treebench"};
  app.require_subcommand(1);
  Options o;

  auto add_project = [&](CLI::App* sub) {
    sub->add_option("-p,--project", o.project, "Project directory")
        ->envname(kProjectEnv)
        ->required();
  };

  auto* init = app.add_subcommand("init", "Create an empty project");
  add_project(init);
  init->add_option("--tagset", o.tagset, "Tagset JSON file")->check(CLI::ExistingFile);
  init->add_option("--name", o.name, "Project (corpus) name");

  auto* conv = app.add_subcommand("convert", "Import tabular parser output");
  add_project(conv);
  conv->add_option("--parser", o.parser, "Parser identifier")->required();
  conv->add_option("--tagset", o.tagset, "Tagset JSON file (new projects)")->check(CLI::ExistingFile);
  conv->add_option("--name", o.name, "Project name (new projects)");
  conv->add_option("inputs", o.inputs, "Tabular files")->required()->check(CLI::ExistingFile);

  auto* chk = app.add_subcommand("check", "Run consistency checks on every sentence");
  add_project(chk);
  chk->add_option("--rules", o.rules, "Rules to run (R1..R8), default all")->delimiter(',');

  auto* val = app.add_subcommand("validate", "Validate a TIGER-XML file");
  val->add_option("file", o.inputs, "TIGER-XML file")->required()->expected(1)->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export", "Write the treebank as TIGER-XML");
  add_project(exp);
  exp->add_option("-o,--out", o.output, "Destination file")->required();
  exp->add_flag("--all", o.all, "Include sentences not marked ready");

  auto* stats = app.add_subcommand("stats", "Summarize annotation progress and parser agreement");
  add_project(stats);

  auto* serve = app.add_subcommand("serve", "Run the HTTP annotation service");
  add_project(serve);
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port (0 = any free port)");
  serve->add_option("--static", o.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (init->parsed()) return cmd_init(o, out);
    if (conv->parsed()) return cmd_convert(o, out, err);
    if (chk->parsed()) return cmd_check(o, out);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (exp->parsed()) return cmd_export(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (serve->parsed()) return cmd_serve(o, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return e.kind() == "BadRule" ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("treebench");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace treebench::cli
