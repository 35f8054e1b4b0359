#include "treebench/http_service.hpp"

#include <httplib.h>

#include <charconv>
#include <map>
#include <set>

namespace treebench::api {

namespace {

Error bad_request(const std::string& msg) { return Error("BadRequest", msg); }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) out.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return out;
}

std::size_t query_number(const std::map<std::string, std::string>& q, const char* key,
                         std::size_t fallback) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  std::size_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw bad_request(std::string("query parameter '") + key + "' must be a non-negative integer");
  }
  return v;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw bad_request(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::uint64_t base_revision(const Json& j) {
  if (!j.contains("base_revision")) throw bad_request("base_revision is required");
  return j.at("base_revision").get<std::uint64_t>();
}

}  // namespace

int status_for(const Error& e) {
  static const std::set<std::string> unprocessable = {
      "UnknownToken",  "UnknownEdge",    "MultipleHeads",       "DuplicateEdge",
      "BadTokenIds",   "BadField",       "BadEditOp",           "BadRule",
      "UnknownParser", "NeedTwoParses",  "NoParses",            "InvalidTagset",
      "IncompleteGraph", "ChecksFailed", "ReservedLabel",       "TokenizationMismatch"};
  const auto& k = e.kind();
  if (k == "UnknownSentence" || k == "NotFound") return 404;
  if (k == "RevisionConflict") return 409;
  if (k == "ReadyRejected") return 423;
  if (k == "BadRequest") return 400;
  if (k == "MethodNotAllowed") return 405;
  if (unprocessable.count(k)) return 422;
  return 500;
}

Json error_body(const Error& e) {
  Json err{{"kind", e.kind()}, {"message", e.what()}};
  if (const auto* g = dynamic_cast<const GraphError*>(&e)) err["ids"] = g->ids();
  if (const auto* rc = dynamic_cast<const store::RevisionConflict*>(&e)) {
    err["expected"] = rc->expected();
    err["got"] = rc->got();
  }
  if (const auto* rr = dynamic_cast<const ReadyRejected*>(&e)) err["report"] = rr->report();
  if (const auto* cf = dynamic_cast<const store::ChecksFailed*>(&e)) {
    err["sentence_id"] = cf->sentence_id();
    err["rules"] = cf->rules();
  }
  return Json{{"error", std::move(err)}};
}

Json to_json(const SentenceSummary& s) {
  return Json{{"sentence_id", s.sentence_id},     {"revision", s.revision},
              {"ready", s.ready},                 {"has_comment", s.has_comment},
              {"check_passed", s.passed},         {"finding_count", s.finding_count},
              {"parser_count", s.parser_count}};
}

Json to_json(const SentencePage& p) {
  Json items = Json::array();
  for (const auto& s : p.items) items.push_back(to_json(s));
  return Json{{"total", p.total}, {"offset", p.offset}, {"items", std::move(items)}};
}

Json to_json(const SentenceBundle& b) {
  return Json{{"record", b.record},
              {"parses", b.parses},
              {"agreement", b.agreement ? Json(*b.agreement) : Json(nullptr)},
              {"merge", b.merge ? Json(*b.merge) : Json(nullptr)},
              {"check", b.check}};
}

Json to_json(const CommitResult& c) {
  return Json{{"record", c.record}, {"revision", c.record.revision}, {"check", c.check}};
}

EditCommand edit_command_from_json(const std::string& sentence_id, const Json& j) {
  EditCommand cmd;
  cmd.sentence_id = sentence_id;
  cmd.base_revision = base_revision(j);
  if (j.contains("ops")) cmd.ops = j.at("ops").get<std::vector<EditOp>>();
  if (j.contains("comment") && !j.at("comment").is_null()) {
    cmd.comment = j.at("comment").get<std::string>();
  }
  if (j.contains("ready") && !j.at("ready").is_null()) cmd.ready = j.at("ready").get<bool>();
  return cmd;
}

Response Router::handle(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query, const std::string& body) {
  try {
    const auto parts = split_path(path);
    if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") {
      throw Error("NotFound", "no route for " + path);
    }
    auto allow = [&](const char* m) {
      if (method != m) throw Error("MethodNotAllowed", method + " not allowed on " + path);
    };

    try {
      const std::string& resource = parts[2];
      if (resource == "info" && parts.size() == 3) {
        allow("GET");
        auto [ts, rev] = wb_.tagset();
        return {200, Json{{"api_version", 1},
                          {"project", wb_.store().name()},
                          {"sentences", wb_.store().sentence_ids().size()},
                          {"tagset_revision", rev}}};
      }
      if (resource == "sentences" && parts.size() == 3) {
        allow("GET");
        return {200, to_json(wb_.list(query_number(query, "offset", 0),
                                      query_number(query, "limit", 50)))};
      }
      if (resource == "sentences" && parts.size() == 4) {
        allow("GET");
        return {200, to_json(wb_.bundle(parts[3]))};
      }
      if (resource == "sentences" && parts.size() == 5) {
        const std::string& id = parts[3];
        const std::string& action = parts[4];
        allow("POST");
        Json j = parse_body(body);
        if (action == "edit") return {200, to_json(wb_.apply(edit_command_from_json(id, j)))};
        if (action == "check") {
          std::optional<std::set<check::Rule>> rules;
          if (j.contains("rules")) rules = j.at("rules").get<std::set<check::Rule>>();
          return {200, Json(wb_.check(id, rules))};
        }
        if (action == "base") {
          return {200, to_json(wb_.select_base(id, base_revision(j), j.at("parser").get<std::string>()))};
        }
        if (action == "accept-merge") return {200, to_json(wb_.accept_merge(id, base_revision(j)))};
        throw Error("NotFound", "no route for " + path);
      }
      if (resource == "tagset" && parts.size() == 3) {
        if (method == "GET") {
          auto [ts, rev] = wb_.tagset();
          return {200, Json{{"revision", rev}, {"tagset", ts}}};
        }
        allow("PUT");
        Json j = parse_body(body);
        auto rev = wb_.put_tagset(j.at("tagset").get<Tagset>(), base_revision(j));
        return {200, Json{{"revision", rev}}};
      }
      if (resource == "export" && parts.size() == 3) {
        allow("POST");
        Json j = parse_body(body);
        if (!j.contains("path")) throw bad_request("export needs a destination 'path'");
        auto result = wb_.export_treebank(j.at("path").get<std::string>(), j.value("only_ready", true));
        return {200, Json{{"path", result.path.string()}, {"sentences", result.sentences}}};
      }
      throw Error("NotFound", "no route for " + path);
    } catch (const Json::exception& e) {
      throw bad_request(std::string("malformed request document: ") + e.what());
    }
  } catch (const Error& e) {
    return {status_for(e), error_body(e)};
  } catch (const std::exception& e) {
    return {500, Json{{"error", {{"kind", "Internal"}, {"message", e.what()}}}}};
  }
}

struct HttpService::Impl {
  Workbench& wb;
  ServiceOptions options;
  Router router;
  httplib::Server server;

  Impl(Workbench& w, ServiceOptions o) : wb(w), options(std::move(o)), router(w) {}
};

HttpService::HttpService(Workbench& wb, ServiceOptions options)
    : impl_(std::make_unique<Impl>(wb, std::move(options))) {
  auto* impl = impl_.get();
  auto dispatch = [impl](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    std::string body = req.body;
    // Relative export paths are resolved on the server side.
    if (req.path == std::string(kApiPrefix) + "/export" && req.method == "POST") {
      try {
        Json j = Json::parse(body);
        if (j.contains("path") && j["path"].is_string()) {
          std::filesystem::path p = j["path"].get<std::string>();
          if (p.is_relative()) j["path"] = (impl->options.export_dir / p).string();
          body = j.dump();
        }
      } catch (const Json::exception&) {
        // Left for the router to reject.
      }
    }
    Response r = impl->router.handle(req.method, req.path, query, body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  const std::string pattern = std::string(kApiPrefix) + "(/.*)?";
  impl->server.Get(pattern, dispatch);
  impl->server.Post(pattern, dispatch);
  impl->server.Put(pattern, dispatch);
  if (impl->options.static_dir) impl->server.set_mount_point("/", impl->options.static_dir->string());
}

HttpService::~HttpService() { stop(); }

int HttpService::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (!impl_->server.bind_to_port(impl_->options.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error("BindFailed", "cannot bind " + impl_->options.host + ":" +
                                  std::to_string(impl_->options.port));
  }
  return port;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace treebench::api
