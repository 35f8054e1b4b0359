#include "treebench/workbench.hpp"

#include <algorithm>

namespace treebench::api {

SentencePage Workbench::list(std::size_t offset, std::size_t limit) const {
  const auto ids = store_.sentence_ids();
  const auto cfg = store_.check_config();
  SentencePage page;
  page.total = ids.size();
  page.offset = offset;
  const std::size_t end = std::min(ids.size(), offset + limit);
  for (std::size_t i = offset; i < end; ++i) {
    const auto rec = store_.get_record(ids[i]);
    const auto report = check::run_checks(rec.current, cfg);
    page.items.push_back(SentenceSummary{rec.sentence_id, rec.revision, rec.ready,
                                         !rec.comment.empty(), report.passed(),
                                         report.findings.size(),
                                         store_.parse_set(ids[i]).parses.size()});
  }
  return page;
}

SentenceBundle Workbench::bundle(const std::string& sentence_id) const {
  SentenceBundle b;
  b.record = store_.get_record(sentence_id);
  b.parses = store_.parse_set(sentence_id);
  if (b.parses.parses.size() >= 2) {
    b.agreement = merge::agreement(b.parses);
    b.merge = merge::combine(b.parses);
  }
  b.check = check::run_checks(b.record.current, store_.check_config());
  return b;
}

CommitResult Workbench::commit(store::AnnotationRecord next, std::uint64_t base_revision,
                               std::optional<bool> ready_request) {
  if (next.revision != base_revision) {
    throw store::RevisionConflict(next.sentence_id, next.revision, base_revision);
  }
  auto report = check::run_checks(next.current, store_.check_config());
  bool ready = ready_request.value_or(next.ready);
  if (ready && !report.passed()) {
    if (ready_request.value_or(false)) throw ReadyRejected(std::move(report));
    // A previously ready sentence whose edit broke it goes back to unready.
    ready = false;
  }
  next.ready = ready;
  next.revision = base_revision + 1;
  store_.put_record(next);
  return CommitResult{std::move(next), std::move(report)};
}

CommitResult Workbench::apply(const EditCommand& cmd) {
  auto rec = store_.get_record(cmd.sentence_id);
  if (rec.revision != cmd.base_revision) {
    throw store::RevisionConflict(cmd.sentence_id, rec.revision, cmd.base_revision);
  }
  for (const auto& op : cmd.ops) rec.current = edit_graph(rec.current, op);
  if (cmd.comment) rec.comment = *cmd.comment;
  return commit(std::move(rec), cmd.base_revision, cmd.ready);
}

check::CheckReport Workbench::check(const std::string& sentence_id,
                                    const std::optional<std::set<check::Rule>>& rules) const {
  auto cfg = store_.check_config();
  if (rules) cfg.enabled = *rules;
  return check::run_checks(store_.get_record(sentence_id).current, cfg);
}

CommitResult Workbench::select_base(const std::string& sentence_id, std::uint64_t base_revision,
                                    const std::string& parser_id) {
  auto rec = store_.get_record(sentence_id);
  if (rec.revision != base_revision) {
    throw store::RevisionConflict(sentence_id, rec.revision, base_revision);
  }
  rec.current = merge::initial_tree(store_.parse_set(sentence_id), parser_id);
  rec.current.set_sentence_id(sentence_id);
  rec.base_parser = parser_id;
  return commit(std::move(rec), base_revision, std::nullopt);
}

CommitResult Workbench::accept_merge(const std::string& sentence_id, std::uint64_t base_revision) {
  auto rec = store_.get_record(sentence_id);
  if (rec.revision != base_revision) {
    throw store::RevisionConflict(sentence_id, rec.revision, base_revision);
  }
  rec.current = merge::combine(store_.parse_set(sentence_id)).merged;
  rec.current.set_sentence_id(sentence_id);
  return commit(std::move(rec), base_revision, std::nullopt);
}

std::uint64_t Workbench::put_tagset(const Tagset& ts, std::uint64_t base_revision) {
  auto problems = tagset_problems(ts);
  if (!problems.empty()) {
    std::string msg = "invalid tagset:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error("InvalidTagset", msg);
  }
  return store_.put_tagset(ts, base_revision);
}

ExportResult Workbench::export_treebank(const std::filesystem::path& destination,
                                        bool only_ready) const {
  auto doc = store::export_treebank(store_, destination, only_ready);
  return ExportResult{destination, doc.sentences.size()};
}

}  // namespace treebench::api
