#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treebench/checker.hpp"
#include "treebench/merge.hpp"
#include "treebench/model.hpp"
#include "treebench/store.hpp"

namespace treebench::api {

// One save from the annotator: graph edits applied in order, plus optional
// metadata updates, against a known record revision.
struct EditCommand {
  std::string sentence_id;
  std::uint64_t base_revision = 0;
  std::vector<EditOp> ops;
  std::optional<std::string> comment;
  std::optional<bool> ready;
};

// Raised when a command asks for ready=true but the post-edit graph fails
// its checks. Nothing is committed.
class ReadyRejected : public Error {
 public:
  explicit ReadyRejected(check::CheckReport report)
      : Error("ReadyRejected", "sentence '" + report.sentence_id +
                                   "' cannot be marked ready: checks fail"),
        report_(std::move(report)) {}

  const check::CheckReport& report() const noexcept { return report_; }

 private:
  check::CheckReport report_;
};

struct SentenceSummary {
  std::string sentence_id;
  std::uint64_t revision = 0;
  bool ready = false;
  bool has_comment = false;
  bool passed = false;
  std::size_t finding_count = 0;
  std::size_t parser_count = 0;
};

struct SentencePage {
  std::size_t total = 0;
  std::size_t offset = 0;
  std::vector<SentenceSummary> items;
};

struct SentenceBundle {
  store::AnnotationRecord record;
  merge::ParseSet parses;
  std::optional<merge::AgreementReport> agreement;  // two or more parses
  std::optional<merge::MergeResult> merge;          // two or more parses
  check::CheckReport check;
};

struct CommitResult {
  store::AnnotationRecord record;
  check::CheckReport check;
};

struct ExportResult {
  std::filesystem::path path;
  std::size_t sentences = 0;
};

// The annotation workflow over a store. Every HTTP endpoint is a thin
// wrapper around one of these calls.
class Workbench {
 public:
  explicit Workbench(store::Store& store) : store_(store) {}

  SentencePage list(std::size_t offset, std::size_t limit) const;
  SentenceBundle bundle(const std::string& sentence_id) const;

  // Throws RevisionConflict, GraphError, ReadyRejected, UnknownSentence.
  CommitResult apply(const EditCommand& cmd);

  check::CheckReport check(const std::string& sentence_id,
                           const std::optional<std::set<check::Rule>>& rules = std::nullopt) const;

  // Replaces the current graph with the given parser's output.
  CommitResult select_base(const std::string& sentence_id, std::uint64_t base_revision,
                           const std::string& parser_id);

  // Replaces the current graph with the unanimity merge of all parses.
  CommitResult accept_merge(const std::string& sentence_id, std::uint64_t base_revision);

  std::pair<Tagset, std::uint64_t> tagset() const { return store_.tagset(); }
  // Throws Error("InvalidTagset") listing the problems, or RevisionConflict.
  std::uint64_t put_tagset(const Tagset& ts, std::uint64_t base_revision);

  ExportResult export_treebank(const std::filesystem::path& destination, bool only_ready) const;

  store::Store& store() noexcept { return store_; }

 private:
  CommitResult commit(store::AnnotationRecord next, std::uint64_t base_revision,
                      std::optional<bool> ready_request);

  store::Store& store_;
};

}  // namespace treebench::api
