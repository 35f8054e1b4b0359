#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "treebench/checker.hpp"
#include "treebench/codec.hpp"
#include "treebench/merge.hpp"
#include "treebench/model.hpp"

namespace treebench::store {

inline constexpr const char* kProjectFormat = "treebench-project";
inline constexpr int kProjectVersion = 1;

class StoreError : public Error {
 public:
  using Error::Error;
};

class RevisionConflict : public StoreError {
 public:
  RevisionConflict(std::string sentence_id, std::uint64_t expected, std::uint64_t got)
      : StoreError("RevisionConflict", "sentence '" + sentence_id + "': expected revision " +
                                           std::to_string(expected) + ", got " +
                                           std::to_string(got)),
        sentence_id_(std::move(sentence_id)),
        expected_(expected),
        got_(got) {}

  const std::string& sentence_id() const noexcept { return sentence_id_; }
  std::uint64_t expected() const noexcept { return expected_; }
  std::uint64_t got() const noexcept { return got_; }

 private:
  std::string sentence_id_;
  std::uint64_t expected_;
  std::uint64_t got_;
};

class ProjectCorrupt : public StoreError {
 public:
  ProjectCorrupt(std::filesystem::path file, const std::string& reason)
      : StoreError("ProjectCorrupt", "corrupt project file '" + file.string() + "': " + reason),
        file_(std::move(file)) {}

  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  std::filesystem::path file_;
};

class ChecksFailed : public StoreError {
 public:
  ChecksFailed(std::string sentence_id, std::set<check::Rule> rules);

  const std::string& sentence_id() const noexcept { return sentence_id_; }
  const std::set<check::Rule>& rules() const noexcept { return rules_; }

 private:
  std::string sentence_id_;
  std::set<check::Rule> rules_;
};

struct AnnotationRecord {
  std::string sentence_id;
  DepGraph current;
  std::string comment;
  bool ready = false;
  std::optional<std::string> base_parser;
  std::uint64_t revision = 0;

  bool operator==(const AnnotationRecord&) const = default;
};

struct ProjectSettings {
  std::set<check::Rule> enabled_rules;  // empty = all
  bool export_requires_checks = true;

  bool operator==(const ProjectSettings&) const = default;
};

// Full in-memory picture of a project.
struct Project {
  std::string name;
  Tagset tagset;
  std::uint64_t tagset_revision = 0;
  ProjectSettings settings;
  std::vector<std::string> index;
  std::map<std::string, merge::ParseSet> parse_sets;
  std::map<std::string, AnnotationRecord> records;

  check::CheckConfig check_config() const { return {settings.enabled_rules, tagset}; }
  bool operator==(const Project&) const = default;
};

struct ImportReport {
  std::vector<std::string> added;
  std::vector<std::string> replaced;  // sentences whose parse by this parser was overwritten
  std::vector<std::pair<std::string, std::string>> rejected;  // (sentence id, reason)
};

// Storage backend contract. Implementations serialize commits per sentence
// and hand out snapshots on read.
class Store {
 public:
  virtual ~Store() = default;

  virtual Project snapshot() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> sentence_ids() const = 0;
  virtual ProjectSettings settings() const = 0;
  virtual std::pair<Tagset, std::uint64_t> tagset() const = 0;
  // Throws RevisionConflict unless base_revision matches.
  virtual std::uint64_t put_tagset(const Tagset& ts, std::uint64_t base_revision) = 0;

  // Throws StoreError("UnknownSentence").
  virtual AnnotationRecord get_record(const std::string& sentence_id) const = 0;
  // r.revision must be the stored revision + 1. Throws RevisionConflict,
  // StoreError("UnknownSentence").
  virtual void put_record(const AnnotationRecord& r) = 0;

  virtual merge::ParseSet parse_set(const std::string& sentence_id) const = 0;

  // Adds one parser's graphs (sentence ids already assigned). New sentences
  // are appended to the index; graphs that do not align with the parses
  // already stored are rejected individually.
  virtual ImportReport import_parses(const std::string& parser_id,
                                     const std::vector<DepGraph>& graphs) = 0;

  check::CheckConfig check_config() const { return {settings().enabled_rules, tagset().first}; }
};

// Directory-backed store:
//   <dir>/manifest.json      format stamp, name, ordered sentence ids
//   <dir>/tagset.json        tagset and its revision
//   <dir>/settings.json      enabled rules, export policy
//   <dir>/parses/<id>.json   parser outputs for one sentence
//   <dir>/records/<id>.json  annotation record for one sentence
//   <dir>/.lock              advisory lock held while open
// Every file is replaced via write-to-temp, fsync, rename.
class FileStore final : public Store {
 public:
  ~FileStore() override;
  FileStore(const FileStore&) = delete;
  FileStore& operator=(const FileStore&) = delete;

  // Throws StoreError("ProjectExists") unless dir is absent or empty.
  static std::unique_ptr<FileStore> init(const std::filesystem::path& dir, const std::string& name,
                                         const Tagset& tagset, const ProjectSettings& settings = {});
  // Throws ProjectCorrupt, StoreError("VersionMismatch"), StoreError("ProjectLocked").
  static std::unique_ptr<FileStore> open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  Project snapshot() const override;
  std::string name() const override;
  std::vector<std::string> sentence_ids() const override;
  ProjectSettings settings() const override;
  std::pair<Tagset, std::uint64_t> tagset() const override;
  std::uint64_t put_tagset(const Tagset& ts, std::uint64_t base_revision) override;
  AnnotationRecord get_record(const std::string& sentence_id) const override;
  void put_record(const AnnotationRecord& r) override;
  merge::ParseSet parse_set(const std::string& sentence_id) const override;
  ImportReport import_parses(const std::string& parser_id,
                             const std::vector<DepGraph>& graphs) override;

  void set_settings(const ProjectSettings& s);

  // Paths of the files backing one sentence.
  std::filesystem::path record_path(const std::string& sentence_id) const;
  std::filesystem::path parses_path(const std::string& sentence_id) const;

 private:
  struct Slot {
    std::mutex commit;
    std::shared_ptr<const AnnotationRecord> record;
    std::shared_ptr<const merge::ParseSet> parses;
  };

  explicit FileStore(std::filesystem::path dir);
  void lock();
  void write_manifest() const;
  void write_tagset() const;
  void write_settings() const;
  Slot& slot(const std::string& sentence_id) const;

  std::filesystem::path dir_;
  int lock_fd_ = -1;

  mutable std::shared_mutex meta_;  // guards the fields below and the slot map
  std::string name_;
  Tagset tagset_;
  std::uint64_t tagset_revision_ = 0;
  ProjectSettings settings_;
  std::vector<std::string> index_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
  std::mutex import_;  // one import at a time
};

inline std::unique_ptr<FileStore> init_project(const std::filesystem::path& dir,
                                               const std::string& name, const Tagset& tagset,
                                               const ProjectSettings& settings = {}) {
  return FileStore::init(dir, name, tagset, settings);
}

inline std::unique_ptr<FileStore> open_project(const std::filesystem::path& dir) {
  return FileStore::open(dir);
}

// Writes the selected sentences in index order to destination and returns
// the document written. Throws codec::CodecError("IncompleteGraph") or
// ChecksFailed (when the project requires passing checks for export).
codec::TigerDocument export_treebank(const Store& store, const std::filesystem::path& destination,
                                     bool only_ready);

// Same selection and gating, without writing.
codec::TigerDocument build_export(const Store& store, bool only_ready);

// Writes content to path atomically (temp file, fsync, rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace treebench::store
