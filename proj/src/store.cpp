#include "treebench/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "treebench/json_io.hpp"

namespace fs = std::filesystem;

namespace treebench::store {

namespace {

const char* const kManifest = "manifest.json";
const char* const kTagsetFile = "tagset.json";
const char* const kSettingsFile = "settings.json";
const char* const kRecordsDir = "records";
const char* const kParsesDir = "parses";
const char* const kLockFile = ".lock";
const char* const kTempSuffix = ".tmp";

std::string rules_text(const std::set<check::Rule>& rules) {
  std::string out;
  for (auto r : rules) out += (out.empty() ? "" : ",") + check::to_string(r);
  return out;
}

// Sentence ids become file names; anything outside [A-Za-z0-9._-] is
// percent-encoded, and a leading dot is encoded too.
std::string file_stem(const std::string& id) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < id.size(); ++i) {
    auto c = static_cast<unsigned char>(id[i]);
    bool plain = std::isalnum(c) || c == '_' || c == '-' || (c == '.' && i > 0);
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

void sync_fd(int fd, const fs::path& p) {
  if (::fsync(fd) != 0) {
    throw StoreError("IoError", "fsync '" + p.string() + "': " + std::strerror(errno));
  }
}

void sync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

Json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ProjectCorrupt(p, "cannot open file");
  std::string text{std::istreambuf_iterator<char>(in), {}};
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ProjectCorrupt(p, e.what());
  }
}

template <typename T>
T decode(const fs::path& p, const Json& j) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ProjectCorrupt(p, e.what());
  } catch (const GraphError& e) {
    throw ProjectCorrupt(p, e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

ChecksFailed::ChecksFailed(std::string sentence_id, std::set<check::Rule> rules)
    : StoreError("ChecksFailed",
                 "sentence '" + sentence_id + "' fails checks " + rules_text(rules)),
      sentence_id_(std::move(sentence_id)),
      rules_(std::move(rules)) {}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += kTempSuffix;
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw StoreError("IoError", "cannot create '" + tmp.string() + "': " + std::strerror(errno));
  }
  std::size_t done = 0;
  while (done < content.size()) {
    ssize_t n = ::write(fd, content.data() + done, content.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw StoreError("IoError", "write '" + tmp.string() + "': " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  sync_fd(fd, tmp);
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    throw StoreError("IoError", "rename '" + tmp.string() + "': " + std::strerror(errno));
  }
  sync_dir(path.parent_path());
}

FileStore::FileStore(fs::path dir) : dir_(std::move(dir)) {}

FileStore::~FileStore() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void FileStore::lock() {
  fs::path p = dir_ / kLockFile;
  lock_fd_ = ::open(p.c_str(), O_RDWR | O_CREAT, 0644);
  if (lock_fd_ < 0) {
    throw StoreError("IoError", "cannot open lock file '" + p.string() + "': " + std::strerror(errno));
  }
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw StoreError("ProjectLocked", "project '" + dir_.string() + "' is open in another session");
  }
}

fs::path FileStore::record_path(const std::string& id) const {
  return dir_ / kRecordsDir / (file_stem(id) + ".json");
}

fs::path FileStore::parses_path(const std::string& id) const {
  return dir_ / kParsesDir / (file_stem(id) + ".json");
}

void FileStore::write_manifest() const {
  Json j{{"format", kProjectFormat},
         {"version", kProjectVersion},
         {"name", name_},
         {"sentences", index_}};
  write_file_atomic(dir_ / kManifest, dump(j));
}

void FileStore::write_tagset() const {
  write_file_atomic(dir_ / kTagsetFile, dump(Json{{"revision", tagset_revision_}, {"tagset", tagset_}}));
}

void FileStore::write_settings() const { write_file_atomic(dir_ / kSettingsFile, dump(Json(settings_))); }

std::unique_ptr<FileStore> FileStore::init(const fs::path& dir, const std::string& name,
                                           const Tagset& tagset, const ProjectSettings& settings) {
  std::error_code ec;
  if (fs::exists(dir, ec) && !(fs::is_directory(dir, ec) && fs::is_empty(dir, ec))) {
    throw StoreError("ProjectExists", "'" + dir.string() + "' already exists and is not empty");
  }
  fs::create_directories(dir / kRecordsDir);
  fs::create_directories(dir / kParsesDir);
  std::unique_ptr<FileStore> s(new FileStore(dir));
  s->lock();
  s->name_ = name;
  s->tagset_ = tagset;
  s->settings_ = settings;
  s->write_tagset();
  s->write_settings();
  // The manifest goes last: a directory without one is not a project.
  s->write_manifest();
  return s;
}

std::unique_ptr<FileStore> FileStore::open(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifest;
  if (!fs::exists(manifest_path)) {
    throw ProjectCorrupt(manifest_path, "no project manifest (not a project directory?)");
  }
  std::unique_ptr<FileStore> s(new FileStore(dir));
  s->lock();

  // Leftovers of interrupted writes never became visible; drop them.
  for (const char* sub : {"", kRecordsDir, kParsesDir}) {
    fs::path d = dir / sub;
    if (!fs::is_directory(d)) continue;
    for (const auto& entry : fs::directory_iterator(d)) {
      if (entry.path().extension() == kTempSuffix) fs::remove(entry.path());
    }
  }

  Json manifest = read_json(manifest_path);
  if (!manifest.is_object() || manifest.value("format", "") != kProjectFormat) {
    throw ProjectCorrupt(manifest_path, "not a treebench project manifest");
  }
  const int version = manifest.value("version", -1);
  if (version != kProjectVersion) {
    throw StoreError("VersionMismatch", "project format version " + std::to_string(version) +
                                            " is not supported (expected " +
                                            std::to_string(kProjectVersion) + ")");
  }
  s->name_ = manifest.value("name", "");
  s->index_ = decode<std::vector<std::string>>(manifest_path, manifest.at("sentences"));

  const fs::path tagset_path = dir / kTagsetFile;
  Json tj = read_json(tagset_path);
  s->tagset_ = decode<Tagset>(tagset_path, tj.at("tagset"));
  s->tagset_revision_ = decode<std::uint64_t>(tagset_path, tj.at("revision"));

  const fs::path settings_path = dir / kSettingsFile;
  s->settings_ = decode<ProjectSettings>(settings_path, read_json(settings_path));

  for (const auto& id : s->index_) {
    auto slot = std::make_unique<Slot>();
    const fs::path rp = s->record_path(id);
    auto rec = decode<AnnotationRecord>(rp, read_json(rp));
    if (rec.sentence_id != id) throw ProjectCorrupt(rp, "record belongs to '" + rec.sentence_id + "'");
    slot->record = std::make_shared<const AnnotationRecord>(std::move(rec));
    const fs::path pp = s->parses_path(id);
    slot->parses = std::make_shared<const merge::ParseSet>(decode<merge::ParseSet>(pp, read_json(pp)));
    s->slots_.emplace(id, std::move(slot));
  }
  return s;
}

FileStore::Slot& FileStore::slot(const std::string& id) const {
  std::shared_lock lk(meta_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw StoreError("UnknownSentence", "unknown sentence '" + id + "'");
  return *it->second;
}

Project FileStore::snapshot() const {
  std::shared_lock lk(meta_);
  Project p;
  p.name = name_;
  p.tagset = tagset_;
  p.tagset_revision = tagset_revision_;
  p.settings = settings_;
  p.index = index_;
  for (const auto& [id, slot] : slots_) {
    p.records.emplace(id, *std::atomic_load(&slot->record));
    p.parse_sets.emplace(id, *std::atomic_load(&slot->parses));
  }
  return p;
}

std::string FileStore::name() const {
  std::shared_lock lk(meta_);
  return name_;
}

std::vector<std::string> FileStore::sentence_ids() const {
  std::shared_lock lk(meta_);
  return index_;
}

ProjectSettings FileStore::settings() const {
  std::shared_lock lk(meta_);
  return settings_;
}

void FileStore::set_settings(const ProjectSettings& s) {
  std::unique_lock lk(meta_);
  settings_ = s;
  write_settings();
}

std::pair<Tagset, std::uint64_t> FileStore::tagset() const {
  std::shared_lock lk(meta_);
  return {tagset_, tagset_revision_};
}

std::uint64_t FileStore::put_tagset(const Tagset& ts, std::uint64_t base_revision) {
  std::unique_lock lk(meta_);
  if (base_revision != tagset_revision_) {
    throw RevisionConflict("(tagset)", tagset_revision_, base_revision);
  }
  Tagset old = tagset_;
  tagset_ = ts;
  ++tagset_revision_;
  try {
    write_tagset();
  } catch (...) {
    tagset_ = std::move(old);
    --tagset_revision_;
    throw;
  }
  return tagset_revision_;
}

AnnotationRecord FileStore::get_record(const std::string& id) const {
  return *std::atomic_load(&slot(id).record);
}

merge::ParseSet FileStore::parse_set(const std::string& id) const {
  return *std::atomic_load(&slot(id).parses);
}

void FileStore::put_record(const AnnotationRecord& r) {
  Slot& s = slot(r.sentence_id);
  std::lock_guard commit(s.commit);
  const auto stored = std::atomic_load(&s.record)->revision;
  if (r.revision != stored + 1) throw RevisionConflict(r.sentence_id, stored + 1, r.revision);
  auto rec = std::make_shared<AnnotationRecord>(r);
  rec->current.set_sentence_id(r.sentence_id);
  write_file_atomic(record_path(r.sentence_id), dump(Json(*rec)));
  std::atomic_store(&s.record, std::shared_ptr<const AnnotationRecord>(std::move(rec)));
}

ImportReport FileStore::import_parses(const std::string& parser_id,
                                      const std::vector<DepGraph>& graphs) {
  std::lock_guard one_import(import_);
  ImportReport report;
  bool index_changed = false;

  for (const auto& g : graphs) {
    const std::string& id = g.sentence_id();
    Slot* existing = nullptr;
    {
      std::shared_lock lk(meta_);
      if (auto it = slots_.find(id); it != slots_.end()) existing = it->second.get();
    }

    if (existing == nullptr) {
      merge::ParseSet ps = merge::align({{parser_id, g}});
      AnnotationRecord rec{id, g, "", false, parser_id, 0};
      write_file_atomic(parses_path(id), dump(Json(ps)));
      write_file_atomic(record_path(id), dump(Json(rec)));
      auto slot = std::make_unique<Slot>();
      slot->parses = std::make_shared<const merge::ParseSet>(std::move(ps));
      slot->record = std::make_shared<const AnnotationRecord>(std::move(rec));
      std::unique_lock lk(meta_);
      slots_.emplace(id, std::move(slot));
      index_.push_back(id);
      index_changed = true;
      report.added.push_back(id);
      continue;
    }

    std::lock_guard commit(existing->commit);
    auto parses = std::atomic_load(&existing->parses)->parses;
    const bool replacing = parses.count(parser_id) > 0;
    parses.insert_or_assign(parser_id, g);
    merge::ParseSet ps;
    try {
      ps = merge::align(std::move(parses));
    } catch (const merge::MergeError& e) {
      report.rejected.emplace_back(id, e.kind() + ": " + e.what());
      continue;
    }
    write_file_atomic(parses_path(id), dump(Json(ps)));
    std::atomic_store(&existing->parses, std::make_shared<const merge::ParseSet>(std::move(ps)));
    if (replacing) report.replaced.push_back(id);

    // An untouched record still mirrors its base parse; keep it in step.
    auto rec = std::atomic_load(&existing->record);
    if (rec->revision == 0 && rec->base_parser == parser_id && !(rec->current == g)) {
      auto fresh = std::make_shared<AnnotationRecord>(*rec);
      fresh->current = g;
      write_file_atomic(record_path(id), dump(Json(*fresh)));
      std::atomic_store(&existing->record, std::shared_ptr<const AnnotationRecord>(std::move(fresh)));
    }
  }
  if (index_changed) {
    std::shared_lock lk(meta_);
    write_manifest();
  }
  return report;
}

codec::TigerDocument build_export(const Store& store, bool only_ready) {
  const auto [tagset, tagset_rev] = store.tagset();
  const auto settings = store.settings();
  const check::CheckConfig cfg{settings.enabled_rules, tagset};
  codec::TigerDocument doc{store.name(), codec::declared_features(tagset), {}};
  for (const auto& id : store.sentence_ids()) {
    AnnotationRecord rec = store.get_record(id);
    if (only_ready && !rec.ready) continue;
    if (!is_complete(rec.current).complete) {
      throw codec::CodecError("IncompleteGraph", id,
                              "sentence '" + id + "' is not a complete dependency tree");
    }
    if (settings.export_requires_checks) {
      auto report = check::run_checks(rec.current, cfg);
      if (!report.passed()) throw ChecksFailed(id, report.failed_rules());
    }
    doc.sentences.push_back(std::move(rec.current));
  }
  return doc;
}

codec::TigerDocument export_treebank(const Store& store, const fs::path& destination,
                                     bool only_ready) {
  auto doc = build_export(store, only_ready);
  write_file_atomic(destination, codec::write_corpus(doc));
  return doc;
}

}  // namespace treebench::store
