#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "treebench/model.hpp"
#include "treebench/xml.hpp"

namespace treebench::codec {

// Feature names used as keys of TigerDocument::declared_features.
inline constexpr const char* kPosFeature = "pos";
inline constexpr const char* kMorphFeature = "morph";
inline constexpr const char* kLabelFeature = "label";

// Format stamp written into <head><meta>.
inline constexpr const char* kFormatName = "treebench-tiger-dependency";
inline constexpr int kFormatVersion = 1;

class CodecError : public Error {
 public:
  CodecError(std::string kind, std::string sentence_id, const std::string& message)
      : Error(std::move(kind), message), sentence_id_(std::move(sentence_id)) {}

  const std::string& sentence_id() const noexcept { return sentence_id_; }

 private:
  std::string sentence_id_;
};

struct TigerDocument {
  std::string corpus_id;
  std::map<std::string, std::set<std::string>> declared_features;
  std::vector<DepGraph> sentences;

  bool operator==(const TigerDocument&) const = default;
};

std::map<std::string, std::set<std::string>> declared_features(const Tagset& ts);

// Terminal id for a token and nonterminal id for the group a token heads.
std::string terminal_id(const std::string& sentence_id, TokenId t);
std::string nonterminal_id(const std::string& sentence_id, TokenId head);

// Encodes a complete graph as an <s> element. Throws CodecError
// (IncompleteGraph, ReservedLabel).
xml::Element to_tiger(const DepGraph& g);

// Decodes an <s> element. Throws CodecError(MalformedSentence).
DepGraph from_tiger(const xml::Element& sentence);

xml::Element corpus_element(const TigerDocument& doc);
TigerDocument corpus_from_element(const xml::Element& corpus);

// Throws CodecError(IncompleteGraph) before writing anything.
void write_corpus(const TigerDocument& doc, std::ostream& out);
void write_corpus(const TigerDocument& doc, const std::filesystem::path& path);
std::string write_corpus(const TigerDocument& doc);

// Throws xml::XmlError or CodecError(MalformedSentence/MalformedCorpus).
TigerDocument read_corpus(std::istream& in);
TigerDocument read_corpus(const std::filesystem::path& path);
TigerDocument read_corpus_string(const std::string& text);

struct EncodingViolation {
  std::string sentence_id;  // empty for corpus-level problems
  std::string element;
  std::string attribute;
  std::string value;
  std::string message;

  bool operator==(const EncodingViolation&) const = default;
};

// Structural checks on the in-memory document, then schema and declaration
// checks on its serialized form. Never throws.
std::vector<EncodingViolation> validate_encoding(const TigerDocument& doc);

// Schema and declaration checks on a parsed document (used for files).
std::vector<EncodingViolation> validate_element(const xml::Element& corpus);

std::string to_string(const EncodingViolation& v);

}  // namespace treebench::codec
