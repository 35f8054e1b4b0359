#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treebench/error.hpp"

namespace treebench::xml {

class XmlError : public Error {
 public:
  XmlError(long line, long column, const std::string& description)
      : Error("XmlError", "XML error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + description),
        line_(line),
        column_(column),
        description_(description) {}

  long line() const noexcept { return line_; }
  long column() const noexcept { return column_; }
  const std::string& description() const noexcept { return description_; }

 private:
  long line_;
  long column_;
  std::string description_;
};

// A small element tree. Character data is kept only as trimmed text of
// leaf elements; the TIGER dialect here carries everything in attributes.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  long line = 0;  // source position, 0 for constructed nodes

  Element() = default;
  explicit Element(std::string n) : name(std::move(n)) {}

  Element& set(std::string key, std::string value);
  const std::string* attr(std::string_view key) const;
  Element& add(Element child);

  const Element* child(std::string_view name) const;
  std::vector<const Element*> children_named(std::string_view name) const;

  bool operator==(const Element& o) const {
    return name == o.name && attributes == o.attributes && children == o.children &&
           text == o.text;
  }
};

// Throws XmlError with expat's line/column on malformed input.
Element parse(std::string_view document);
Element parse(std::istream& in);

// Serializes with two-space indentation, UTF-8 declaration, LF line endings.
void write(std::ostream& out, const Element& root);
std::string to_string(const Element& root);

std::string escape(std::string_view raw);

// True when every code point is a legal XML 1.0 character. Invalid UTF-8
// also yields false.
bool is_xml_text(std::string_view s);

// xs:NCName restricted to the ASCII subset plus any non-ASCII letter bytes.
bool is_ncname(std::string_view s);

}  // namespace treebench::xml
