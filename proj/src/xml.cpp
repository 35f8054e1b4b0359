#include "treebench/xml.hpp"

#include <expat.h>

#include <iterator>
#include <memory>
#include <sstream>

namespace treebench::xml {

Element& Element::set(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

const std::string* Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

Element& Element::add(Element child) {
  children.push_back(std::move(child));
  return children.back();
}

const Element* Element::child(std::string_view n) const {
  for (const auto& c : children) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view n) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == n) out.push_back(&c);
  }
  return out;
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  std::vector<Element> stack;
  std::optional<Element> root;
};

void on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* st = static_cast<ParseState*>(data);
  Element e(name);
  e.line = static_cast<long>(XML_GetCurrentLineNumber(st->parser));
  for (int i = 0; atts[i] != nullptr; i += 2) e.attributes.emplace_back(atts[i], atts[i + 1]);
  st->stack.push_back(std::move(e));
}

void on_end(void* data, const XML_Char*) {
  auto* st = static_cast<ParseState*>(data);
  Element e = std::move(st->stack.back());
  st->stack.pop_back();
  if (!e.children.empty()) {
    e.text.clear();
  } else {
    auto b = e.text.find_first_not_of(" \t\r\n");
    auto last = e.text.find_last_not_of(" \t\r\n");
    e.text = b == std::string::npos ? std::string() : e.text.substr(b, last - b + 1);
  }
  if (st->stack.empty()) {
    st->root = std::move(e);
  } else {
    st->stack.back().children.push_back(std::move(e));
  }
}

void on_text(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(data);
  if (!st->stack.empty()) st->stack.back().text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

Element parse(std::string_view document) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw XmlError(0, 0, "cannot allocate XML parser");
  ParseState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1) ==
      XML_STATUS_ERROR) {
    throw XmlError(static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                   static_cast<long>(XML_GetCurrentColumnNumber(parser.get())) + 1,
                   XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!st.root) throw XmlError(1, 1, "no root element");
  return std::move(*st.root);
}

Element parse(std::istream& in) {
  std::string doc{std::istreambuf_iterator<char>(in), {}};
  return parse(doc);
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\t':
        out += "&#9;";
        break;
      case '\n':
        out += "&#10;";
        break;
      case '\r':
        out += "&#13;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

namespace {

void write_element(std::ostream& out, const Element& e, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out << indent << '<' << e.name;
  for (const auto& [k, v] : e.attributes) out << ' ' << k << "=\"" << escape(v) << '"';
  if (e.children.empty() && e.text.empty()) {
    out << "/>\n";
    return;
  }
  if (e.children.empty()) {
    out << '>' << escape(e.text) << "</" << e.name << ">\n";
    return;
  }
  out << ">\n";
  for (const auto& c : e.children) write_element(out, c, depth + 1);
  out << indent << "</" << e.name << ">\n";
}

// Decodes one UTF-8 sequence; returns false on malformed input.
bool next_code_point(std::string_view s, std::size_t& i, char32_t& cp) {
  auto b0 = static_cast<unsigned char>(s[i]);
  int len = 0;
  if (b0 < 0x80) {
    cp = b0;
    len = 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    return false;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) return false;
  for (int k = 1; k < len; ++k) {
    auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) return false;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong encodings.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
    return false;
  }
  i += static_cast<std::size_t>(len);
  return true;
}

bool legal_char(char32_t c) {
  return c == 0x9 || c == 0xA || c == 0xD || (c >= 0x20 && c <= 0xD7FF) ||
         (c >= 0xE000 && c <= 0xFFFD) || (c >= 0x10000 && c <= 0x10FFFF);
}

}  // namespace

void write(std::ostream& out, const Element& root) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(out, root, 0);
}

std::string to_string(const Element& root) {
  std::ostringstream os;
  write(os, root);
  return os.str();
}

bool is_xml_text(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t cp = 0;
    if (!next_code_point(s, i, cp) || !legal_char(cp)) return false;
  }
  return true;
}

bool is_ncname(std::string_view s) {
  if (s.empty() || !is_xml_text(s)) return false;
  auto start_ok = [](unsigned char c) {
    return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c >= 0x80;
  };
  auto rest_ok = [&](unsigned char c) {
    return start_ok(c) || c == '-' || c == '.' || (c >= '0' && c <= '9');
  };
  if (!start_ok(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s.substr(1)) {
    if (!rest_ok(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace treebench::xml
