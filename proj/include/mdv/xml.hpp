#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdv::xml {

std::string escape(const std::string& s);    // text and attribute escaping
std::string unescape(const std::string& s);  // named + numeric entities

// Minimal pull parser for the SpreadsheetML subset this project reads.
// Handles start/end/empty tags, attributes, character data, comments, and
// XML declarations; no DTDs or namespaces beyond prefix-as-part-of-name.
class Parser {
public:
  enum class EventType { StartElement, EndElement, Text, End };

  struct Event {
    EventType type = EventType::End;
    std::string name;                          // element events
    std::map<std::string, std::string> attrs;  // StartElement only
    bool self_closing = false;                 // StartElement only
    std::string text;                          // Text events, unescaped
  };

  explicit Parser(const std::string& input) : input_(input) {}

  Event next();  // throws ParseError on malformed markup

private:
  const std::string& input_;
  std::size_t pos_ = 0;
};

// Finds each <name ...>...</name> (or self-closed) element in document
// order and returns its attributes; convenience for flat scans.
struct FoundElement {
  std::map<std::string, std::string> attrs;
  std::string inner;  // raw markup between tags, empty when self-closed
};
std::vector<FoundElement> find_elements(const std::string& doc, const std::string& name);

}  // namespace mdv::xml
