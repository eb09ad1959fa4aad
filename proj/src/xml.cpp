#include "mdv/xml.hpp"

#include <cctype>
#include <cstdlib>

#include "mdv/errors.hpp"

namespace mdv::xml {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i);
    if (semi == std::string::npos) {
      out.push_back(s[i++]);
      continue;
    }
    std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (!ent.empty() && ent[0] == '#') {
      long code = 0;
      if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
        code = std::strtol(ent.c_str() + 2, nullptr, 16);
      else
        code = std::strtol(ent.c_str() + 1, nullptr, 10);
      // UTF-8 encode the code point.
      if (code < 0x80) {
        out.push_back(static_cast<char>(code));
      } else if (code < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (code >> 6)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
      } else if (code < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (code >> 12)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
      } else {
        out.push_back(static_cast<char>(0xf0 | (code >> 18)));
        out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
      }
    } else {
      // Unknown entity: keep verbatim.
      out += s.substr(i, semi - i + 1);
    }
    i = semi + 1;
  }
  return out;
}

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' ||
         c == '.';
}

}  // namespace

Parser::Event Parser::next() {
  const std::string& s = input_;
  if (pos_ >= s.size()) return {EventType::End};

  if (s[pos_] != '<') {
    std::size_t start = pos_;
    std::size_t lt = s.find('<', pos_);
    if (lt == std::string::npos) lt = s.size();
    pos_ = lt;
    Event ev;
    ev.type = EventType::Text;
    ev.text = unescape(s.substr(start, lt - start));
    return ev;
  }

  // Skip declarations, processing instructions, and comments.
  if (s.compare(pos_, 4, "<!--") == 0) {
    std::size_t end = s.find("-->", pos_);
    if (end == std::string::npos) throw ParseError("unterminated XML comment");
    pos_ = end + 3;
    return next();
  }
  if (s.compare(pos_, 2, "<?") == 0) {
    std::size_t end = s.find("?>", pos_);
    if (end == std::string::npos) throw ParseError("unterminated XML declaration");
    pos_ = end + 2;
    return next();
  }
  if (s.compare(pos_, 2, "<!") == 0) {
    std::size_t end = s.find('>', pos_);
    if (end == std::string::npos) throw ParseError("unterminated XML directive");
    pos_ = end + 1;
    return next();
  }

  if (s.compare(pos_, 2, "</") == 0) {
    std::size_t start = pos_ + 2;
    std::size_t end = s.find('>', start);
    if (end == std::string::npos) throw ParseError("unterminated end tag");
    Event ev;
    ev.type = EventType::EndElement;
    ev.name = s.substr(start, end - start);
    while (!ev.name.empty() && std::isspace(static_cast<unsigned char>(ev.name.back())))
      ev.name.pop_back();
    pos_ = end + 1;
    return ev;
  }

  // Start tag.
  std::size_t p = pos_ + 1;
  std::size_t name_start = p;
  while (p < s.size() && is_name_char(s[p])) ++p;
  if (p == name_start) throw ParseError("malformed XML tag");
  Event ev;
  ev.type = EventType::StartElement;
  ev.name = s.substr(name_start, p - name_start);

  for (;;) {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    if (p >= s.size()) throw ParseError("unterminated start tag");
    if (s[p] == '>') {
      pos_ = p + 1;
      return ev;
    }
    if (s[p] == '/') {
      if (p + 1 >= s.size() || s[p + 1] != '>') throw ParseError("malformed empty-element tag");
      ev.self_closing = true;
      pos_ = p + 2;
      return ev;
    }
    std::size_t an_start = p;
    while (p < s.size() && is_name_char(s[p])) ++p;
    if (p == an_start) throw ParseError("malformed XML attribute");
    std::string attr_name = s.substr(an_start, p - an_start);
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    if (p >= s.size() || s[p] != '=') throw ParseError("XML attribute without value");
    ++p;
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    if (p >= s.size() || (s[p] != '"' && s[p] != '\'')) throw ParseError("unquoted XML attribute");
    char quote = s[p++];
    std::size_t av_start = p;
    std::size_t av_end = s.find(quote, p);
    if (av_end == std::string::npos) throw ParseError("unterminated XML attribute value");
    ev.attrs[attr_name] = unescape(s.substr(av_start, av_end - av_start));
    p = av_end + 1;
  }
}

std::vector<FoundElement> find_elements(const std::string& doc, const std::string& name) {
  std::vector<FoundElement> out;
  Parser parser(doc);
  for (;;) {
    Parser::Event ev = parser.next();
    if (ev.type == Parser::EventType::End) break;
    if (ev.type != Parser::EventType::StartElement || ev.name != name) continue;
    FoundElement fe;
    fe.attrs = ev.attrs;
    if (!ev.self_closing) {
      // Capture raw inner markup up to the matching end tag, tracking depth.
      int depth = 1;
      std::string inner;
      while (depth > 0) {
        Parser::Event sub = parser.next();
        if (sub.type == Parser::EventType::End)
          throw ParseError("unterminated element <" + name + ">");
        if (sub.type == Parser::EventType::StartElement && sub.name == name && !sub.self_closing)
          ++depth;
        if (sub.type == Parser::EventType::EndElement && sub.name == name) {
          --depth;
          continue;
        }
        // Re-serialization is not needed by callers; inner is advisory.
        if (sub.type == Parser::EventType::Text) inner += sub.text;
      }
      fe.inner = std::move(inner);
    }
    out.push_back(std::move(fe));
  }
  return out;
}

}  // namespace mdv::xml
