#include "cows/aut.hpp"

#include <cctype>
#include <sstream>

#include "cows/parser.hpp"

namespace cows {

std::string exportAut(const Lts& l) {
  std::ostringstream os;
  os << "des (" << l.initial << "," << l.transitions.size() << "," << l.states.size()
     << ")\n";
  for (const auto& t : l.transitions)
    os << "(" << t.src << ",\"" << labelText(t.label) << "\"," << t.dst << ")\n";
  return os.str();
}

namespace {

struct LineCursor {
  const std::string& s;
  std::size_t pos = 0;
  int line;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, static_cast<int>(pos) + 1);
  }

  void skipSpaces() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  void expect(char c) {
    skipSpaces();
    if (pos >= s.size() || s[pos] != c)
      fail(std::string("expected '") + c + "' in .aut line");
    ++pos;
  }

  std::size_t number() {
    skipSpaces();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("expected a number in .aut line");
    std::size_t v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + static_cast<std::size_t>(s[pos] - '0');
      ++pos;
    }
    return v;
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos < s.size() && s[pos] != '"') out.push_back(s[pos++]);
    if (pos >= s.size()) fail("unterminated label in .aut line");
    ++pos;
    return out;
  }
};

Value parseValueToken(const std::string& tok, int line) {
  if (tok == "true") return Value{true};
  if (tok == "false") return Value{false};
  if (!tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) ||
                       (tok[0] == '-' && tok.size() > 1))) {
    try {
      return Value{static_cast<std::int64_t>(std::stoll(tok))};
    } catch (...) {
      throw ParseError("bad integer value '" + tok + "' in label", line, 1);
    }
  }
  if (tok.empty()) throw ParseError("empty value in label", line, 1);
  return Value{Name{tok}};
}

Label parseLabel(const std::string& text, int line) {
  if (text == "tau") return TauLabel{};
  if (text.rfind("kill:", 0) == 0) return KillEvtLabel{Name{text.substr(5)}};
  if (text.rfind("comm:", 0) == 0) {
    std::string rest = text.substr(5);
    auto dot = rest.find('.');
    auto lt = rest.find('<');
    if (dot == std::string::npos || lt == std::string::npos || dot > lt ||
        rest.back() != '>')
      throw ParseError("malformed comm label '" + text + "'", line, 1);
    CommLabel c;
    c.partner = Name{rest.substr(0, dot)};
    c.operation = Name{rest.substr(dot + 1, lt - dot - 1)};
    std::string args = rest.substr(lt + 1, rest.size() - lt - 2);
    if (!args.empty()) {
      std::size_t start = 0;
      for (;;) {
        auto comma = args.find(',', start);
        std::string tok = args.substr(start, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - start);
        c.values.push_back(parseValueToken(tok, line));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    return c;
  }
  throw ParseError("unknown label '" + text + "'", line, 1);
}

}  // namespace

Lts parseAut(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineNo = 0;

  // header
  std::size_t initial = 0, numTrans = 0, numStates = 0;
  for (;;) {
    if (!std::getline(is, line)) throw ParseError("missing .aut header", 1, 1);
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = line;
    stripped.erase(0, stripped.find_first_not_of(" \t"));
    if (stripped.empty()) continue;
    LineCursor c{line, 0, lineNo};
    c.skipSpaces();
    if (line.compare(c.pos, 3, "des") != 0)
      c.fail("expected 'des' header");
    c.pos += 3;
    c.expect('(');
    initial = c.number();
    c.expect(',');
    numTrans = c.number();
    c.expect(',');
    numStates = c.number();
    c.expect(')');
    break;
  }
  if (numStates == 0) throw ParseError("empty .aut: no states", lineNo, 1);
  if (initial >= numStates) throw ParseError("initial state out of range", lineNo, 1);

  Lts lts;
  lts.initial = initial;
  lts.states.resize(numStates);

  std::size_t seen = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = line;
    stripped.erase(0, stripped.find_first_not_of(" \t"));
    if (stripped.empty()) continue;
    LineCursor c{line, 0, lineNo};
    c.expect('(');
    std::size_t src = c.number();
    c.expect(',');
    std::string label = c.quoted();
    c.expect(',');
    std::size_t dst = c.number();
    c.expect(')');
    if (src >= numStates || dst >= numStates)
      throw ParseError("transition endpoint out of range", lineNo, 1);
    lts.transitions.push_back({src, parseLabel(label, lineNo), dst});
    ++seen;
  }
  if (seen != numTrans)
    throw ParseError("transition count mismatch: header says " +
                         std::to_string(numTrans) + ", found " + std::to_string(seen),
                     lineNo, 1);
  return lts;
}

}  // namespace cows
