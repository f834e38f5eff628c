#include "cows/parser.hpp"

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace cows {

ParseError::ParseError(std::string message, int line, int column,
                       std::vector<std::string> expected)
    : std::runtime_error(message + " at " + std::to_string(line) + ":" +
                         std::to_string(column)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok {
  Ident, Int, KwLet, KwIn, KwEnd, KwNil, KwGt, KwTrue, KwFalse, KwKill,
  Dot, Comma, Bang, Query, Lt, Gt, LParen, RParen, LBrack, RBrack, Hash,
  Bar, Plus, Star, Eq, ProtOpen, ProtClose, End
};

const char* tokName(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwEnd: return "'end'";
    case Tok::KwNil: return "'nil'";
    case Tok::KwGt: return "'gt'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwKill: return "'kill'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::Bang: return "'!'";
    case Tok::Query: return "'?'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Hash: return "'#'";
    case Tok::Bar: return "'|'";
    case Tok::Plus: return "'+'";
    case Tok::Star: return "'*'";
    case Tok::Eq: return "'='";
    case Tok::ProtOpen: return "'{|'";
    case Tok::ProtClose: return "'|}'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  std::int64_t intValue = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipSpace();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

  int peek() const { return pos_ < src_.size() ? static_cast<unsigned char>(src_[pos_]) : -1; }
  int peek2() const {
    return pos_ + 1 < src_.size() ? static_cast<unsigned char>(src_[pos_ + 1]) : -1;
  }

  void advance() {
    if (pos_ >= src_.size()) return;
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipSpace() {
    for (;;) {
      int c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek2() == '/') {
        while (peek() != -1 && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token make(Tok k, std::string text) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = line_;
    t.col = col_;
    return t;
  }

  Token next() {
    int c = peek();
    if (c == -1) return make(Tok::End, "");
    int startLine = line_, startCol = col_;
    auto finish = [&](Tok k, std::string text) {
      Token t;
      t.kind = k;
      t.text = std::move(text);
      t.line = startLine;
      t.col = startCol;
      return t;
    };

    if (std::isalpha(c)) {
      std::string word;
      while (std::isalnum(peek()) || peek() == '_') {
        word.push_back(static_cast<char>(peek()));
        advance();
      }
      if (word == "let") return finish(Tok::KwLet, word);
      if (word == "in") return finish(Tok::KwIn, word);
      if (word == "end") return finish(Tok::KwEnd, word);
      if (word == "nil") return finish(Tok::KwNil, word);
      if (word == "gt") return finish(Tok::KwGt, word);
      if (word == "true") return finish(Tok::KwTrue, word);
      if (word == "false") return finish(Tok::KwFalse, word);
      if (word == "kill") return finish(Tok::KwKill, word);
      return finish(Tok::Ident, word);
    }
    if (std::isdigit(c) || (c == '-' && std::isdigit(peek2()))) {
      std::string num;
      if (peek() == '-') {
        num.push_back('-');
        advance();
      }
      while (std::isdigit(peek())) {
        num.push_back(static_cast<char>(peek()));
        advance();
      }
      Token t = finish(Tok::Int, num);
      try {
        t.intValue = std::stoll(num);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", startLine, startCol);
      }
      return t;
    }
    switch (c) {
      case '.': advance(); return finish(Tok::Dot, ".");
      case ',': advance(); return finish(Tok::Comma, ",");
      case '!': advance(); return finish(Tok::Bang, "!");
      case '?': advance(); return finish(Tok::Query, "?");
      case '<': advance(); return finish(Tok::Lt, "<");
      case '>': advance(); return finish(Tok::Gt, ">");
      case '(': advance(); return finish(Tok::LParen, "(");
      case ')': advance(); return finish(Tok::RParen, ")");
      case '[': advance(); return finish(Tok::LBrack, "[");
      case ']': advance(); return finish(Tok::RBrack, "]");
      case '#': advance(); return finish(Tok::Hash, "#");
      case '+': advance(); return finish(Tok::Plus, "+");
      case '*': advance(); return finish(Tok::Star, "*");
      case '=': advance(); return finish(Tok::Eq, "=");
      case '{':
        advance();
        if (peek() != '|') fail("expected '|' after '{'");
        advance();
        return finish(Tok::ProtOpen, "{|");
      case '|':
        advance();
        if (peek() == '}') {
          advance();
          return finish(Tok::ProtClose, "|}");
        }
        return finish(Tok::Bar, "|");
      default:
        fail("unexpected character");
    }
  }
};

struct CallSite {
  Name definition;
  std::size_t arity;
  int line, col;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  Model parseModel() {
    expect(Tok::KwLet);
    Model m;
    std::set<std::string> seen;
    while (!at(Tok::KwIn)) {
      if (!at(Tok::Ident)) fail({"identifier", "'in'"});
      Token nameTok = cur();
      Definition d = parseDefinition();
      if (!seen.insert(d.name.text).second)
        throw ParseError("duplicate definition '" + d.name.text + "'", nameTok.line,
                         nameTok.col);
      m.definitions.push_back(std::move(d));
    }
    expect(Tok::KwIn);
    m.main = parseParallel();
    expect(Tok::KwEnd);
    expect(Tok::End);
    resolveSorts(m);
    validate(m);
    return m;
  }

  TermPtr parseBareTerm() {
    TermPtr t = parseParallel();
    expect(Tok::End);
    return resolveSorts(t, {});
  }

 private:
  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  int depth_ = 0;
  std::vector<CallSite> callSites_;
  std::vector<std::string> delimStack_;

  const Token& cur() const { return toks_[idx_]; }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() { return toks_[idx_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string msg = "unexpected " + std::string(tokName(cur().kind));
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += i + 1 == expected.size() ? " or " : ", ";
        msg += expected[i];
      }
    }
    throw ParseError(msg, cur().line, cur().col, std::move(expected));
  }

  Token expect(Tok k) {
    if (!at(k)) fail({tokName(k)});
    return take();
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > 2000)
        throw ParseError("nesting too deep", p.cur().line, p.cur().col);
    }
    ~DepthGuard() { --p.depth_; }
  };

  Definition parseDefinition() {
    Definition d;
    d.name = Name{expect(Tok::Ident).text};
    expect(Tok::LParen);
    std::set<std::string> seen;
    if (!at(Tok::RParen)) {
      for (;;) {
        Token p = expect(Tok::Ident);
        if (!seen.insert(p.text).second)
          throw ParseError("duplicate parameter '" + p.text + "'", p.line, p.col);
        d.params.push_back(Name{p.text});
        if (at(Tok::Comma)) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::RParen);
    expect(Tok::Eq);
    d.body = parseParallel();
    return d;
  }

  TermPtr parseParallel() {
    DepthGuard g(*this);
    std::vector<TermPtr> parts;
    parts.push_back(parseChoice());
    while (at(Tok::Bar)) {
      take();
      parts.push_back(parseChoice());
    }
    if (parts.size() == 1) return parts.front();
    return mkParallel(std::move(parts));
  }

  TermPtr parseChoice() {
    DepthGuard g(*this);
    int line = cur().line, col = cur().col;
    std::vector<TermPtr> branches;
    branches.push_back(parsePrefix());
    while (at(Tok::Plus)) {
      take();
      branches.push_back(parsePrefix());
    }
    if (branches.size() == 1) return branches.front();
    for (const auto& b : branches)
      if (!std::holds_alternative<Receive>(b->node))
        throw ParseError("choice branch must be a receive prefix", line, col);
    return mkChoice(std::move(branches));
  }

  TermPtr parsePrefix() {
    DepthGuard g(*this);
    switch (cur().kind) {
      case Tok::KwNil:
        take();
        return mkNil();
      case Tok::Star: {
        take();
        return mkReplicate(parsePrefix());
      }
      case Tok::LBrack: {
        take();
        Token n = expect(Tok::Ident);
        bool fresh = false;
        if (at(Tok::Hash)) {
          take();
          fresh = true;
        }
        expect(Tok::RBrack);
        delimStack_.push_back(n.text);
        TermPtr body = parsePrefix();
        delimStack_.pop_back();
        // kind is provisional; resolveSorts settles it from usage
        return mkDelim(Name{n.text}, fresh ? DelimKind::Name : DelimKind::Var, body,
                       fresh);
      }
      case Tok::KwKill: {
        take();
        expect(Tok::LParen);
        Token n = expect(Tok::Ident);
        expect(Tok::RParen);
        bool bound = false;
        for (const auto& d : delimStack_)
          if (d == n.text) bound = true;
        if (!bound)
          throw ParseError("kill label '" + n.text + "' is not delimited", n.line,
                           n.col);
        return mkKill(Name{n.text});
      }
      case Tok::ProtOpen: {
        take();
        TermPtr body = parseParallel();
        expect(Tok::ProtClose);
        return mkProtect(body);
      }
      case Tok::LParen: {
        take();
        TermPtr body = parseParallel();
        expect(Tok::RParen);
        return body;
      }
      case Tok::Ident:
        return parseIdentLed();
      default:
        fail({"'nil'", "'*'", "'['", "'kill'", "'{|'", "'('", "identifier"});
    }
  }

  TermPtr parseIdentLed() {
    Token first = expect(Tok::Ident);
    if (at(Tok::LParen)) {  // definition call
      take();
      std::vector<ExprPtr> args;
      if (!at(Tok::RParen)) {
        for (;;) {
          args.push_back(parseExpr());
          if (at(Tok::Comma)) {
            take();
            continue;
          }
          break;
        }
      }
      expect(Tok::RParen);
      callSites_.push_back({Name{first.text}, args.size(), first.line, first.col});
      return mkCall(Name{first.text}, std::move(args));
    }
    expect(Tok::Dot);
    Token op = expect(Tok::Ident);
    if (at(Tok::Bang)) {
      take();
      expect(Tok::Lt);
      std::vector<ExprPtr> args;
      if (!at(Tok::Gt)) {
        for (;;) {
          args.push_back(parseExpr());
          if (at(Tok::Comma)) {
            take();
            continue;
          }
          break;
        }
      }
      expect(Tok::Gt);
      return mkInvoke(Name{first.text}, Name{op.text}, std::move(args));
    }
    if (at(Tok::Query)) {
      take();
      expect(Tok::Lt);
      std::vector<Pattern> params;
      if (!at(Tok::Gt)) {
        for (;;) {
          params.push_back(parsePattern());
          if (at(Tok::Comma)) {
            take();
            continue;
          }
          break;
        }
      }
      expect(Tok::Gt);
      TermPtr cont = mkNil();
      if (at(Tok::Dot)) {
        take();
        cont = parsePrefix();
      }
      return mkReceive(Name{first.text}, Name{op.text}, std::move(params), cont);
    }
    fail({"'!'", "'?'"});
  }

  // Identifier patterns are provisionally binders; resolveSorts demotes
  // occurrences that are not backed by a variable binder to literal matches.
  Pattern parsePattern() {
    switch (cur().kind) {
      case Tok::Int:
        return MatchVal{Value{take().intValue}};
      case Tok::KwTrue:
        take();
        return MatchVal{Value{true}};
      case Tok::KwFalse:
        take();
        return MatchVal{Value{false}};
      case Tok::Ident:
        return BindVar{Name{take().text}};
      default:
        fail({"integer", "'true'", "'false'", "identifier"});
    }
  }

  ExprPtr parseExpr() {
    ExprPtr lhs = parseAtom();
    if (at(Tok::KwGt)) {
      take();
      ExprPtr rhs = parseAtom();
      return mkGt(lhs, rhs);
    }
    return lhs;
  }

  ExprPtr parseAtom() {
    DepthGuard g(*this);
    switch (cur().kind) {
      case Tok::Int:
        return mkLit(Value{take().intValue});
      case Tok::KwTrue:
        take();
        return mkLit(Value{true});
      case Tok::KwFalse:
        take();
        return mkLit(Value{false});
      case Tok::Ident:
        return mkVar(Name{take().text});  // demoted to a name literal if unbound
      case Tok::LParen: {
        take();
        ExprPtr e = parseExpr();
        expect(Tok::RParen);
        return e;
      }
      default:
        fail({"integer", "'true'", "'false'", "identifier", "'('"});
    }
  }

  void validate(const Model& m) {
    for (const auto& site : callSites_) {
      const Definition* d = m.find(site.definition);
      if (!d)
        throw ParseError("call to undefined '" + site.definition.text + "'", site.line,
                         site.col);
      if (d->params.size() != site.arity)
        throw ParseError("arity mismatch calling '" + site.definition.text + "': got " +
                             std::to_string(site.arity) + ", definition takes " +
                             std::to_string(d->params.size()),
                         site.line, site.col);
    }
  }
};

}  // namespace

Model parseModel(std::string_view source) {
  Parser p(source);
  return p.parseModel();
}

TermPtr parseTerm(std::string_view source) {
  Parser p(source);
  return p.parseBareTerm();
}

}  // namespace cows
