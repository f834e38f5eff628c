#include "cows/logic.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cows/aut.hpp"
#include "cows/parser.hpp"

namespace cows {

bool ActionPattern::matches(const Label& l) const {
  const auto* c = std::get_if<CommLabel>(&l);
  if (!c) return false;
  if (partner && !(*partner == c->partner)) return false;
  if (operation && !(*operation == c->operation)) return false;
  if (anyValues) return true;
  if (valuePatterns.size() != c->values.size()) return false;
  for (std::size_t i = 0; i < valuePatterns.size(); ++i)
    if (valuePatterns[i] && !(*valuePatterns[i] == c->values[i])) return false;
  return true;
}

FormulaPtr fTrue() { return std::make_shared<Formula>(Formula{FTrue{}}); }
FormulaPtr fNot(FormulaPtr f) { return std::make_shared<Formula>(Formula{FNot{std::move(f)}}); }
FormulaPtr fAnd(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FAnd{std::move(a), std::move(b)}});
}
FormulaPtr fOr(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FOr{std::move(a), std::move(b)}});
}
FormulaPtr fImplies(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FImplies{std::move(a), std::move(b)}});
}
FormulaPtr fDiamond(ActionPattern p, FormulaPtr f) {
  return std::make_shared<Formula>(Formula{FDiamond{std::move(p), std::move(f)}});
}
FormulaPtr fBox(ActionPattern p, FormulaPtr f) {
  return std::make_shared<Formula>(Formula{FBox{std::move(p), std::move(f)}});
}
FormulaPtr fEF(FormulaPtr f) { return std::make_shared<Formula>(Formula{FEF{std::move(f)}}); }
FormulaPtr fAF(FormulaPtr f) { return std::make_shared<Formula>(Formula{FAF{std::move(f)}}); }
FormulaPtr fEG(FormulaPtr f) { return std::make_shared<Formula>(Formula{FEG{std::move(f)}}); }
FormulaPtr fAG(FormulaPtr f) { return std::make_shared<Formula>(Formula{FAG{std::move(f)}}); }
FormulaPtr fEU(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FEU{std::move(a), std::move(b)}});
}
FormulaPtr fAU(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FAU{std::move(a), std::move(b)}});
}
FormulaPtr fEnabled(Name partner, Name operation) {
  return std::make_shared<Formula>(Formula{FEnabled{std::move(partner), std::move(operation)}});
}

bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b) {
  return printFormula(a) == printFormula(b);
}

// --- printing --------------------------------------------------------------------

namespace {

std::string patternText(const ActionPattern& p) {
  std::string s = (p.partner ? p.partner->text : "*") + "." +
                  (p.operation ? p.operation->text : "*") + "<";
  if (p.anyValues) {
    s += "*";
  } else {
    for (std::size_t i = 0; i < p.valuePatterns.size(); ++i) {
      if (i) s += ",";
      s += p.valuePatterns[i] ? valueText(*p.valuePatterns[i]) : "*";
    }
  }
  return s + ">";
}

bool isAtomic(const FormulaPtr& f) {
  return std::holds_alternative<FTrue>(f->node) ||
         std::holds_alternative<FEnabled>(f->node);
}

void writeFormula(std::ostream& os, const FormulaPtr& f);

void writeChild(std::ostream& os, const FormulaPtr& f) {
  // modal/unary arguments: atoms, modalities and fixpoint forms carry their
  // own brackets; boolean connectives need parentheses
  bool paren = !isAtomic(f) && !std::holds_alternative<FDiamond>(f->node) &&
               !std::holds_alternative<FBox>(f->node) &&
               !std::holds_alternative<FEF>(f->node) &&
               !std::holds_alternative<FAF>(f->node) &&
               !std::holds_alternative<FEG>(f->node) &&
               !std::holds_alternative<FAG>(f->node) &&
               !std::holds_alternative<FEU>(f->node) &&
               !std::holds_alternative<FAU>(f->node) &&
               !std::holds_alternative<FNot>(f->node);
  if (paren) os << '(';
  writeFormula(os, f);
  if (paren) os << ')';
}

void writeFormula(std::ostream& os, const FormulaPtr& f) {
  if (std::holds_alternative<FTrue>(f->node)) {
    os << "true";
  } else if (const auto* n = std::get_if<FNot>(&f->node)) {
    os << '!';
    writeChild(os, n->sub);
  } else if (const auto* a = std::get_if<FAnd>(&f->node)) {
    writeChild(os, a->lhs);
    os << " & ";
    writeChild(os, a->rhs);
  } else if (const auto* o = std::get_if<FOr>(&f->node)) {
    writeChild(os, o->lhs);
    os << " | ";
    writeChild(os, o->rhs);
  } else if (const auto* im = std::get_if<FImplies>(&f->node)) {
    writeChild(os, im->lhs);
    os << " -> ";
    writeChild(os, im->rhs);
  } else if (const auto* d = std::get_if<FDiamond>(&f->node)) {
    os << '<' << patternText(d->pattern) << '>';
    writeChild(os, d->sub);
  } else if (const auto* b = std::get_if<FBox>(&f->node)) {
    os << '[' << patternText(b->pattern) << "] ";
    writeChild(os, b->sub);
  } else if (const auto* ef = std::get_if<FEF>(&f->node)) {
    os << "EF(";
    writeFormula(os, ef->sub);
    os << ')';
  } else if (const auto* af = std::get_if<FAF>(&f->node)) {
    os << "AF(";
    writeFormula(os, af->sub);
    os << ')';
  } else if (const auto* eg = std::get_if<FEG>(&f->node)) {
    os << "EG(";
    writeFormula(os, eg->sub);
    os << ')';
  } else if (const auto* ag = std::get_if<FAG>(&f->node)) {
    os << "AG(";
    writeFormula(os, ag->sub);
    os << ')';
  } else if (const auto* eu = std::get_if<FEU>(&f->node)) {
    os << "E[";
    writeFormula(os, eu->lhs);
    os << " U ";
    writeFormula(os, eu->rhs);
    os << ']';
  } else if (const auto* au = std::get_if<FAU>(&f->node)) {
    os << "A[";
    writeFormula(os, au->lhs);
    os << " U ";
    writeFormula(os, au->rhs);
    os << ']';
  } else {
    const auto& en = std::get<FEnabled>(f->node);
    os << "enabled(" << en.partner.text << '.' << en.operation.text << ')';
  }
}

}  // namespace

std::string printFormula(const FormulaPtr& f) {
  std::ostringstream os;
  writeFormula(os, f);
  return os.str();
}

// --- formula parsing ---------------------------------------------------------------

namespace {

struct FTok {
  enum Kind {
    Ident, Int, Arrow, Amp, Bar, Bang, LParen, RParen, LBrack, RBrack, Lt, Gt,
    Dot, Comma, Star, End
  } kind;
  std::string text;
  std::int64_t intValue = 0;
  int line = 1, col = 1;
};

class FLexer {
 public:
  explicit FLexer(std::string_view s) : s_(s) {}

  std::vector<FTok> run() {
    std::vector<FTok> out;
    for (;;) {
      skip();
      FTok t = next();
      out.push_back(t);
      if (t.kind == FTok::End) break;
    }
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  int peek() const { return pos_ < s_.size() ? static_cast<unsigned char>(s_[pos_]) : -1; }
  void adv() {
    if (pos_ >= s_.size()) return;
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r') adv();
  }

  FTok next() {
    FTok t;
    t.line = line_;
    t.col = col_;
    int c = peek();
    if (c == -1) {
      t.kind = FTok::End;
      return t;
    }
    if (std::isalpha(c) || c == '_') {
      while (std::isalnum(peek()) || peek() == '_') {
        t.text.push_back(static_cast<char>(peek()));
        adv();
      }
      t.kind = FTok::Ident;
      return t;
    }
    if (std::isdigit(c) || (c == '-' && pos_ + 1 < s_.size() &&
                            std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
      if (peek() == '-') {
        t.text.push_back('-');
        adv();
      }
      while (std::isdigit(peek())) {
        t.text.push_back(static_cast<char>(peek()));
        adv();
      }
      t.kind = FTok::Int;
      try {
        t.intValue = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", t.line, t.col);
      }
      return t;
    }
    auto one = [&](FTok::Kind k, const char* txt) {
      adv();
      t.kind = k;
      t.text = txt;
      return t;
    };
    switch (c) {
      case '&': return one(FTok::Amp, "&");
      case '|': return one(FTok::Bar, "|");
      case '!': return one(FTok::Bang, "!");
      case '(': return one(FTok::LParen, "(");
      case ')': return one(FTok::RParen, ")");
      case '[': return one(FTok::LBrack, "[");
      case ']': return one(FTok::RBrack, "]");
      case '<': return one(FTok::Lt, "<");
      case '>': return one(FTok::Gt, ">");
      case '.': return one(FTok::Dot, ".");
      case ',': return one(FTok::Comma, ",");
      case '*': return one(FTok::Star, "*");
      case '-':
        adv();
        if (peek() != '>') throw ParseError("expected '->'", t.line, t.col);
        adv();
        t.kind = FTok::Arrow;
        t.text = "->";
        return t;
      default:
        throw ParseError("unexpected character in formula", t.line, t.col);
    }
  }
};

class FParser {
 public:
  explicit FParser(std::string_view s) : toks_(FLexer(s).run()) {}

  FormulaPtr run() {
    FormulaPtr f = parseImplies();
    if (!at(FTok::End)) fail("expected end of formula");
    return f;
  }

 private:
  std::vector<FTok> toks_;
  std::size_t idx_ = 0;
  int depth_ = 0;

  const FTok& cur() const { return toks_[idx_]; }
  bool at(FTok::Kind k) const { return cur().kind == k; }
  FTok take() { return toks_[idx_++]; }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, cur().line, cur().col);
  }

  struct Guard {
    FParser& p;
    explicit Guard(FParser& parser) : p(parser) {
      if (++p.depth_ > 500) throw ParseError("formula too deep", p.cur().line, p.cur().col);
    }
    ~Guard() { --p.depth_; }
  };

  FormulaPtr parseImplies() {
    Guard g(*this);
    FormulaPtr lhs = parseOr();
    if (at(FTok::Arrow)) {
      take();
      return fImplies(lhs, parseImplies());
    }
    return lhs;
  }

  FormulaPtr parseOr() {
    Guard g(*this);
    FormulaPtr f = parseAnd();
    while (at(FTok::Bar)) {
      take();
      f = fOr(f, parseAnd());
    }
    return f;
  }

  FormulaPtr parseAnd() {
    Guard g(*this);
    FormulaPtr f = parseUnary();
    while (at(FTok::Amp)) {
      take();
      f = fAnd(f, parseUnary());
    }
    return f;
  }

  FormulaPtr parseUnary() {
    Guard g(*this);
    if (at(FTok::Bang)) {
      take();
      return fNot(parseUnary());
    }
    if (at(FTok::Lt)) {
      take();
      ActionPattern p = parsePattern();
      if (!at(FTok::Gt)) fail("expected '>' to close action pattern");
      take();
      return fDiamond(std::move(p), parseUnary());
    }
    if (at(FTok::LBrack)) {
      take();
      ActionPattern p = parsePattern();
      if (!at(FTok::RBrack)) fail("expected ']' to close action pattern");
      take();
      return fBox(std::move(p), parseUnary());
    }
    if (at(FTok::LParen)) {
      take();
      FormulaPtr f = parseImplies();
      if (!at(FTok::RParen)) fail("expected ')'");
      take();
      return f;
    }
    if (at(FTok::Ident)) {
      const std::string& w = cur().text;
      if (w == "true") {
        take();
        return fTrue();
      }
      if (w == "false") {
        take();
        return fNot(fTrue());
      }
      if (w == "AG" || w == "AF" || w == "EF" || w == "EG") {
        std::string op = take().text;
        FormulaPtr sub = parseUnary();
        if (op == "AG") return fAG(sub);
        if (op == "AF") return fAF(sub);
        if (op == "EF") return fEF(sub);
        return fEG(sub);
      }
      if ((w == "A" || w == "E") && idx_ + 1 < toks_.size() &&
          toks_[idx_ + 1].kind == FTok::LBrack) {
        std::string q = take().text;
        take();  // '['
        FormulaPtr lhs = parseImplies();
        if (!at(FTok::Ident) || cur().text != "U") fail("expected 'U'");
        take();
        FormulaPtr rhs = parseImplies();
        if (!at(FTok::RBrack)) fail("expected ']'");
        take();
        return q == "A" ? fAU(lhs, rhs) : fEU(lhs, rhs);
      }
      if (w == "enabled") {
        take();
        if (!at(FTok::LParen)) fail("expected '(' after enabled");
        take();
        if (!at(FTok::Ident)) fail("expected partner name");
        Name partner{take().text};
        if (!at(FTok::Dot)) fail("expected '.'");
        take();
        if (!at(FTok::Ident)) fail("expected operation name");
        Name operation{take().text};
        if (!at(FTok::RParen)) fail("expected ')'");
        take();
        return fEnabled(partner, operation);
      }
      fail("unexpected identifier '" + w + "' in formula");
    }
    fail("expected a formula");
  }

  // pattern component: identifier-ish (keywords allowed as names) or `*`
  std::optional<Name> parsePatternName() {
    if (at(FTok::Star)) {
      take();
      return std::nullopt;
    }
    if (!at(FTok::Ident)) fail("expected name or '*' in action pattern");
    return Name{take().text};
  }

  ActionPattern parsePattern() {
    ActionPattern p;
    p.partner = parsePatternName();
    if (!at(FTok::Dot)) fail("expected '.' in action pattern");
    take();
    p.operation = parsePatternName();
    if (!at(FTok::Lt)) fail("expected '<' in action pattern");
    take();
    if (at(FTok::Gt)) {
      take();
      return p;  // exact empty argument list
    }
    if (at(FTok::Star)) {
      // `<*>` is the arity wildcard; `<*,...>` is positional
      std::size_t save = idx_;
      take();
      if (at(FTok::Gt)) {
        take();
        p.anyValues = true;
        return p;
      }
      idx_ = save;
    }
    for (;;) {
      if (at(FTok::Star)) {
        take();
        p.valuePatterns.push_back(std::nullopt);
      } else if (at(FTok::Int)) {
        p.valuePatterns.push_back(Value{take().intValue});
      } else if (at(FTok::Ident)) {
        std::string w = take().text;
        if (w == "true")
          p.valuePatterns.push_back(Value{true});
        else if (w == "false")
          p.valuePatterns.push_back(Value{false});
        else
          p.valuePatterns.push_back(Value{Name{w}});
      } else {
        fail("expected value or '*' in action pattern");
      }
      if (at(FTok::Comma)) {
        take();
        continue;
      }
      break;
    }
    if (!at(FTok::Gt)) fail("expected '>' to close action pattern");
    take();
    return p;
  }
};

}  // namespace

FormulaPtr parseFormula(std::string_view source) {
  FParser p(source);
  return p.run();
}

// --- checking ----------------------------------------------------------------------

namespace {

struct Adjacency {
  // per state: indices into lts.transitions
  std::vector<std::vector<std::size_t>> out;

  explicit Adjacency(const Lts& l) : out(l.states.size()) {
    for (std::size_t i = 0; i < l.transitions.size(); ++i)
      out[l.transitions[i].src].push_back(i);
  }
};

class Checker {
 public:
  Checker(const Lts& l, CheckResult& result) : lts_(l), adj_(l), result_(result) {}

  std::vector<bool> sat(const FormulaPtr& f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    std::vector<bool> s = compute(f);
    memo_.emplace(f.get(), s);
    return s;
  }

  const Adjacency& adjacency() const { return adj_; }

 private:
  const Lts& lts_;
  Adjacency adj_;
  CheckResult& result_;
  std::map<const Formula*, std::vector<bool>> memo_;

  std::size_t n() const { return lts_.states.size(); }

  void noteRounds(std::size_t rounds) {
    result_.maxFixpointRounds = std::max(result_.maxFixpointRounds, rounds);
  }

  std::vector<bool> compute(const FormulaPtr& f) {
    if (std::holds_alternative<FTrue>(f->node)) return std::vector<bool>(n(), true);
    if (const auto* nt = std::get_if<FNot>(&f->node)) {
      std::vector<bool> s = sat(nt->sub);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = !s[i];
      return s;
    }
    if (const auto* a = std::get_if<FAnd>(&f->node)) {
      std::vector<bool> x = sat(a->lhs), y = sat(a->rhs);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] && y[i];
      return x;
    }
    if (const auto* o = std::get_if<FOr>(&f->node)) {
      std::vector<bool> x = sat(o->lhs), y = sat(o->rhs);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] || y[i];
      return x;
    }
    if (const auto* im = std::get_if<FImplies>(&f->node)) {
      std::vector<bool> x = sat(im->lhs), y = sat(im->rhs);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = !x[i] || y[i];
      return x;
    }
    if (const auto* d = std::get_if<FDiamond>(&f->node)) {
      std::vector<bool> sub = sat(d->sub);
      std::vector<bool> s(n(), false);
      for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t ti : adj_.out[i]) {
          const auto& tr = lts_.transitions[ti];
          if (d->pattern.matches(tr.label) && sub[tr.dst]) {
            s[i] = true;
            break;
          }
        }
      return s;
    }
    if (const auto* b = std::get_if<FBox>(&f->node)) {
      std::vector<bool> sub = sat(b->sub);
      std::vector<bool> s(n(), true);
      for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t ti : adj_.out[i]) {
          const auto& tr = lts_.transitions[ti];
          if (b->pattern.matches(tr.label) && !sub[tr.dst]) {
            s[i] = false;
            break;
          }
        }
      return s;
    }
    if (const auto* ef = std::get_if<FEF>(&f->node)) return lfpEU(fTrue(), ef->sub);
    if (const auto* eu = std::get_if<FEU>(&f->node)) return lfpEU(eu->lhs, eu->rhs);
    if (const auto* af = std::get_if<FAF>(&f->node)) return lfpAU(fTrue(), af->sub);
    if (const auto* au = std::get_if<FAU>(&f->node)) return lfpAU(au->lhs, au->rhs);
    if (const auto* eg = std::get_if<FEG>(&f->node)) {
      // gfp: keep states that satisfy sub and can stay inside (or deadlock)
      std::vector<bool> s = sat(eg->sub);
      std::size_t rounds = 0;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n(); ++i) {
          if (!s[i]) continue;
          bool keep = adj_.out[i].empty();
          for (std::size_t ti : adj_.out[i])
            if (s[lts_.transitions[ti].dst]) keep = true;
          if (!keep) {
            s[i] = false;
            changed = true;
          }
        }
        if (changed) ++rounds;
      }
      noteRounds(rounds);
      return s;
    }
    if (const auto* ag = std::get_if<FAG>(&f->node)) {
      // gfp: keep states that satisfy sub and whose successors all stay
      std::vector<bool> s = sat(ag->sub);
      std::size_t rounds = 0;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n(); ++i) {
          if (!s[i]) continue;
          for (std::size_t ti : adj_.out[i]) {
            if (!s[lts_.transitions[ti].dst]) {
              s[i] = false;
              changed = true;
              break;
            }
          }
        }
        if (changed) ++rounds;
      }
      noteRounds(rounds);
      return s;
    }
    const auto& en = std::get<FEnabled>(f->node);
    if (!lts_.hasTerms())
      throw std::invalid_argument(
          "enabled(" + en.partner.text + "." + en.operation.text +
          ") requires a term-backed LTS; imported .aut states carry no terms");
    std::vector<bool> s(n(), false);
    for (std::size_t i = 0; i < n(); ++i) {
      Config cfg{lts_.model, lts_.states[i].term, lts_.states[i].freshCounter};
      s[i] = receiveExposed(cfg, en.partner, en.operation);
    }
    return s;
  }

  // lfp X = satQ ∪ (satP ∩ pre∃(X))
  std::vector<bool> lfpEU(const FormulaPtr& p, const FormulaPtr& q) {
    std::vector<bool> sp = sat(p), s = sat(q);
    std::size_t rounds = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n(); ++i) {
        if (s[i] || !sp[i]) continue;
        for (std::size_t ti : adj_.out[i]) {
          if (s[lts_.transitions[ti].dst]) {
            s[i] = true;
            changed = true;
            break;
          }
        }
      }
      if (changed) ++rounds;
    }
    noteRounds(rounds);
    return s;
  }

  // lfp X = satQ ∪ (satP ∩ {s : succ(s) ≠ ∅ ∧ ∀succ ∈ X})
  std::vector<bool> lfpAU(const FormulaPtr& p, const FormulaPtr& q) {
    std::vector<bool> sp = sat(p), s = sat(q);
    std::size_t rounds = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n(); ++i) {
        if (s[i] || !sp[i] || adj_.out[i].empty()) continue;
        bool all = true;
        for (std::size_t ti : adj_.out[i])
          if (!s[lts_.transitions[ti].dst]) {
            all = false;
            break;
          }
        if (all) {
          s[i] = true;
          changed = true;
        }
      }
      if (changed) ++rounds;
    }
    noteRounds(rounds);
    return s;
  }
};

// --- evidence ------------------------------------------------------------------

class Evidence {
 public:
  Evidence(const Lts& l, Checker& c) : lts_(l), checker_(c) {}

  std::vector<TraceStep> build(std::size_t s, const FormulaPtr& f, bool witness) {
    std::set<std::size_t> guard;
    return go(s, f, witness, guard);
  }

 private:
  const Lts& lts_;
  Checker& checker_;

  const std::vector<std::size_t>& out(std::size_t s) const {
    return checker_.adjacency().out[s];
  }
  const LtsTransition& tr(std::size_t i) const { return lts_.transitions[i]; }

  // shortest path from `from` to any state in `target`; empty when from is
  // already a target; unrestricted intermediate states
  std::optional<std::vector<TraceStep>> bfsTo(std::size_t from,
                                              const std::vector<bool>& target) {
    if (target[from]) return std::vector<TraceStep>{};
    std::vector<int> cameBy(lts_.states.size(), -1);
    std::vector<bool> seen(lts_.states.size(), false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    std::optional<std::size_t> found;
    while (!queue.empty() && !found) {
      std::size_t s = queue.front();
      queue.pop_front();
      for (std::size_t ti : out(s)) {
        std::size_t d = tr(ti).dst;
        if (seen[d]) continue;
        seen[d] = true;
        cameBy[d] = static_cast<int>(ti);
        if (target[d]) {
          found = d;
          break;
        }
        queue.push_back(d);
      }
    }
    if (!found) return std::nullopt;
    std::vector<TraceStep> steps;
    for (std::size_t s = *found; s != from;) {
      const auto& t = tr(static_cast<std::size_t>(cameBy[s]));
      steps.push_back({t.src, t.label, t.dst});
      s = t.src;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
  }

  // first-successor maximal path from `from`, preferring successors inside
  // `stay` when given; stops at a deadlock or on the first revisit
  std::vector<TraceStep> maximalPath(std::size_t from, const std::vector<bool>* stay) {
    std::vector<TraceStep> steps;
    std::set<std::size_t> visited{from};
    std::size_t s = from;
    for (;;) {
      if (out(s).empty()) break;
      std::optional<std::size_t> pick;
      if (stay) {
        for (std::size_t ti : out(s))
          if ((*stay)[tr(ti).dst]) {
            pick = ti;
            break;
          }
      }
      if (!pick) pick = out(s).front();
      const auto& t = tr(*pick);
      steps.push_back({t.src, t.label, t.dst});
      if (!visited.insert(t.dst).second) break;  // lasso closed
      s = t.dst;
    }
    return steps;
  }

  std::vector<TraceStep> go(std::size_t s, const FormulaPtr& f, bool witness,
                            std::set<std::size_t>& guard) {
    if (std::holds_alternative<FTrue>(f->node)) return {};
    if (std::holds_alternative<FEnabled>(f->node)) return {};
    if (const auto* nt = std::get_if<FNot>(&f->node)) return go(s, nt->sub, !witness, guard);

    if (const auto* a = std::get_if<FAnd>(&f->node)) {
      if (witness) {
        auto w = go(s, a->lhs, true, guard);
        return w.empty() ? go(s, a->rhs, true, guard) : w;
      }
      if (!checker_.sat(a->lhs)[s]) return go(s, a->lhs, false, guard);
      return go(s, a->rhs, false, guard);
    }
    if (const auto* o = std::get_if<FOr>(&f->node)) {
      if (witness) {
        if (checker_.sat(o->lhs)[s]) return go(s, o->lhs, true, guard);
        return go(s, o->rhs, true, guard);
      }
      auto c = go(s, o->lhs, false, guard);
      return c.empty() ? go(s, o->rhs, false, guard) : c;
    }
    if (const auto* im = std::get_if<FImplies>(&f->node)) {
      if (witness) {
        if (!checker_.sat(im->lhs)[s]) return go(s, im->lhs, false, guard);
        return go(s, im->rhs, true, guard);
      }
      return go(s, im->rhs, false, guard);
    }
    if (const auto* d = std::get_if<FDiamond>(&f->node)) {
      if (!witness) return {};
      std::vector<bool> sub = checker_.sat(d->sub);
      for (std::size_t ti : out(s)) {
        const auto& t = tr(ti);
        if (d->pattern.matches(t.label) && sub[t.dst]) return {{t.src, t.label, t.dst}};
      }
      return {};
    }
    if (const auto* b = std::get_if<FBox>(&f->node)) {
      if (witness) return {};
      std::vector<bool> sub = checker_.sat(b->sub);
      for (std::size_t ti : out(s)) {
        const auto& t = tr(ti);
        if (b->pattern.matches(t.label) && !sub[t.dst]) {
          std::vector<TraceStep> steps{{t.src, t.label, t.dst}};
          auto rest = go(t.dst, b->sub, false, guard);
          steps.insert(steps.end(), rest.begin(), rest.end());
          return steps;
        }
      }
      return {};
    }
    if (const auto* ef = std::get_if<FEF>(&f->node)) {
      if (witness) {
        auto path = bfsTo(s, checker_.sat(ef->sub));
        return path ? *path : std::vector<TraceStep>{};
      }
      return maximalPath(s, nullptr);
    }
    if (const auto* ag = std::get_if<FAG>(&f->node)) {
      if (witness) return {};
      std::vector<bool> bad = checker_.sat(ag->sub);
      bad.flip();
      auto path = bfsTo(s, bad);
      if (!path) return {};
      std::size_t end = path->empty() ? s : path->back().dst;
      if (!guard.insert(end).second) return *path;
      auto rest = go(end, ag->sub, false, guard);
      path->insert(path->end(), rest.begin(), rest.end());
      return *path;
    }
    if (const auto* af = std::get_if<FAF>(&f->node)) {
      if (witness) return {};
      std::vector<bool> notAF = checker_.sat(f);  // memoized: this is AF's set
      notAF.flip();
      return maximalPath(s, &notAF);
    }
    if (const auto* eg = std::get_if<FEG>(&f->node)) {
      if (!witness) return {};
      std::vector<bool> keep = checker_.sat(f);
      return maximalPath(s, &keep);
    }
    if (const auto* eu = std::get_if<FEU>(&f->node)) {
      if (!witness) return {};
      // restricted walk inside sat(EU) reaching sat(rhs)
      std::vector<bool> target = checker_.sat(eu->rhs);
      std::vector<bool> inside = checker_.sat(f);
      if (target[s]) return {};
      std::vector<TraceStep> steps;
      std::set<std::size_t> visited{s};
      std::size_t pos = s;
      while (!target[pos]) {
        std::optional<std::size_t> pick;
        for (std::size_t ti : out(pos)) {
          std::size_t dst = tr(ti).dst;
          if (target[dst] || (inside[dst] && !visited.count(dst))) {
            pick = ti;
            if (target[dst]) break;
          }
        }
        if (!pick) break;
        const auto& t = tr(*pick);
        steps.push_back({t.src, t.label, t.dst});
        visited.insert(t.dst);
        pos = t.dst;
      }
      return steps;
    }
    if (const auto* au = std::get_if<FAU>(&f->node)) {
      if (witness) return {};
      // a path that leaves lhs before reaching rhs, or avoids rhs forever
      std::vector<bool> badState = checker_.sat(au->lhs);
      std::vector<bool> rhs = checker_.sat(au->rhs);
      for (std::size_t i = 0; i < badState.size(); ++i)
        badState[i] = !badState[i] && !rhs[i];
      if (auto path = bfsTo(s, badState)) return *path;
      std::vector<bool> notAU = checker_.sat(f);
      notAU.flip();
      return maximalPath(s, &notAU);
    }
    return {};
  }
};

std::set<std::string> modelEndpointNames(const Model& m) {
  std::set<std::string> names;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
    if (const auto* i = std::get_if<Invoke>(&t->node)) {
      names.insert(i->partner.text);
      names.insert(i->operation.text);
    } else if (const auto* r = std::get_if<Receive>(&t->node)) {
      names.insert(r->partner.text);
      names.insert(r->operation.text);
      walk(r->continuation);
    } else if (const auto* p = std::get_if<Parallel>(&t->node)) {
      for (const auto& c : p->children) walk(c);
    } else if (const auto* c = std::get_if<Choice>(&t->node)) {
      for (const auto& b : c->branches) walk(b);
    } else if (const auto* d = std::get_if<Delim>(&t->node)) {
      walk(d->body);
    } else if (const auto* pr = std::get_if<Protect>(&t->node)) {
      walk(pr->body);
    } else if (const auto* rp = std::get_if<Replicate>(&t->node)) {
      walk(rp->body);
    }
  };
  for (const auto& d : m.definitions) walk(d.body);
  walk(m.main);
  return names;
}

void warnUnknownNames(const Lts& l, const FormulaPtr& f, CheckResult& result) {
  std::set<std::string> known;
  if (l.model) {
    known = modelEndpointNames(*l.model);
  } else {
    for (const auto& t : l.transitions)
      if (const auto* c = std::get_if<CommLabel>(&t.label)) {
        known.insert(c->partner.text);
        known.insert(c->operation.text);
      }
  }
  auto checkName = [&](const std::optional<Name>& n, const char* what) {
    if (n && !known.count(n->text))
      result.warnings.push_back(std::string(what) + " '" + n->text +
                                "' does not occur in the model (typo?)");
  };
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (const auto* nt = std::get_if<FNot>(&g->node)) return walk(nt->sub);
    if (const auto* a = std::get_if<FAnd>(&g->node)) {
      walk(a->lhs);
      walk(a->rhs);
      return;
    }
    if (const auto* o = std::get_if<FOr>(&g->node)) {
      walk(o->lhs);
      walk(o->rhs);
      return;
    }
    if (const auto* im = std::get_if<FImplies>(&g->node)) {
      walk(im->lhs);
      walk(im->rhs);
      return;
    }
    if (const auto* d = std::get_if<FDiamond>(&g->node)) {
      checkName(d->pattern.partner, "pattern partner");
      checkName(d->pattern.operation, "pattern operation");
      return walk(d->sub);
    }
    if (const auto* b = std::get_if<FBox>(&g->node)) {
      checkName(b->pattern.partner, "pattern partner");
      checkName(b->pattern.operation, "pattern operation");
      return walk(b->sub);
    }
    if (const auto* ef = std::get_if<FEF>(&g->node)) return walk(ef->sub);
    if (const auto* af = std::get_if<FAF>(&g->node)) return walk(af->sub);
    if (const auto* eg = std::get_if<FEG>(&g->node)) return walk(eg->sub);
    if (const auto* ag = std::get_if<FAG>(&g->node)) return walk(ag->sub);
    if (const auto* eu = std::get_if<FEU>(&g->node)) {
      walk(eu->lhs);
      walk(eu->rhs);
      return;
    }
    if (const auto* au = std::get_if<FAU>(&g->node)) {
      walk(au->lhs);
      walk(au->rhs);
      return;
    }
    if (const auto* en = std::get_if<FEnabled>(&g->node)) {
      checkName(en->partner, "enabled partner");
      checkName(en->operation, "enabled operation");
    }
  };
  walk(f);
}

}  // namespace

CheckResult check(const Lts& l, const FormulaPtr& f) {
  CheckResult result;
  if (l.truncated != Truncation::None) {
    result.unsoundTruncation = true;
    result.warnings.push_back("LTS is truncated; verdicts may be unsound");
  }
  warnUnknownNames(l, f, result);
  Checker checker(l, result);
  result.satisfyingStates = checker.sat(f);
  result.holds = result.satisfyingStates[l.initial];
  Evidence ev(l, checker);
  result.evidence = ev.build(l.initial, f, result.holds);
  return result;
}

CheckResult checkFromAut(const std::string& autText, const FormulaPtr& f) {
  Lts l = parseAut(autText);
  return check(l, f);
}

// --- property files ------------------------------------------------------------------

std::vector<PropEntry> parsePropFile(std::string_view source) {
  std::vector<PropEntry> out;
  std::istringstream is{std::string(source)};
  std::string line;
  int lineNo = 0;
  std::string pending;
  std::string pendingName;
  int pendingLine = 0;

  auto flush = [&]() {
    if (pendingName.empty()) return;
    try {
      out.push_back({pendingName, parseFormula(pending)});
    } catch (const ParseError& e) {
      throw ParseError("in property '" + pendingName + "': " + e.what(),
                       pendingLine, 1);
    }
    pendingName.clear();
    pending.clear();
  };

  while (std::getline(is, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string stripped = line;
    stripped.erase(0, stripped.find_first_not_of(" \t"));
    while (!stripped.empty() && (stripped.back() == ' ' || stripped.back() == '\t'))
      stripped.pop_back();
    if (stripped.empty()) {
      flush();
      continue;
    }
    if (stripped.rfind("prop ", 0) == 0 || stripped.rfind("prop\t", 0) == 0) {
      flush();
      auto colon = stripped.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected ':' after property name", lineNo, 1);
      pendingName = stripped.substr(5, colon - 5);
      pendingName.erase(0, pendingName.find_first_not_of(" \t"));
      while (!pendingName.empty() &&
             (pendingName.back() == ' ' || pendingName.back() == '\t'))
        pendingName.pop_back();
      if (pendingName.empty())
        throw ParseError("property needs a name", lineNo, 1);
      pending = stripped.substr(colon + 1);
      pendingLine = lineNo;
    } else {
      if (pendingName.empty())
        throw ParseError("expected 'prop <name>: <formula>'", lineNo, 1);
      pending += " " + stripped;
    }
  }
  flush();
  return out;
}

std::string traceText(const std::vector<TraceStep>& steps, std::size_t initial) {
  std::ostringstream os;
  if (steps.empty()) {
    os << "    (" << initial << ")\n";
    return os.str();
  }
  for (const auto& s : steps)
    os << "    (" << s.src << ") --" << labelText(s.label) << "--> (" << s.dst << ")\n";
  return os.str();
}

}  // namespace cows
