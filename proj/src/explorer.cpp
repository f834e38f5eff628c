#include "cows/explorer.hpp"

#include <algorithm>
#include <set>
#include <thread>
#include <unordered_map>

namespace cows {

// --- canonical encoding -------------------------------------------------------

namespace {

struct CanonEnv {
  std::vector<Name> binders;

  std::string encode(const Name& n) const {
    for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i)
      if (binders[static_cast<std::size_t>(i)] == n)
        return "@" + std::to_string(static_cast<int>(binders.size()) - 1 - i);
    return "'" + n.text;
  }
};

std::string encodeValue(const Value& v, const CanonEnv& env) {
  if (v.isInt()) return "i" + std::to_string(v.asInt());
  if (v.isBool()) return v.asBool() ? "b1" : "b0";
  return "n" + env.encode(v.asName());
}

std::string encodeExpr(const ExprPtr& e, const CanonEnv& env) {
  if (const auto* l = std::get_if<Lit>(&e->node)) return "l" + encodeValue(l->value, env);
  if (const auto* v = std::get_if<VarRef>(&e->node)) return "v" + env.encode(v->name);
  const auto& g = std::get<GtExpr>(e->node);
  return "g(" + encodeExpr(g.lhs, env) + "," + encodeExpr(g.rhs, env) + ")";
}

std::string encodeTerm(const TermPtr& t, CanonEnv& env) {
  if (std::holds_alternative<Nil>(t->node)) return "0";
  if (const auto* i = std::get_if<Invoke>(&t->node)) {
    std::string s = "I(" + env.encode(i->partner) + "," + env.encode(i->operation) + ";";
    for (std::size_t k = 0; k < i->args.size(); ++k) {
      if (k) s += ",";
      s += encodeExpr(i->args[k], env);
    }
    return s + ")";
  }
  if (const auto* r = std::get_if<Receive>(&t->node)) {
    std::string s = "R(" + env.encode(r->partner) + "," + env.encode(r->operation) + ";";
    for (std::size_t k = 0; k < r->params.size(); ++k) {
      if (k) s += ",";
      if (const auto* bv = std::get_if<BindVar>(&r->params[k]))
        s += "?" + env.encode(bv->name);
      else
        s += "=" + encodeValue(std::get<MatchVal>(r->params[k]).value, env);
    }
    return s + ";" + encodeTerm(r->continuation, env) + ")";
  }
  if (const auto* p = std::get_if<Parallel>(&t->node)) {
    std::vector<std::string> parts;
    parts.reserve(p->children.size());
    for (const auto& c : p->children) parts.push_back(encodeTerm(c, env));
    std::sort(parts.begin(), parts.end());
    std::string s = "P(";
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k) s += ",";
      s += parts[k];
    }
    return s + ")";
  }
  if (const auto* c = std::get_if<Choice>(&t->node)) {
    std::vector<std::string> parts;
    parts.reserve(c->branches.size());
    for (const auto& b : c->branches) parts.push_back(encodeTerm(b, env));
    std::sort(parts.begin(), parts.end());
    std::string s = "C(";
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k) s += ",";
      s += parts[k];
    }
    return s + ")";
  }
  if (const auto* d = std::get_if<Delim>(&t->node)) {
    char kind = d->kind == DelimKind::Var ? 'v' : d->kind == DelimKind::Kill ? 'k' : 'n';
    env.binders.push_back(d->bound);
    std::string body = encodeTerm(d->body, env);
    env.binders.pop_back();
    return std::string("D") + kind + "(" + body + ")";
  }
  if (const auto* k = std::get_if<Kill>(&t->node)) return "K(" + env.encode(k->label) + ")";
  if (const auto* pr = std::get_if<Protect>(&t->node)) {
    return "T(" + encodeTerm(pr->body, env) + ")";
  }
  if (const auto* rp = std::get_if<Replicate>(&t->node)) {
    return "S(" + encodeTerm(rp->body, env) + ")";
  }
  const auto& call = std::get<Call>(t->node);
  std::string s = "L('" + call.definition.text + "';";
  for (std::size_t k = 0; k < call.args.size(); ++k) {
    if (k) s += ",";
    s += encodeExpr(call.args[k], env);
  }
  return s + ")";
}

}  // namespace

std::string canonicalKey(const TermPtr& t) {
  CanonEnv env;
  return encodeTerm(t, env);
}

// --- exploration ----------------------------------------------------------------

namespace {

struct Successor {
  std::string labelText;
  Label label;
  std::string key;
  TermPtr term;
  std::int64_t fresh;
};

struct Expansion {
  std::vector<Successor> successors;
  std::vector<std::string> diagnostics;
};

Expansion expandState(const Config& cfg, bool keepTau) {
  Expansion out;
  StepResult step = enabledTransitions(cfg);
  out.diagnostics = std::move(step.diagnostics);
  for (auto& tr : step.transitions) {
    Config target = tr.target;
    if (!keepTau) target = tauClosure(target, out.diagnostics);
    Successor s;
    s.labelText = labelText(tr.label);
    s.label = std::move(tr.label);
    s.key = canonicalKey(target.term);
    s.term = target.term;
    s.fresh = target.freshCounter;
    out.successors.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Lts explore(const Model& m, const ExploreOptions& opts) {
  Lts lts;
  auto model = std::make_shared<Model>(m);
  lts.model = model;

  std::vector<std::string> rootDiags;
  Config root{model, simplify(m.main), 0};
  if (!opts.keepTau) root = tauClosure(root, rootDiags);

  std::unordered_map<std::string, std::size_t> index;
  std::set<std::string> seenDiags;
  auto addDiag = [&](const std::string& d) {
    if (seenDiags.insert(d).second) lts.diagnostics.push_back(d);
  };
  for (const auto& d : rootDiags) addDiag(d);

  std::string rootKey = canonicalKey(root.term);
  lts.states.push_back({rootKey, root.term, root.freshCounter, 0});
  index.emplace(rootKey, 0);

  std::set<std::string> transSeen;  // "src|label|dst" dedup
  std::vector<std::size_t> frontier{0};
  std::size_t depth = 0;

  unsigned workers = std::max(1u, opts.workers);
  while (!frontier.empty()) {
    bool depthLimit = opts.maxDepth && depth >= *opts.maxDepth;

    // expand the whole level (in parallel when requested); results are
    // merged strictly in frontier order so numbering matches a single
    // worker run
    std::vector<Expansion> results(frontier.size());
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const LtsState& st = lts.states[frontier[i]];
        results[i] = expandState(Config{model, st.term, st.freshCounter}, opts.keepTau);
      }
    };
    if (workers == 1 || frontier.size() <= 1) {
      work(0, frontier.size());
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (frontier.size() + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = std::min(frontier.size(), static_cast<std::size_t>(w) * chunk);
        std::size_t end = std::min(frontier.size(), begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
      for (auto& th : pool) th.join();
    }

    if (depthLimit) {
      for (const auto& r : results)
        if (!r.successors.empty()) lts.truncated = Truncation::MaxDepth;
      break;
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      std::size_t src = frontier[i];
      for (const auto& d : results[i].diagnostics) addDiag(d);
      for (const auto& s : results[i].successors) {
        std::size_t dst;
        auto it = index.find(s.key);
        if (it != index.end()) {
          dst = it->second;
        } else {
          if (lts.states.size() >= opts.maxStates) {
            lts.truncated = Truncation::MaxStates;
            continue;
          }
          dst = lts.states.size();
          lts.states.push_back({s.key, s.term, s.fresh, depth + 1});
          index.emplace(s.key, dst);
          next.push_back(dst);
        }
        std::string tkey =
            std::to_string(src) + "|" + s.labelText + "|" + std::to_string(dst);
        if (transSeen.insert(tkey).second)
          lts.transitions.push_back({src, s.label, dst});
      }
    }
    frontier = std::move(next);
    ++depth;
  }
  return lts;
}

}  // namespace cows
