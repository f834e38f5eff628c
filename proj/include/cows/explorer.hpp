#ifndef COWS_EXPLORER_HPP
#define COWS_EXPLORER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cows/semantics.hpp"

namespace cows {

/// Canonical byte encoding of a term: de-Bruijn indices for delimited names,
/// parallel components and choice branches sorted as multisets. Two terms
/// that differ only by binder renaming or parallel-component order encode
/// identically.
std::string canonicalKey(const TermPtr& t);

enum class Truncation { None, MaxStates, MaxDepth };

struct ExploreOptions {
  std::size_t maxStates = 100000;
  std::optional<std::size_t> maxDepth;  // nullopt = unbounded
  bool keepTau = false;                 // keep definition-call tau steps
  unsigned workers = 1;
};

struct LtsState {
  std::string key;
  TermPtr term;  // null for LTSes imported from .aut text
  std::int64_t freshCounter = 0;
  std::size_t depth = 0;
};

struct LtsTransition {
  std::size_t src;
  Label label;
  std::size_t dst;
};

struct Lts {
  std::vector<LtsState> states;
  std::size_t initial = 0;
  std::vector<LtsTransition> transitions;
  Truncation truncated = Truncation::None;
  std::vector<std::string> diagnostics;
  std::shared_ptr<const Model> model;  // null for imported LTSes

  bool hasTerms() const { return model != nullptr; }
};

/// Breadth-first closure of enabledTransitions from the model's initial
/// configuration. State identity is the canonical key; numbering follows
/// first discovery in BFS order, which makes exports byte-stable. With
/// keepTau = false (default) definition calls are unfolded before a state is
/// admitted, so states are call-free and no tau transitions appear.
/// Exploration with N workers produces output identical to 1 worker.
Lts explore(const Model& m, const ExploreOptions& opts = {});

}  // namespace cows

#endif
