#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cows/aut.hpp"
#include "cows/parser.hpp"
#include "cows/printer.hpp"
#include "cows/report.hpp"
#include "cows/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;   // some property failed
constexpr int kExitError = 2;  // usage, I/O or parse error
constexpr int kExitTruncated = 3;

std::string readInput(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void writeOutput(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << data;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::size_t defaultMaxStates() {
  if (const char* env = std::getenv("COWS_ADAPT_MAX_STATES")) {
    try {
      long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
      std::cerr << "WARN: ignoring bad COWS_ADAPT_MAX_STATES value\n";
    }
  }
  return 100000;
}

void printDiagnostics(const cows::Lts& lts) {
  for (const auto& d : lts.diagnostics) std::cerr << "WARN: " << d << "\n";
  if (lts.truncated != cows::Truncation::None)
    std::cerr << "WARN: exploration truncated (" << truncationText(lts.truncated)
              << ")\n";
}

struct ExploreFlags {
  std::size_t maxStates = defaultMaxStates();
  std::size_t maxDepth = 0;  // 0 = unbounded
  bool keepTau = false;
  unsigned workers = 1;

  cows::ExploreOptions toOptions() const {
    cows::ExploreOptions o;
    o.maxStates = maxStates;
    if (maxDepth > 0) o.maxDepth = maxDepth;
    o.keepTau = keepTau;
    o.workers = workers;
    return o;
  }
};

void addExploreFlags(CLI::App* cmd, ExploreFlags& f) {
  cmd->add_option("--max-states", f.maxStates, "state bound (default 100000)");
  cmd->add_option("--max-depth", f.maxDepth, "depth bound (0 = unbounded)");
  cmd->add_flag("--keep-tau", f.keepTau, "keep definition-call tau steps");
  cmd->add_option("--workers", f.workers, "exploration worker threads");
}

int cmdParse(const std::string& path, bool dumpAstFlag) {
  cows::Model m = cows::parseModel(readInput(path));
  if (dumpAstFlag) std::cout << cows::dumpAst(m);
  return kExitOk;
}

int cmdExplore(const std::string& path, const ExploreFlags& flags,
               const std::string& outPath) {
  cows::Model m = cows::parseModel(readInput(path));
  cows::Lts lts = cows::explore(m, flags.toOptions());
  printDiagnostics(lts);
  std::cout << "states: " << lts.states.size() << "\n"
            << "transitions: " << lts.transitions.size() << "\n"
            << "truncated: " << truncationText(lts.truncated) << "\n";
  if (!outPath.empty()) writeOutput(outPath, cows::exportAut(lts));
  return lts.truncated != cows::Truncation::None ? kExitTruncated : kExitOk;
}

int cmdCheck(const std::string& path, const std::string& propPath,
             const ExploreFlags& flags, bool withTrace,
             const std::string& reportPath) {
  auto started = std::chrono::steady_clock::now();
  cows::Model m = cows::parseModel(readInput(path));
  auto props = cows::parsePropFile(readInput(propPath));
  cows::Lts lts = cows::explore(m, flags.toOptions());
  printDiagnostics(lts);

  cows::RunReport report;
  report.modelRef = path;
  report.maxStates = flags.maxStates;
  if (flags.maxDepth > 0) report.maxDepth = flags.maxDepth;
  report.keepTau = flags.keepTau;
  report.workers = flags.workers;
  report.numStates = lts.states.size();
  report.numTransitions = lts.transitions.size();
  report.truncated = lts.truncated;

  bool allHold = true;
  for (const auto& p : props) {
    cows::CheckResult r = cows::check(lts, p.formula);
    for (const auto& w : r.warnings) std::cerr << "WARN: " << w << "\n";
    std::cout << p.name << ": " << (r.holds ? "HOLDS" : "FAILS") << "\n";
    if (withTrace && !r.evidence.empty()) std::cout << traceText(r.evidence, lts.initial);
    if (!r.holds) allHold = false;
    report.verdicts.push_back({p.name, r.holds, r.evidence});
  }
  report.durationMs =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                started)
          .count();
  if (!reportPath.empty()) writeOutput(reportPath, cows::reportStructured(report));
  if (lts.truncated != cows::Truncation::None) return kExitTruncated;
  return allHold ? kExitOk : kExitFail;
}

int cmdScenario(const std::string& name, const std::string& paramsText,
                const std::string& emitPath) {
  if (name != "tollbooth") throw std::runtime_error("unknown scenario '" + name + "'");
  cows::TollboothParams params;
  if (!paramsText.empty()) {
    std::int64_t vals[4];
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      auto comma = paramsText.find(',', start);
      bool last = i == 3;
      if (last != (comma == std::string::npos))
        throw std::runtime_error("expected --params a,b,c,d");
      std::string tok = paramsText.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        std::size_t used = 0;
        vals[i] = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (...) {
        throw std::runtime_error("bad integer '" + tok + "' in --params");
      }
      start = comma + 1;
    }
    params = {vals[0], vals[1], vals[2], vals[3]};
  }
  writeOutput(emitPath, cows::tollboothSource(params));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COWS-subset orchestration calculus: parser, state-space "
               "explorer and action-based branching-time checker"};
  app.require_subcommand(1);

  std::string parsePath;
  bool dumpAstFlag = false;
  auto* parseCmd = app.add_subcommand("parse", "parse a .cows model");
  parseCmd->add_option("file", parsePath, "model file ('-' = stdin)")->required();
  parseCmd->add_flag("--dump-ast", dumpAstFlag, "print the AST");

  std::string explorePath, outPath;
  ExploreFlags exploreFlags;
  auto* exploreCmd = app.add_subcommand("explore", "build the state space");
  exploreCmd->add_option("file", explorePath, "model file ('-' = stdin)")->required();
  addExploreFlags(exploreCmd, exploreFlags);
  exploreCmd->add_option("--out", outPath, "write Aldebaran .aut ('-' = stdout)");

  std::string checkPath, propPath, reportPath;
  ExploreFlags checkFlags;
  bool withTrace = false;
  auto* checkCmd = app.add_subcommand("check", "explore and check properties");
  checkCmd->add_option("file", checkPath, "model file ('-' = stdin)")->required();
  checkCmd->add_option("--prop", propPath, ".prop property file")->required();
  addExploreFlags(checkCmd, checkFlags);
  checkCmd->add_flag("--trace", withTrace, "print evidence traces");
  checkCmd->add_option("--report", reportPath, "write a structured report");

  std::string scenarioName, paramsText, emitPath = "-";
  auto* scenarioCmd = app.add_subcommand("scenario", "emit a bundled scenario model");
  scenarioCmd->add_option("name", scenarioName, "scenario name")->required();
  scenarioCmd->add_option("--params", paramsText, "a,b,c,d integer parameters");
  scenarioCmd->add_option("--emit", emitPath, "output file ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (parseCmd->parsed()) return cmdParse(parsePath, dumpAstFlag);
    if (exploreCmd->parsed()) return cmdExplore(explorePath, exploreFlags, outPath);
    if (checkCmd->parsed())
      return cmdCheck(checkPath, propPath, checkFlags, withTrace, reportPath);
    if (scenarioCmd->parsed()) return cmdScenario(scenarioName, paramsText, emitPath);
  } catch (const cows::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
