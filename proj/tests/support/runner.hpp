#ifndef COWS_TESTS_RUNNER_HPP
#define COWS_TESTS_RUNNER_HPP

// Small helper for driving the CLI binary from tests via /bin/sh.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace cows::testrun {

struct RunResult {
  int exitCode = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string tempDir() {
  static std::string dir = [] {
    std::string tmpl = "/tmp/cowsadapt-tests-XXXXXX";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s", tmpl.c_str());
    const char* d = mkdtemp(buf);
    return std::string(d ? d : "/tmp");
  }();
  return dir;
}

inline std::string tempPath(const std::string& name) {
  static int serial = 0;
  return tempDir() + "/" + std::to_string(serial++) + "-" + name;
}

/// Runs `command` under /bin/sh, capturing stdout/stderr and the exit code.
inline RunResult run(const std::string& command) {
  RunResult r;
  std::string outFile = tempPath("out");
  std::string errFile = tempPath("err");
  std::string full = command + " >" + outFile + " 2>" + errFile;
  int status = std::system(full.c_str());
  if (status == -1)
    r.exitCode = -1;
  else if (WIFEXITED(status))
    r.exitCode = WEXITSTATUS(status);
  else
    r.exitCode = 128;
  r.out = slurp(outFile);
  r.err = slurp(errFile);
  std::remove(outFile.c_str());
  std::remove(errFile.c_str());
  return r;
}

inline void writeFile(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

}  // namespace cows::testrun

#endif
