#pragma once

// Shared test scaffolding: throwaway directories and a tiny process runner
// for the CLI round-trip tests.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testutil {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    std::random_device rd;
    std::ostringstream name;
    name << "farmsift-test-" << std::hex << rd() << rd();
    path = fs::temp_directory_path() / name.str();
    fs::create_directories(path);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

inline fs::path write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command with stdout/stderr captured into scratch files.
inline RunResult run(const std::string& cmd, const fs::path& scratch) {
  const fs::path out_path = scratch / "cmd.out";
  const fs::path err_path = scratch / "cmd.err";
  const std::string full =
      cmd + " >" + out_path.string() + " 2>" + err_path.string();
  const int status = std::system(full.c_str());
  RunResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

}  // namespace testutil
