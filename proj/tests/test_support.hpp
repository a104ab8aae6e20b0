#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Path of the command-line binary under test, injected by the test runner
// through a --bin=<path> argument.
inline std::string& ising_lab_bin() {
  static std::string path;
  return path;
}

struct CmdResult {
  int status = -1;
  std::string out;
};

// Run a shell command, capture stdout (append "2>&1" to merge stderr).
inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int rc = pclose(p);
  if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
  return r;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Value column of the first data row whose observable column matches.
inline double csv_value(const std::string& text, const std::string& observable,
                        bool* found = nullptr) {
  if (found) *found = false;
  for (const auto& line : split_lines(text)) {
    auto cells = split_csv_row(line);
    if (cells.size() < 4) continue;
    if (cells[2] == observable) {
      if (found) *found = true;
      return std::stod(cells[3]);
    }
  }
  return 0.0;
}

inline double csv_err(const std::string& text, const std::string& observable) {
  for (const auto& line : split_lines(text)) {
    auto cells = split_csv_row(line);
    if (cells.size() < 5) continue;
    if (cells[2] == observable && !cells[4].empty()) return std::stod(cells[4]);
  }
  return 0.0;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
