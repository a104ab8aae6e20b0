#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ising {

// Flat key=value experiment description shared by the command line and config
// files.  Every tunable of every subcommand lives here; each subcommand
// validates and consumes the subset it understands.
struct ExperimentConfig {
  std::string command;  // exact | mc | fk | currents | check | scaling | holo

  // geometry
  std::string lattice = "box";  // box | torus | path | ring | graph
  std::vector<int> sides = {4, 4};
  std::string graph_file;    // edge list, used when lattice=graph
  std::string bc = "free";   // free | plus | minus | dobrushin
  double beta = 0.3;
  double h = 0.0;

  // monte carlo
  std::string algo = "sw";  // sw | glauber
  int sweeps = 1000;
  int burnin = 100;
  int chains = 2;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string observable = "mag";  // mag|absmag|energy|cv|chi|site|twopoint

  // exact solvers
  std::string method = "enumerate";

  // random currents
  std::string mode = "correlation";
  int nmax = 10;
  std::string sources;  // comma-separated vertex ids

  // checks
  std::string kind = "griffiths1";
  int trials = 50;
  int size_cap = 8;

  // fk percolation
  double p = 0.5;
  double rho = 1.0;
  int q = 2;
  int n = 16;

  // scaling lab
  int L = 64;
  int d = 2;
  int sep = 16;
  std::string window;  // "lo,hi" fit window override

  // io
  std::string input;
  std::string output;
  std::string format = "csv";  // csv | json
  bool timing = false;
  bool dry_run = false;
};

// Parses "key = value" lines; '#' starts a comment; blank lines are skipped.
// Duplicate keys and malformed lines are rejected.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text);

// Applies one key=value setting; unknown keys raise std::invalid_argument.
void apply_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Canonical echo of the full configuration, one sorted key=value per line.
std::string canonical_config(const ExperimentConfig& cfg);

// Bounds/value checks shared by every subcommand; throws std::invalid_argument.
void validate_config(const ExperimentConfig& cfg);

// Accepts "a,b,c" or "AxB" (lowercase x) forms.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace ising
