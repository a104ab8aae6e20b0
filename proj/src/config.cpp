#include "ising/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ising {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' needs an integer, got '" + v + "'");
  }
  if (used != v.size()) {
    throw std::invalid_argument("config key '" + key + "' needs an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' needs an unsigned integer, got '" + v +
                                "'");
  }
  if (used != v.size()) {
    throw std::invalid_argument("config key '" + key + "' needs an unsigned integer, got '" + v +
                                "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' needs a number, got '" + v + "'");
  }
  if (used != v.size()) {
    throw std::invalid_argument("config key '" + key + "' needs a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "' needs a boolean, got '" + v + "'");
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::string norm = text;
  // "AxB" geometry shorthand
  std::replace(norm.begin(), norm.end(), 'x', ',');
  std::vector<int> out;
  std::stringstream ss(norm);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw std::invalid_argument("empty entry in integer list '" + text + "'");
    out.push_back(to_int("list", tok));
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, int> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not of the form key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + " has an empty key");
    }
    if (++seen[key] > 1) {
      throw std::invalid_argument("config key '" + key + "' given more than once");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "command") {
    cfg.command = value;
  } else if (key == "lattice") {
    cfg.lattice = value;
  } else if (key == "sides") {
    cfg.sides = parse_int_list(value);
  } else if (key == "graph_file") {
    cfg.graph_file = value;
  } else if (key == "bc") {
    cfg.bc = value;
  } else if (key == "beta") {
    cfg.beta = to_double(key, value);
  } else if (key == "h") {
    cfg.h = to_double(key, value);
  } else if (key == "algo") {
    cfg.algo = value;
  } else if (key == "sweeps") {
    cfg.sweeps = to_int(key, value);
  } else if (key == "burnin") {
    cfg.burnin = to_int(key, value);
  } else if (key == "chains") {
    cfg.chains = to_int(key, value);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "threads") {
    cfg.threads = to_int(key, value);
  } else if (key == "observable") {
    cfg.observable = value;
  } else if (key == "method") {
    cfg.method = value;
  } else if (key == "mode") {
    cfg.mode = value;
  } else if (key == "nmax") {
    cfg.nmax = to_int(key, value);
  } else if (key == "sources") {
    cfg.sources = value;
  } else if (key == "kind") {
    cfg.kind = value;
  } else if (key == "trials") {
    cfg.trials = to_int(key, value);
  } else if (key == "size_cap") {
    cfg.size_cap = to_int(key, value);
  } else if (key == "p") {
    cfg.p = to_double(key, value);
  } else if (key == "rho") {
    cfg.rho = to_double(key, value);
  } else if (key == "q") {
    cfg.q = to_int(key, value);
  } else if (key == "n") {
    cfg.n = to_int(key, value);
  } else if (key == "L") {
    cfg.L = to_int(key, value);
  } else if (key == "d") {
    cfg.d = to_int(key, value);
  } else if (key == "sep") {
    cfg.sep = to_int(key, value);
  } else if (key == "window") {
    cfg.window = value;
  } else if (key == "input") {
    cfg.input = value;
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "timing") {
    cfg.timing = to_bool(key, value);
  } else if (key == "dry_run") {
    cfg.dry_run = to_bool(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["command"] = cfg.command;
  kv["lattice"] = cfg.lattice;
  kv["sides"] = join_ints(cfg.sides);
  kv["graph_file"] = cfg.graph_file;
  kv["bc"] = cfg.bc;
  {
    std::ostringstream os;
    os.precision(17);
    os << cfg.beta;
    kv["beta"] = os.str();
    os.str("");
    os << cfg.h;
    kv["h"] = os.str();
    os.str("");
    os << cfg.p;
    kv["p"] = os.str();
    os.str("");
    os << cfg.rho;
    kv["rho"] = os.str();
  }
  kv["algo"] = cfg.algo;
  kv["sweeps"] = std::to_string(cfg.sweeps);
  kv["burnin"] = std::to_string(cfg.burnin);
  kv["chains"] = std::to_string(cfg.chains);
  kv["seed"] = std::to_string(cfg.seed);
  kv["threads"] = std::to_string(cfg.threads);
  kv["observable"] = cfg.observable;
  kv["method"] = cfg.method;
  kv["mode"] = cfg.mode;
  kv["nmax"] = std::to_string(cfg.nmax);
  kv["sources"] = cfg.sources;
  kv["kind"] = cfg.kind;
  kv["trials"] = std::to_string(cfg.trials);
  kv["size_cap"] = std::to_string(cfg.size_cap);
  kv["q"] = std::to_string(cfg.q);
  kv["n"] = std::to_string(cfg.n);
  kv["L"] = std::to_string(cfg.L);
  kv["d"] = std::to_string(cfg.d);
  kv["sep"] = std::to_string(cfg.sep);
  kv["window"] = cfg.window;
  kv["input"] = cfg.input;
  kv["output"] = cfg.output;
  kv["format"] = cfg.format;
  kv["timing"] = cfg.timing ? "true" : "false";
  kv["dry_run"] = cfg.dry_run ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += "=";
    out += v;
    out += "\n";
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (cfg.lattice != "box" && cfg.lattice != "torus" && cfg.lattice != "path" &&
      cfg.lattice != "ring" && cfg.lattice != "graph") {
    bad("lattice must be one of box, torus, path, ring, graph");
  }
  if (cfg.lattice == "graph" && cfg.graph_file.empty()) {
    bad("lattice=graph needs graph_file");
  }
  for (int s : cfg.sides) {
    if (s < 1) bad("lattice sides must be positive");
  }
  if (cfg.bc != "free" && cfg.bc != "plus" && cfg.bc != "minus" && cfg.bc != "dobrushin") {
    bad("bc must be one of free, plus, minus, dobrushin");
  }
  if (!(cfg.beta >= 0.0)) bad("beta must be nonnegative");
  if (cfg.algo != "sw" && cfg.algo != "glauber") bad("algo must be sw or glauber");
  if (cfg.sweeps < 1) bad("sweeps must be positive");
  if (cfg.burnin < 0) bad("burnin must be nonnegative");
  if (cfg.chains < 1) bad("chains must be positive");
  if (cfg.threads < 0) bad("threads must be nonnegative");
  if (cfg.nmax < 1) bad("nmax must be positive");
  if (cfg.trials < 1) bad("trials must be positive");
  if (cfg.size_cap < 1) bad("size_cap must be positive");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) bad("p must lie in [0,1]");
  if (!(cfg.rho > 0.0)) bad("rho must be positive");
  if (cfg.q < 1) bad("q must be a positive integer");
  if (cfg.n < 1) bad("n must be positive");
  if (cfg.L < 2) bad("L must be at least 2");
  if (cfg.d < 1) bad("d must be positive");
  if (cfg.sep < 1) bad("sep must be positive");
  if (cfg.format != "csv" && cfg.format != "json") bad("format must be csv or json");
}

}  // namespace ising
