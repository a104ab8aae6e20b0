// ising-lab: command-line driver for the simulation / verification laboratory.
//
// Subcommands: exact, mc, fk, currents, check, scaling, holo.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/config.hpp"
#include "ising/currents.hpp"
#include "ising/exact.hpp"
#include "ising/fermionic.hpp"
#include "ising/fk.hpp"
#include "ising/inequalities.hpp"
#include "ising/lattice.hpp"
#include "ising/mc.hpp"
#include "ising/results.hpp"
#include "ising/scaling.hpp"

namespace {

using ising::ExperimentConfig;
using ising::ResultRecord;

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string sides_echo(const std::vector<int>& sides) {
  std::string out;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(sides[i]);
  }
  return out;
}

// value of one config key as echoed in the CSV params cell
std::string config_value(const ExperimentConfig& c, const std::string& k) {
  if (k == "lattice") return c.lattice;
  if (k == "sides") return sides_echo(c.sides);
  if (k == "graph_file") return c.graph_file;
  if (k == "bc") return c.bc;
  if (k == "beta") return fmt_num(c.beta);
  if (k == "h") return fmt_num(c.h);
  if (k == "algo") return c.algo;
  if (k == "sweeps") return std::to_string(c.sweeps);
  if (k == "burnin") return std::to_string(c.burnin);
  if (k == "chains") return std::to_string(c.chains);
  if (k == "seed") return std::to_string(c.seed);
  if (k == "observable") return c.observable;
  if (k == "method") return c.method;
  if (k == "mode") return c.mode;
  if (k == "nmax") return std::to_string(c.nmax);
  if (k == "sources") return c.sources;
  if (k == "kind") return c.kind;
  if (k == "trials") return std::to_string(c.trials);
  if (k == "size_cap") return std::to_string(c.size_cap);
  if (k == "p") return fmt_num(c.p);
  if (k == "rho") return fmt_num(c.rho);
  if (k == "q") return std::to_string(c.q);
  if (k == "n") return std::to_string(c.n);
  if (k == "L") return std::to_string(c.L);
  if (k == "d") return std::to_string(c.d);
  if (k == "sep") return std::to_string(c.sep);
  if (k == "window") return c.window;
  if (k == "input") return c.input;
  throw std::logic_error("unechoable config key " + k);
}

// Semicolon-joined key=value echo; commas are remapped to '+' so the cell
// stays CSV-safe.  Thread count, output routing, and timing are deliberately
// excluded: they must never change result bytes.
std::string params_echo(const ExperimentConfig& cfg, const std::vector<std::string>& keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ";";
    std::string v = config_value(cfg, keys[i]);
    for (char& ch : v) {
      if (ch == ',') ch = '+';
    }
    out += keys[i];
    out += "=";
    out += v;
  }
  return out;
}

ResultRecord make_row(const ExperimentConfig& cfg, const std::vector<std::string>& keys,
                      const std::string& obs, double value, const std::string& prov) {
  ResultRecord r;
  r.experiment = cfg.command;
  r.params = params_echo(cfg, keys);
  r.observable = obs;
  r.value = value;
  r.provenance = prov;
  return r;
}

struct Geometry {
  ising::Lattice lat;
  ising::Coupling coup;
  ising::FieldSpec field;
  ising::BoundaryCondition bc;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Geometry build_geometry(const ExperimentConfig& cfg) {
  Geometry g;
  if (cfg.lattice == "box") {
    g.lat = ising::make_box(cfg.sides);
  } else if (cfg.lattice == "torus") {
    g.lat = ising::make_torus(cfg.sides);
  } else if (cfg.lattice == "path") {
    g.lat = ising::make_path(cfg.sides.at(0));
  } else if (cfg.lattice == "ring") {
    g.lat = ising::make_ring(cfg.sides.at(0));
  } else if (cfg.lattice == "graph") {
    const ising::ParsedGraph parsed = ising::parse_edge_list(read_file(cfg.graph_file));
    g.lat = parsed.lat;
    g.coup = parsed.coup;
  } else {
    throw std::invalid_argument("unknown lattice kind " + cfg.lattice);
  }
  g.field.uniform = cfg.h;
  if (cfg.bc == "free") {
    g.bc.kind = ising::BcKind::Free;
  } else {
    if (g.lat.kind != ising::LatticeKind::Box) {
      throw std::invalid_argument("non-free boundary conditions need a box lattice");
    }
    if (cfg.bc == "plus") {
      g.bc.kind = ising::BcKind::Plus;
    } else if (cfg.bc == "minus") {
      g.bc.kind = ising::BcKind::Minus;
    } else if (cfg.bc == "dobrushin") {
      g.bc.kind = ising::BcKind::Dobrushin;
      g.bc.axis = g.lat.dim() - 1;
      g.bc.level = g.lat.sides[static_cast<std::size_t>(g.bc.axis)] / 2;
    } else {
      throw std::invalid_argument("unknown boundary condition " + cfg.bc);
    }
  }
  return g;
}

ising::RunParams run_params(const ExperimentConfig& cfg) {
  ising::RunParams p;
  p.algo = cfg.algo == "glauber" ? ising::Algo::Glauber : ising::Algo::SwendsenWang;
  p.beta = cfg.beta;
  p.sweeps = cfg.sweeps;
  p.burnin = cfg.burnin;
  p.chains = cfg.chains;
  p.seed = cfg.seed;
  p.threads = cfg.threads;
  return p;
}

std::vector<std::vector<int>> parse_source_groups(const std::string& s) {
  std::vector<std::vector<int>> groups;
  if (s.empty()) return groups;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) groups.push_back(ising::parse_int_list(part));
  return groups;
}

std::pair<double, double> parse_window(const std::string& s) {
  std::string norm = s;
  for (char& c : norm) {
    if (c == ':') c = ',';
  }
  const std::size_t comma = norm.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("window must be lo,hi");
  }
  const std::string lo = norm.substr(0, comma);
  const std::string hi = norm.substr(comma + 1);
  std::size_t ua = 0, ub = 0;
  const double a = std::stod(lo, &ua);
  const double b = std::stod(hi, &ub);
  if (ua != lo.size() || ub != hi.size() || !(a < b)) {
    throw std::invalid_argument("window must be lo,hi with lo < hi");
  }
  return {a, b};
}

// ---- subcommand runners -----------------------------------------------------

std::vector<std::string> with_graph_file(const ExperimentConfig& cfg,
                                         std::vector<std::string> keys) {
  if (cfg.lattice == "graph") keys.insert(keys.begin() + 2, "graph_file");
  return keys;
}

std::vector<ResultRecord> run_exact(ExperimentConfig cfg) {
  const std::vector<std::string> keys =
      with_graph_file(cfg, {"method", "lattice", "sides", "bc", "beta", "h", "observable", "n"});
  std::vector<ResultRecord> rows;
  const std::string& m = cfg.method;
  if (m == "enumerate") {
    const Geometry g = build_geometry(cfg);
    const ising::ExactMoments mom =
        ising::exact_moments(g.lat, g.coup, g.field, g.bc, cfg.beta, cfg.threads);
    const std::vector<std::pair<std::string, double>> all = {
        {"logz", mom.log_z}, {"mag", mom.mag},           {"absmag", mom.abs_mag},
        {"chi", mom.chi},    {"energy", mom.energy_per_edge}, {"cv", mom.specific_heat}};
    bool any = false;
    for (const auto& [name, value] : all) {
      if (cfg.observable == "all" || cfg.observable == name) {
        rows.push_back(make_row(cfg, keys, name, value, "exact"));
        any = true;
      }
    }
    if (!any) {
      throw std::invalid_argument("exact observable must be all or one of logz, mag, absmag, "
                                  "chi, energy, cv");
    }
  } else if (m == "transfer" || m == "hightemp" || m == "lowtemp" || m == "strip") {
    if (cfg.lattice == "graph") {
      throw std::invalid_argument("expansion and transfer methods need a generated lattice");
    }
    if (cfg.bc != "free") {
      throw std::invalid_argument("expansion and transfer methods need free boundary");
    }
    const Geometry g = build_geometry(cfg);
    if (m == "transfer") {
      rows.push_back(make_row(cfg, keys, "logz",
                              ising::log_partition_transfer(g.lat, cfg.beta, cfg.h), "exact"));
    } else if (m == "strip") {
      rows.push_back(
          make_row(cfg, keys, "strip_rate", ising::strip_free_energy_rate(cfg.n, cfg.beta),
                   "exact"));
    } else {
      if (cfg.h != 0.0) throw std::invalid_argument("expansions are h = 0 only");
      const double v = m == "hightemp" ? ising::log_partition_hightemp(g.lat, cfg.beta)
                                       : ising::log_partition_lowtemp(g.lat, cfg.beta);
      rows.push_back(make_row(cfg, keys, "logz", v, "exact"));
    }
  } else if (m == "onsager") {
    const ising::Quadrature qd = ising::onsager_minus_beta_f(cfg.beta);
    ResultRecord r = make_row(cfg, keys, "minus_beta_f", qd.value, "closed-form");
    r.has_err = true;
    r.err = qd.err;
    rows.push_back(r);
  } else if (m == "yang") {
    rows.push_back(make_row(cfg, keys, "mstar", ising::yang_magnetization(cfg.beta),
                            "closed-form"));
  } else if (m == "peierls") {
    rows.push_back(make_row(cfg, keys, "two_point_lower_bound",
                            ising::peierls_two_point_bound(cfg.beta), "bound"));
  } else if (m == "dual-residual") {
    rows.push_back(make_row(cfg, keys, "duality_residual", ising::duality_residual(cfg.beta),
                            "closed-form"));
  } else if (m == "betac") {
    rows.push_back(make_row(cfg, keys, "beta_c", ising::critical_beta_2d(), "closed-form"));
  } else {
    throw std::invalid_argument(
        "exact method must be one of enumerate, transfer, hightemp, lowtemp, strip, onsager, "
        "yang, peierls, dual-residual, betac");
  }
  return rows;
}

std::vector<ResultRecord> run_mc(ExperimentConfig cfg, const std::set<std::string>& explicit_keys) {
  if (explicit_keys.count("L") && !explicit_keys.count("sides")) {
    cfg.sides.assign(static_cast<std::size_t>(cfg.d), cfg.L);
  }
  const std::vector<std::string> keys = with_graph_file(
      cfg, {"algo", "lattice", "sides", "bc", "beta", "h", "observable", "sep", "sweeps",
            "burnin", "chains", "seed"});
  const Geometry g = build_geometry(cfg);
  const ising::RunParams p = run_params(cfg);
  std::vector<ResultRecord> rows;
  if (cfg.observable == "twopoint") {
    std::vector<int> c(static_cast<std::size_t>(g.lat.dim()), 0);
    if (g.lat.dim() == 0 || cfg.sep >= g.lat.sides[0]) {
      throw std::invalid_argument("twopoint separation exceeds the lattice");
    }
    c[0] = cfg.sep;
    const int target = ising::vertex_at(g.lat, c);
    const std::vector<ising::Estimate> est =
        ising::estimate_two_point(g.lat, g.coup, g.field, g.bc, p, 0, {target});
    ResultRecord r = make_row(cfg, keys, "twopoint", est.at(0).value, "mc");
    r.has_err = true;
    r.err = est.at(0).err;
    rows.push_back(r);
  } else {
    const ising::Estimate est =
        ising::estimate_observable(g.lat, g.coup, g.field, g.bc, p, cfg.observable, {0});
    ResultRecord r = make_row(cfg, keys, cfg.observable, est.value, "mc");
    r.has_err = true;
    r.err = est.err;
    rows.push_back(r);
  }
  return rows;
}

std::vector<ResultRecord> run_fk(ExperimentConfig cfg, const std::set<std::string>& explicit_keys) {
  if (explicit_keys.count("L") && !explicit_keys.count("n")) cfg.n = cfg.L;
  const std::vector<std::string> keys = {"mode", "lattice", "sides", "beta", "p",
                                         "q",    "n",       "rho",   "sweeps", "chains", "seed"};
  std::vector<ResultRecord> rows;
  if (cfg.mode == "crossing") {
    if (cfg.q != 2) throw std::invalid_argument("the sampler is q = 2 only");
    const ising::Estimate est = ising::crossing_probability(cfg.n, cfg.rho, cfg.p, cfg.sweeps,
                                                            cfg.seed, cfg.chains, cfg.threads);
    ResultRecord r = make_row(cfg, keys, "crossing", est.value, "mc");
    r.has_err = true;
    r.err = est.err;
    rows.push_back(r);
  } else if (cfg.mode == "sample") {
    if (cfg.q != 2) throw std::invalid_argument("the sampler is q = 2 only");
    if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw std::invalid_argument("sampling needs 0 < p < 1");
    const double beta = -0.5 * std::log1p(-cfg.p);
    const ising::Lattice lat = ising::make_box({cfg.n, cfg.n});
    std::vector<double> kdens, odens;
    for (int i = 0; i < cfg.chains; ++i) {
      const ising::FkConfig fc =
          ising::fk_sample(lat, beta, cfg.sweeps, cfg.seed + static_cast<std::uint64_t>(i));
      kdens.push_back(static_cast<double>(ising::fk_cluster_count(lat, fc.open)) / lat.nv);
      odens.push_back(static_cast<double>(fc.open_count()) / lat.ne());
    }
    for (const auto& [name, xs] : {std::pair<std::string, const std::vector<double>*>{
                                       "cluster_density", &kdens},
                                   {"open_fraction", &odens}}) {
      double mean = 0.0;
      for (double x : *xs) mean += x;
      mean /= static_cast<double>(xs->size());
      double var = 0.0;
      for (double x : *xs) var += (x - mean) * (x - mean);
      const std::size_t nn = xs->size();
      ResultRecord r = make_row(cfg, keys, name, mean, "mc");
      r.has_err = true;
      r.err = nn > 1 ? std::sqrt(var / (static_cast<double>(nn - 1) * static_cast<double>(nn)))
                     : 0.0;
      rows.push_back(r);
    }
  } else if (cfg.mode == "check") {
    const Geometry g = build_geometry(cfg);
    rows.push_back(make_row(cfg, keys, "es_deviation", ising::es_coupling_check(g.lat, cfg.beta),
                            "exact"));
  } else {
    throw std::invalid_argument("fk mode must be sample, crossing, or check");
  }
  return rows;
}

std::vector<ResultRecord> run_currents(ExperimentConfig cfg) {
  const std::vector<std::string> keys =
      with_graph_file(cfg, {"mode", "lattice", "sides", "beta", "h", "sources", "nmax"});
  const std::vector<std::vector<int>> groups = parse_source_groups(cfg.sources);
  std::vector<ResultRecord> rows;
  if (cfg.mode == "correlation") {
    const Geometry g = build_geometry(cfg);
    const std::vector<int> a = groups.empty() ? std::vector<int>{} : groups.at(0);
    if (groups.size() > 1) throw std::invalid_argument("correlation takes one source group");
    const ising::CurrentSum cs = ising::current_correlation(g.lat, g.coup, cfg.beta, a, cfg.nmax);
    ResultRecord r = make_row(cfg, keys, "correlation", cs.value, "series");
    r.has_err = true;
    r.err = cs.tail;
    rows.push_back(r);
  } else if (cfg.mode == "switching") {
    if (groups.size() != 2) {
      throw std::invalid_argument("switching needs sources of the form a1,a2:b1,b2");
    }
    const Geometry g = build_geometry(cfg);
    for (const auto& [fname, fn] :
         {std::pair<std::string, ising::SwitchFn>{"one", ising::SwitchFn::One},
          {"parity", ising::SwitchFn::TotalParityEven}}) {
      const ising::SwitchResult sr =
          ising::switching_check(g.lat, g.coup, cfg.beta, groups[0], groups[1], fn, cfg.nmax);
      for (const auto& [obs, value] : {std::pair<std::string, double>{"lhs_" + fname, sr.lhs},
                                       {"rhs_" + fname, sr.rhs},
                                       {"residual_" + fname, std::abs(sr.lhs - sr.rhs)}}) {
        ResultRecord r = make_row(cfg, keys, obs, value, "series");
        r.has_err = true;
        r.err = sr.tail;
        rows.push_back(r);
      }
    }
  } else if (cfg.mode == "ursell") {
    if (groups.size() != 1 || groups[0].size() != 4) {
      throw std::invalid_argument("ursell needs sources x1,x2,x3,x4");
    }
    const Geometry g = build_geometry(cfg);
    const std::array<int, 4> xs = {groups[0][0], groups[0][1], groups[0][2], groups[0][3]};
    const ising::Ursell4 u = ising::ursell4(g.lat, g.coup, cfg.beta, xs, cfg.nmax);
    rows.push_back(make_row(cfg, keys, "u4", u.value, "exact"));
    ResultRecord rr = make_row(cfg, keys, "u4_currents", u.rhs, "series");
    rr.has_err = true;
    rr.err = u.tail;
    rows.push_back(rr);
    ResultRecord rd = make_row(cfg, keys, "u4_residual", u.residual, "series");
    rd.has_err = true;
    rd.err = u.tail;
    rows.push_back(rd);
  } else if (cfg.mode == "diffineq") {
    const Geometry g = build_geometry(cfg);
    const ising::DiffIneq chi = ising::chi_bubble_check(g.lat, cfg.beta);
    ResultRecord rc = make_row(cfg, keys, "chi_bubble_violation", chi.violation, "exact");
    rc.has_err = true;
    rc.err = chi.fd_error;
    rows.push_back(rc);
    const ising::DiffIneq mag = ising::magnetization_ineq_check(g.lat, cfg.beta, cfg.h);
    ResultRecord rm = make_row(cfg, keys, "magnetization_violation", mag.violation, "exact");
    rm.has_err = true;
    rm.err = mag.fd_error;
    rows.push_back(rm);
  } else {
    throw std::invalid_argument("currents mode must be correlation, switching, ursell, or "
                                "diffineq");
  }
  return rows;
}

std::vector<ResultRecord> run_scaling(ExperimentConfig cfg,
                                      const std::set<std::string>& explicit_keys) {
  const bool critical_kind =
      cfg.kind == "spin-decay" || cfg.kind == "energy-decay" || cfg.kind == "boundary-pfaffian";
  if (critical_kind && !explicit_keys.count("beta")) cfg.beta = 0.0;
  const std::vector<std::string> keys = {"kind",   "L",      "sides",  "sep",  "beta", "algo",
                                         "sweeps", "burnin", "chains", "seed", "window"};
  std::vector<ResultRecord> rows;
  if (cfg.kind == "relations") {
    rows.push_back(make_row(cfg, keys, "relations_residual_meanfield",
                            ising::scaling_relations_check(ising::mean_field_exponents()),
                            "exact"));
    rows.push_back(make_row(cfg, keys, "relations_residual_2d",
                            ising::scaling_relations_check(ising::ising2d_exponents()), "exact"));
  } else if (cfg.kind == "constants") {
    for (const ising::ReferenceConstant& c : ising::reference_constants()) {
      rows.push_back(make_row(cfg, keys, c.name, c.value, c.provenance));
    }
  } else if (cfg.kind == "beta-magnetization" || cfg.kind == "spin-decay" ||
             cfg.kind == "energy-decay") {
    double xlo = 0.0, xhi = 0.0;
    if (!cfg.window.empty()) std::tie(xlo, xhi) = parse_window(cfg.window);
    const ising::ExponentKind kind = ising::exponent_kind_from_name(cfg.kind);
    const ising::PowerLawFit fit =
        ising::exponent_experiment(kind, cfg.L, run_params(cfg), xlo, xhi);
    const std::string prov = cfg.kind == "beta-magnetization" ? "closed-form" : "mc";
    ResultRecord re = make_row(cfg, keys, "exponent", fit.exponent, prov);
    re.has_err = true;
    re.err = fit.err;
    rows.push_back(re);
    rows.push_back(make_row(cfg, keys, "r2", fit.r2, prov));
    rows.push_back(make_row(cfg, keys, "window_lo", fit.xmin, prov));
    rows.push_back(make_row(cfg, keys, "window_hi", fit.xmax, prov));
    rows.push_back(make_row(cfg, keys, "n_points", static_cast<double>(fit.n), prov));
  } else if (cfg.kind == "boundary-pfaffian") {
    if (cfg.sides.size() != 2) throw std::invalid_argument("boundary-pfaffian needs 2d sides");
    const ising::PfaffianCheck pc = ising::boundary_pfaffian_experiment(
        cfg.sides[0], cfg.sides[1], run_params(cfg), cfg.sep, 2 * cfg.sep);
    ResultRecord rs = make_row(cfg, keys, "pfaffian_dev_small", pc.dev_small, "mc");
    rs.has_err = true;
    rs.err = pc.err_small;
    rows.push_back(rs);
    ResultRecord rl = make_row(cfg, keys, "pfaffian_dev_large", pc.dev_large, "mc");
    rl.has_err = true;
    rl.err = pc.err_large;
    rows.push_back(rl);
  } else {
    throw std::invalid_argument(
        "scaling kind must be one of relations, constants, beta-magnetization, spin-decay, "
        "energy-decay, boundary-pfaffian");
  }
  return rows;
}

std::vector<ResultRecord> run_holo(ExperimentConfig cfg) {
  const std::vector<std::string> keys = {"mode", "input"};
  if (cfg.input.empty()) throw std::invalid_argument("holo needs --input pointing to a json file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(cfg.input));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad holo input: ") + e.what());
  }
  std::vector<ResultRecord> rows;
  try {
    if (cfg.mode == "residual") {
      const int lx = j.at("lx").get<int>();
      const int ly = j.at("ly").get<int>();
      const std::string fn = j.at("function").get<std::string>();
      std::function<std::complex<double>(std::complex<double>)> fun;
      if (fn == "one") {
        fun = [](std::complex<double>) { return std::complex<double>(1.0, 0.0); };
      } else if (fn == "z") {
        fun = [](std::complex<double> z) { return z; };
      } else if (fn == "z2") {
        fun = [](std::complex<double> z) { return z * z; };
      } else if (fn == "conj") {
        fun = [](std::complex<double> z) { return std::conj(z); };
      } else {
        throw std::invalid_argument("holo function must be one, z, z2, or conj");
      }
      const ising::ComplexLatticeFunction tab = ising::tabulate_function(lx, ly, fun);
      rows.push_back(make_row(cfg, keys, "max_residual", ising::preholomorphic_check(tab),
                              "exact"));
    } else if (cfg.mode == "orderdisorder") {
      const int lx = j.at("lx").get<int>();
      const int ly = j.at("ly").get<int>();
      const double beta = j.at("beta").get<double>();
      const ising::Lattice box = ising::make_box({lx, ly});
      std::vector<ising::Insertion> ins;
      const nlohmann::json& pairs = j.at("pairs");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        ising::Insertion in;
        in.x = pairs[i].at("x").get<int>();
        const int fx = pairs[i].at("face").at(0).get<int>();
        const int fy = pairs[i].at("face").at(1).get<int>();
        if (j.contains("cuts")) {
          in.cut.primal_edges = j.at("cuts").at(i).get<std::vector<int>>();
          in.cut.target_fx = fx;
          in.cut.target_fy = fy;
        } else {
          in.cut = ising::straight_cut(box, fx, fy);
        }
        ins.push_back(std::move(in));
      }
      const double a = ising::order_disorder_correlator(box, beta, ins);
      const double b = ising::order_disorder_negated(box, beta, ins);
      rows.push_back(make_row(cfg, keys, "orderdisorder", a, "exact"));
      rows.push_back(make_row(cfg, keys, "orderdisorder_negated", b, "exact"));
      rows.push_back(make_row(cfg, keys, "route_residual", std::abs(a - b), "exact"));
    } else {
      throw std::invalid_argument("holo mode must be residual or orderdisorder");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad holo input: ") + e.what());
  }
  return rows;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing output file " + path);
}

int run_cli(int argc, char** argv) {
  ExperimentConfig cfg;
  std::string sides_str;
  std::string config_path;

  CLI::App app{"Ising model simulation and verification laboratory"};
  app.set_help_flag("--help", "print help and exit");  // frees -h / --h for the field
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, CLI::Option*> opt;
  };
  std::vector<Sub> subs;

  auto flag_name = [](std::string key) {
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    return "--" + key;
  };

  auto add_common = [&](CLI::App* sc) {
    sc->set_help_flag("--help", "print help and exit");
    Sub s;
    s.app = sc;
    s.opt["seed"] = sc->add_option(flag_name("seed"), cfg.seed, "RNG seed");
    s.opt["threads"] = sc->add_option(flag_name("threads"), cfg.threads,
                                      "worker threads (0: ISING_LAB_THREADS or 1)");
    s.opt["output"] = sc->add_option(flag_name("output"), cfg.output, "output file (default stdout)");
    s.opt["format"] = sc->add_option(flag_name("format"), cfg.format, "csv or json");
    s.opt["timing"] = sc->add_flag(flag_name("timing"), cfg.timing, "fill the seconds column");
    s.opt["dry_run"] =
        sc->add_flag(flag_name("dry_run"), cfg.dry_run, "validate and echo the canonical config");
    sc->add_option("--config", config_path, "key=value config file (flags take precedence)");
    return s;
  };
  auto lattice_opts = [&](Sub& s) {
    s.opt["lattice"] = s.app->add_option(flag_name("lattice"), cfg.lattice,
                                         "box, torus, path, ring, or graph");
    s.opt["sides"] = s.app->add_option(flag_name("sides"), sides_str, "extents, e.g. 4x4 or 4,4");
    s.opt["graph_file"] =
        s.app->add_option(flag_name("graph_file"), cfg.graph_file, "edge-list file for lattice=graph");
    s.opt["bc"] = s.app->add_option(flag_name("bc"), cfg.bc, "free, plus, minus, or dobrushin");
  };
  auto mc_opts = [&](Sub& s) {
    s.opt["algo"] = s.app->add_option(flag_name("algo"), cfg.algo, "sw or glauber");
    s.opt["sweeps"] = s.app->add_option(flag_name("sweeps"), cfg.sweeps, "measured sweeps per chain");
    s.opt["burnin"] = s.app->add_option(flag_name("burnin"), cfg.burnin, "discarded sweeps");
    s.opt["chains"] = s.app->add_option(flag_name("chains"), cfg.chains, "independent chains");
  };

  {  // exact
    CLI::App* sc = app.add_subcommand("exact", "exact solvers and closed forms");
    Sub s = add_common(sc);
    lattice_opts(s);
    s.opt["method"] = sc->add_option(flag_name("method"), cfg.method,
                                     "enumerate, transfer, hightemp, lowtemp, strip, onsager, "
                                     "yang, peierls, dual-residual, betac");
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta, "inverse temperature");
    s.opt["h"] = sc->add_option(flag_name("h"), cfg.h, "uniform external field");
    s.opt["observable"] =
        sc->add_option(flag_name("observable"), cfg.observable, "moment to emit, or all");
    s.opt["n"] = sc->add_option(flag_name("n"), cfg.n, "strip cross-section width");
    subs.push_back(std::move(s));
  }
  {  // mc
    CLI::App* sc = app.add_subcommand("mc", "Markov-chain Monte Carlo estimates");
    Sub s = add_common(sc);
    lattice_opts(s);
    mc_opts(s);
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta, "inverse temperature");
    s.opt["h"] = sc->add_option(flag_name("h"), cfg.h, "uniform external field");
    s.opt["observable"] = sc->add_option(flag_name("observable"), cfg.observable,
                                         "mag, absmag, energy, cv, chi, site, twopoint");
    s.opt["sep"] = sc->add_option(flag_name("sep"), cfg.sep, "twopoint separation");
    s.opt["L"] = sc->add_option(flag_name("L"), cfg.L, "shorthand: sides = L^d");
    s.opt["d"] = sc->add_option(flag_name("d"), cfg.d, "dimension for the L shorthand");
    subs.push_back(std::move(s));
  }
  {  // fk
    CLI::App* sc = app.add_subcommand("fk", "random-cluster experiments");
    Sub s = add_common(sc);
    lattice_opts(s);
    mc_opts(s);
    s.opt["mode"] = sc->add_option(flag_name("mode"), cfg.mode, "sample, crossing, or check");
    s.opt["p"] = sc->add_option(flag_name("p"), cfg.p, "edge weight");
    s.opt["q"] = sc->add_option(flag_name("q"), cfg.q, "cluster weight (sampling: 2)");
    s.opt["n"] = sc->add_option(flag_name("n"), cfg.n, "rectangle height");
    s.opt["L"] = sc->add_option(flag_name("L"), cfg.L, "alias for the rectangle height");
    s.opt["rho"] = sc->add_option(flag_name("rho"), cfg.rho, "aspect ratio");
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta, "inverse temperature (check mode)");
    subs.push_back(std::move(s));
  }
  {  // currents
    CLI::App* sc = app.add_subcommand("currents", "random-current identities and bounds");
    Sub s = add_common(sc);
    lattice_opts(s);
    s.opt["mode"] = sc->add_option(flag_name("mode"), cfg.mode,
                                   "correlation, switching, ursell, or diffineq");
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta, "inverse temperature");
    s.opt["h"] = sc->add_option(flag_name("h"), cfg.h, "uniform external field (diffineq)");
    s.opt["sources"] = sc->add_option(flag_name("sources"), cfg.sources,
                                      "source vertices, groups ':'-separated (e.g. 0,1:2,3)");
    s.opt["nmax"] = sc->add_option(flag_name("nmax"), cfg.nmax, "per-edge truncation order");
    subs.push_back(std::move(s));
  }
  {  // check
    CLI::App* sc = app.add_subcommand("check", "randomized verification batteries");
    Sub s = add_common(sc);
    mc_opts(s);
    s.opt["kind"] = sc->add_option(
        flag_name("kind"), cfg.kind,
        "griffiths1, griffiths2, ghs, simon-lieb, mms, fkg-spin, fkg-fk, p-monotone, lee-yang, "
        "gaussian-domination, infrared");
    s.opt["trials"] = sc->add_option(flag_name("trials"), cfg.trials, "battery size");
    s.opt["size_cap"] = sc->add_option(flag_name("size_cap"), cfg.size_cap,
                                       "instance size cap where applicable");
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta, "inverse temperature (infrared)");
    subs.push_back(std::move(s));
  }
  {  // scaling
    CLI::App* sc = app.add_subcommand("scaling", "critical-exponent experiments");
    Sub s = add_common(sc);
    mc_opts(s);
    s.opt["kind"] = sc->add_option(flag_name("kind"), cfg.kind,
                                   "relations, constants, beta-magnetization, spin-decay, "
                                   "energy-decay, boundary-pfaffian");
    s.opt["L"] = sc->add_option(flag_name("L"), cfg.L, "torus side for decay fits");
    s.opt["sides"] = s.app->add_option(flag_name("sides"), sides_str, "box extents (pfaffian)");
    s.opt["sep"] = sc->add_option(flag_name("sep"), cfg.sep, "small pfaffian separation");
    s.opt["beta"] = sc->add_option(flag_name("beta"), cfg.beta,
                                   "inverse temperature (0 or default: critical point)");
    s.opt["window"] = sc->add_option(flag_name("window"), cfg.window, "fit window lo,hi");
    subs.push_back(std::move(s));
  }
  {  // holo
    CLI::App* sc = app.add_subcommand("holo", "discrete holomorphicity and order-disorder");
    Sub s = add_common(sc);
    s.opt["mode"] = sc->add_option(flag_name("mode"), cfg.mode, "residual or orderdisorder");
    s.opt["input"] = sc->add_option(flag_name("input"), cfg.input, "json input file");
    subs.push_back(std::move(s));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const Sub* active = nullptr;
  for (const Sub& s : subs) {
    if (s.app->parsed()) active = &s;
  }
  if (active == nullptr) return 1;  // unreachable: a subcommand is required
  cfg.command = active->app->get_name();

  std::set<std::string> explicit_keys;
  for (const auto& [k, o] : active->opt) {
    if (o->count() > 0) explicit_keys.insert(k);
  }
  if (explicit_keys.count("sides")) cfg.sides = ising::parse_int_list(sides_str);

  if (!config_path.empty()) {
    for (const auto& [k, v] : ising::parse_kv(read_file(config_path))) {
      if (k == "command") {
        throw std::invalid_argument("the command comes from the command line, not the file");
      }
      if (explicit_keys.count(k)) continue;  // flags win
      ising::apply_kv(cfg, k, v);
      explicit_keys.insert(k);
    }
  }

  ising::validate_config(cfg);
  if (cfg.dry_run) {
    write_text(ising::canonical_config(cfg), cfg.output);
    return 0;
  }

  if (cfg.command == "check") {
    const ising::BatteryResult b =
        ising::run_check_battery(cfg.kind, cfg.trials, cfg.seed, cfg.size_cap, run_params(cfg));
    std::string json = "{\"kind\":\"" + b.kind + "\",\"trials\":" + std::to_string(b.trials) +
                       ",\"violations\":" + std::to_string(b.violations) +
                       ",\"worst_margin\":" + ising::format_g17(b.worst_margin) + "}\n";
    write_text(json, cfg.output);
    return 0;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ResultRecord> rows;
  if (cfg.command == "exact") {
    rows = run_exact(cfg);
  } else if (cfg.command == "mc") {
    rows = run_mc(cfg, explicit_keys);
  } else if (cfg.command == "fk") {
    rows = run_fk(cfg, explicit_keys);
  } else if (cfg.command == "currents") {
    rows = run_currents(cfg);
  } else if (cfg.command == "scaling") {
    rows = run_scaling(cfg, explicit_keys);
  } else if (cfg.command == "holo") {
    rows = run_holo(cfg);
  } else {
    throw std::invalid_argument("unknown subcommand " + cfg.command);
  }
  if (cfg.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (ResultRecord& r : rows) r.seconds = secs;
  }
  ising::emit_results(rows, cfg.format, cfg.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::logic_error& e) {  // invalid_argument, domain_error: bad inputs
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {  // runtime_error and friends: numerical failure
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
