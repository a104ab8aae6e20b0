// Acceptance battery: one checked claim per line, PASS/FAIL plus timing.
// Usage: acceptance <path-to-ising-lab-binary>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/currents.hpp"
#include "ising/exact.hpp"
#include "ising/fermionic.hpp"
#include "ising/fk.hpp"
#include "ising/inequalities.hpp"
#include "ising/lattice.hpp"
#include "ising/mc.hpp"
#include "ising/scaling.hpp"
#include "test_support.hpp"

namespace {

using namespace ising;

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

RunParams sw_params(double beta, int sweeps, int burnin, std::uint64_t seed) {
  RunParams p;
  p.algo = Algo::SwendsenWang;
  p.beta = beta;
  p.sweeps = sweeps;
  p.burnin = burnin;
  p.chains = 2;
  p.seed = seed;
  p.threads = 0;
  return p;
}

// every labeled simple graph on exactly nv vertices (each edge subset of K_nv)
std::vector<std::vector<std::array<int, 2>>> all_edge_subsets(int nv, int max_edges) {
  std::vector<std::array<int, 2>> full;
  for (int u = 0; u < nv; ++u)
    for (int v = u + 1; v < nv; ++v) full.push_back({u, v});
  std::vector<std::vector<std::array<int, 2>>> out;
  const int ne = static_cast<int>(full.size());
  for (std::uint32_t mask = 0; mask < (1u << ne); ++mask) {
    if (std::popcount(mask) > max_edges) continue;
    std::vector<std::array<int, 2>> edges;
    for (int e = 0; e < ne; ++e)
      if (mask & (1u << e)) edges.push_back(full[static_cast<std::size_t>(e)]);
    out.push_back(std::move(edges));
  }
  return out;
}

bool connects_all(int nv, const std::vector<std::array<int, 2>>& edges) {
  UnionFind uf(nv);
  for (const auto& e : edges) uf.unite(e[0], e[1]);
  return uf.components() == 1;
}

// ---- criteria ---------------------------------------------------------------

bool c1_cross_method(std::string& detail) {
  const std::vector<Lattice> lats = {make_box({3, 3}), make_box({4, 4}), make_torus({4, 4})};
  const Coupling coup;
  const FieldSpec field;
  const BoundaryCondition bc;
  double worst = 0.0;
  for (const Lattice& lat : lats) {
    for (double beta : {0.2, 0.44, 0.8}) {
      const double a = log_partition_enumerate(lat, coup, field, bc, beta);
      const double b = log_partition_transfer(lat, beta);
      const double c = log_partition_hightemp(lat, beta);
      const double d = log_partition_lowtemp(lat, beta);
      const double mx = std::max(std::max(a, b), std::max(c, d));
      const double mn = std::min(std::min(a, b), std::min(c, d));
      worst = std::max(worst, (mx - mn) / std::max(1.0, std::fabs(mx)));
    }
  }
  detail = "enumerate/transfer/high-T/low-T log Z on 3x3, 4x4 boxes and the 4x4 torus, "
           "worst relative spread " + fmt(worst, 3) + " (<= 1e-10)";
  return worst <= 1e-10;
}

bool c2_critical_point(std::string& detail) {
  const double closed = 0.5 * std::log(1.0 + std::sqrt(2.0));
  const double dev = std::fabs(critical_beta_2d() - closed);
  const double fp = std::fabs(kw_dual(critical_beta_2d()) - critical_beta_2d());
  detail = "beta_c dev " + fmt(dev, 3) + " (<= 1e-8), dual fixed-point dev " + fmt(fp, 3) +
           " (<= 1e-10)";
  return dev <= 1e-8 && fp <= 1e-10;
}

bool c3_onsager_strip(std::string& detail) {
  const double ons = onsager_minus_beta_f(0.3).value;
  double worst = 0.0;
  for (int n = 10; n <= 14; ++n)
    worst = std::max(worst, std::fabs(strip_free_energy_rate(n, 0.3) - ons));
  const double d3 = duality_residual(0.3), d7 = duality_residual(0.7);
  detail = "strip widths 10-14 vs closed form, worst gap " + fmt(worst, 3) +
           " (<= 1e-3); duality residuals " + fmt(d3, 3) + ", " + fmt(d7, 3) + " (<= 1e-6)";
  return worst <= 1e-3 && d3 <= 1e-6 && d7 <= 1e-6;
}

bool c4_spontaneous_mag(std::string& detail) {
  const double mstar = yang_magnetization(0.6);
  const Lattice lat = make_torus({64, 64});
  const Coupling coup;
  const FieldSpec field;
  const BoundaryCondition bc;
  const Estimate est =
      estimate_observable(lat, coup, field, bc, sw_params(0.6, 1200, 200, 41), "absmag", {});
  const double gap = std::fabs(est.value - mstar);
  const bool zero_at_bc = yang_magnetization(critical_beta_2d()) == 0.0;
  detail = "|m| on the 64^2 torus at beta 0.6: " + fmt(est.value, 6) + " +- " + fmt(est.err, 2) +
           " vs closed form " + fmt(mstar, 6) + ", gap " + fmt(gap, 3) +
           " (<= 0.005); m*(beta_c) exactly 0: " + (zero_at_bc ? "yes" : "no");
  return gap <= 0.005 && zero_at_bc;
}

bool c5_stationarity(std::string& detail) {
  const Coupling coup;
  const FieldSpec field;
  const BoundaryCondition bc;
  double worst = 0.0;
  int graphs = 0;
  for (int nv = 1; nv <= 4; ++nv) {
    for (const auto& edges : all_edge_subsets(nv, 6)) {
      const Lattice lat = make_graph(nv, edges);
      ++graphs;
      for (double beta : {0.3, 0.8}) {
        const auto pg = glauber_transition_matrix(lat, coup, field, bc, beta);
        worst = std::max(worst, stationarity_deviation(pg, lat, coup, field, bc, beta));
        const auto ps = sw_transition_matrix(lat, coup, beta);
        worst = std::max(worst, stationarity_deviation(ps, lat, coup, field, bc, beta));
      }
    }
  }
  detail = "Glauber and cluster kernels on all " + std::to_string(graphs) +
           " labeled graphs with V <= 4, worst |mu P - mu| " + fmt(worst, 3) + " (<= 1e-12)";
  return worst <= 1e-12;
}

bool c6_edwards_sokal(std::string& detail) {
  double worst = 0.0;
  int graphs = 0;
  for (int nv = 1; nv <= 6; ++nv) {
    for (const auto& edges : all_edge_subsets(nv, 5)) {
      if (!connects_all(nv, edges)) continue;
      const Lattice lat = make_graph(nv, edges);
      ++graphs;
      for (double beta : {0.2, 0.5, 1.0})
        worst = std::max(worst, es_coupling_check(lat, beta));
    }
  }
  detail = "joint-coupling marginals on all " + std::to_string(graphs) +
           " connected labeled graphs with <= 5 edges, worst deviation " + fmt(worst, 3) +
           " (<= 1e-12)";
  return worst <= 1e-12;
}

struct NamedGraph {
  std::string name;
  Lattice lat;
};

std::vector<NamedGraph> switching_graphs() {
  std::vector<NamedGraph> g;
  g.push_back({"path2", make_path(2)});
  g.push_back({"path3", make_path(3)});
  g.push_back({"path5", make_path(5)});
  g.push_back({"ring3", make_ring(3)});
  g.push_back({"ring4", make_ring(4)});
  g.push_back({"ring6", make_ring(6)});
  g.push_back({"star4", make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})});
  g.push_back({"box2x2", make_box({2, 2})});
  g.push_back({"theta", make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}})});
  g.push_back({"k4", make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})});
  return g;
}

bool c7_switching(std::string& detail) {
  const Coupling coup;
  const FieldSpec field;
  const BoundaryCondition bc;
  const int nmax = 10;
  double worst_excess = -1e300;  // residual minus certified tail, should stay <= slack
  double worst_cor = -1e300;
  int graphs = 0;
  for (const NamedGraph& ng : switching_graphs()) {
    const Lattice& lat = ng.lat;
    ++graphs;
    const std::vector<int> a = {0, 1};
    const std::vector<int> b =
        lat.nv >= 4 ? std::vector<int>{lat.nv - 2, lat.nv - 1}
                    : (lat.nv == 3 ? std::vector<int>{1, 2} : std::vector<int>{0, 1});
    for (double beta : {0.3, 0.7}) {
      for (SwitchFn fn : {SwitchFn::One, SwitchFn::TotalParityEven}) {
        const SwitchResult sr = switching_check(lat, coup, beta, a, b, fn, nmax);
        worst_excess = std::max(worst_excess, std::fabs(sr.lhs - sr.rhs) - sr.tail);
      }
      // squared-correlation corollary: sources(A, A) / Zbar^2 = <s_A>^2
      const std::vector<int> pair = {0, lat.nv - 1};
      const SwitchResult sw = switching_check(lat, coup, beta, pair, pair, SwitchFn::One, nmax);
      const CurrentSum s0 = current_sum(lat, coup, beta, {}, nmax);
      const double ratio = sw.rhs / (s0.value * s0.value);
      const double corr = exact_correlation(lat, coup, field, bc, beta, pair);
      const double budget =
          (sw.tail + s0.tail * (2.0 * s0.value + s0.tail)) / (s0.value * s0.value);
      worst_cor = std::max(worst_cor, std::fabs(ratio - corr * corr) - budget);
    }
  }
  detail = "double-current residuals on " + std::to_string(graphs) +
           " graphs (F = 1 and total-parity), worst residual-minus-tail " +
           fmt(worst_excess, 3) + "; corollary worst excess " + fmt(worst_cor, 3) +
           " (both <= 1e-11)";
  return worst_excess <= 1e-11 && worst_cor <= 1e-11;
}

bool c8_ursell(std::string& detail) {
  const Coupling coup;
  const int nmax = 10;
  double worst_val = -1e300, worst_excess = -1e300;
  int instances = 0;
  for (const NamedGraph& ng : switching_graphs()) {
    if (ng.lat.nv < 4) continue;
    const std::array<int, 4> xs = {0, 1, 2, 3};
    for (double beta : {0.3, 0.7}) {
      const Ursell4 u = ursell4(ng.lat, coup, beta, xs, nmax);
      ++instances;
      worst_val = std::max(worst_val, u.value);
      worst_excess = std::max(worst_excess, u.residual - u.tail);
    }
  }
  const Ursell4 u0 = ursell4(make_box({2, 2}), coup, 0.0, {0, 1, 2, 3}, nmax);
  const bool zero = u0.value == 0.0 && u0.rhs == 0.0;
  detail = std::to_string(instances) + " instances: max u4 " + fmt(worst_val, 3) +
           " (<= 1e-14), worst residual-minus-tail " + fmt(worst_excess, 3) +
           " (<= 1e-12); u4 at beta 0 exactly 0: " + (zero ? "yes" : "no");
  return worst_val <= 1e-14 && worst_excess <= 1e-12 && zero;
}

bool c9_inequality_suite(std::string& detail) {
  const RunParams mc = sw_params(0.3, 100, 20, 7);
  int bad = 0;
  std::string parts;
  for (const char* kind : {"griffiths1", "griffiths2", "ghs", "simon-lieb", "mms", "fkg-spin",
                           "fkg-fk", "p-monotone"}) {
    const BatteryResult b = run_check_battery(kind, 50, 2026, 8, mc);
    bad += b.violations;
    if (!parts.empty()) parts += ", ";
    parts += std::string(kind) + ":" + std::to_string(b.violations);
  }
  detail = "violations over 50 random instances each (" + parts + ")";
  return bad == 0;
}

bool c10_lee_yang(std::string& detail) {
  const RunParams mc = sw_params(0.3, 100, 20, 7);
  const BatteryResult b = run_check_battery("lee-yang", 200, 2026, 8, mc);
  double control_min = 1e300;
  for (int i = 0; i < 5; ++i) {
    const LeeYangInstance inst = random_lee_yang_instance(2026, static_cast<std::uint64_t>(i), 8, false);
    const LeeYangResult r = lee_yang_zeros(inst.lat, inst.coup, inst.beta);
    control_min = std::min(control_min, r.worst);
  }
  detail = "200 ferromagnetic instances, violations " + std::to_string(b.violations) +
           "; antiferromagnetic control min ||z|-1| " + fmt(control_min, 3) + " (> 1e-6)";
  return b.violations == 0 && control_min > 1e-6;
}

bool c11_gaussian_domination(std::string& detail) {
  const RunParams mc = sw_params(0.3, 100, 20, 7);
  const BatteryResult b = run_check_battery("gaussian-domination", 100, 2026, 8, mc);
  detail = "100 random field profiles on the 4x4 torus at beta 0.3/0.5, violations " +
           std::to_string(b.violations) + ", worst margin " + fmt(b.worst_margin, 3);
  return b.violations == 0;
}

bool c12_peierls(std::string& detail) {
  const Lattice lat = make_box({41, 41});
  const Coupling coup;
  const FieldSpec field;
  BoundaryCondition bc;
  bc.kind = BcKind::Plus;
  const int center = vertex_at(lat, {20, 20});
  const Estimate est = estimate_observable(lat, coup, field, bc, sw_params(1.5, 600, 100, 12),
                                           "site", {center});
  const double bound = peierls_two_point_bound(1.5);
  detail = "center correlation on the 41x41 plus box at beta 1.5: " + fmt(est.value, 6) + " +- " +
           fmt(est.err, 2) + " >= contour bound " + fmt(bound, 6) + " - 3 stderr";
  return est.value >= bound - 3.0 * est.err;
}

bool c13_exponential_decay(std::string& detail) {
  const CorrLengthFit fit = correlation_length_fit(0.3, 64, sw_params(0.3, 2500, 250, 13));
  detail = "two-point log-linear fit on the 64^2 torus at beta 0.3: rate " + fmt(fit.tau, 4) +
           " +- " + fmt(fit.tau_err, 2) + " (> 0), R^2 " + fmt(fit.r2, 5) +
           " (>= 0.99), r in [" + std::to_string(fit.rmin) + ", " + std::to_string(fit.rmax) + "]";
  return fit.tau > 0.0 && fit.r2 >= 0.99;
}

bool c14_critical_exponents(std::string& detail) {
  // The spin fit uses the smallest admissible window, r in [4, 12]: torus
  // wrap-around flattens the decay at larger separations (the cylinder map
  // already gives a local slope of 0.25 * pi*u*cot(pi*u) ~ 0.196 at
  // u = r/L = 1/4), a systematic no sweep budget can remove.  The fitted
  // window is reported alongside the exponent for audit.
  const PowerLawFit spin = exponent_experiment(ExponentKind::SpinDecay, 128,
                                               sw_params(0.0, 20000, 300, 14), 3.9, 12.1);
  const PowerLawFit energy =
      exponent_experiment(ExponentKind::EnergyDecay, 128, sw_params(0.0, 8000, 300, 15));
  detail = "L = 128 criticality: spin exponent " + fmt(spin.exponent, 4) + " +- " +
           fmt(spin.err, 2) + " over r in [" + std::to_string(static_cast<int>(spin.xmin)) +
           ", " + std::to_string(static_cast<int>(spin.xmax)) +
           "] (0.25 +- 0.03), energy exponent " + fmt(energy.exponent, 4) + " +- " +
           fmt(energy.err, 2) + " (2.0 +- 0.3)";
  return std::fabs(spin.exponent - 0.25) <= 0.03 && std::fabs(energy.exponent - 2.0) <= 0.3;
}

bool c15_scaling_relations(std::string& detail) {
  const double r1 = scaling_relations_check(mean_field_exponents());
  const double r2 = scaling_relations_check(ising2d_exponents());
  detail = "residuals: mean-field d=4 " + fmt(r1, 3) + ", relation-completed 2d " + fmt(r2, 3) +
           " (both <= 1e-12)";
  return r1 <= 1e-12 && r2 <= 1e-12;
}

bool c16_crossing(std::string& detail) {
  const double psd = 0.5857864;
  std::string parts = "self-dual crossing: ";
  bool in_band = true;
  for (int n : {8, 16, 32}) {
    const Estimate e = crossing_probability(n, 1.0, psd, n >= 32 ? 1000 : 1600, 16, 2, 0);
    in_band = in_band && e.value >= 0.2 && e.value <= 0.8;
    parts += "n=" + std::to_string(n) + ": " + fmt(e.value, 3) + " ";
  }
  const Estimate lo = crossing_probability(16, 1.0, 0.5, 1600, 17, 2, 0);
  const Estimate mid = crossing_probability(16, 1.0, 0.586, 1600, 17, 2, 0);
  const Estimate hi = crossing_probability(16, 1.0, 0.65, 1600, 17, 2, 0);
  const bool mono =
      lo.value <= mid.value + 3.0 * std::sqrt(lo.err * lo.err + mid.err * mid.err) &&
      mid.value <= hi.value + 3.0 * std::sqrt(mid.err * mid.err + hi.err * hi.err);
  detail = parts + "(in [0.2, 0.8]); monotone across p = 0.5/0.586/0.65: " + fmt(lo.value, 3) +
           " <= " + fmt(mid.value, 3) + " <= " + fmt(hi.value, 3) + " within 3 stderr";
  return in_band && mono;
}

bool c17_preholomorphicity(std::string& detail) {
  const auto one = tabulate_function(6, 6, [](std::complex<double>) {
    return std::complex<double>(1.0, 0.0);
  });
  const auto idz = tabulate_function(6, 6, [](std::complex<double> z) { return z; });
  const auto zsq = tabulate_function(6, 6, [](std::complex<double> z) { return z * z; });
  const auto con = tabulate_function(6, 6, [](std::complex<double> z) { return std::conj(z); });
  const double r1 = preholomorphic_check(one);
  const double rz = preholomorphic_check(idz);
  const double rz2 = preholomorphic_check(zsq);
  const double rc = preholomorphic_check(con);
  detail = "residuals on the 6x6 box: 1 -> " + fmt(r1, 3) + ", z -> " + fmt(rz, 3) +
           ", z^2 -> " + fmt(rz2, 3) + " (<= 1e-14); conj(z) -> " + fmt(rc, 3) + " (nonzero)";
  return r1 <= 1e-14 && rz <= 1e-14 && rz2 <= 1e-14 && rc > 1e-14;
}

bool c18_boundary_pfaffian(std::string& detail) {
  // Boundary correlations of this model are exactly Pfaffian, so both measured
  // deviations are |noise| around zero and the s = 32 noise floor is ~4x the
  // s = 16 one (the 4-point probability is ~4x smaller and fewer quads fit).
  // "Decreasing" is therefore asserted within combined error, and the sweep
  // budget is sized so the final deviation sits well below the 0.1 cap.
  const PfaffianCheck pc =
      boundary_pfaffian_experiment(128, 64, sw_params(0.0, 200000, 500, 18), 16, 32);
  const double comb = std::sqrt(pc.err_small * pc.err_small + pc.err_large * pc.err_large);
  detail = "128x64 box at criticality: deviation " + fmt(pc.dev_small, 4) + " +- " +
           fmt(pc.err_small, 2) + " (s = 16) -> " + fmt(pc.dev_large, 4) + " +- " +
           fmt(pc.err_large, 2) + " (s = 32), decreasing within 2 sigma (" + fmt(2.0 * comb, 2) +
           ") and final <= 0.1";
  return pc.dev_large <= pc.dev_small + 2.0 * comb && pc.dev_large <= 0.1;
}

bool c19_reproducibility(std::string& detail) {
  const std::string& bin = ising_lab_bin();
  const std::vector<std::string> bases = {
      bin + " mc --lattice torus --sides 16x16 --beta 0.43 --algo sw --sweeps 150 --burnin 30"
            " --chains 2 --seed 9 --observable energy",
      bin + " mc --lattice box --sides 12x12 --beta 0.55 --algo glauber --sweeps 120 --burnin 30"
            " --chains 3 --seed 4 --observable mag",
      bin + " fk --mode crossing --n 12 --p 0.55 --sweeps 200 --chains 2 --seed 5",
  };
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const CmdResult t1 = run_cmd(bases[i] + " --threads 1");
    const CmdResult t4 = run_cmd(bases[i] + " --threads 4");
    const CmdResult again = run_cmd(bases[i] + " --threads 1");
    if (t1.status != 0 || t4.status != 0 || again.status != 0) {
      detail = "experiment " + std::to_string(i) + " exited nonzero";
      return false;
    }
    if (t1.out != t4.out || t1.out != again.out) {
      detail = "experiment " + std::to_string(i) + " output differs across thread counts or reruns";
      return false;
    }
    const std::string o1 = "/tmp/acceptance_t1.csv", o4 = "/tmp/acceptance_t4.csv";
    run_cmd(bases[i] + " --threads 1 --output " + o1);
    run_cmd(bases[i] + " --threads 4 --output " + o4);
    const bool same = read_file(o1) == read_file(o4);
    std::remove(o1.c_str());
    std::remove(o4.c_str());
    if (!same) {
      detail = "experiment " + std::to_string(i) + " file output differs across thread counts";
      return false;
    }
  }
  detail = "3 experiments (cluster mc, single-site mc, crossing) byte-identical for --threads"
           " 1 vs 4 and across reruns, stdout and file output";
  return true;
}

struct Criterion {
  int id;
  std::function<bool(std::string&)> fn;
  double limit = 0.0;  // seconds; 0 = no limit
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-ising-lab>\n");
    return 2;
  }
  ising_lab_bin() = argv[1];
  const std::vector<Criterion> crits = {
      {1, c1_cross_method, 5.0},
      {2, c2_critical_point, 0.0},
      {3, c3_onsager_strip, 60.0},
      {4, c4_spontaneous_mag, 120.0},
      {5, c5_stationarity, 0.0},
      {6, c6_edwards_sokal, 0.0},
      {7, c7_switching, 0.0},
      {8, c8_ursell, 0.0},
      {9, c9_inequality_suite, 0.0},
      {10, c10_lee_yang, 0.0},
      {11, c11_gaussian_domination, 0.0},
      {12, c12_peierls, 60.0},
      {13, c13_exponential_decay, 0.0},
      {14, c14_critical_exponents, 900.0},
      {15, c15_scaling_relations, 0.0},
      {16, c16_crossing, 0.0},
      {17, c17_preholomorphicity, 0.0},
      {18, c18_boundary_pfaffian, 0.0},
      {19, c19_reproducibility, 0.0},
  };
  std::set<int> only;  // optional extra args: run just these criterion ids
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int passed = 0;
  int total = 0;
  for (const Criterion& c : crits) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++total;
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.limit > 0.0 && secs > c.limit) {
      ok = false;
      detail += " [exceeded " + fmt(c.limit, 3) + "s budget]";
    }
    std::printf("%s criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id, detail.c_str(), secs);
    std::fflush(stdout);
    passed += ok ? 1 : 0;
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, total);
  return passed == total ? 0 : 1;
}
