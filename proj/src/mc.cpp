#include "ising/mc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "ising/exact.hpp"
#include "ising/rng.hpp"

namespace ising {

namespace {

// counter tags keeping every purpose in its own RNG lane
enum : std::uint64_t {
  kTagInit = 1,
  kTagGlauber = 2,
  kTagSwEdge = 3,
  kTagSwGhost = 4,
  kTagSwColor = 5,
  kTagIid = 6,
};

inline std::uint64_t lane(std::uint64_t tag, std::uint64_t sweep) { return (tag << 56) | sweep; }

inline std::uint64_t below(std::uint64_t word, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<__uint128_t>(word) * n) >> 64);
}

struct GhostPlan {
  bool active = false;
  std::vector<int> nplus, nminus;  // exterior neighbour counts by pinned sign
};

GhostPlan ghost_plan(const Lattice& lat, const BoundaryCondition& bc) {
  GhostPlan g;
  if (bc.kind == BcKind::Free || lat.kind != LatticeKind::Box) return g;
  g.active = true;
  auto deg = exterior_degree(lat);
  auto field = exterior_field(lat, bc);
  g.nplus.resize(lat.nv);
  g.nminus.resize(lat.nv);
  for (int x = 0; x < lat.nv; ++x) {
    int d = deg[x];
    int net = static_cast<int>(std::lround(field[x]));
    g.nplus[x] = (d + net) / 2;
    g.nminus[x] = (d - net) / 2;
  }
  return g;
}

std::vector<double> local_boundary_field(const Lattice& lat, const BoundaryCondition& bc) {
  if (bc.kind == BcKind::Free || lat.kind != LatticeKind::Box)
    return std::vector<double>(lat.nv, 0.0);
  return exterior_field(lat, bc);
}

}  // namespace

ChainState init_chain(const Lattice& lat, std::uint64_t seed, std::uint64_t chain_id) {
  ChainState st;
  st.seed = seed;
  st.chain_id = chain_id;
  st.sweep = 0;
  st.spins.resize(lat.nv);
  for (int x = 0; x < lat.nv; ++x)
    st.spins[x] = (rng_word(seed, chain_id, lane(kTagInit, 0), x) & 1u) ? 1 : -1;
  return st;
}

void glauber_sweep(ChainState& st, const Lattice& lat, const Coupling& coup,
                   const FieldSpec& field, const BoundaryCondition& bc, double beta) {
  auto b = local_boundary_field(lat, bc);
  const std::uint64_t a = lane(kTagGlauber, st.sweep);
  const auto n = static_cast<std::uint64_t>(lat.nv);
  for (std::uint64_t t = 0; t < n; ++t) {
    int x = static_cast<int>(below(rng_word(st.seed, st.chain_id, a, 2 * t), n));
    double loc = field.h(x) + b[x];
    for (auto [y, e] : lat.adj[x]) loc += coup.j(e) * st.spins[y];
    double gap = st.spins[x] * loc;
    if (gap <= 0.0) {
      st.spins[x] = static_cast<signed char>(-st.spins[x]);
    } else {
      double u = static_cast<double>(rng_word(st.seed, st.chain_id, a, 2 * t + 1) >> 11) * 0x1.0p-53;
      if (u < std::exp(-2.0 * beta * gap)) st.spins[x] = static_cast<signed char>(-st.spins[x]);
    }
  }
  ++st.sweep;
}

SwInfo swendsen_wang_sweep(ChainState& st, const Lattice& lat, const Coupling& coup,
                           const BoundaryCondition& bc, double beta) {
  for (int e = 0; e < lat.ne(); ++e)
    if (coup.j(e) < 0.0)
      throw std::invalid_argument("swendsen_wang_sweep: couplings must be ferromagnetic");
  GhostPlan gp = ghost_plan(lat, bc);
  if (gp.active && !coup.is_uniform())
    throw std::invalid_argument("swendsen_wang_sweep: boundary ghosts need a uniform coupling");

  SwInfo info;
  bool any_plus = false, any_minus = false;
  if (gp.active)
    for (int x = 0; x < lat.nv; ++x) {
      any_plus = any_plus || gp.nplus[x] > 0;
      any_minus = any_minus || gp.nminus[x] > 0;
    }
  info.nodes = lat.nv + (any_plus ? 1 : 0) + (any_minus ? 1 : 0);
  info.ghost_plus = any_plus ? lat.nv : -1;
  info.ghost_minus = any_minus ? lat.nv + (any_plus ? 1 : 0) : -1;
  info.uf = UnionFind(info.nodes);

  const std::uint64_t ae = lane(kTagSwEdge, st.sweep);
  const double puni = 1.0 - std::exp(-2.0 * beta * coup.uniform);
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[e];
    if (st.spins[u] != st.spins[v]) continue;
    double p = coup.is_uniform() ? puni : 1.0 - std::exp(-2.0 * beta * coup.j(e));
    double r = static_cast<double>(rng_word(st.seed, st.chain_id, ae, e) >> 11) * 0x1.0p-53;
    if (r < p) info.uf.unite(u, v);
  }
  if (gp.active) {
    const std::uint64_t ag = lane(kTagSwGhost, st.sweep);
    for (int x = 0; x < lat.nv; ++x) {
      if (gp.nplus[x] > 0 && st.spins[x] == 1) {
        double p = 1.0 - std::exp(-2.0 * beta * coup.uniform * gp.nplus[x]);
        double r = static_cast<double>(rng_word(st.seed, st.chain_id, ag, 2ull * x) >> 11) * 0x1.0p-53;
        if (r < p) info.uf.unite(x, info.ghost_plus);
      }
      if (gp.nminus[x] > 0 && st.spins[x] == -1) {
        double p = 1.0 - std::exp(-2.0 * beta * coup.uniform * gp.nminus[x]);
        double r =
            static_cast<double>(rng_word(st.seed, st.chain_id, ag, 2ull * x + 1) >> 11) * 0x1.0p-53;
        if (r < p) info.uf.unite(x, info.ghost_minus);
      }
    }
  }

  const std::uint64_t ac = lane(kTagSwColor, st.sweep);
  int rp = info.ghost_plus >= 0 ? info.uf.find(info.ghost_plus) : -1;
  int rm = info.ghost_minus >= 0 ? info.uf.find(info.ghost_minus) : -1;
  for (int x = 0; x < lat.nv; ++x) {
    int r = info.uf.find(x);
    if (r == rp)
      st.spins[x] = 1;
    else if (r == rm)
      st.spins[x] = -1;
    else
      st.spins[x] = (rng_word(st.seed, st.chain_id, ac, r) & 1u) ? 1 : -1;
  }
  ++st.sweep;
  return info;
}

// ---- exact transition matrices ----------------------------------------------

namespace {

inline int spin_of(std::uint32_t c, int i) { return 1 - 2 * static_cast<int>((c >> i) & 1u); }

std::vector<double> boltzmann(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                              const BoundaryCondition& bc, double beta) {
  std::uint32_t n = 1u << lat.nv;
  std::vector<double> mu(n);
  SpinConfig s(lat.nv);
  double zsum = 0.0;
  for (std::uint32_t c = 0; c < n; ++c) {
    for (int i = 0; i < lat.nv; ++i) s[i] = static_cast<signed char>(spin_of(c, i));
    mu[c] = std::exp(-beta * hamiltonian(lat, coup, field, bc, s));
    zsum += mu[c];
  }
  for (auto& x : mu) x /= zsum;
  return mu;
}

}  // namespace

Eigen::MatrixXd glauber_transition_matrix(const Lattice& lat, const Coupling& coup,
                                          const FieldSpec& field, const BoundaryCondition& bc,
                                          double beta) {
  if (lat.nv > 12) throw std::invalid_argument("glauber_transition_matrix: too many vertices");
  auto b = local_boundary_field(lat, bc);
  std::uint32_t n = 1u << lat.nv;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t c = 0; c < n; ++c) {
    double stay = 1.0;
    for (int x = 0; x < lat.nv; ++x) {
      double loc = field.h(x) + b[x];
      for (auto [y, e] : lat.adj[x]) loc += coup.j(e) * spin_of(c, y);
      double gap = spin_of(c, x) * loc;
      double pf = gap <= 0.0 ? 1.0 : std::exp(-2.0 * beta * gap);
      p(c, c ^ (1u << x)) += pf / lat.nv;
      stay -= pf / lat.nv;
    }
    p(c, c) += stay;
  }
  return p;
}

Eigen::MatrixXd sw_transition_matrix(const Lattice& lat, const Coupling& coup, double beta) {
  if (lat.nv > 6) throw std::invalid_argument("sw_transition_matrix: too many vertices");
  std::uint32_t n = 1u << lat.nv;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t c = 0; c < n; ++c) {
    std::vector<int> sat;
    for (int e = 0; e < lat.ne(); ++e)
      if (spin_of(c, lat.edges[e][0]) == spin_of(c, lat.edges[e][1])) sat.push_back(e);
    std::uint32_t m = 1u << sat.size();
    for (std::uint32_t sub = 0; sub < m; ++sub) {
      double w = 1.0;
      UnionFind uf(lat.nv);
      for (std::size_t i = 0; i < sat.size(); ++i) {
        double pe = 1.0 - std::exp(-2.0 * beta * coup.j(sat[i]));
        if (sub >> i & 1u) {
          w *= pe;
          uf.unite(lat.edges[sat[i]][0], lat.edges[sat[i]][1]);
        } else {
          w *= 1.0 - pe;
        }
      }
      std::vector<int> roots;
      for (int x = 0; x < lat.nv; ++x)
        if (uf.find(x) == x) roots.push_back(x);
      int k = static_cast<int>(roots.size());
      double wk = w / static_cast<double>(1u << k);
      for (std::uint32_t colors = 0; colors < (1u << k); ++colors) {
        std::uint32_t to = 0;
        for (int x = 0; x < lat.nv; ++x) {
          int r = uf.find(x);
          int ri = static_cast<int>(std::lower_bound(roots.begin(), roots.end(), r) - roots.begin());
          if (colors >> ri & 1u) to |= 1u << x;
        }
        p(c, to) += wk;
      }
    }
  }
  return p;
}

double stationarity_deviation(const Eigen::MatrixXd& p, const Lattice& lat, const Coupling& coup,
                              const FieldSpec& field, const BoundaryCondition& bc, double beta) {
  auto mu = boltzmann(lat, coup, field, bc, beta);
  Eigen::Map<const Eigen::RowVectorXd> m(mu.data(), static_cast<Eigen::Index>(mu.size()));
  Eigen::RowVectorXd after = m * p;
  return (after - m).cwiseAbs().maxCoeff();
}

// ---- estimator driver --------------------------------------------------------

std::vector<std::vector<double>> run_raw(const Lattice& lat, const Coupling& coup,
                                         const FieldSpec& field, const BoundaryCondition& bc,
                                         const RunParams& params, int ncomp,
                                         const MeasureFn& measure) {
  if (params.chains < 1) throw std::invalid_argument("run_raw: need at least one chain");
  if (params.sweeps < params.min_bins)
    throw std::invalid_argument("run_raw: too few sweeps for the binning floor");
  if (params.algo == Algo::SwendsenWang && !field.zero())
    throw std::invalid_argument("run_raw: Swendsen-Wang requires zero external field");
  int threads = resolve_threads(params.threads);
  auto chains = map_chunks<std::vector<double>>(
      static_cast<std::uint64_t>(params.chains), 1, threads,
      [&](std::uint64_t lo, std::uint64_t) {
        ChainState st = init_chain(lat, params.seed, lo);
        std::vector<double> rows;
        rows.reserve(static_cast<std::size_t>(params.sweeps) * ncomp);
        std::vector<double> row(ncomp);
        for (long t = 0; t < params.burnin; ++t) {
          if (params.algo == Algo::Glauber)
            glauber_sweep(st, lat, coup, field, bc, params.beta);
          else
            swendsen_wang_sweep(st, lat, coup, bc, params.beta);
        }
        for (long t = 0; t < params.sweeps; ++t) {
          std::fill(row.begin(), row.end(), 0.0);
          if (params.algo == Algo::Glauber) {
            glauber_sweep(st, lat, coup, field, bc, params.beta);
            measure(st, nullptr, row);
          } else {
            SwInfo info = swendsen_wang_sweep(st, lat, coup, bc, params.beta);
            measure(st, &info, row);
          }
          rows.insert(rows.end(), row.begin(), row.end());
        }
        return rows;
      });
  return chains;
}

BinStats pooled_component(const std::vector<std::vector<double>>& raw, int ncomp, int k,
                          int min_bins) {
  std::vector<std::vector<double>> series;
  for (const auto& chain : raw) {
    std::vector<double> s;
    s.reserve(chain.size() / ncomp);
    for (std::size_t i = static_cast<std::size_t>(k); i < chain.size();
         i += static_cast<std::size_t>(ncomp))
      s.push_back(chain[i]);
    series.push_back(std::move(s));
  }
  return pooled_binned_stats(series, min_bins);
}

std::vector<std::vector<double>> component_bins(const std::vector<std::vector<double>>& raw,
                                                int ncomp, int bins_per_chain) {
  std::vector<std::vector<double>> bins;
  for (const auto& chain : raw) {
    long nsw = static_cast<long>(chain.size()) / ncomp;
    long per = nsw / bins_per_chain;
    if (per < 1) throw std::invalid_argument("component_bins: too few sweeps per bin");
    for (int b = 0; b < bins_per_chain; ++b) {
      std::vector<double> mean(ncomp, 0.0);
      for (long t = b * per; t < (b + 1) * per; ++t)
        for (int k = 0; k < ncomp; ++k) mean[k] += chain[static_cast<std::size_t>(t * ncomp + k)];
      for (auto& m : mean) m /= static_cast<double>(per);
      bins.push_back(std::move(mean));
    }
  }
  return bins;
}

Estimate estimate_observable(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                             const BoundaryCondition& bc, const RunParams& params,
                             const std::string& observable, const std::vector<int>& vertices) {
  const double V = lat.nv;
  long total = params.sweeps * params.chains;

  auto simple = [&](const MeasureFn& f) {
    auto raw = run_raw(lat, coup, field, bc, params, 1, f);
    BinStats s = pooled_component(raw, 1, 0, params.min_bins);
    return Estimate{s.mean, s.err, total};
  };
  auto mag_of = [V](const ChainState& st) {
    long m = 0;
    for (auto s : st.spins) m += s;
    return static_cast<double>(m) / V;
  };
  auto total_h = [&](const ChainState& st) {
    return hamiltonian(lat, coup, field, bc, st.spins);
  };

  if (observable == "mag")
    return simple([&](const ChainState& st, SwInfo*, std::vector<double>& r) { r[0] = mag_of(st); });
  if (observable == "absmag")
    return simple(
        [&](const ChainState& st, SwInfo*, std::vector<double>& r) { r[0] = std::fabs(mag_of(st)); });
  if (observable == "site") {
    if (vertices.empty()) throw std::invalid_argument("estimate_observable: site needs a vertex");
    int x = vertices[0];
    return simple([x](const ChainState& st, SwInfo*, std::vector<double>& r) { r[0] = st.spins[x]; });
  }
  if (observable == "energy") {
    double ne = std::max(1, lat.ne());
    return simple([&, ne](const ChainState& st, SwInfo*, std::vector<double>& r) {
      double bond = 0.0;
      for (int e = 0; e < lat.ne(); ++e)
        bond += coup.j(e) * st.spins[lat.edges[e][0]] * st.spins[lat.edges[e][1]];
      r[0] = -bond / ne;
    });
  }
  if (observable == "chi" || observable == "cv") {
    bool chi = observable == "chi";
    auto raw = run_raw(lat, coup, field, bc, params, 2,
                       [&](const ChainState& st, SwInfo*, std::vector<double>& r) {
                         double v = chi ? mag_of(st) * V : total_h(st);
                         r[0] = v;
                         r[1] = v * v;
                       });
    auto bins = component_bins(raw, 2, params.min_bins);
    double beta2 = params.beta * params.beta;
    auto f = [&](const std::vector<double>& m) {
      double var = m[1] - m[0] * m[0];
      return (chi ? var : beta2 * var) / V;
    };
    JackknifeResult jr = jackknife_bins(bins, f);
    return Estimate{jr.value, jr.err, total};
  }
  throw std::invalid_argument("estimate_observable: unknown observable " + observable);
}

std::vector<Estimate> estimate_two_point(const Lattice& lat, const Coupling& coup,
                                         const FieldSpec& field, const BoundaryCondition& bc,
                                         const RunParams& params, int origin,
                                         const std::vector<int>& targets) {
  int ncomp = static_cast<int>(targets.size());
  if (ncomp == 0) return {};
  auto raw = run_raw(lat, coup, field, bc, params, ncomp,
                     [&](const ChainState& st, SwInfo*, std::vector<double>& r) {
                       for (int k = 0; k < ncomp; ++k)
                         r[k] = st.spins[origin] * st.spins[targets[k]];
                     });
  std::vector<Estimate> out;
  for (int k = 0; k < ncomp; ++k) {
    BinStats s = pooled_component(raw, ncomp, k, params.min_bins);
    out.push_back({s.mean, s.err, params.sweeps * params.chains});
  }
  return out;
}

// ---- translation-averaged torus correlators ---------------------------------

namespace {

// index shift tables for an L x L torus (axis-0 fastest)
std::vector<int> shift_table(int L, int r, int axis) {
  std::vector<int> t(static_cast<std::size_t>(L) * L);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) {
      int nx = axis == 0 ? (x + r) % L : x;
      int ny = axis == 1 ? (y + r) % L : y;
      t[static_cast<std::size_t>(y) * L + x] = nx + L * ny;
    }
  return t;
}

}  // namespace

AxisCorr fk_axis_correlations(int L, double beta, const std::vector<int>& rs,
                              const RunParams& params_in) {
  RunParams params = params_in;
  params.beta = beta;
  params.algo = Algo::SwendsenWang;
  Lattice lat = make_torus({L, L});
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  int ncomp = static_cast<int>(rs.size());
  std::vector<std::vector<int>> sh0, sh1;
  for (int r : rs) {
    sh0.push_back(shift_table(L, r, 0));
    sh1.push_back(shift_table(L, r, 1));
  }
  const int V = lat.nv;
  auto raw = run_raw(lat, coup, field, bc, params, ncomp,
                     [&](const ChainState&, SwInfo* sw, std::vector<double>& row) {
                       for (int k = 0; k < ncomp; ++k) {
                         long hit = 0;
                         for (int v = 0; v < V; ++v) {
                           int a = sw->uf.find(v);
                           hit += (a == sw->uf.find(sh0[k][v])) + (a == sw->uf.find(sh1[k][v]));
                         }
                         row[k] = static_cast<double>(hit) / (2.0 * V);
                       }
                     });
  AxisCorr out;
  out.r = rs;
  for (int k = 0; k < ncomp; ++k) {
    BinStats s = pooled_component(raw, ncomp, k, params.min_bins);
    out.value.push_back(s.mean);
    out.err.push_back(s.err);
  }
  out.bins = component_bins(raw, ncomp, params.min_bins);
  return out;
}

AxisCorr energy_axis_correlations(int L, double beta, const std::vector<int>& rs,
                                  const RunParams& params_in) {
  RunParams params = params_in;
  params.beta = beta;
  params.algo = Algo::SwendsenWang;
  Lattice lat = make_torus({L, L});
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  int ncomp = static_cast<int>(rs.size()) + 1;  // last component: mean bond energy
  std::vector<std::vector<int>> sh0, sh1;
  for (int r : rs) {
    sh0.push_back(shift_table(L, r, 0));
    sh1.push_back(shift_table(L, r, 1));
  }
  std::vector<int> s1 = shift_table(L, 1, 0), s2 = shift_table(L, 1, 1);
  const int V = lat.nv;
  auto raw = run_raw(
      lat, coup, field, bc, params, ncomp,
      [&](const ChainState& st, SwInfo*, std::vector<double>& row) {
        const auto& s = st.spins;
        std::vector<double> e0(V), e1(V);
        double u = 0.0;
        for (int v = 0; v < V; ++v) {
          e0[v] = s[v] * s[s1[v]];
          e1[v] = s[v] * s[s2[v]];
          u += e0[v] + e1[v];
        }
        row[ncomp - 1] = u / (2.0 * V);
        for (std::size_t k = 0; k < rs.size(); ++k) {
          double acc = 0.0;
          for (int v = 0; v < V; ++v) acc += e0[v] * e0[sh0[k][v]] + e1[v] * e1[sh1[k][v]];
          row[k] = acc / (2.0 * V);
        }
      });
  auto bins = component_bins(raw, ncomp, params.min_bins);
  AxisCorr out;
  out.r = rs;
  out.bins = bins;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    JackknifeResult jr = jackknife_bins(
        bins, [&](const std::vector<double>& m) { return m[k] - m[ncomp - 1] * m[ncomp - 1]; });
    out.value.push_back(jr.value);
    out.err.push_back(jr.err);
  }
  return out;
}

CorrLengthFit correlation_length_fit(double beta, int L, const RunParams& params, int /*axis*/) {
  if (beta >= critical_beta_2d())
    throw std::invalid_argument("correlation_length_fit: needs beta below the 2d critical point");
  std::vector<int> rs;
  for (int r = 1; r <= std::min(L / 4, 16); ++r) rs.push_back(r);
  AxisCorr data = fk_axis_correlations(L, beta, rs, params);
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (data.value[i] <= 3.0 * data.err[i] || data.value[i] <= 0.0) break;  // trimmed range
    double rel = data.err[i] / data.value[i];
    xs.push_back(rs[i]);
    ys.push_back(std::log(data.value[i]));
    ws.push_back(rel > 0 ? 1.0 / (rel * rel) : 1.0);
  }
  if (xs.size() < 4)
    throw std::runtime_error("correlation_length_fit: fewer than 4 usable separations");
  LinearFit fit = weighted_linear_fit(xs, ys, ws);
  CorrLengthFit out;
  out.tau = -fit.slope;
  out.tau_err = fit.slope_err;
  out.r2 = fit.r2;
  out.rmin = static_cast<int>(xs.front());
  out.rmax = static_cast<int>(xs.back());
  out.data = std::move(data);
  return out;
}

// ---- gaussianity diagnostic --------------------------------------------------

namespace {

// D = |mean(cosh(z S / sqrt(vhat))) e^{-z^2/2} - 1| with vhat = mean(S^2),
// jackknifed over bins (vhat and the cosh mean recomputed per replicate).
JackknifeResult gauss_functional(const std::vector<std::vector<double>>& bin_series, double z) {
  int nb = static_cast<int>(bin_series.size());
  auto eval = [&](int skip) {
    double s2 = 0.0, n = 0.0;
    for (int b = 0; b < nb; ++b) {
      if (b == skip) continue;
      for (double s : bin_series[b]) {
        s2 += s * s;
        n += 1.0;
      }
    }
    double vhat = s2 / n;
    double root = std::sqrt(vhat);
    KahanSum m;
    for (int b = 0; b < nb; ++b) {
      if (b == skip) continue;
      for (double s : bin_series[b]) m.add(std::cosh(z * s / root));
    }
    return std::fabs(m.value() / n * std::exp(-0.5 * z * z) - 1.0);
  };
  double full = eval(-1);
  double mean_rep = 0.0;
  std::vector<double> reps(nb);
  for (int b = 0; b < nb; ++b) {
    reps[b] = eval(b);
    mean_rep += reps[b];
  }
  mean_rep /= nb;
  double var = 0.0;
  for (double r : reps) var += sq(r - mean_rep);
  var *= static_cast<double>(nb - 1) / nb;
  return {full, std::sqrt(var)};
}

}  // namespace

JackknifeResult gaussianity_diagnostic(const std::function<double(double, double)>& f, int L,
                                       double beta, double z, const RunParams& params_in) {
  RunParams params = params_in;
  params.beta = beta;
  params.algo = Algo::SwendsenWang;
  if (z == 0.0) return {0.0, 0.0};
  const int V = L * L;
  std::vector<double> fv(static_cast<std::size_t>(V));
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x)
      fv[static_cast<std::size_t>(y) * L + x] =
          f(static_cast<double>(x) / L, static_cast<double>(y) / L);
  bool constant_f = std::all_of(fv.begin(), fv.end(), [&](double v) { return v == fv[0]; });

  std::vector<std::vector<double>> bin_series;
  if (beta == 0.0 && constant_f && fv[0] != 0.0) {
    // independent spins: S/f0 = V - 2*popcount of V fair bits per sample
    long total = params.sweeps * params.chains;
    int nb = params.min_bins;
    long per = total / nb;
    int words = (V + 63) / 64;
    std::uint64_t last_mask = (V % 64) ? ((1ull << (V % 64)) - 1) : ~0ull;
    long t = 0;
    for (int b = 0; b < nb; ++b) {
      std::vector<double> s;
      s.reserve(static_cast<std::size_t>(per));
      for (long i = 0; i < per; ++i, ++t) {
        int pc = 0;
        for (int w = 0; w < words; ++w) {
          std::uint64_t bits = rng_word(params.seed, 0, lane(kTagIid, static_cast<std::uint64_t>(t)), w);
          if (w == words - 1) bits &= last_mask;
          pc += std::popcount(bits);
        }
        s.push_back(fv[0] * (V - 2.0 * pc));
      }
      bin_series.push_back(std::move(s));
    }
    return gauss_functional(bin_series, z);
  }

  Lattice lat = make_torus({L, L});
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  auto raw = run_raw(lat, coup, field, bc, params, 1,
                     [&](const ChainState& st, SwInfo*, std::vector<double>& row) {
                       double s = 0.0;
                       for (int v = 0; v < V; ++v) s += fv[v] * st.spins[v];
                       row[0] = s;
                     });
  for (const auto& chain : raw) {
    long nsw = static_cast<long>(chain.size());
    long per = nsw / params.min_bins;
    for (int b = 0; b < params.min_bins; ++b)
      bin_series.emplace_back(chain.begin() + b * per, chain.begin() + (b + 1) * per);
  }
  return gauss_functional(bin_series, z);
}

// ---- boundary Pfaffian -------------------------------------------------------

JackknifeResult boundary_pfaffian_deviation(int lx, int ly, double beta, int s,
                                            const RunParams& params_in) {
  RunParams params = params_in;
  params.beta = beta;
  params.algo = Algo::SwendsenWang;
  Lattice lat = make_box({lx, ly});
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  const int margin = 8;
  std::vector<std::array<int, 4>> quads;
  for (int row : {0, ly - 1}) {
    int base = row * lx;
    for (int x0 = margin; x0 + 3 * s <= lx - 1 - margin; x0 += 2)
      quads.push_back({base + x0, base + x0 + s, base + x0 + 2 * s, base + x0 + 3 * s});
  }
  if (quads.empty()) throw std::invalid_argument("boundary_pfaffian_deviation: box too small");
  // components: [P4, p12, p34, p13, p24, p14, p23]
  const int ncomp = 7;
  auto raw = run_raw(lat, coup, field, bc, params, ncomp,
                     [&](const ChainState&, SwInfo* sw, std::vector<double>& row) {
                       for (const auto& q : quads) {
                         int a = sw->uf.find(q[0]), b2 = sw->uf.find(q[1]), c = sw->uf.find(q[2]),
                             d = sw->uf.find(q[3]);
                         bool p12 = a == b2, p34 = c == d, p13 = a == c, p24 = b2 == d,
                              p14 = a == d, p23 = b2 == c;
                         // every cluster must hold an even number of the four points
                         bool all4 = (p12 && p34 && p13) /* one cluster */;
                         bool even = all4 || (p12 && p34 && !p13 && !p14) ||
                                     (p13 && p24 && !p12 && !p14) || (p14 && p23 && !p12 && !p13);
                         row[0] += even;
                         row[1] += p12;
                         row[2] += p34;
                         row[3] += p13;
                         row[4] += p24;
                         row[5] += p14;
                         row[6] += p23;
                       }
                       for (auto& v : row) v /= static_cast<double>(quads.size());
                     });
  auto bins = component_bins(raw, ncomp, params.min_bins);
  return jackknife_bins(bins, [](const std::vector<double>& m) {
    double pf = m[1] * m[2] - m[3] * m[4] + m[5] * m[6];
    return std::fabs(m[0] - pf) / pf;
  });
}

}  // namespace ising
