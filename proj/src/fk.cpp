#include "ising/fk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ising/exact.hpp"
#include "ising/rng.hpp"

namespace ising {

namespace {

int mask_cluster_count(const Lattice& lat, std::uint64_t mask) {
  UnionFind uf(lat.nv);
  for (int e = 0; e < lat.ne(); ++e)
    if (mask >> e & 1ull) uf.unite(lat.edges[e][0], lat.edges[e][1]);
  return uf.components();
}

void require_enumerable(const Lattice& lat) {
  if (lat.ne() > 24) throw std::invalid_argument("fk enumeration capped at 24 edges");
}

// single pass over all configurations: weight * f accumulated with Kahan
double weighted_sum(const Lattice& lat, double p, double q,
                    const std::function<double(std::uint64_t)>& f) {
  require_enumerable(lat);
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("fk enumeration needs p in (0,1)");
  const int ne = lat.ne();
  const double lp = std::log(p), lq = std::log1p(-p), lqq = std::log(q);
  KahanSum acc;
  for (std::uint64_t mask = 0; mask < (1ull << ne); ++mask) {
    int open = std::popcount(mask);
    double lw = open * lp + (ne - open) * lq + mask_cluster_count(lat, mask) * lqq;
    acc.add(std::exp(lw) * f(mask));
  }
  return acc.value();
}

void require_increasing(const Lattice& lat, const std::function<double(std::uint64_t)>& f,
                        const char* name) {
  if (lat.ne() > 16)
    throw std::invalid_argument("monotonicity scan capped at 16 edges");
  for (std::uint64_t mask = 0; mask < (1ull << lat.ne()); ++mask)
    for (int e = 0; e < lat.ne(); ++e)
      if (!(mask >> e & 1ull) && f(mask | (1ull << e)) < f(mask))
        throw std::invalid_argument(std::string(name) + " is not increasing");
}

}  // namespace

int fk_cluster_count(const Lattice& lat, const std::vector<std::uint8_t>& open) {
  UnionFind uf(lat.nv);
  for (int e = 0; e < lat.ne(); ++e)
    if (open[e]) uf.unite(lat.edges[e][0], lat.edges[e][1]);
  return uf.components();
}

double fk_log_weight(const Lattice& lat, const std::vector<std::uint8_t>& open, double p,
                     double q) {
  if (static_cast<int>(open.size()) != lat.ne())
    throw std::invalid_argument("fk_log_weight: size mismatch");
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("fk_log_weight: p must be in (0,1)");
  FkConfig cfg{open};
  int k = fk_cluster_count(lat, open);
  int o = cfg.open_count();
  return o * std::log(p) + (lat.ne() - o) * std::log1p(-p) + k * std::log(q);
}

double fk_expectation(const Lattice& lat, double p, double q,
                      const std::function<double(std::uint64_t)>& f) {
  double num = weighted_sum(lat, p, q, f);
  double den = weighted_sum(lat, p, q, [](std::uint64_t) { return 1.0; });
  return num / den;
}

double fk_even_event_probability(const Lattice& lat, double p, double q,
                                 const std::vector<int>& a) {
  return fk_expectation(lat, p, q, [&](std::uint64_t mask) {
    UnionFind uf(lat.nv);
    for (int e = 0; e < lat.ne(); ++e)
      if (mask >> e & 1ull) uf.unite(lat.edges[e][0], lat.edges[e][1]);
    std::vector<int> odd;
    for (int v : a) {
      int r = uf.find(v);
      auto it = std::find(odd.begin(), odd.end(), r);
      if (it == odd.end())
        odd.push_back(r);
      else
        odd.erase(it);
    }
    return odd.empty() ? 1.0 : 0.0;
  });
}

double es_coupling_check(const Lattice& lat, double beta) {
  require_enumerable(lat);
  if (lat.ne() > 20) throw std::invalid_argument("es_coupling_check: capped at 20 edges");
  const double p = 1.0 - std::exp(-2.0 * beta);
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  double dev = 0.0;
  auto check = [&](const std::vector<int>& a) {
    double spins = exact_correlation(lat, coup, field, bc, beta, a);
    double bonds = beta == 0.0 ? (a.empty() ? 1.0 : 0.0) : fk_even_event_probability(lat, p, 2.0, a);
    dev = std::max(dev, std::fabs(spins - bonds));
  };
  for (int u = 0; u < lat.nv; ++u)
    for (int v = u + 1; v < lat.nv; ++v) check({u, v});
  for (int a = 0; a < lat.nv; ++a)
    for (int b = a + 1; b < lat.nv; ++b)
      for (int c = b + 1; c < lat.nv; ++c)
        for (int d = c + 1; d < lat.nv; ++d) check({a, b, c, d});
  return dev;
}

SpinConfig edwards_sokal_spins(const Lattice& lat, const FkConfig& cfg, std::uint64_t seed) {
  UnionFind uf(lat.nv);
  for (int e = 0; e < lat.ne(); ++e)
    if (cfg.open[e]) uf.unite(lat.edges[e][0], lat.edges[e][1]);
  SpinConfig s(lat.nv);
  for (int v = 0; v < lat.nv; ++v)
    s[v] = (rng_word(seed, 0x45534Full, 0, uf.find(v)) & 1u) ? 1 : -1;
  return s;
}

FkConfig fk_sample(const Lattice& lat, double beta, long sweeps, std::uint64_t seed) {
  Coupling coup;
  BoundaryCondition bc;
  ChainState st = init_chain(lat, seed, 0);
  for (long t = 0; t < sweeps; ++t) swendsen_wang_sweep(st, lat, coup, bc, beta);
  const double p = 1.0 - std::exp(-2.0 * beta);
  FkConfig cfg;
  cfg.open.assign(lat.ne(), 0);
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[e];
    if (st.spins[u] != st.spins[v]) continue;
    double r = static_cast<double>(rng_word(seed, 0x464Bull, st.sweep, e) >> 11) * 0x1.0p-53;
    if (r < p) cfg.open[e] = 1;
  }
  return cfg;
}

double fkg_violation(const Lattice& lat, double p, double q,
                     const std::function<double(std::uint64_t)>& f,
                     const std::function<double(std::uint64_t)>& g) {
  if (q < 1.0) throw std::invalid_argument("fkg_violation: needs q >= 1");
  require_increasing(lat, f, "f");
  require_increasing(lat, g, "g");
  double ef = fk_expectation(lat, p, q, f);
  double eg = fk_expectation(lat, p, q, g);
  double efg = fk_expectation(lat, p, q, [&](std::uint64_t m) { return f(m) * g(m); });
  return std::max(0.0, ef * eg - efg);
}

double p_monotone_violation(const Lattice& lat, double p_lo, double p_hi, double q,
                            const std::function<double(std::uint64_t)>& f) {
  if (q < 1.0) throw std::invalid_argument("p_monotone_violation: needs q >= 1");
  if (p_lo > p_hi) throw std::invalid_argument("p_monotone_violation: p_lo must be <= p_hi");
  require_increasing(lat, f, "f");
  return std::max(0.0, fk_expectation(lat, p_lo, q, f) - fk_expectation(lat, p_hi, q, f));
}

Estimate crossing_probability(int n, double rho, double p, long sweeps, std::uint64_t seed,
                              int chains, int threads) {
  if (n < 1 || p < 0.0 || p > 1.0) throw std::invalid_argument("crossing_probability: bad inputs");
  int w = static_cast<int>(std::lround(rho * n)) + 1;  // vertices spanning [0, rho n]
  int h = n + 1;
  if (p == 0.0) return {n >= 1 ? 0.0 : 1.0, 0.0, 0};
  if (p == 1.0) return {1.0, 0.0, 0};
  double beta = -0.5 * std::log1p(-p);
  Lattice lat = make_box({w, h});
  Coupling coup;
  FieldSpec field;
  BoundaryCondition bc;
  RunParams params;
  params.algo = Algo::SwendsenWang;
  params.beta = beta;
  params.sweeps = sweeps;
  params.burnin = std::max<long>(20, sweeps / 10);
  params.chains = chains;
  params.seed = seed;
  params.threads = threads;
  auto raw = run_raw(lat, coup, field, bc, params, 1,
                     [&](const ChainState&, SwInfo* sw, std::vector<double>& row) {
                       std::vector<int> left;
                       for (int y = 0; y < h; ++y) left.push_back(sw->uf.find(y * w));
                       bool cross = false;
                       for (int y = 0; y < h && !cross; ++y) {
                         int r = sw->uf.find(y * w + (w - 1));
                         for (int l : left)
                           if (l == r) {
                             cross = true;
                             break;
                           }
                       }
                       row[0] = cross ? 1.0 : 0.0;
                     });
  BinStats s = pooled_component(raw, 1, 0);
  return {s.mean, s.err, sweeps * chains};
}

}  // namespace ising
