#include "ising/currents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ising/common.hpp"
#include "ising/exact.hpp"
#include "ising/rng.hpp"

namespace ising {
namespace {

constexpr std::uint64_t kStreamTraceOdd = 0x43555254ull;   // CDF draw for the odd part
constexpr std::uint64_t kStreamTraceEven = 0x43555245ull;  // per-edge even-positive sprinkle

// Truncated halves of e^x at x >= 0 with a certified remainder bound.
struct EdgeSeries {
  double odd = 0.0;    // sum over odd n <= n_max of x^n/n!
  double even = 1.0;   // sum over even n <= n_max of x^n/n!  (includes n = 0)
  double tail = 0.0;   // bound on sum over n > n_max of x^n/n!
  double full = 1.0;   // e^x
};

EdgeSeries edge_series(double x, int n_max) {
  if (!(x >= 0.0)) throw std::invalid_argument("edge weights need beta J >= 0");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  EdgeSeries s;
  double term = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    term *= x / n;
    if (n % 2 == 1) {
      s.odd += term;
    } else {
      s.even += term;
    }
  }
  // sum_{n > n_max} x^n/n! = x^{n_max+1}/(n_max+1)! * sum_k x^k (n_max+1)!/(n_max+1+k)!
  //                       <= x^{n_max+1}/(n_max+1)! * e^x
  s.tail = term * x / (n_max + 1) * std::exp(x);
  s.full = std::exp(x);
  return s;
}

std::vector<EdgeSeries> all_series(const Lattice& lat, const Coupling& coup, double beta,
                                   int n_max) {
  std::vector<EdgeSeries> es;
  es.reserve(static_cast<std::size_t>(lat.ne()));
  for (int e = 0; e < lat.ne(); ++e) es.push_back(edge_series(beta * coup.j(e), n_max));
  return es;
}

// reduce a vertex list to its odd-multiplicity set, validating indices
std::vector<int> odd_set(const Lattice& lat, const std::vector<int>& a) {
  std::vector<int> r;
  for (int v : a) {
    if (v < 0 || v >= lat.nv) throw std::invalid_argument("source vertex out of range");
    auto it = std::find(r.begin(), r.end(), v);
    if (it == r.end()) {
      r.push_back(v);
    } else {
      r.erase(it);
    }
  }
  std::sort(r.begin(), r.end());
  return r;
}

// The affine space of edge subgraphs whose odd-degree vertex set equals A:
// one base solution plus the cycle space, or infeasible.
struct SourceSpace {
  bool feasible = false;
  std::uint64_t base = 0;
  std::vector<std::uint64_t> cycles;
};

SourceSpace source_space(const Lattice& lat, const std::vector<int>& a) {
  const int nv = lat.nv;
  const int ne = lat.ne();
  if (ne > 30) throw std::invalid_argument("source-constrained enumeration capped at 30 edges");
  SourceSpace sp;
  std::vector<int> root(static_cast<std::size_t>(nv), -1);
  std::vector<std::uint64_t> path(static_cast<std::size_t>(nv), 0);  // edge mask to the root
  std::vector<std::uint8_t> tree(static_cast<std::size_t>(ne), 0);
  std::vector<int> stack;
  for (int r = 0; r < nv; ++r) {
    if (root[static_cast<std::size_t>(r)] != -1) continue;
    root[static_cast<std::size_t>(r)] = r;
    stack.assign(1, r);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : lat.adj[static_cast<std::size_t>(v)]) {
        if (root[static_cast<std::size_t>(w)] != -1) continue;
        root[static_cast<std::size_t>(w)] = r;
        path[static_cast<std::size_t>(w)] = path[static_cast<std::size_t>(v)] ^ (1ull << e);
        tree[static_cast<std::size_t>(e)] = 1;
        stack.push_back(w);
      }
    }
  }
  for (int e = 0; e < ne; ++e) {
    if (tree[static_cast<std::size_t>(e)]) continue;
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    sp.cycles.push_back(path[static_cast<std::size_t>(u)] ^ path[static_cast<std::size_t>(v)] ^
                        (1ull << e));
  }
  if (sp.cycles.size() > 22) {
    throw std::invalid_argument("cycle space too large for exhaustive current sums");
  }
  // each component must contain an even number of sources
  std::vector<int> parity(static_cast<std::size_t>(nv), 0);
  for (int v : a) parity[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])] ^= 1;
  for (int p : parity) {
    if (p) return sp;  // infeasible: the sum over this source set is exactly zero
  }
  for (int v : a) sp.base ^= path[static_cast<std::size_t>(v)];
  sp.feasible = true;
  return sp;
}

// visit every mask in the space, Gray-code order (base first)
template <class F>
void for_each_source_subgraph(const SourceSpace& sp, F&& f) {
  if (!sp.feasible) return;
  std::uint64_t cur = sp.base;
  f(cur);
  const std::uint64_t total = 1ull << sp.cycles.size();
  for (std::uint64_t i = 1; i < total; ++i) {
    cur ^= sp.cycles[static_cast<std::size_t>(std::countr_zero(i))];
    f(cur);
  }
}

double parity_product(const std::vector<EdgeSeries>& es, std::uint64_t mask) {
  double w = 1.0;
  for (std::size_t e = 0; e < es.size(); ++e) {
    w *= (mask >> e & 1) ? es[e].odd : es[e].even;
  }
  return w;
}

// bound on the truncation deficit of a single source-constrained sum:
// sum over e of tail_e * prod over e' != e of e^{x_e'}
double single_sum_tail(const std::vector<EdgeSeries>& es) {
  double prod_full = 1.0;
  double ratio = 0.0;
  for (const auto& s : es) {
    prod_full *= s.full;
    ratio += s.tail / s.full;
  }
  return prod_full * ratio;
}

// Enumerate all per-edge parity/support classes of a pair of truncated
// currents.  States per edge: 0 both zero; 1 both even with positive sum;
// 2 first even / second odd; 3 first odd / second even; 4 both odd.
// visit(p1, p2, support, odd_count, weight) receives vertex-parity masks of
// each current, the positive-support edge mask, the number of odd edge
// parities over both currents, and the class weight.
template <class Visit>
void enumerate_double_currents(const Lattice& lat, const std::vector<EdgeSeries>& es,
                               Visit&& visit) {
  const int ne = lat.ne();
  const int nv = lat.nv;
  if (nv > 64) throw std::invalid_argument("double-current enumeration capped at 64 vertices");
  double states = 1.0;
  for (int e = 0; e < ne; ++e) states *= 5.0;
  if (states > 2.2e7) throw std::invalid_argument("double-current enumeration capped at 5^10 states");
  std::vector<std::array<double, 5>> w(static_cast<std::size_t>(ne));
  std::vector<std::uint64_t> vmask(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    const auto& s = es[static_cast<std::size_t>(e)];
    w[static_cast<std::size_t>(e)] = {1.0, s.even * s.even - 1.0, s.even * s.odd, s.odd * s.even,
                                      s.odd * s.odd};
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    vmask[static_cast<std::size_t>(e)] = (1ull << u) | (1ull << v);
  }
  std::vector<int> digit(static_cast<std::size_t>(ne), 0);
  for (;;) {
    double weight = 1.0;
    std::uint64_t p1 = 0, p2 = 0, support = 0;
    int odd = 0;
    for (int e = 0; e < ne; ++e) {
      const int d = digit[static_cast<std::size_t>(e)];
      weight *= w[static_cast<std::size_t>(e)][static_cast<std::size_t>(d)];
      if (d != 0) support |= 1ull << e;
      if (d == 2 || d == 4) p2 ^= vmask[static_cast<std::size_t>(e)];
      if (d == 3 || d == 4) p1 ^= vmask[static_cast<std::size_t>(e)];
      if (d == 2 || d == 3) ++odd;
    }
    visit(p1, p2, support, odd, weight);
    int k = 0;
    while (k < ne && ++digit[static_cast<std::size_t>(k)] == 5) {
      digit[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == ne) break;
  }
}

// truncation deficit bound for a double-current sum with |F| <= 1:
// sum over e of 2 tail_e e^{x_e} * prod over e' != e of e^{2 x_e'}
double double_sum_tail(const std::vector<EdgeSeries>& es) {
  double prod_full = 1.0;
  double ratio = 0.0;
  for (const auto& s : es) {
    prod_full *= s.full * s.full;
    ratio += 2.0 * s.tail / s.full;
  }
  return prod_full * ratio;
}

std::uint64_t vertex_mask(const Lattice& lat, const std::vector<int>& a) {
  if (lat.nv > 64) throw std::invalid_argument("vertex masks capped at 64 vertices");
  std::uint64_t m = 0;
  for (int v : a) m ^= 1ull << v;
  return m;
}

// does every cluster of the support graph contain an even number of marked vertices?
bool clusters_even(const Lattice& lat, std::uint64_t support, std::uint64_t marked) {
  UnionFind uf(lat.nv);
  for (int e = 0; e < lat.ne(); ++e) {
    if (support >> e & 1) uf.unite(lat.edges[static_cast<std::size_t>(e)][0],
                                   lat.edges[static_cast<std::size_t>(e)][1]);
  }
  std::vector<int> parity(static_cast<std::size_t>(lat.nv), 0);
  for (int v = 0; v < lat.nv; ++v) {
    if (marked >> v & 1) parity[static_cast<std::size_t>(uf.find(v))] ^= 1;
  }
  for (int p : parity) {
    if (p) return false;
  }
  return true;
}

bool all_in_one_cluster(const Lattice& lat, std::uint64_t support, std::uint64_t marked) {
  if (marked == 0) return true;
  UnionFind uf(lat.nv);
  for (int e = 0; e < lat.ne(); ++e) {
    if (support >> e & 1) uf.unite(lat.edges[static_cast<std::size_t>(e)][0],
                                   lat.edges[static_cast<std::size_t>(e)][1]);
  }
  int r = -1;
  for (int v = 0; v < lat.nv; ++v) {
    if (!(marked >> v & 1)) continue;
    if (r == -1) {
      r = uf.find(v);
    } else if (uf.find(v) != r) {
      return false;
    }
  }
  return true;
}

}  // namespace

CurrentSum current_sum(const Lattice& lat, const Coupling& coup, double beta,
                       const std::vector<int>& a, int n_max) {
  if (!(beta >= 0.0)) throw std::invalid_argument("current sums need beta >= 0");
  const auto es = all_series(lat, coup, beta, n_max);
  const auto sp = source_space(lat, odd_set(lat, a));
  if (!sp.feasible) return {0.0, 0.0};  // no current has these sources, truncated or not
  KahanSum acc;
  for_each_source_subgraph(sp, [&](std::uint64_t mask) { acc.add(parity_product(es, mask)); });
  return {acc.value(), single_sum_tail(es)};
}

CurrentSum current_sum_literal(const Lattice& lat, const Coupling& coup, double beta,
                               const std::vector<int>& a, int n_max) {
  if (!(beta >= 0.0)) throw std::invalid_argument("current sums need beta >= 0");
  const int ne = lat.ne();
  double states = 1.0;
  for (int e = 0; e < ne; ++e) states *= n_max + 1;
  if (states > 5e7) throw std::invalid_argument("literal current enumeration too large");
  std::vector<std::vector<double>> pw(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    const double x = beta * coup.j(e);
    if (!(x >= 0.0)) throw std::invalid_argument("edge weights need beta J >= 0");
    auto& t = pw[static_cast<std::size_t>(e)];
    t.assign(static_cast<std::size_t>(n_max) + 1, 1.0);
    for (int n = 1; n <= n_max; ++n) {
      t[static_cast<std::size_t>(n)] = t[static_cast<std::size_t>(n) - 1] * x / n;
    }
  }
  const std::uint64_t amask = vertex_mask(lat, odd_set(lat, a));
  std::vector<int> n(static_cast<std::size_t>(ne), 0);
  KahanSum acc;
  for (;;) {
    std::uint64_t parity = 0;
    double w = 1.0;
    for (int e = 0; e < ne; ++e) {
      const int c = n[static_cast<std::size_t>(e)];
      w *= pw[static_cast<std::size_t>(e)][static_cast<std::size_t>(c)];
      if (c % 2 == 1) {
        parity ^= (1ull << lat.edges[static_cast<std::size_t>(e)][0]) |
                  (1ull << lat.edges[static_cast<std::size_t>(e)][1]);
      }
    }
    if (parity == amask) acc.add(w);
    int k = 0;
    while (k < ne && ++n[static_cast<std::size_t>(k)] == n_max + 1) {
      n[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == ne) break;
  }
  const auto es = all_series(lat, coup, beta, n_max);
  return {acc.value(), single_sum_tail(es)};
}

CurrentSum current_correlation(const Lattice& lat, const Coupling& coup, double beta,
                               const std::vector<int>& a, int n_max) {
  const auto num = current_sum(lat, coup, beta, a, n_max);
  const auto den = current_sum(lat, coup, beta, {}, n_max);
  if (!(den.value > 0.0)) throw std::runtime_error("vanishing current partition sum");
  const double r = num.value / den.value;
  const double hi = (num.value + num.tail) / den.value;
  const double lo = num.value / (den.value + den.tail);
  return {r, std::max(hi - r, r - lo)};
}

TracedCurrent sample_current_trace(const Lattice& lat, const Coupling& coup, double beta,
                                   const std::vector<int>& a, std::uint64_t seed,
                                   std::uint64_t sample_index) {
  if (!(beta >= 0.0)) throw std::invalid_argument("current sampling needs beta >= 0");
  const int ne = lat.ne();
  std::vector<double> th(static_cast<std::size_t>(ne));
  std::vector<double> evenpos(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    const double x = beta * coup.j(e);
    if (!(x >= 0.0)) throw std::invalid_argument("edge weights need beta J >= 0");
    th[static_cast<std::size_t>(e)] = std::tanh(x);
    evenpos[static_cast<std::size_t>(e)] = (std::cosh(x) - 1.0) / std::cosh(x);
  }
  const auto sp = source_space(lat, odd_set(lat, a));
  if (!sp.feasible) throw std::invalid_argument("no current has the requested sources");
  auto tanh_product = [&](std::uint64_t mask) {
    double w = 1.0;
    for (int e = 0; e < ne; ++e) {
      if (mask >> e & 1) w *= th[static_cast<std::size_t>(e)];
    }
    return w;
  };
  KahanSum tot;
  for_each_source_subgraph(sp, [&](std::uint64_t mask) { tot.add(tanh_product(mask)); });
  if (!(tot.value() > 0.0)) throw std::runtime_error("odd part has zero total weight");
  const double target = rng_uniform(seed, kStreamTraceOdd, sample_index, 0) * tot.value();
  double running = 0.0;
  std::uint64_t odd_mask = sp.base;
  bool done = false;
  for_each_source_subgraph(sp, [&](std::uint64_t mask) {
    if (done) return;
    running += tanh_product(mask);
    odd_mask = mask;
    if (running >= target) done = true;
  });
  TracedCurrent tc;
  tc.state.assign(static_cast<std::size_t>(ne), EdgeTrace::Zero);
  for (int e = 0; e < ne; ++e) {
    if (odd_mask >> e & 1) {
      tc.state[static_cast<std::size_t>(e)] = EdgeTrace::Odd;
    } else if (rng_uniform(seed, kStreamTraceEven, sample_index, static_cast<std::uint64_t>(e) + 1) <
               evenpos[static_cast<std::size_t>(e)]) {
      tc.state[static_cast<std::size_t>(e)] = EdgeTrace::EvenPositive;
    }
  }
  return tc;
}

SwitchResult switching_check(const Lattice& lat, const Coupling& coup, double beta,
                             const std::vector<int>& a, const std::vector<int>& b, SwitchFn f,
                             int n_max) {
  if (!(beta >= 0.0)) throw std::invalid_argument("switching check needs beta >= 0");
  const auto es = all_series(lat, coup, beta, n_max);
  const auto aset = odd_set(lat, a);
  const auto bset = odd_set(lat, b);
  const std::uint64_t amask = vertex_mask(lat, aset);
  const std::uint64_t bmask = vertex_mask(lat, bset);
  KahanSum lhs, rhs;
  enumerate_double_currents(lat, es, [&](std::uint64_t p1, std::uint64_t p2, std::uint64_t support,
                                         int odd, double weight) {
    double fv = 1.0;
    if (f == SwitchFn::TotalParityEven) fv = (odd % 2 == 0) ? 1.0 : 0.0;
    if (fv == 0.0 || weight == 0.0) return;
    if (p1 == amask && p2 == bmask) lhs.add(weight * fv);
    if (p1 == (amask ^ bmask) && p2 == 0 && clusters_even(lat, support, bmask)) {
      rhs.add(weight * fv);
    }
  });
  return {lhs.value(), rhs.value(), 2.0 * double_sum_tail(es)};
}

Ursell4 ursell4(const Lattice& lat, const Coupling& coup, double beta,
                const std::array<int, 4>& xs, int n_max) {
  const FieldSpec no_field;
  const BoundaryCondition free_bc;
  auto corr = [&](const std::vector<int>& vs) {
    return exact_correlation(lat, coup, no_field, free_bc, beta, vs);
  };
  const auto [x1, x2, x3, x4] = xs;
  Ursell4 u;
  u.value = corr({x1, x2, x3, x4}) - corr({x1, x2}) * corr({x3, x4}) -
            corr({x1, x3}) * corr({x2, x4}) - corr({x1, x4}) * corr({x2, x3});

  const auto es = all_series(lat, coup, beta, n_max);
  const std::uint64_t amask = vertex_mask(lat, odd_set(lat, {x1, x2}));
  const std::uint64_t bmask = vertex_mask(lat, odd_set(lat, {x3, x4}));
  const std::uint64_t four = vertex_mask(lat, {x1, x2, x3, x4});
  KahanSum num, den;
  enumerate_double_currents(lat, es, [&](std::uint64_t p1, std::uint64_t p2, std::uint64_t support,
                                         int, double weight) {
    if (weight == 0.0) return;
    if (p1 == 0 && p2 == 0) den.add(weight);
    if (p1 == amask && p2 == bmask && all_in_one_cluster(lat, support, four | amask | bmask)) {
      num.add(weight);
    }
  });
  const double n0 = num.value();
  const double d0 = den.value();
  if (!(d0 > 0.0)) throw std::runtime_error("vanishing current partition sum");
  const double tn = double_sum_tail(es);
  u.rhs = -2.0 * n0 / d0;
  u.residual = std::abs(u.value - u.rhs);
  u.tail = 2.0 * (n0 + tn) / d0 - 2.0 * n0 / (d0 + tn);
  return u;
}

namespace {

ExactMoments torus_moments(const Lattice& torus, double beta, double h) {
  Coupling unit;
  FieldSpec field;
  field.uniform = h;
  BoundaryCondition free_bc;
  return exact_moments(torus, unit, field, free_bc, beta);
}

double torus_bubble(const Lattice& torus, double beta) {
  Coupling unit;
  FieldSpec no_field;
  BoundaryCondition free_bc;
  return exact_two_point_sq_sum(torus, unit, no_field, free_bc, beta, 0);
}

}  // namespace

DiffIneq chi_bubble_check(const Lattice& torus, double beta) {
  if (!torus.periodic()) throw std::invalid_argument("chi-bubble check wants a torus");
  if (!(beta >= 0.0)) throw std::invalid_argument("chi-bubble check needs beta >= 0");
  const double d = torus.dim();
  auto chi_at = [&](double bb) { return torus_moments(torus, bb, 0.0).chi; };
  auto dchi = [&](double delta) { return (chi_at(beta + delta) - chi_at(beta - delta)) / (2.0 * delta); };
  const double coarse = dchi(1e-4);
  const double fine = dchi(5e-5);
  const double fd_error = std::abs(coarse - fine) / 3.0 + 1e-9 * (std::abs(fine) + 1.0);
  const double chi = chi_at(beta);
  const double bubble = torus_bubble(torus, beta);
  const double upper = 2.0 * d * chi * chi;
  const double lower = (1.0 - bubble / chi) * upper / (1.0 + bubble);
  const double violation = std::max(lower - fine, fine - upper);
  return {std::max(0.0, violation), fd_error};
}

DiffIneq magnetization_ineq_check(const Lattice& torus, double beta, double h) {
  if (!torus.periodic()) throw std::invalid_argument("magnetisation check wants a torus");
  if (!(beta > 0.0)) throw std::invalid_argument("magnetisation check needs beta > 0");
  if (!(h >= 0.0)) throw std::invalid_argument("magnetisation check needs h >= 0");
  auto mag = [&](double bb, double hh) { return torus_moments(torus, bb, hh).mag; };
  const double m = mag(beta, h);
  auto rhs_at = [&](double delta) {
    const double dm_dtheta =
        (mag(beta, h + delta / beta) - mag(beta, h - delta / beta)) / (2.0 * delta);
    const double dm_dbeta = (mag(beta + delta, h) - mag(beta - delta, h)) / (2.0 * delta);
    return std::tanh(beta * h) * dm_dtheta + m * m * (beta * dm_dbeta + m);
  };
  const double coarse = rhs_at(1e-4);
  const double fine = rhs_at(5e-5);
  const double fd_error = std::abs(coarse - fine) / 3.0 + 1e-9 * (std::abs(fine) + 1.0);
  return {std::max(0.0, m - fine), fd_error};
}

}  // namespace ising
