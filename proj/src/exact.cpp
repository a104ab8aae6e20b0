#include "ising/exact.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "ising/common.hpp"

namespace ising {

double critical_beta_2d() { return 0.5 * std::log(1.0 + std::sqrt(2.0)); }
double fk_self_dual_p() { return std::sqrt(2.0) / (1.0 + std::sqrt(2.0)); }

double kw_dual(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("kw_dual: beta must be positive");
  return std::atanh(std::exp(-2.0 * beta));
}

namespace {

struct EnumTables {
  int nv = 0;
  std::vector<int> eu, ev;
  std::vector<double> ej;
  std::vector<double> f;  // per-vertex field incl. boundary term
  bool any_field = false;
};

EnumTables enum_tables(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                       const BoundaryCondition& bc) {
  if (lat.nv > 24) throw std::invalid_argument("enumeration: V must be <= 24");
  if (lat.nv < 1) throw std::invalid_argument("enumeration: empty lattice");
  EnumTables t;
  t.nv = lat.nv;
  t.eu.reserve(lat.edges.size());
  for (int e = 0; e < lat.ne(); ++e) {
    t.eu.push_back(lat.edges[static_cast<std::size_t>(e)][0]);
    t.ev.push_back(lat.edges[static_cast<std::size_t>(e)][1]);
    t.ej.push_back(coup.j(e));
  }
  t.f.assign(static_cast<std::size_t>(lat.nv), 0.0);
  if (bc.kind != BcKind::Free) {
    auto b = exterior_field(lat, bc);
    for (int v = 0; v < lat.nv; ++v) t.f[static_cast<std::size_t>(v)] = b[static_cast<std::size_t>(v)];
  }
  for (int v = 0; v < lat.nv; ++v) t.f[static_cast<std::size_t>(v)] += field.h(v);
  for (double x : t.f)
    if (x != 0.0) t.any_field = true;
  return t;
}

inline double config_minus_h(const EnumTables& t, std::uint32_t bits) {
  // returns -H(sigma) for sigma_v = 1 - 2*bit_v
  double bond = 0.0;
  const std::size_t ne = t.eu.size();
  for (std::size_t e = 0; e < ne; ++e) {
    int d = ((bits >> t.eu[e]) ^ (bits >> t.ev[e])) & 1u;
    bond += t.ej[e] * (1 - 2 * d);
  }
  double site = 0.0;
  if (t.any_field) {
    for (int v = 0; v < t.nv; ++v) site += t.f[static_cast<std::size_t>(v)] * (1 - 2 * static_cast<int>((bits >> v) & 1u));
  }
  return bond + site;
}

// fixed-grid two-pass log-sum-exp over all configurations; chunk layout is
// independent of the worker count, so results do not depend on --threads
constexpr std::uint64_t kGrain = 1 << 14;

double enum_max_exponent(const EnumTables& t, double beta, int threads) {
  std::uint64_t n = 1ull << t.nv;
  auto maxes = map_chunks<double>(n, kGrain, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    double m = -1e300;
    for (std::uint64_t c = lo; c < hi; ++c)
      m = std::max(m, beta * config_minus_h(t, static_cast<std::uint32_t>(c)));
    return m;
  });
  double m = -1e300;
  for (double x : maxes) m = std::max(m, x);
  return m;
}

}  // namespace

double log_partition_enumerate(const Lattice& lat, const Coupling& coup,
                               const FieldSpec& field, const BoundaryCondition& bc,
                               double beta, int threads) {
  EnumTables t = enum_tables(lat, coup, field, bc);
  int nthreads = resolve_threads(threads);
  double m = enum_max_exponent(t, beta, nthreads);
  std::uint64_t n = 1ull << t.nv;
  auto sums = map_chunks<double>(n, kGrain, nthreads, [&](std::uint64_t lo, std::uint64_t hi) {
    KahanSum s;
    for (std::uint64_t c = lo; c < hi; ++c)
      s.add(std::exp(beta * config_minus_h(t, static_cast<std::uint32_t>(c)) - m));
    return s.value();
  });
  KahanSum z;
  for (double x : sums) z.add(x);
  return m + std::log(z.value());
}

double exact_correlation(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                         const BoundaryCondition& bc, double beta, const std::vector<int>& A,
                         int threads) {
  EnumTables t = enum_tables(lat, coup, field, bc);
  std::uint32_t amask = 0;
  for (int v : A) {
    if (v < 0 || v >= lat.nv) throw std::invalid_argument("exact_correlation: vertex out of range");
    amask ^= 1u << v;
  }
  int nthreads = resolve_threads(threads);
  double m = enum_max_exponent(t, beta, nthreads);
  std::uint64_t n = 1ull << t.nv;
  struct Pair {
    double num = 0.0, den = 0.0;
  };
  auto sums = map_chunks<Pair>(n, kGrain, nthreads, [&](std::uint64_t lo, std::uint64_t hi) {
    KahanSum num, den;
    for (std::uint64_t c = lo; c < hi; ++c) {
      double w = std::exp(beta * config_minus_h(t, static_cast<std::uint32_t>(c)) - m);
      int par = std::popcount(static_cast<std::uint32_t>(c) & amask) & 1;
      num.add(w * (1 - 2 * par));
      den.add(w);
    }
    return Pair{num.value(), den.value()};
  });
  KahanSum num, den;
  for (const auto& p : sums) {
    num.add(p.num);
    den.add(p.den);
  }
  return num.value() / den.value();
}

ExactMoments exact_moments(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                           const BoundaryCondition& bc, double beta, int threads) {
  EnumTables t = enum_tables(lat, coup, field, bc);
  int nthreads = resolve_threads(threads);
  double m = enum_max_exponent(t, beta, nthreads);
  std::uint64_t n = 1ull << t.nv;
  struct Acc {
    double z = 0, mag = 0, mag2 = 0, absmag = 0, h1 = 0, h2 = 0, bond = 0;
  };
  auto sums = map_chunks<Acc>(n, kGrain, nthreads, [&](std::uint64_t lo, std::uint64_t hi) {
    KahanSum z, mg, mg2, am, h1, h2, bd;
    for (std::uint64_t c = lo; c < hi; ++c) {
      auto bits = static_cast<std::uint32_t>(c);
      double mh = config_minus_h(t, bits);
      double w = std::exp(beta * mh - m);
      double M = t.nv - 2.0 * std::popcount(bits);
      double bond = 0.0;
      const std::size_t ne = t.eu.size();
      for (std::size_t e = 0; e < ne; ++e) {
        int d = ((bits >> t.eu[e]) ^ (bits >> t.ev[e])) & 1u;
        bond += t.ej[e] * (1 - 2 * d);
      }
      z.add(w);
      mg.add(w * M);
      mg2.add(w * M * M);
      am.add(w * std::fabs(M));
      h1.add(w * (-mh));
      h2.add(w * mh * mh);
      bd.add(w * bond);
    }
    return Acc{z.value(), mg.value(), mg2.value(), am.value(), h1.value(), h2.value(), bd.value()};
  });
  KahanSum z, mg, mg2, am, h1, h2, bd;
  for (const auto& a : sums) {
    z.add(a.z);
    mg.add(a.mag);
    mg2.add(a.mag2);
    am.add(a.absmag);
    h1.add(a.h1);
    h2.add(a.h2);
    bd.add(a.bond);
  }
  ExactMoments r;
  double Z = z.value();
  r.log_z = m + std::log(Z);
  double V = t.nv;
  r.mag = mg.value() / Z / V;
  r.abs_mag = am.value() / Z / V;
  r.chi = (mg2.value() / Z - sq(mg.value() / Z)) / V;
  r.energy_per_edge = lat.ne() > 0 ? -(bd.value() / Z) / lat.ne() : 0.0;
  r.specific_heat = beta * beta * (h2.value() / Z - sq(h1.value() / Z)) / V;
  return r;
}

double exact_two_point_sum(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                           const BoundaryCondition& bc, double beta, int v0, int threads) {
  EnumTables t = enum_tables(lat, coup, field, bc);
  int nthreads = resolve_threads(threads);
  double m = enum_max_exponent(t, beta, nthreads);
  std::uint64_t n = 1ull << t.nv;
  struct Pair {
    double num = 0.0, den = 0.0;
  };
  auto sums = map_chunks<Pair>(n, kGrain, nthreads, [&](std::uint64_t lo, std::uint64_t hi) {
    KahanSum num, den;
    for (std::uint64_t c = lo; c < hi; ++c) {
      auto bits = static_cast<std::uint32_t>(c);
      double w = std::exp(beta * config_minus_h(t, bits) - m);
      double M = t.nv - 2.0 * std::popcount(bits);
      double s0 = 1 - 2 * static_cast<int>((bits >> v0) & 1u);
      num.add(w * s0 * M);
      den.add(w);
    }
    return Pair{num.value(), den.value()};
  });
  KahanSum num, den;
  for (const auto& p : sums) {
    num.add(p.num);
    den.add(p.den);
  }
  return num.value() / den.value();
}

double exact_two_point_sq_sum(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                              const BoundaryCondition& bc, double beta, int v0, int threads) {
  EnumTables t = enum_tables(lat, coup, field, bc);
  int nthreads = resolve_threads(threads);
  double m = enum_max_exponent(t, beta, nthreads);
  std::uint64_t n = 1ull << t.nv;
  using Vec = std::vector<double>;
  auto sums = map_chunks<Vec>(n, kGrain, nthreads, [&](std::uint64_t lo, std::uint64_t hi) {
    Vec acc(static_cast<std::size_t>(t.nv) + 1, 0.0);  // per-x sums + Z at the end
    std::vector<KahanSum> ks(static_cast<std::size_t>(t.nv) + 1);
    for (std::uint64_t c = lo; c < hi; ++c) {
      auto bits = static_cast<std::uint32_t>(c);
      double w = std::exp(beta * config_minus_h(t, bits) - m);
      int s0 = 1 - 2 * static_cast<int>((bits >> v0) & 1u);
      for (int x = 0; x < t.nv; ++x) {
        int sx = 1 - 2 * static_cast<int>((bits >> x) & 1u);
        ks[static_cast<std::size_t>(x)].add(w * s0 * sx);
      }
      ks[static_cast<std::size_t>(t.nv)].add(w);
    }
    for (std::size_t i = 0; i < ks.size(); ++i) acc[i] = ks[i].value();
    return acc;
  });
  std::vector<KahanSum> tot(static_cast<std::size_t>(t.nv) + 1);
  for (const auto& a : sums)
    for (std::size_t i = 0; i < a.size(); ++i) tot[i].add(a[i]);
  double Z = tot[static_cast<std::size_t>(t.nv)].value();
  KahanSum b;
  for (int x = 0; x < t.nv; ++x) b.add(sq(tot[static_cast<std::size_t>(x)].value() / Z));
  return b.value();
}

// ---- expansions -------------------------------------------------------------

double log_partition_lowtemp(const Lattice& box2d, double beta) {
  if (box2d.kind == LatticeKind::Torus) {
    if (box2d.dim() != 2)
      throw std::invalid_argument("low-temp expansion: needs a 2d box or torus");
    const int w = box2d.sides[0], h = box2d.sides[1];
    // dual torus with dual edge ids matching primal edge ids; face (x, y) has
    // corners (x, y)..(x+1, y+1) and id y*w + x
    auto face = [&](int x, int y) { return ((y + h) % h) * w + ((x + w) % w); };
    std::vector<std::array<int, 2>> dual_edges;
    dual_edges.reserve(static_cast<std::size_t>(box2d.ne()));
    std::uint64_t seam_x = 0, seam_y = 0;
    for (std::size_t e = 0; e < box2d.edges.size(); ++e) {
      auto [u, v] = box2d.edges[e];
      auto cu = coord_of(box2d, u);
      auto cv = coord_of(box2d, v);
      if (cu[1] == cv[1]) {
        const int y = cu[1];
        const int x = (std::abs(cu[0] - cv[0]) == 1) ? std::min(cu[0], cv[0]) : w - 1;
        dual_edges.push_back({face(x, y), face(x, y - 1)});
        if (y == 0) seam_x |= 1ull << e;
      } else {
        const int x = cu[0];
        const int y = (std::abs(cu[1] - cv[1]) == 1) ? std::min(cu[1], cv[1]) : h - 1;
        dual_edges.push_back({face(x, y), face(x - 1, y)});
        if (x == 0) seam_y |= 1ull << e;
      }
    }
    Lattice dual = make_graph(w * h, dual_edges);
    KahanSum s;
    // domain walls are exactly the even dual subgraphs crossing each of the two
    // fundamental primal loops an even number of times; the map sigma -> walls
    // is then 2-to-1
    detail::even_subgraphs_impl(dual, 40, [&](std::uint64_t mask) {
      if ((std::popcount(mask & seam_x) & 1) != 0) return;
      if ((std::popcount(mask & seam_y) & 1) != 0) return;
      s.add(std::exp(-2.0 * beta * std::popcount(mask)));
    });
    return std::log(2.0) + beta * box2d.ne() + std::log(s.value());
  }
  DualLattice d = dual_2d(box2d);
  KahanSum s;
  detail::even_subgraphs_impl(d.dual, 32, [&](std::uint64_t mask) {
    s.add(std::exp(-2.0 * beta * std::popcount(mask)));
  });
  // the contour map sigma -> F is 2-to-1 on a connected planar box
  return std::log(2.0) + beta * box2d.ne() + std::log(s.value());
}

double log_partition_hightemp(const Lattice& lat, double beta) {
  double th = std::tanh(beta);
  KahanSum s;
  detail::even_subgraphs_impl(lat, 32, [&](std::uint64_t mask) {
    s.add(std::pow(th, std::popcount(mask)));
  });
  return lat.nv * std::log(2.0) + lat.ne() * std::log(std::cosh(beta)) + std::log(s.value());
}

// ---- closed forms -----------------------------------------------------------

double yang_magnetization(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("yang_magnetization: beta must be positive");
  if (beta <= critical_beta_2d()) return 0.0;
  double s = std::sinh(2.0 * beta);
  return std::pow(1.0 - 1.0 / (s * s * s * s), 0.125);
}

double peierls_two_point_bound(double beta) {
  if (beta <= std::log(2.0))
    throw std::invalid_argument("peierls_two_point_bound: requires beta > ln 2");
  double q = std::exp(-2.0 * beta);
  return 1.0 - 8.0 * q / sq(1.0 - 4.0 * q);
}

double spatial_markov_tv(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                         const BoundaryCondition& bc, double beta,
                         const std::vector<int>& W, const SpinConfig& tau) {
  if (lat.nv > 24) throw std::invalid_argument("spatial_markov_tv: V must be <= 24");
  if (static_cast<int>(tau.size()) != lat.nv)
    throw std::invalid_argument("spatial_markov_tv: tau must assign every vertex");
  std::vector<char> in_w(static_cast<std::size_t>(lat.nv), 0);
  for (int v : W) {
    if (v < 0 || v >= lat.nv) throw std::invalid_argument("spatial_markov_tv: W vertex out of range");
    if (in_w[static_cast<std::size_t>(v)]) throw std::invalid_argument("spatial_markov_tv: duplicate W vertex");
    in_w[static_cast<std::size_t>(v)] = 1;
  }
  const int k = static_cast<int>(W.size());
  if (k < 1 || k > 20) throw std::invalid_argument("spatial_markov_tv: |W| must be in [1, 20]");

  // conditional law in the full model
  auto b = exterior_field(lat, bc);
  SpinConfig s = tau;
  std::vector<double> wfull(1ull << k), wsub(1ull << k);
  double mfull = -1e300, msub = -1e300;
  // induced model on W: edges inside W keep J, edges leaving W become fields
  std::vector<double> heff(static_cast<std::size_t>(k), 0.0);
  std::vector<std::array<int, 2>> wedges;
  std::vector<double> wj;
  std::vector<int> slot(static_cast<std::size_t>(lat.nv), -1);
  for (int i = 0; i < k; ++i) slot[static_cast<std::size_t>(W[static_cast<std::size_t>(i)])] = i;
  for (int e = 0; e < lat.ne(); ++e) {
    auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    int su = slot[static_cast<std::size_t>(u)], sv = slot[static_cast<std::size_t>(v)];
    if (su >= 0 && sv >= 0) {
      wedges.push_back({su, sv});
      wj.push_back(coup.j(e));
    } else if (su >= 0) {
      heff[static_cast<std::size_t>(su)] += coup.j(e) * tau[static_cast<std::size_t>(v)];
    } else if (sv >= 0) {
      heff[static_cast<std::size_t>(sv)] += coup.j(e) * tau[static_cast<std::size_t>(u)];
    }
  }
  for (int i = 0; i < k; ++i) {
    int v = W[static_cast<std::size_t>(i)];
    heff[static_cast<std::size_t>(i)] += field.h(v) + b[static_cast<std::size_t>(v)];
  }
  for (std::uint64_t c = 0; c < (1ull << k); ++c) {
    for (int i = 0; i < k; ++i)
      s[static_cast<std::size_t>(W[static_cast<std::size_t>(i)])] =
          static_cast<signed char>((c >> i) & 1u ? -1 : 1);
    double lf = -beta * hamiltonian(lat, coup, field, bc, s);
    wfull[static_cast<std::size_t>(c)] = lf;
    mfull = std::max(mfull, lf);
    double bond = 0.0;
    for (std::size_t e = 0; e < wedges.size(); ++e) {
      int a = 1 - 2 * static_cast<int>((c >> wedges[e][0]) & 1u);
      int bb = 1 - 2 * static_cast<int>((c >> wedges[e][1]) & 1u);
      bond += wj[e] * a * bb;
    }
    double site = 0.0;
    for (int i = 0; i < k; ++i)
      site += heff[static_cast<std::size_t>(i)] * (1 - 2 * static_cast<int>((c >> i) & 1u));
    double ls = beta * (bond + site);
    wsub[static_cast<std::size_t>(c)] = ls;
    msub = std::max(msub, ls);
  }
  KahanSum zf, zs;
  for (std::uint64_t c = 0; c < (1ull << k); ++c) {
    zf.add(std::exp(wfull[static_cast<std::size_t>(c)] - mfull));
    zs.add(std::exp(wsub[static_cast<std::size_t>(c)] - msub));
  }
  double tv = 0.0;
  for (std::uint64_t c = 0; c < (1ull << k); ++c) {
    double p = std::exp(wfull[static_cast<std::size_t>(c)] - mfull) / zf.value();
    double q = std::exp(wsub[static_cast<std::size_t>(c)] - msub) / zs.value();
    tv += std::fabs(p - q);
  }
  return 0.5 * tv;
}

}  // namespace ising
