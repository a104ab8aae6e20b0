#include "ising/inequalities.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <complex>
#include <stdexcept>

#include "ising/common.hpp"
#include "ising/exact.hpp"
#include "ising/fk.hpp"
#include "ising/mc.hpp"
#include "ising/rng.hpp"

namespace ising {

SpinIneq spin_ineq_from_name(const std::string& name) {
  if (name == "griffiths1") return SpinIneq::Griffiths1;
  if (name == "griffiths2") return SpinIneq::Griffiths2;
  if (name == "ghs") return SpinIneq::Ghs;
  if (name == "simon-lieb") return SpinIneq::SimonLieb;
  if (name == "mms") return SpinIneq::Mms;
  if (name == "fkg-spin") return SpinIneq::FkgSpin;
  throw std::invalid_argument("unknown spin inequality kind: " + name);
}

std::string spin_ineq_name(SpinIneq kind) {
  switch (kind) {
    case SpinIneq::Griffiths1: return "griffiths1";
    case SpinIneq::Griffiths2: return "griffiths2";
    case SpinIneq::Ghs: return "ghs";
    case SpinIneq::SimonLieb: return "simon-lieb";
    case SpinIneq::Mms: return "mms";
    case SpinIneq::FkgSpin: return "fkg-spin";
  }
  throw std::invalid_argument("unknown spin inequality kind");
}

namespace {

constexpr double kGhsStep = 3e-3;

// random connected graph on [nv_lo, nv_hi] vertices with J_e in [0, j_max]
void random_graph_instance(SequenceRng& rng, int nv_lo, int nv_hi, double j_max,
                           Lattice* lat, Coupling* coup) {
  const int nv = nv_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(nv_hi - nv_lo + 1)));
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<std::uint8_t>> used(static_cast<std::size_t>(nv),
                                              std::vector<std::uint8_t>(static_cast<std::size_t>(nv), 0));
  for (int v = 1; v < nv; ++v) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    edges.push_back({u, v});
    used[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
  }
  for (int u = 0; u < nv; ++u) {
    for (int v = u + 1; v < nv; ++v) {
      if (used[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
      if (rng.uniform() < 0.35) edges.push_back({u, v});
    }
  }
  *lat = make_graph(nv, edges);
  coup->uniform = 1.0;
  coup->per_edge.clear();
  for (std::size_t e = 0; e < edges.size(); ++e) coup->per_edge.push_back(j_max * rng.uniform());
}

std::vector<int> random_subset(SequenceRng& rng, int nv, int max_size, bool nonempty) {
  std::vector<int> s;
  const int target = (nonempty ? 1 : 0) +
                     static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size)));
  std::vector<int> pool(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) pool[static_cast<std::size_t>(v)] = v;
  for (int k = 0; k < target && !pool.empty(); ++k) {
    const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
    s.push_back(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  }
  std::sort(s.begin(), s.end());
  return s;
}

// increasing observable over config masks (bit v set <=> sigma_v = +1):
// nonnegative linear part plus nonnegative threshold indicators
std::vector<double> random_increasing_function(SequenceRng& rng, int nv) {
  const int n = 1 << nv;
  std::vector<double> c(static_cast<std::size_t>(nv));
  for (auto& x : c) x = rng.uniform();
  struct Threshold {
    std::uint32_t mask;
    int level;
    double amp;
  };
  std::vector<Threshold> ths;
  const int nt = 1 + static_cast<int>(rng.below(2));
  for (int k = 0; k < nt; ++k) {
    std::uint32_t mask = static_cast<std::uint32_t>(rng.below(1ull << nv));
    if (mask == 0) mask = 1;
    const int sz = std::popcount(mask);
    const int level = -sz + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * sz + 1)));
    ths.push_back({mask, level, 2.0 * rng.uniform()});
  }
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  for (int m = 0; m < n; ++m) {
    double v = 0.0;
    for (int x = 0; x < nv; ++x) v += c[static_cast<std::size_t>(x)] * ((m >> x & 1) ? 1.0 : -1.0);
    for (const auto& t : ths) {
      const int up = std::popcount(static_cast<std::uint32_t>(m) & t.mask);
      const int sum = 2 * up - std::popcount(t.mask);
      if (sum >= t.level) v += t.amp;
    }
    f[static_cast<std::size_t>(m)] = v;
  }
  return f;
}

void verify_increasing(const Lattice& lat, const std::vector<double>& f) {
  const int nv = lat.nv;
  if (f.size() != (1ull << nv)) throw std::invalid_argument("FKG observable has wrong size");
  for (std::uint32_t m = 0; m < (1u << nv); ++m) {
    for (int v = 0; v < nv; ++v) {
      if (m >> v & 1) continue;
      if (f[m | (1u << v)] < f[m]) {
        throw std::invalid_argument("FKG observable is not increasing");
      }
    }
  }
}

double config_energy(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                     std::uint32_t m) {
  double h = 0.0;
  for (int e = 0; e < lat.ne(); ++e) {
    const auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
    const double su = (m >> u & 1) ? 1.0 : -1.0;
    const double sv = (m >> v & 1) ? 1.0 : -1.0;
    h -= coup.j(e) * su * sv;
  }
  for (int v = 0; v < lat.nv; ++v) h -= field.h(v) * ((m >> v & 1) ? 1.0 : -1.0);
  return h;
}

double fkg_spin_violation(const SpinIneqInstance& inst) {
  const int nv = inst.lat.nv;
  if (nv > 14) throw std::invalid_argument("FKG enumeration capped at 14 vertices");
  verify_increasing(inst.lat, inst.f);
  verify_increasing(inst.lat, inst.g);
  const std::uint32_t n = 1u << nv;
  std::vector<double> w(n);
  double emin = config_energy(inst.lat, inst.coup, inst.field, 0);
  for (std::uint32_t m = 1; m < n; ++m) {
    emin = std::min(emin, config_energy(inst.lat, inst.coup, inst.field, m));
  }
  for (std::uint32_t m = 0; m < n; ++m) {
    w[m] = std::exp(-inst.beta * (config_energy(inst.lat, inst.coup, inst.field, m) - emin));
  }
  KahanSum z, ef, eg, efg;
  for (std::uint32_t m = 0; m < n; ++m) {
    z.add(w[m]);
    ef.add(w[m] * inst.f[m]);
    eg.add(w[m] * inst.g[m]);
    efg.add(w[m] * inst.f[m] * inst.g[m]);
  }
  const double mf = ef.value() / z.value();
  const double mg = eg.value() / z.value();
  const double mfg = efg.value() / z.value();
  return std::max(0.0, mf * mg - mfg);
}

double ghs_violation(const SpinIneqInstance& inst) {
  for (int v = 0; v < inst.lat.nv; ++v) {
    if (inst.field.h(v) < 2.0 * kGhsStep) {
      throw std::invalid_argument("GHS stencil needs h >= 2 * step everywhere");
    }
  }
  const BoundaryCondition free_bc;
  auto m_at = [&](double shift) {
    FieldSpec f;
    f.per_vertex.resize(static_cast<std::size_t>(inst.lat.nv));
    for (int v = 0; v < inst.lat.nv; ++v) {
      f.per_vertex[static_cast<std::size_t>(v)] = inst.field.h(v) + shift;
    }
    return exact_moments(inst.lat, inst.coup, f, free_bc, inst.beta).mag;
  };
  const double d = kGhsStep;
  const double m2n = m_at(-2.0 * d), m1n = m_at(-d), m0 = m_at(0.0), m1 = m_at(d),
               m2 = m_at(2.0 * d);
  const double second = (-m2n + 16.0 * m1n - 30.0 * m0 + 16.0 * m1 - m2) / (12.0 * d * d);
  return std::max(0.0, second - inst.fd_slack);
}

double simon_lieb_violation(const SpinIneqInstance& inst) {
  const FieldSpec no_field;
  const BoundaryCondition free_bc;
  const auto& s = inst.region;
  if (std::find(s.begin(), s.end(), 0) == s.end()) {
    throw std::invalid_argument("Simon-Lieb region must contain vertex 0");
  }
  if (std::find(s.begin(), s.end(), inst.x) != s.end()) {
    throw std::invalid_argument("Simon-Lieb target must lie outside the region");
  }
  std::vector<int> idx(static_cast<std::size_t>(inst.lat.nv), -1);
  for (std::size_t i = 0; i < s.size(); ++i) idx[static_cast<std::size_t>(s[i])] = static_cast<int>(i);
  std::vector<std::array<int, 2>> sub_edges;
  Coupling sub_coup;
  sub_coup.uniform = 1.0;
  for (int e = 0; e < inst.lat.ne(); ++e) {
    const auto [u, v] = inst.lat.edges[static_cast<std::size_t>(e)];
    if (idx[static_cast<std::size_t>(u)] >= 0 && idx[static_cast<std::size_t>(v)] >= 0) {
      sub_edges.push_back({idx[static_cast<std::size_t>(u)], idx[static_cast<std::size_t>(v)]});
      sub_coup.per_edge.push_back(inst.coup.j(e));
    }
  }
  const Lattice sub = make_graph(static_cast<int>(s.size()), sub_edges);
  const double lhs =
      exact_correlation(inst.lat, inst.coup, no_field, free_bc, inst.beta, {0, inst.x});
  KahanSum rhs;
  for (int y : s) {
    bool boundary = false;
    for (auto [w, e] : inst.lat.adj[static_cast<std::size_t>(y)]) {
      (void)e;
      if (idx[static_cast<std::size_t>(w)] < 0) {
        boundary = true;
        break;
      }
    }
    if (!boundary) continue;
    const double inner = exact_correlation(sub, sub_coup, no_field, free_bc, inst.beta,
                                           {0, idx[static_cast<std::size_t>(y)]});
    const double outer =
        exact_correlation(inst.lat, inst.coup, no_field, free_bc, inst.beta, {y, inst.x});
    rhs.add(inner * outer);
  }
  return std::max(0.0, lhs - rhs.value());
}

}  // namespace

SpinIneqInstance random_spin_instance(SpinIneq kind, std::uint64_t seed, std::uint64_t index) {
  SequenceRng rng(seed, (static_cast<std::uint64_t>(kind) << 32) ^ (index + 0x494E4551ull));
  SpinIneqInstance inst;
  inst.beta = 0.05 + 1.1 * rng.uniform();
  switch (kind) {
    case SpinIneq::Griffiths1:
    case SpinIneq::Griffiths2: {
      random_graph_instance(rng, 2, 9, 2.0, &inst.lat, &inst.coup);
      inst.field.per_vertex.resize(static_cast<std::size_t>(inst.lat.nv));
      for (auto& h : inst.field.per_vertex) h = rng.uniform();
      inst.set_a = random_subset(rng, inst.lat.nv, 4, true);
      inst.set_b = random_subset(rng, inst.lat.nv, 4, true);
      break;
    }
    case SpinIneq::Ghs: {
      random_graph_instance(rng, 2, 9, 2.0, &inst.lat, &inst.coup);
      inst.field.per_vertex.resize(static_cast<std::size_t>(inst.lat.nv));
      for (auto& h : inst.field.per_vertex) h = 0.007 + 0.8 * rng.uniform();
      inst.fd_slack = 1e-8;
      break;
    }
    case SpinIneq::SimonLieb: {
      random_graph_instance(rng, 4, 10, 2.0, &inst.lat, &inst.coup);
      const int nv = inst.lat.nv;
      // region: vertex 0 plus a random selection; target outside the region
      std::vector<int> others;
      for (int v = 1; v < nv; ++v) others.push_back(v);
      inst.region = {0};
      for (int v : others) {
        if (rng.uniform() < 0.5) inst.region.push_back(v);
      }
      if (static_cast<int>(inst.region.size()) == nv) inst.region.pop_back();
      std::sort(inst.region.begin(), inst.region.end());
      std::vector<int> outside;
      for (int v = 0; v < nv; ++v) {
        if (std::find(inst.region.begin(), inst.region.end(), v) == inst.region.end()) {
          outside.push_back(v);
        }
      }
      inst.x = outside[static_cast<std::size_t>(rng.below(outside.size()))];
      break;
    }
    case SpinIneq::Mms: {
      const int lx = 3 + static_cast<int>(rng.below(3));
      const int ly = 2 + static_cast<int>(rng.below(3));
      inst.lat = make_box({lx, ly});
      inst.coup.uniform = 0.1 + 1.4 * rng.uniform();
      inst.beta = 0.05 + 0.95 * rng.uniform();
      const int k1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(lx - 2)));
      const int k2 =
          k1 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(lx - 1 - k1)));
      inst.mid = k1;  // (k1, 0) along the bottom row from the corner
      inst.x = k2;    // (k2, 0) strictly farther along the same axis
      break;
    }
    case SpinIneq::FkgSpin: {
      random_graph_instance(rng, 2, 8, 2.0, &inst.lat, &inst.coup);
      inst.field.per_vertex.resize(static_cast<std::size_t>(inst.lat.nv));
      for (auto& h : inst.field.per_vertex) h = -1.0 + 2.0 * rng.uniform();
      inst.f = random_increasing_function(rng, inst.lat.nv);
      inst.g = random_increasing_function(rng, inst.lat.nv);
      break;
    }
  }
  return inst;
}

double check_spin_inequality(SpinIneq kind, const SpinIneqInstance& inst) {
  for (int e = 0; e < inst.lat.ne(); ++e) {
    if (inst.coup.j(e) < 0.0) throw std::invalid_argument("inequality battery needs J >= 0");
  }
  if (!(inst.beta >= 0.0)) throw std::invalid_argument("inequality battery needs beta >= 0");
  const FieldSpec no_field;
  const BoundaryCondition free_bc;
  switch (kind) {
    case SpinIneq::Griffiths1: {
      for (int v = 0; v < inst.lat.nv; ++v) {
        if (inst.field.h(v) < 0.0) throw std::invalid_argument("Griffiths needs h >= 0");
      }
      const double c =
          exact_correlation(inst.lat, inst.coup, inst.field, free_bc, inst.beta, inst.set_a);
      return std::max(0.0, -c);
    }
    case SpinIneq::Griffiths2: {
      for (int v = 0; v < inst.lat.nv; ++v) {
        if (inst.field.h(v) < 0.0) throw std::invalid_argument("Griffiths needs h >= 0");
      }
      std::vector<int> ab = inst.set_a;
      ab.insert(ab.end(), inst.set_b.begin(), inst.set_b.end());
      const double cab =
          exact_correlation(inst.lat, inst.coup, inst.field, free_bc, inst.beta, ab);
      const double ca =
          exact_correlation(inst.lat, inst.coup, inst.field, free_bc, inst.beta, inst.set_a);
      const double cb =
          exact_correlation(inst.lat, inst.coup, inst.field, free_bc, inst.beta, inst.set_b);
      return std::max(0.0, ca * cb - cab);
    }
    case SpinIneq::Ghs:
      return ghs_violation(inst);
    case SpinIneq::SimonLieb:
      return simon_lieb_violation(inst);
    case SpinIneq::Mms: {
      const double near_c =
          exact_correlation(inst.lat, inst.coup, no_field, free_bc, inst.beta, {0, inst.mid});
      const double far_c =
          exact_correlation(inst.lat, inst.coup, no_field, free_bc, inst.beta, {0, inst.x});
      return std::max(0.0, far_c - near_c);
    }
    case SpinIneq::FkgSpin:
      return fkg_spin_violation(inst);
  }
  throw std::invalid_argument("unknown spin inequality kind");
}

// ---- Lee-Yang ----------------------------------------------------------------

namespace {

// Parlett-Reinsch balancing with radix-2 scaling (exact in floating point)
void balance_matrix(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / 2.0) {
        c *= 4.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 4.0;
        f /= 2.0;
      }
      if (f != 1.0 && (c + r) / f < 0.95 * s) {
        converged = false;
        a.col(i) *= f;
        a.row(i) /= f;
      }
    }
  }
}

}  // namespace

LeeYangResult lee_yang_zeros(const Lattice& lat, const Coupling& coup, double beta) {
  const int nv = lat.nv;
  if (nv < 1 || nv > 12) throw std::invalid_argument("Lee-Yang enumeration capped at 12 vertices");
  if (!(beta > 0.0)) throw std::invalid_argument("Lee-Yang needs beta > 0");
  // coefficient of z^k (k = number of plus spins) is sum over configs of
  // exp(beta sum J s s); overall scale is irrelevant to the roots
  std::vector<double> inter(1ull << nv);
  double imax = -1e300;
  for (std::uint32_t m = 0; m < (1u << nv); ++m) {
    double s = 0.0;
    for (int e = 0; e < lat.ne(); ++e) {
      const auto [u, v] = lat.edges[static_cast<std::size_t>(e)];
      const double su = (m >> u & 1) ? 1.0 : -1.0;
      const double sv = (m >> v & 1) ? 1.0 : -1.0;
      s += coup.j(e) * su * sv;
    }
    inter[m] = s;
    imax = std::max(imax, s);
  }
  std::vector<double> c(static_cast<std::size_t>(nv) + 1, 0.0);
  for (std::uint32_t m = 0; m < (1u << nv); ++m) {
    const int k = std::popcount(m);  // bit set <=> sigma = +1
    c[static_cast<std::size_t>(k)] += std::exp(beta * (inter[m] - imax));
  }
  // monic companion matrix of sum_k (c_k / c_V) z^k
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 1; i < nv; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < nv; ++i) {
    comp(i, nv - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(nv)];
  }
  balance_matrix(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Lee-Yang companion eigensolver failed to converge");
  }
  LeeYangResult res;
  for (int i = 0; i < nv; ++i) {
    res.moduli.push_back(std::abs(solver.eigenvalues()(i)));
    res.worst = std::max(res.worst, std::abs(res.moduli.back() - 1.0));
  }
  std::sort(res.moduli.begin(), res.moduli.end());
  return res;
}

// ---- Gaussian domination ------------------------------------------------------

double gaussian_domination_check(const Lattice& torus, double beta, const std::vector<double>& h) {
  if (!torus.periodic()) throw std::invalid_argument("Gaussian domination wants a torus");
  for (int s : torus.sides) {
    if (s % 2 != 0) throw std::invalid_argument("Gaussian domination needs even torus sides");
  }
  if (torus.nv > 20) throw std::invalid_argument("Gaussian domination enumeration capped at 2^20");
  if (h.size() != static_cast<std::size_t>(torus.nv)) {
    throw std::invalid_argument("field size must match the vertex count");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("Gaussian domination needs beta > 0");
  // sum_e (s_u - s_v + dh_e)^2 = 2E - 2 sum J s s + 2 sum_x q_x s_x + sum_e dh_e^2
  // with q_x = sum over incident edges of +-dh_e, so Z(h) reduces to an Ising
  // partition function with doubled couplings and field -2 q
  std::vector<double> q(static_cast<std::size_t>(torus.nv), 0.0);
  double dh2 = 0.0;
  for (int e = 0; e < torus.ne(); ++e) {
    const auto [u, v] = torus.edges[static_cast<std::size_t>(e)];
    const double dh = h[static_cast<std::size_t>(u)] - h[static_cast<std::size_t>(v)];
    dh2 += dh * dh;
    q[static_cast<std::size_t>(u)] += dh;
    q[static_cast<std::size_t>(v)] -= dh;
  }
  Coupling doubled;
  doubled.uniform = 2.0;
  const BoundaryCondition free_bc;
  FieldSpec fh;
  fh.per_vertex.resize(static_cast<std::size_t>(torus.nv));
  for (int v = 0; v < torus.nv; ++v) fh.per_vertex[static_cast<std::size_t>(v)] = -2.0 * q[static_cast<std::size_t>(v)];
  const FieldSpec f0;
  const double log_zh = -beta * dh2 + log_partition_enumerate(torus, doubled, fh, free_bc, beta);
  const double log_z0 = log_partition_enumerate(torus, doubled, f0, free_bc, beta);
  return std::max(0.0, std::exp(log_zh - log_z0) - 1.0);
}

// ---- infrared bound -------------------------------------------------------------

InfraredResult infrared_bound_check(int L, int d, double beta, const RunParams& params_in) {
  if (d < 1) throw std::invalid_argument("infrared check needs d >= 1");
  if (L < 4 || L % 2 != 0) {
    throw std::invalid_argument("infrared check needs an even torus side >= 4");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("infrared check needs beta > 0");
  const Lattice lat = make_torus(std::vector<int>(static_cast<std::size_t>(d), L));
  const int nv = lat.nv;
  const int nmodes = nv - 1;
  // one L x L DFT table shared by all axes
  std::vector<std::complex<double>> dft(static_cast<std::size_t>(L) * static_cast<std::size_t>(L));
  for (int m = 0; m < L; ++m) {
    for (int x = 0; x < L; ++x) {
      const double phi = 2.0 * std::numbers::pi * m * x / L;
      dft[static_cast<std::size_t>(m) * L + x] = {std::cos(phi), std::sin(phi)};
    }
  }
  RunParams params = params_in;
  params.beta = beta;
  params.algo = Algo::SwendsenWang;
  const Coupling unit;
  const FieldSpec no_field;
  const BoundaryCondition free_bc;
  MeasureFn measure = [&](const ChainState& st, SwInfo*, std::vector<double>& out) {
    // axis-wise DFT of the spin field (axis 0 fastest in the vertex index)
    std::vector<std::complex<double>> a(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) a[static_cast<std::size_t>(v)] = static_cast<double>(st.spins[static_cast<std::size_t>(v)]);
    std::vector<std::complex<double>> line(static_cast<std::size_t>(L));
    int stride = 1;
    for (int axis = 0; axis < d; ++axis) {
      const int block = stride * L;
      for (int base = 0; base < nv; base += block) {
        for (int off = 0; off < stride; ++off) {
          for (int x = 0; x < L; ++x) line[static_cast<std::size_t>(x)] = a[static_cast<std::size_t>(base + off + x * stride)];
          for (int m = 0; m < L; ++m) {
            std::complex<double> s = 0.0;
            for (int x = 0; x < L; ++x) {
              s += dft[static_cast<std::size_t>(m) * L + x] * line[static_cast<std::size_t>(x)];
            }
            a[static_cast<std::size_t>(base + off + m * stride)] = s;
          }
        }
      }
      stride = block;
    }
    for (int k = 1; k < nv; ++k) out.push_back(std::norm(a[static_cast<std::size_t>(k)]) / nv);
  };
  const auto raw = run_raw(lat, unit, no_field, free_bc, params, nmodes, measure);
  InfraredResult res;
  res.in_theorem = d >= 3;
  res.worst_margin = 1e300;
  res.worst_sigma = 1e300;
  for (int k = 1; k < nv; ++k) {
    InfraredMode mode;
    int rest = k;
    double eps = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      const int m = rest % L;
      rest /= L;
      mode.k_index.push_back(m);
      eps += 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * m / L));
    }
    mode.eps = eps;
    const auto st = pooled_component(raw, nmodes, k - 1, params.min_bins);
    mode.s_hat = st.mean;
    mode.s_err = st.err;
    mode.margin = (2.0 / beta) / eps - mode.s_hat;
    res.worst_margin = std::min(res.worst_margin, mode.margin);
    if (mode.s_err > 0.0) {
      res.worst_sigma = std::min(res.worst_sigma, mode.margin / mode.s_err);
    }
    res.modes.push_back(std::move(mode));
  }
  return res;
}


FkIneqInstance random_fk_instance(const std::string& kind, std::uint64_t seed,
                                  std::uint64_t index) {
  const bool mono = kind == "p-monotone";
  if (!mono && kind != "fkg-fk") {
    throw std::invalid_argument("unknown random-cluster battery kind '" + kind + "'");
  }
  SequenceRng rng(seed, (index << 8) ^ (mono ? 0x464B4D4Full : 0x464B4647ull));
  FkIneqInstance inst;
  Coupling coup;  // draw discarded: only the graph matters here
  random_graph_instance(rng, 2, 5, 1.0, &inst.lat, &coup);
  const int ne = inst.lat.ne();
  inst.q = 1.0 + static_cast<double>(index % 3);
  if (mono) {
    inst.p = 0.1 + 0.4 * rng.uniform();
    inst.p_hi = inst.p + 0.05 + (0.9 - inst.p - 0.05) * rng.uniform();
    inst.f = random_increasing_function(rng, ne);
  } else {
    inst.p = 0.15 + 0.7 * rng.uniform();
    inst.p_hi = inst.p;
    inst.f = random_increasing_function(rng, ne);
    inst.g = random_increasing_function(rng, ne);
  }
  return inst;
}

LeeYangInstance random_lee_yang_instance(std::uint64_t seed, std::uint64_t index, int nv_cap,
                                         bool ferro) {
  nv_cap = std::min(nv_cap, 12);
  if (nv_cap < 2) throw std::invalid_argument("zero-location battery needs at least 2 vertices");
  SequenceRng rng(seed, (index << 8) ^ (ferro ? 0x4C59464Dull : 0x4C594146ull));
  LeeYangInstance inst;
  random_graph_instance(rng, ferro ? 2 : 3, nv_cap, 1.0, &inst.lat, &inst.coup);
  if (!ferro) {
    // force a frustrated triangle on {0,1,2}, then flip every sign: trees and
    // other bipartite-gauge graphs would otherwise stay on the unit circle
    std::vector<std::array<int, 2>> edges = inst.lat.edges;
    std::vector<double> js = inst.coup.per_edge;
    for (const std::array<int, 2>& want :
         {std::array<int, 2>{0, 1}, std::array<int, 2>{1, 2}, std::array<int, 2>{0, 2}}) {
      bool present = false;
      for (const auto& e : edges) present = present || e == want;
      if (!present) {
        edges.push_back(want);
        js.push_back(0.3 + 0.7 * rng.uniform());
      }
    }
    inst.lat = make_graph(inst.lat.nv, edges);
    inst.coup.per_edge = js;
    for (double& j : inst.coup.per_edge) j = -j;
  }
  inst.beta = 0.2 + rng.uniform();
  return inst;
}

BatteryResult run_check_battery(const std::string& kind, int trials, std::uint64_t seed,
                                int size_cap, const RunParams& mc) {
  if (trials < 1) throw std::invalid_argument("battery needs at least one trial");
  BatteryResult out;
  out.kind = kind;
  out.trials = trials;
  constexpr double kTol = 1e-10;
  bool first = true;
  auto note = [&](double margin, double tol) {
    if (margin < -tol) ++out.violations;
    if (first || margin < out.worst_margin) out.worst_margin = margin;
    first = false;
  };
  const bool spin_kind = kind == "griffiths1" || kind == "griffiths2" || kind == "ghs" ||
                         kind == "simon-lieb" || kind == "mms" || kind == "fkg-spin";
  if (spin_kind) {
    const SpinIneq sk = spin_ineq_from_name(kind);
    for (int i = 0; i < trials; ++i) {
      const SpinIneqInstance inst = random_spin_instance(sk, seed, static_cast<std::uint64_t>(i));
      note(-check_spin_inequality(sk, inst), kTol);
    }
  } else if (kind == "fkg-fk" || kind == "p-monotone") {
    for (int i = 0; i < trials; ++i) {
      const FkIneqInstance inst = random_fk_instance(kind, seed, static_cast<std::uint64_t>(i));
      auto fv = [&inst](std::uint64_t m) { return inst.f[m]; };
      double v = 0.0;
      if (kind == "fkg-fk") {
        auto gv = [&inst](std::uint64_t m) { return inst.g[m]; };
        v = fkg_violation(inst.lat, inst.p, inst.q, fv, gv);
      } else {
        v = p_monotone_violation(inst.lat, inst.p, inst.p_hi, inst.q, fv);
      }
      note(-v, kTol);
    }
  } else if (kind == "lee-yang") {
    for (int i = 0; i < trials; ++i) {
      const LeeYangInstance inst =
          random_lee_yang_instance(seed, static_cast<std::uint64_t>(i), size_cap, true);
      const LeeYangResult r = lee_yang_zeros(inst.lat, inst.coup, inst.beta);
      note(1e-6 - r.worst, 0.0);
    }
  } else if (kind == "gaussian-domination") {
    const Lattice torus = make_torus({4, 4});
    for (int i = 0; i < trials; ++i) {
      SequenceRng rng(seed, (static_cast<std::uint64_t>(i) << 8) ^ 0x47444F4Dull);
      std::vector<double> h(static_cast<std::size_t>(torus.nv));
      for (double& x : h) x = 2.0 * rng.uniform() - 1.0;
      const double beta = (i % 2 == 0) ? 0.3 : 0.5;
      note(-gaussian_domination_check(torus, beta, h), kTol);
    }
  } else if (kind == "infrared") {
    const InfraredResult r = infrared_bound_check(4, 3, mc.beta, mc);
    out.trials = static_cast<int>(r.modes.size());
    for (const InfraredMode& m : r.modes) {
      const double sigmas = m.s_err > 0.0 ? m.margin / m.s_err : (m.margin >= 0.0 ? 1e9 : -1e9);
      note(sigmas + 3.0, 0.0);
    }
  } else {
    throw std::invalid_argument("unknown check kind '" + kind + "'");
  }
  return out;
}

}  // namespace ising
