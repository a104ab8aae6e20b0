#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ising/common.hpp"
#include "ising/exact.hpp"

namespace ising {

namespace {

// cross-section tables: internal coupling sum R(s) and magnetisation M(s)
struct Cross {
  int n = 0;
  std::vector<float> r;  // R fits small integers exactly
  std::vector<int> mag;
};

Cross make_cross(const std::vector<int>& sides, bool periodic) {
  long long n = 1;
  for (int s : sides) n *= s;
  if (n > 16) throw std::invalid_argument("transfer: cross-section must be <= 16 spins");
  Cross c;
  c.n = static_cast<int>(n);
  std::vector<std::array<int, 2>> edges;
  if (!sides.empty()) {
    Lattice cl = periodic ? make_torus(sides) : make_box(sides);
    edges = cl.edges;
  }
  c.r.resize(1ull << c.n);
  c.mag.resize(1ull << c.n);
  for (std::uint32_t s = 0; s < (1u << c.n); ++s) {
    int r = 0;
    for (auto [u, v] : edges) {
      int a = 1 - 2 * static_cast<int>((s >> u) & 1u);
      int b = 1 - 2 * static_cast<int>((s >> v) & 1u);
      r += a * b;
    }
    c.r[s] = static_cast<float>(r);
    c.mag[s] = c.n - 2 * std::popcount(s);
  }
  return c;
}

// v <- K v with K = tensor power of [[e^b, e^-b], [e^-b, e^b]]
void apply_k(std::vector<double>& v, int n, double beta) {
  const double a = std::exp(beta), b = std::exp(-beta);
  for (int bit = 0; bit < n; ++bit) {
    const std::size_t step = 1ull << bit;
    for (std::size_t i = 0; i < v.size(); i += 2 * step) {
      for (std::size_t j = i; j < i + step; ++j) {
        double x = v[j], y = v[j + step];
        v[j] = a * x + b * y;
        v[j + step] = b * x + a * y;
      }
    }
  }
}

std::vector<double> layer_diag(const Cross& c, double beta, double h) {
  std::vector<double> d(c.r.size());
  for (std::size_t s = 0; s < d.size(); ++s)
    d[s] = std::exp(beta * (static_cast<double>(c.r[s]) + h * c.mag[s]));
  return d;
}

// log(1^T D (K D)^{M-1} 1) for open ends
double log_z_open(const Cross& c, int layers, double beta, double h) {
  auto d = layer_diag(c, beta, h);
  std::vector<double> v(d);
  double logscale = 0.0;
  for (int m = 1; m < layers; ++m) {
    apply_k(v, c.n, beta);
    double mx = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) {
      v[s] *= d[s];
      mx = std::max(mx, v[s]);
    }
    for (auto& x : v) x /= mx;
    logscale += std::log(mx);
  }
  KahanSum z;
  for (double x : v) z.add(x);
  return logscale + std::log(z.value());
}

Eigen::MatrixXd dense_symmetric_kernel(const Cross& c, double beta, double h) {
  const std::size_t n = c.r.size();
  if (n > 4096) throw std::invalid_argument("transfer: dense kernel needs cross-section <= 12 spins");
  auto d = layer_diag(c, beta, h);
  Eigen::MatrixXd S(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double k = std::exp(beta * (c.n - 2.0 * std::popcount(static_cast<std::uint32_t>(a ^ b))));
      double s = std::sqrt(d[a]) * k * std::sqrt(d[b]);
      S(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
      S(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = s;
    }
  }
  return S;
}

// log Tr((K D)^M) = log sum_i lambda_i^M via the symmetrized kernel
double log_z_trace(const Cross& c, int layers, double beta, double h) {
  Eigen::MatrixXd S = dense_symmetric_kernel(c, beta, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double mx = -1e300;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double l = std::fabs(ev[i]);
    if (l > 0.0) mx = std::max(mx, layers * std::log(l));
  }
  KahanSum z;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double l = std::fabs(ev[i]);
    if (l <= 0.0) continue;
    double sign = (ev[i] < 0.0 && (layers % 2) != 0) ? -1.0 : 1.0;
    z.add(sign * std::exp(layers * std::log(l) - mx));
  }
  return mx + std::log(z.value());
}

}  // namespace

double log_partition_transfer(const Lattice& lat, double beta, double h) {
  if (lat.kind == LatticeKind::Graph)
    throw std::invalid_argument("transfer: needs a box or torus lattice");
  const int d = lat.dim();
  std::vector<int> cross_sides(lat.sides.begin(), lat.sides.end() - 1);
  int layers = lat.sides.back();
  Cross c = make_cross(cross_sides, lat.periodic());
  if (lat.kind == LatticeKind::Box) return log_z_open(c, layers, beta, h);
  (void)d;
  return log_z_trace(c, layers, beta, h);
}

TransferMatrix transfer_matrix_dense(int n_spins, bool periodic_cross, double beta, double h) {
  if (n_spins < 1 || n_spins > 12)
    throw std::invalid_argument("transfer_matrix_dense: n must be in [1, 12]");
  if (periodic_cross && n_spins < 3)
    throw std::invalid_argument("transfer_matrix_dense: ring cross-section needs n >= 3");
  std::vector<int> sides{n_spins};
  Cross c = make_cross(sides, periodic_cross);
  TransferMatrix t;
  t.n = n_spins;
  t.m = dense_symmetric_kernel(c, beta, h);
  return t;
}

double strip_free_energy_rate(int n, double beta) {
  if (n < 3 || n > 16) throw std::invalid_argument("strip_free_energy_rate: n must be in [3, 16]");
  Cross c = make_cross({n}, true);
  auto d = layer_diag(c, beta, 0.0);
  std::vector<double> sqrtd(d.size());
  for (std::size_t s = 0; s < d.size(); ++s) sqrtd[s] = std::sqrt(d[s]);
  std::vector<double> v(d.size(), 1.0 / std::sqrt(static_cast<double>(d.size())));
  double rho = 0.0;
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> w(v);
    for (std::size_t s = 0; s < w.size(); ++s) w[s] *= sqrtd[s];
    apply_k(w, c.n, beta);
    for (std::size_t s = 0; s < w.size(); ++s) w[s] *= sqrtd[s];
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < w.size(); ++s) {
      num += v[s] * w[s];
      den += v[s] * v[s];
    }
    double rho_new = num / den;
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (auto& x : w) x /= nrm;
    v.swap(w);
    if (it > 4 && std::fabs(rho_new - rho) <= 1e-14 * std::fabs(rho_new)) {
      rho = rho_new;
      break;
    }
    rho = rho_new;
  }
  return std::log(rho) / n;
}

}  // namespace ising
