#pragma once
// Shared numerics: compensated summation, deterministic parallel chunking,
// union-find, Gauss-Legendre nodes, chi-square tails, binning / jackknife.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ising {

// Compensated (Kahan) accumulator.  Exact enumeration sums feed finite
// differences with 1e-8 budgets, so plain sequential summation is not enough.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// Thread-count resolution: explicit request wins, then ISING_LAB_THREADS, then 1.
int resolve_threads(int requested);

// Deterministic chunked map over [0, n): the chunk grid is fixed by `chunk`
// alone, workers fill a slot table, and the caller merges slots in order, so
// results are bit-identical for every worker count.
template <class R, class F>
std::vector<R> map_chunks(std::uint64_t n, std::uint64_t chunk, int threads, F&& f) {
  if (n == 0) return {};
  if (chunk == 0) throw std::invalid_argument("map_chunks: chunk must be positive");
  std::uint64_t nchunk = (n + chunk - 1) / chunk;
  std::vector<R> out(static_cast<std::size_t>(nchunk));
  int nw = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(nchunk, 256))));
  if (nw == 1) {
    for (std::uint64_t i = 0; i < nchunk; ++i)
      out[i] = f(i * chunk, std::min(n, (i + 1) * chunk));
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= nchunk) return;
      out[i] = f(i * chunk, std::min(n, (i + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

struct UnionFind {
  std::vector<int> parent, rank_;
  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }
  int components() {
    int c = 0;
    for (int i = 0; i < static_cast<int>(parent.size()); ++i)
      if (find(i) == i) ++c;
    return c;
  }
};

// Regularized upper incomplete gamma Q(a, x); chi-square tail P(X >= x2).
double regularized_gamma_q(double a, double x);
double chi2_sf(double x2, int dof);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// ---- statistics -----------------------------------------------------------

struct BinStats {
  double mean = 0.0;
  double err = 0.0;  // standard error from the binning plateau
  int bins = 0;
};

// Binning analysis of one correlated series: double the bin size while at
// least min_bins bins remain and take the plateau (max) standard error.
BinStats binned_stats(const std::vector<double>& xs, int min_bins = 16);

// Pool several independent equal-length chains: grand mean over all samples,
// error from per-chain bins pooled in chain order.
BinStats pooled_binned_stats(const std::vector<std::vector<double>>& chains, int min_bins = 16);

struct JackknifeResult {
  double value = 0.0;
  double err = 0.0;
};

// Bin-level jackknife of a smooth functional of component means.
// `bins` is nbins x k (per-bin means of k components).
JackknifeResult jackknife_bins(const std::vector<std::vector<double>>& bins,
                               const std::function<double(const std::vector<double>&)>& f);

// Weighted least squares y = slope*x + intercept with weights w = 1/sigma^2.
struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double slope_err = 0.0, intercept_err = 0.0;
  double r2 = 0.0;
};
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);

// 17-significant-digit serialization used by all result emitters.
std::string format_g17(double v);

inline double sq(double x) { return x * x; }

}  // namespace ising
