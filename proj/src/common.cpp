#include "ising/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace ising {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ISING_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
  }
  return 1;
}

// ---- incomplete gamma ------------------------------------------------------

namespace {

double gamma_q_series_p(double a, double x) {  // P(a,x) by series
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {  // Q(a,x) by Lentz continued fraction
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_q_series_p(a, x);
  return gamma_q_contfrac(a, x);
}

double chi2_sf(double x2, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi2_sf: dof must be positive");
  if (x2 <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x2);
}

// ---- Gauss-Legendre --------------------------------------------------------

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-like initial guess
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

// ---- statistics ------------------------------------------------------------

namespace {

BinStats stats_at_bin(const std::vector<double>& xs, std::size_t bsize) {
  std::size_t nb = xs.size() / bsize;
  KahanSum tot;
  for (double v : xs) tot.add(v);
  double mean = tot.value() / static_cast<double>(xs.size());
  KahanSum var;
  for (std::size_t b = 0; b < nb; ++b) {
    KahanSum s;
    for (std::size_t i = b * bsize; i < (b + 1) * bsize; ++i) s.add(xs[i]);
    double bm = s.value() / static_cast<double>(bsize);
    var.add(sq(bm - mean));
  }
  BinStats r;
  r.mean = mean;
  r.bins = static_cast<int>(nb);
  if (nb >= 2)
    r.err = std::sqrt(var.value() / (static_cast<double>(nb) * (static_cast<double>(nb) - 1.0)));
  return r;
}

}  // namespace

BinStats binned_stats(const std::vector<double>& xs, int min_bins) {
  if (xs.empty()) return {};
  if (xs.size() < 4) {
    return stats_at_bin(xs, 1);
  }
  BinStats best = stats_at_bin(xs, 1);
  for (std::size_t bsize = 2; xs.size() / bsize >= static_cast<std::size_t>(std::max(2, min_bins)); bsize *= 2) {
    BinStats s = stats_at_bin(xs, bsize);
    if (s.err > best.err) {
      best.err = s.err;
      best.bins = s.bins;
    }
  }
  return best;
}

BinStats pooled_binned_stats(const std::vector<std::vector<double>>& chains, int min_bins) {
  std::vector<double> means, errs;
  KahanSum tot;
  std::size_t n = 0;
  double errsq = 0.0;
  int bins = 0;
  for (const auto& ch : chains) {
    if (ch.empty()) continue;
    BinStats s = binned_stats(ch, min_bins);
    for (double v : ch) tot.add(v);
    n += ch.size();
    errsq += sq(s.err) * sq(static_cast<double>(ch.size()));
    bins += s.bins;
  }
  BinStats r;
  if (n == 0) return r;
  r.mean = tot.value() / static_cast<double>(n);
  r.err = std::sqrt(errsq) / static_cast<double>(n);  // independent chains
  r.bins = bins;
  return r;
}

JackknifeResult jackknife_bins(const std::vector<std::vector<double>>& bins,
                               const std::function<double(const std::vector<double>&)>& f) {
  const std::size_t n = bins.size();
  if (n == 0) return {};
  const std::size_t k = bins[0].size();
  std::vector<double> total(k, 0.0);
  for (const auto& b : bins)
    for (std::size_t j = 0; j < k; ++j) total[j] += b[j];
  std::vector<double> mean(k);
  for (std::size_t j = 0; j < k; ++j) mean[j] = total[j] / static_cast<double>(n);
  JackknifeResult r;
  r.value = f(mean);
  if (n < 2) return r;
  std::vector<double> loo(k);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      loo[j] = (total[j] - bins[i][j]) / static_cast<double>(n - 1);
    double t = f(loo);
    s += t;
    s2 += t * t;
  }
  double m = s / static_cast<double>(n);
  double var = std::max(0.0, s2 / static_cast<double>(n) - m * m);
  r.err = std::sqrt(var * (static_cast<double>(n) - 1.0));
  return r;
}

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("weighted_linear_fit: need >= 2 matching points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  double delta = sw * sxx - sx * sx;
  if (delta <= 0) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = (sw * sxy - sx * sy) / delta;
  f.intercept = (sxx * sy - sx * sxy) / delta;
  f.slope_err = std::sqrt(sw / delta);
  f.intercept_err = std::sqrt(sxx / delta);
  double ybar = sy / sw, ssr = 0, sst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ssr += w[i] * sq(y[i] - f.slope * x[i] - f.intercept);
    sst += w[i] * sq(y[i] - ybar);
  }
  f.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  return f;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}  // namespace ising
