#include <cmath>
#include <stdexcept>
#include <vector>

#include "ising/common.hpp"
#include "ising/exact.hpp"

namespace ising {

namespace {

// ln[cosh(2b)^2 - sinh(2b)(cos t1 + cos t2)], smooth except at the origin
// when cosh(2b)^2 = 2 sinh(2b)
double integrand(double beta, double t1, double t2) {
  double c = std::cosh(2.0 * beta), s = std::sinh(2.0 * beta);
  return std::log(c * c - s * (std::cos(t1) + std::cos(t2)));
}

// dyadic panel boundaries on [0, pi], geometrically refined toward 0
std::vector<double> dyadic_panels(int levels) {
  std::vector<double> b;
  b.push_back(0.0);
  for (int k = levels; k >= 0; --k) b.push_back(M_PI * std::ldexp(1.0, -k));
  return b;
}

double tensor_quad(double beta, const std::vector<double>& panels, int n) {
  std::vector<double> xs, ws;
  gauss_legendre(n, xs, ws);
  // per-axis nodes over all panels
  std::vector<double> nodes, wts;
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    double a = panels[p], b = panels[p + 1];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
      nodes.push_back(mid + half * xs[i]);
      wts.push_back(half * ws[i]);
    }
  }
  KahanSum total;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      total.add(wts[i] * wts[j] * integrand(beta, nodes[i], nodes[j]));
  return total.value();
}

}  // namespace

Quadrature onsager_minus_beta_f(double beta, double abs_tol) {
  if (beta < 0.0) throw std::invalid_argument("onsager_minus_beta_f: beta must be >= 0");
  if (std::fabs(beta - critical_beta_2d()) < 1e-6)
    throw std::domain_error("onsager_minus_beta_f: integrand log-singular near the critical point");
  if (beta == 0.0) return {std::log(2.0), 0.0};
  auto panels = dyadic_panels(48);
  double coarse = tensor_quad(beta, panels, 12);
  double fine = tensor_quad(beta, panels, 24);
  double integral = fine / (2.0 * M_PI * M_PI);
  double err = std::fabs(fine - coarse) / (2.0 * M_PI * M_PI) + 1e-14;
  if (err > abs_tol)
    throw std::runtime_error("onsager_minus_beta_f: quadrature error estimate exceeds tolerance");
  return {std::log(2.0) + integral, err};
}

double duality_residual(double beta) {
  if (beta <= 0.0) throw std::invalid_argument("duality_residual: beta must be > 0");
  double bs = kw_dual(beta);
  // with g(b) = -b f(b): g(b) = g(b*) + 2b - ln 2 - 2 ln cosh(b*)
  double g = onsager_minus_beta_f(beta).value;
  double gs = onsager_minus_beta_f(bs).value;
  return std::fabs(g - gs - 2.0 * beta + std::log(2.0) + 2.0 * std::log(std::cosh(bs)));
}

}  // namespace ising
