#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "ising/common.hpp"
#include "ising/exact.hpp"
#include "ising/fk.hpp"
#include "ising/lattice.hpp"

using namespace ising;

namespace {
double popcount_obs(std::uint64_t mask) { return static_cast<double>(std::popcount(mask)); }
}  // namespace

TEST_CASE("cluster counting") {
  Lattice p3 = make_path(3);
  CHECK_EQ(fk_cluster_count(p3, {0, 0}), 3);
  CHECK_EQ(fk_cluster_count(p3, {1, 0}), 2);
  CHECK_EQ(fk_cluster_count(p3, {1, 1}), 1);
  Lattice t = make_torus({3, 3});
  CHECK_EQ(fk_cluster_count(t, std::vector<std::uint8_t>(18, 1)), 1);
  CHECK_EQ(fk_cluster_count(t, std::vector<std::uint8_t>(18, 0)), 9);
}

TEST_CASE("random cluster weights") {
  Lattice e1 = make_path(2);
  CHECK_EQ(fk_log_weight(e1, {1}, 0.3, 2.0),
           doctest::Approx(std::log(0.3 * 2.0)).epsilon(1e-14));
  CHECK_EQ(fk_log_weight(e1, {0}, 0.3, 2.0),
           doctest::Approx(std::log(0.7 * 4.0)).epsilon(1e-14));
}

TEST_CASE("exact edge marginal of the two point coupling") {
  // single edge at q = 2: P(open) with p = 1 - e^(-2 beta) equals tanh(beta)
  Lattice e1 = make_path(2);
  double beta = 0.7;
  double p = 1.0 - std::exp(-2.0 * beta);
  double open_prob =
      fk_expectation(e1, p, 2.0, [](std::uint64_t mask) { return static_cast<double>(mask & 1u); });
  CHECK_EQ(open_prob, doctest::Approx(std::tanh(beta)).epsilon(1e-13));
  CHECK_EQ(open_prob, doctest::Approx(p / (p + 2.0 * (1.0 - p))).epsilon(1e-13));
}

TEST_CASE("even connection events reproduce correlations") {
  Lattice tri = make_ring(3);
  double beta = 0.5;
  double p = 1.0 - std::exp(-2.0 * beta);
  const Coupling unit;
  const FieldSpec none;
  const BoundaryCondition free_bc;
  double corr = exact_correlation(tri, unit, none, free_bc, beta, {0, 1});
  CHECK_EQ(fk_even_event_probability(tri, p, 2.0, {0, 1}), doctest::Approx(corr).epsilon(1e-12));
}

TEST_CASE("spin marginal matches over small graphs") {
  CHECK_LE(es_coupling_check(make_box({3, 3}), 0.5), 1e-12);
  CHECK_LE(es_coupling_check(make_ring(3), 0.8), 1e-12);
  CHECK_LE(es_coupling_check(make_path(4), 0.3), 1e-12);
}

TEST_CASE("cluster spins are constant and deterministic") {
  Lattice p3 = make_path(3);
  FkConfig cfg;
  cfg.open = {1, 0};
  SpinConfig s1 = edwards_sokal_spins(p3, cfg, 77);
  SpinConfig s2 = edwards_sokal_spins(p3, cfg, 77);
  CHECK(s1 == s2);
  CHECK_EQ(s1[0], s1[1]);
  for (signed char s : s1) CHECK((s == 1 || s == -1));
  cfg.open = {1, 1};
  SpinConfig s3 = edwards_sokal_spins(p3, cfg, 78);
  CHECK_EQ(s3[0], s3[1]);
  CHECK_EQ(s3[1], s3[2]);
}

TEST_CASE("bond sampler matches the exact edge marginal") {
  Lattice e1 = make_path(2);
  double beta = 0.7;
  int hits = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) hits += fk_sample(e1, beta, 30, 1000 + static_cast<std::uint64_t>(i)).open[0];
  double frac = static_cast<double>(hits) / n;
  double target = std::tanh(beta);
  double sigma = std::sqrt(target * (1.0 - target) / n);
  CHECK_LE(std::fabs(frac - target), 5.0 * sigma);
}

TEST_CASE("bond sampler histogram on the triangle") {
  Lattice tri = make_ring(3);
  double beta = 0.8;
  double p = 1.0 - std::exp(-2.0 * beta);
  // exact configuration probabilities
  std::vector<double> prob(8, 0.0);
  double z = 0.0;
  for (std::uint64_t m = 0; m < 8; ++m) {
    std::vector<std::uint8_t> open(3);
    for (int e = 0; e < 3; ++e) open[static_cast<std::size_t>(e)] = (m >> e) & 1u;
    prob[m] = std::exp(fk_log_weight(tri, open, p, 2.0));
    z += prob[m];
  }
  for (auto& q : prob) q /= z;
  const int n = 600;
  std::vector<int> count(8, 0);
  for (int i = 0; i < n; ++i) {
    FkConfig c = fk_sample(tri, beta, 25, 5000 + static_cast<std::uint64_t>(i));
    std::uint64_t m = 0;
    for (int e = 0; e < 3; ++e) m |= static_cast<std::uint64_t>(c.open[static_cast<std::size_t>(e)]) << e;
    ++count[m];
  }
  double x2 = 0.0;
  for (std::uint64_t m = 0; m < 8; ++m) {
    double expect = n * prob[m];
    x2 += sq(count[m] - expect) / expect;
  }
  CHECK_GT(chi2_sf(x2, 7), 1e-3);
}

TEST_CASE("positive association of increasing bond observables") {
  Lattice tri = make_ring(3);
  auto edge0 = [](std::uint64_t mask) { return static_cast<double>(mask & 1u); };
  for (double q : {1.0, 2.0, 3.0}) {
    CHECK_EQ(fkg_violation(tri, 0.5, q, popcount_obs, edge0), 0.0);
  }
  auto decreasing = [](std::uint64_t mask) { return -static_cast<double>(mask & 1u); };
  CHECK_THROWS_AS(fkg_violation(tri, 0.5, 2.0, popcount_obs, decreasing), std::invalid_argument);
}

TEST_CASE("stochastic monotonicity in the edge weight") {
  Lattice tri = make_ring(3);
  CHECK_EQ(p_monotone_violation(tri, 0.3, 0.6, 2.0, popcount_obs), 0.0);
  CHECK_THROWS_AS(p_monotone_violation(tri, 0.6, 0.3, 2.0, popcount_obs), std::invalid_argument);
  CHECK_THROWS_AS(p_monotone_violation(tri, 0.3, 0.6, 0.5, popcount_obs), std::invalid_argument);
}

TEST_CASE("crossing probability saturates at extreme edge weights") {
  Estimate hi = crossing_probability(8, 1.0, 0.995, 150, 3);
  CHECK_GE(hi.value, 0.9);
  Estimate lo = crossing_probability(8, 1.0, 0.02, 150, 3);
  CHECK_LE(lo.value, 0.1);
}
