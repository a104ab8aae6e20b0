#include <cmath>
#include <vector>

#include "doctest.h"
#include "ising/exact.hpp"
#include "ising/lattice.hpp"
#include "ising/mc.hpp"

using namespace ising;

namespace {
const Coupling kUnit;
const FieldSpec kNoField;
const BoundaryCondition kFree;

RunParams sw_params(double beta, long sweeps, std::uint64_t seed) {
  RunParams p;
  p.algo = Algo::SwendsenWang;
  p.beta = beta;
  p.sweeps = sweeps;
  p.burnin = 100;
  p.chains = 2;
  p.seed = seed;
  p.threads = 1;
  return p;
}
}  // namespace

TEST_CASE("chain initialization is deterministic") {
  Lattice t = make_torus({4, 4});
  ChainState a = init_chain(t, 9, 0);
  ChainState b = init_chain(t, 9, 0);
  CHECK(a.spins == b.spins);
  ChainState c = init_chain(t, 9, 1);
  CHECK_NE(a.spins == c.spins, true);
  for (signed char s : a.spins) CHECK((s == 1 || s == -1));
}

TEST_CASE("single site dynamics fixes the boltzmann measure") {
  FieldSpec h;
  h.uniform = 0.1;
  for (const Lattice& lat : {make_ring(3), make_path(3), make_box({2, 2})}) {
    for (double beta : {0.4, 0.9}) {
      Eigen::MatrixXd p = glauber_transition_matrix(lat, kUnit, h, kFree, beta);
      const auto n = p.rows();
      for (Eigen::Index r = 0; r < n; ++r) {
        double row = 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
          CHECK_GE(p(r, c), 0.0);
          row += p(r, c);
        }
        CHECK_EQ(row, doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK_LE(stationarity_deviation(p, lat, kUnit, h, kFree, beta), 1e-12);
    }
  }
  // boundary terms enter the flip rates
  Lattice b22 = make_box({2, 2});
  BoundaryCondition plus;
  plus.kind = BcKind::Plus;
  Eigen::MatrixXd p = glauber_transition_matrix(b22, kUnit, kNoField, plus, 0.5);
  CHECK_LE(stationarity_deviation(p, b22, kUnit, kNoField, plus, 0.5), 1e-12);
}

TEST_CASE("cluster dynamics fixes the boltzmann measure") {
  for (const Lattice& lat : {make_ring(3), make_path(4), make_box({2, 2})}) {
    for (double beta : {0.4, 0.9}) {
      Eigen::MatrixXd p = sw_transition_matrix(lat, kUnit, beta);
      const auto n = p.rows();
      for (Eigen::Index r = 0; r < n; ++r) {
        double row = 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
          CHECK_GE(p(r, c), 0.0);
          row += p(r, c);
        }
        CHECK_EQ(row, doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK_LE(stationarity_deviation(p, lat, kUnit, kNoField, kFree, beta), 1e-12);
    }
  }
}

TEST_CASE("raw series shape and determinism") {
  Lattice t = make_torus({3, 3});
  RunParams p = sw_params(0.35, 64, 5);
  auto measure = [&](const ChainState& st, SwInfo*, std::vector<double>& out) {
    double m = 0.0;
    for (signed char s : st.spins) m += s;
    out[0] = m / static_cast<double>(st.spins.size());
  };
  auto raw1 = run_raw(t, kUnit, kNoField, kFree, p, 1, measure);
  auto raw2 = run_raw(t, kUnit, kNoField, kFree, p, 1, measure);
  REQUIRE_EQ(raw1.size(), 2u);
  CHECK_EQ(raw1[0].size(), 64u);
  CHECK(raw1 == raw2);
  p.threads = 4;
  auto raw4 = run_raw(t, kUnit, kNoField, kFree, p, 1, measure);
  CHECK(raw1 == raw4);  // thread count never changes the stream
}

TEST_CASE("estimates agree with enumeration on a small torus") {
  Lattice t = make_torus({3, 3});
  ExactMoments ex = exact_moments(t, kUnit, kNoField, kFree, 0.3);
  RunParams p = sw_params(0.3, 3000, 11);
  Estimate am = estimate_observable(t, kUnit, kNoField, kFree, p, "absmag");
  CHECK_GT(am.err, 0.0);
  CHECK_LE(std::fabs(am.value - ex.abs_mag), 5.0 * am.err + 1e-3);
  p.algo = Algo::Glauber;
  p.seed = 12;
  Estimate en = estimate_observable(t, kUnit, kNoField, kFree, p, "energy");
  CHECK_LE(std::fabs(en.value - ex.energy_per_edge), 5.0 * en.err + 2e-3);
}

TEST_CASE("single spin estimate under a plus boundary") {
  Lattice b = make_box({3, 3});
  BoundaryCondition plus;
  plus.kind = BcKind::Plus;
  double exact = exact_correlation(b, kUnit, kNoField, plus, 0.7, {4});
  RunParams p = sw_params(0.7, 2000, 3);
  p.algo = Algo::Glauber;
  Estimate s = estimate_observable(b, kUnit, kNoField, plus, p, "site", {4});
  CHECK_LE(std::fabs(s.value - exact), 5.0 * s.err + 2e-3);
}

TEST_CASE("two point estimates against the chain closed form") {
  Lattice path = make_path(4);
  RunParams p = sw_params(0.6, 4000, 21);
  auto est = estimate_two_point(path, kUnit, kNoField, kFree, p, 0, {1, 3});
  REQUIRE_EQ(est.size(), 2u);
  double t1 = std::tanh(0.6);
  CHECK_LE(std::fabs(est[0].value - t1), 5.0 * est[0].err + 2e-3);
  CHECK_LE(std::fabs(est[1].value - t1 * t1 * t1), 5.0 * est[1].err + 2e-3);
}

TEST_CASE("estimator output is identical for any thread count") {
  Lattice t = make_torus({8, 8});
  RunParams p1 = sw_params(0.4, 200, 17);
  Estimate a = estimate_observable(t, kUnit, kNoField, kFree, p1, "absmag");
  RunParams p4 = p1;
  p4.threads = 4;
  Estimate b = estimate_observable(t, kUnit, kNoField, kFree, p4, "absmag");
  CHECK_EQ(a.value, b.value);
  CHECK_EQ(a.err, b.err);
  RunParams pseed = p1;
  pseed.seed = 18;
  Estimate c = estimate_observable(t, kUnit, kNoField, kFree, pseed, "absmag");
  CHECK_NE(a.value, c.value);
}

TEST_CASE("translation averaged correlators decay") {
  RunParams p = sw_params(0.35, 400, 7);
  AxisCorr ax = fk_axis_correlations(8, 0.35, {1, 2, 3}, p);
  REQUIRE_EQ(ax.r.size(), 3u);
  CHECK_GT(ax.value[0], ax.value[1]);
  CHECK_GT(ax.value[1], ax.value[2]);
  CHECK_GT(ax.value[2], 0.0);
  for (double e : ax.err) CHECK_GT(e, 0.0);
  CHECK_FALSE(ax.bins.empty());

  AxisCorr en = energy_axis_correlations(8, 0.35, {1, 2}, p);
  REQUIRE_EQ(en.r.size(), 2u);
  for (double v : en.value) CHECK(std::isfinite(v));
}

TEST_CASE("subcritical correlation length fit") {
  RunParams p = sw_params(0.25, 600, 9);
  CorrLengthFit fit = correlation_length_fit(0.25, 16, p);
  CHECK_GT(fit.tau, 0.0);
  CHECK_GT(fit.r2, 0.9);
  CHECK_GE(fit.rmax, fit.rmin);
  CHECK_FALSE(fit.data.r.empty());
}

TEST_CASE("block average diagnostic vanishes at z equal zero") {
  RunParams p = sw_params(0.3, 200, 13);
  auto f = [](double, double) { return 1.0; };
  JackknifeResult j = gaussianity_diagnostic(f, 8, 0.3, 0.0, p);
  CHECK_LE(std::fabs(j.value), 1e-14);
  JackknifeResult k = gaussianity_diagnostic(f, 8, 0.3, 0.4, p);
  CHECK(std::isfinite(k.value));
  CHECK_GE(k.err, 0.0);
}

TEST_CASE("boundary pfaffian deviation runs on a small box") {
  RunParams p = sw_params(0.0, 300, 19);
  p.beta = critical_beta_2d();
  // quads need an 8-site margin on each side plus the 3s span
  JackknifeResult j = boundary_pfaffian_deviation(32, 8, critical_beta_2d(), 2, p);
  CHECK(std::isfinite(j.value));
  CHECK_GE(j.value, 0.0);
  CHECK_GE(j.err, 0.0);
  CHECK_THROWS_AS(boundary_pfaffian_deviation(16, 8, critical_beta_2d(), 2, p),
                  std::invalid_argument);
}
