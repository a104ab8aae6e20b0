#include <cmath>
#include <vector>

#include "doctest.h"
#include "ising/exact.hpp"
#include "ising/lattice.hpp"

using namespace ising;

namespace {
const Coupling kUnit;
const FieldSpec kNoField;
const BoundaryCondition kFree;
}  // namespace

TEST_CASE("critical point constants") {
  CHECK_EQ(critical_beta_2d(), doctest::Approx(0.4406867935097715).epsilon(1e-15));
  CHECK_EQ(critical_beta_2d(), doctest::Approx(0.5 * std::log(1.0 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK_EQ(fk_self_dual_p(), doctest::Approx(0.5857864376269050).epsilon(1e-15));
  CHECK_EQ(fk_self_dual_p(), doctest::Approx(1.0 - std::exp(-2.0 * critical_beta_2d())).epsilon(1e-14));
}

TEST_CASE("coupling duality map") {
  CHECK_EQ(kw_dual(0.3), doctest::Approx(0.6166791594161026).epsilon(1e-14));
  CHECK_EQ(kw_dual(0.6), doctest::Approx(0.3108324425992326).epsilon(1e-14));
  // involution and fixed point
  CHECK_LE(std::fabs(kw_dual(kw_dual(0.44)) - 0.44), 1e-12);
  CHECK_LE(std::fabs(kw_dual(critical_beta_2d()) - critical_beta_2d()), 1e-10);
}

TEST_CASE("partition function frozen values") {
  Lattice b22 = make_box({2, 2});
  CHECK_EQ(log_partition_enumerate(b22, kUnit, kNoField, kFree, 0.3),
           doctest::Approx(2.9571277285336003).epsilon(1e-13));
  Lattice b33 = make_box({3, 3});
  CHECK_EQ(log_partition_enumerate(b33, kUnit, kNoField, kFree, 0.44),
           doctest::Approx(7.4980498797415768).epsilon(1e-13));
  Lattice t44 = make_torus({4, 4});
  CHECK_EQ(log_partition_enumerate(t44, kUnit, kNoField, kFree, 0.44),
           doctest::Approx(15.504726538718162).epsilon(1e-13));
}

TEST_CASE("partition function methods agree") {
  for (const Lattice& lat : {make_box({3, 3}), make_box({4, 4}), make_torus({4, 4})}) {
    for (double beta : {0.2, 0.8}) {
      double ze = log_partition_enumerate(lat, kUnit, kNoField, kFree, beta);
      CHECK_EQ(log_partition_transfer(lat, beta), doctest::Approx(ze).epsilon(1e-11));
      CHECK_EQ(log_partition_hightemp(lat, beta), doctest::Approx(ze).epsilon(1e-11));
      CHECK_EQ(log_partition_lowtemp(lat, beta), doctest::Approx(ze).epsilon(1e-11));
    }
  }
}

TEST_CASE("transfer matrices with an external field") {
  // 1d open chain in closed form
  Lattice p5 = make_path(5);
  CHECK_EQ(log_partition_transfer(p5, 0.45),
           doctest::Approx(std::log(2.0) + 4.0 * std::log(2.0 * std::cosh(0.45))).epsilon(1e-13));
  FieldSpec h;
  h.uniform = 0.2;
  CHECK_EQ(log_partition_transfer(p5, 0.35, 0.2),
           doctest::Approx(log_partition_enumerate(p5, kUnit, h, kFree, 0.35)).epsilon(1e-12));
  Lattice b33 = make_box({3, 3});
  FieldSpec hneg;
  hneg.uniform = -0.3;
  CHECK_EQ(log_partition_transfer(b33, 0.5, -0.3),
           doctest::Approx(log_partition_enumerate(b33, kUnit, hneg, kFree, 0.5)).epsilon(1e-12));
  TransferMatrix tm = transfer_matrix_dense(1, false, 0.4);
  REQUIRE_EQ(tm.m.rows(), 2);
  CHECK_EQ(tm.m(0, 0), doctest::Approx(std::exp(0.4)).epsilon(1e-14));
  CHECK_EQ(tm.m(0, 1), doctest::Approx(std::exp(-0.4)).epsilon(1e-14));
}

TEST_CASE("exact correlations frozen values") {
  Lattice b33 = make_box({3, 3});
  CHECK_EQ(exact_correlation(b33, kUnit, kNoField, kFree, 0.4, {0, 4}),
           doctest::Approx(0.3195999109676398).epsilon(1e-13));
  CHECK_EQ(exact_correlation(b33, kUnit, kNoField, kFree, 0.4, {0, 1}),
           doctest::Approx(0.4394629595114123).epsilon(1e-13));
  Lattice tri = make_ring(3);
  double t = std::tanh(0.5);
  CHECK_EQ(exact_correlation(tri, kUnit, kNoField, kFree, 0.5, {0, 1}),
           doctest::Approx(0.6149794589701251).epsilon(1e-13));
  CHECK_EQ(exact_correlation(tri, kUnit, kNoField, kFree, 0.5, {0, 1}),
           doctest::Approx((t + t * t) / (1.0 + t * t * t)).epsilon(1e-13));
  // odd sets vanish by symmetry at h = 0
  CHECK_LE(std::fabs(exact_correlation(b33, kUnit, kNoField, kFree, 0.4, {3})), 1e-14);
}

TEST_CASE("two point sums") {
  Lattice tri = make_ring(3);
  double c = exact_correlation(tri, kUnit, kNoField, kFree, 0.5, {0, 1});
  CHECK_EQ(exact_two_point_sum(tri, kUnit, kNoField, kFree, 0.5, 0),
           doctest::Approx(1.0 + 2.0 * c).epsilon(1e-13));
  CHECK_EQ(exact_two_point_sq_sum(tri, kUnit, kNoField, kFree, 0.5, 0),
           doctest::Approx(1.0 + 2.0 * c * c).epsilon(1e-13));
}

TEST_CASE("moment identities") {
  Lattice b33 = make_box({3, 3});
  ExactMoments m = exact_moments(b33, kUnit, kNoField, kFree, 0.44);
  CHECK_EQ(m.log_z, doctest::Approx(7.4980498797415768).epsilon(1e-13));
  CHECK_LE(std::fabs(m.mag), 1e-14);  // plus-minus symmetry
  CHECK_GT(m.abs_mag, 0.0);
  CHECK_LE(m.abs_mag, 1.0);
  CHECK_GE(m.chi, 0.0);
  CHECK_GE(m.specific_heat, 0.0);
  // -E d(energy-free) identity: energy_per_edge = -(1/E) d logZ / d beta
  double d = 1e-5;
  double fd = -(log_partition_enumerate(b33, kUnit, kNoField, kFree, 0.44 + d) -
                log_partition_enumerate(b33, kUnit, kNoField, kFree, 0.44 - d)) /
              (2.0 * d * b33.ne());
  CHECK_EQ(m.energy_per_edge, doctest::Approx(fd).epsilon(1e-8));
  // plus boundary magnetises the box
  BoundaryCondition plus;
  plus.kind = BcKind::Plus;
  ExactMoments mp = exact_moments(b33, kUnit, kNoField, plus, 0.44);
  CHECK_GT(mp.mag, 0.5);
}

TEST_CASE("strip rate approaches the onsager free energy") {
  double ons = onsager_minus_beta_f(0.3).value;
  CHECK_EQ(ons, doctest::Approx(0.7905590709512629).epsilon(1e-10));
  CHECK_LE(std::fabs(strip_free_energy_rate(12, 0.3) - ons), 1e-3);
  CHECK_THROWS_AS(strip_free_energy_rate(2, 0.3), std::invalid_argument);
}

TEST_CASE("onsager free energy frozen values") {
  Quadrature q2 = onsager_minus_beta_f(0.2);
  CHECK_LE(std::fabs(q2.value - 0.7345308122763260), 1e-9 + q2.err);
  Quadrature q6 = onsager_minus_beta_f(0.6);
  CHECK_LE(std::fabs(q6.value - 1.2101323882884129), 1e-9 + q6.err);
  CHECK_THROWS_AS(onsager_minus_beta_f(critical_beta_2d()), std::domain_error);
}

TEST_CASE("spontaneous magnetization") {
  CHECK_EQ(yang_magnetization(0.5), doctest::Approx(0.9113193778774960).epsilon(1e-13));
  CHECK_EQ(yang_magnetization(0.6), doctest::Approx(0.9736086674403005).epsilon(1e-13));
  CHECK_EQ(yang_magnetization(0.8), doctest::Approx(0.9960199928264506).epsilon(1e-13));
  CHECK_EQ(yang_magnetization(1.5), doctest::Approx(0.9999875884375184).epsilon(1e-13));
  CHECK_EQ(yang_magnetization(critical_beta_2d()), 0.0);
  CHECK_EQ(yang_magnetization(0.3), 0.0);
}

TEST_CASE("free energy duality residual") {
  CHECK_LE(duality_residual(0.3), 1e-9);
  CHECK_LE(duality_residual(0.7), 1e-9);
}

TEST_CASE("contour counting lower bound") {
  CHECK_EQ(peierls_two_point_bound(1.5), doctest::Approx(0.3789846873617095).epsilon(1e-13));
  CHECK_EQ(peierls_two_point_bound(1.0), doctest::Approx(-4.1466120829293759).epsilon(1e-13));
  CHECK_THROWS_AS(peierls_two_point_bound(0.6), std::invalid_argument);
}

TEST_CASE("conditioning on an exterior configuration factorizes") {
  Lattice b33 = make_box({3, 3});
  std::vector<int> w{0, 1, 3, 4};
  SpinConfig tau(9, +1);
  tau[2] = -1;
  tau[6] = -1;
  tau[8] = -1;
  CHECK_LE(spatial_markov_tv(b33, kUnit, kNoField, kFree, 0.6, w, tau), 1e-12);
  FieldSpec h;
  h.uniform = 0.15;
  BoundaryCondition plus;
  plus.kind = BcKind::Plus;
  CHECK_LE(spatial_markov_tv(b33, kUnit, h, plus, 0.45, w, tau), 1e-12);
  CHECK_THROWS_AS(spatial_markov_tv(b33, kUnit, kNoField, kFree, 0.6, {0, 0}, tau),
                  std::invalid_argument);
}
