#pragma once
// Exact solvers: exhaustive enumeration (V <= 24), transfer matrices,
// low/high-temperature expansions, infinite-volume closed forms.
#include <Eigen/Dense>

#include "ising/lattice.hpp"

namespace ising {

double critical_beta_2d();           // (1/2) ln(1 + sqrt 2)
double fk_self_dual_p();             // sqrt 2 / (1 + sqrt 2)
double kw_dual(double beta);         // beta* with tanh(beta*) = exp(-2 beta)

// ---- exhaustive enumeration (V <= 24) --------------------------------------

double log_partition_enumerate(const Lattice& lat, const Coupling& coup,
                               const FieldSpec& field, const BoundaryCondition& bc,
                               double beta, int threads = 0);

// <sigma_A> for a vertex list A (an even number of repeats cancels)
double exact_correlation(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                         const BoundaryCondition& bc, double beta, const std::vector<int>& A,
                         int threads = 0);

struct ExactMoments {
  double log_z = 0.0;
  double mag = 0.0;            // <M>/V
  double abs_mag = 0.0;        // <|M|>/V
  double chi = 0.0;            // (<M^2> - <M>^2)/V
  double energy_per_edge = 0.0;// -(1/E) sum_e J <s s>
  double specific_heat = 0.0;  // beta^2 (<H^2> - <H>^2)/V
};
ExactMoments exact_moments(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                           const BoundaryCondition& bc, double beta, int threads = 0);

// chi_v0 = sum_x <s_v0 s_x> and B_v0 = sum_x <s_v0 s_x>^2
double exact_two_point_sum(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                           const BoundaryCondition& bc, double beta, int v0, int threads = 0);
double exact_two_point_sq_sum(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                              const BoundaryCondition& bc, double beta, int v0, int threads = 0);

// ---- expansions (uniform J = 1, h = 0, free bc) -----------------------------

// contour expansion over the planar dual of a 2d free box:
// log Z = ln 2 + beta |E| + ln sum_{F in Even(G*)} e^{-2 beta |F|}
double log_partition_lowtemp(const Lattice& box2d, double beta);

// parity expansion on an arbitrary graph (E <= 32):
// log Z = |V| ln 2 + |E| ln cosh beta + ln sum_{F in Even(G)} tanh(beta)^{|F|}
double log_partition_hightemp(const Lattice& lat, double beta);

// ---- transfer matrices ------------------------------------------------------

// layer-to-layer kernel for 2d boxes (open cross-section), 2d tori (ring
// cross-section, trace), and 1d chains/rings; uniform J = 1, uniform field
double log_partition_transfer(const Lattice& lat, double beta, double h = 0.0);

// symmetrized dense kernel D^{1/2} K D^{1/2} (strictly positive entries)
struct TransferMatrix {
  int n = 0;  // cross-section spin count
  Eigen::MatrixXd m;
};
TransferMatrix transfer_matrix_dense(int n_spins, bool periodic_cross, double beta, double h = 0.0);

// (1/n) ln lambda_max for the ring cross-section of n spins (n <= 16):
// converges to -beta f as n grows
double strip_free_energy_rate(int n, double beta);

// ---- closed forms -----------------------------------------------------------

struct Quadrature {
  double value = 0.0;
  double err = 0.0;
};

// -beta f(beta, 0) on Z^2 via the double-integral formula; rejects beta within
// 1e-6 of the critical point
Quadrature onsager_minus_beta_f(double beta, double abs_tol = 1e-9);

// spontaneous magnetisation (1 - sinh(2 beta)^{-4})^{1/8} above beta_c, else 0
double yang_magnetization(double beta);

// |beta f(beta) - [beta* f(beta*) - 2 beta + ln 2 + 2 ln cosh beta*]|
double duality_residual(double beta);

// contour-counting lower bound for <s_0 s_ghost> on plus-ghost boxes, beta > ln 2
double peierls_two_point_bound(double beta);

// total-variation distance between the conditional measure on W given tau off W
// and the induced-subgraph model on W with tau as boundary field
double spatial_markov_tv(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                         const BoundaryCondition& bc, double beta,
                         const std::vector<int>& W, const SpinConfig& tau);

}  // namespace ising
