#pragma once
// Markov-chain Monte Carlo: Glauber single-site and Swendsen-Wang cluster
// dynamics, exact single-step transition matrices for tiny graphs, and
// estimator drivers with binning / jackknife error bars.
#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ising/common.hpp"
#include "ising/lattice.hpp"

namespace ising {

struct ChainState {
  SpinConfig spins;
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;
  std::uint64_t sweep = 0;  // completed sweeps; drives all RNG counters
};

ChainState init_chain(const Lattice& lat, std::uint64_t seed, std::uint64_t chain_id);

// One sweep = nv random-site updates.  Rule: flip when sigma_x * (local field)
// <= 0, otherwise flip with probability exp(-2 beta sigma_x * local field);
// the local field includes couplings, external field, and boundary terms.
void glauber_sweep(ChainState& st, const Lattice& lat, const Coupling& coup,
                   const FieldSpec& field, const BoundaryCondition& bc, double beta);

// Cluster structure of the bond configuration drawn during a Swendsen-Wang
// sweep; it forms an Edwards-Sokal pair with the pre-sweep spins.  Non-free
// boundaries enter as ghost nodes (indices nv, nv+1) pinned to +1 / -1.
struct SwInfo {
  UnionFind uf;
  int nodes = 0;
  int ghost_plus = -1;
  int ghost_minus = -1;
  SwInfo() : uf(0) {}
};

// Requires h = 0 and ferromagnetic couplings.
SwInfo swendsen_wang_sweep(ChainState& st, const Lattice& lat, const Coupling& coup,
                           const BoundaryCondition& bc, double beta);

// ---- exact single-step transition matrices (tiny graphs) -------------------
// Row = source configuration (spin i of config c is +1 when bit i of c is 0).
Eigen::MatrixXd glauber_transition_matrix(const Lattice& lat, const Coupling& coup,
                                          const FieldSpec& field, const BoundaryCondition& bc,
                                          double beta);
Eigen::MatrixXd sw_transition_matrix(const Lattice& lat, const Coupling& coup, double beta);

// max_c |(mu P)(c) - mu(c)| for the Boltzmann row-vector mu
double stationarity_deviation(const Eigen::MatrixXd& p, const Lattice& lat, const Coupling& coup,
                              const FieldSpec& field, const BoundaryCondition& bc, double beta);

// ---- estimator driver -------------------------------------------------------

enum class Algo { Glauber, SwendsenWang };

struct RunParams {
  Algo algo = Algo::SwendsenWang;
  double beta = 0.0;
  long sweeps = 1000;  // measured sweeps per chain
  long burnin = 100;
  int chains = 2;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: resolve via environment, default 1
  int min_bins = 16;
};

// Per-sweep measurement row; `sw` is null under Glauber dynamics.  Spins are
// post-sweep, bonds are the ones drawn during the sweep: each is marginally
// stationary, and no estimator mixes the two.
using MeasureFn = std::function<void(const ChainState&, SwInfo* sw, std::vector<double>&)>;

// Raw measurement series, chains in id order: raw[chain][sweep*ncomp + k].
std::vector<std::vector<double>> run_raw(const Lattice& lat, const Coupling& coup,
                                         const FieldSpec& field, const BoundaryCondition& bc,
                                         const RunParams& params, int ncomp, const MeasureFn& measure);

// Component view helpers over run_raw output.
BinStats pooled_component(const std::vector<std::vector<double>>& raw, int ncomp, int k,
                          int min_bins = 16);
// Global bin table (bins x ncomp, chains concatenated in order) for jackknife.
std::vector<std::vector<double>> component_bins(const std::vector<std::vector<double>>& raw,
                                                int ncomp, int bins_per_chain = 16);

struct Estimate {
  double value = 0.0;
  double err = 0.0;
  long n = 0;
};

// Scalar observables: mag, absmag, energy (per edge), cv (per site),
// chi (fluctuation estimator), site (spin at vertices[0]).
Estimate estimate_observable(const Lattice& lat, const Coupling& coup, const FieldSpec& field,
                             const BoundaryCondition& bc, const RunParams& params,
                             const std::string& observable, const std::vector<int>& vertices = {});

// Two-point functions <s_origin s_x> for a target list (spin estimator).
std::vector<Estimate> estimate_two_point(const Lattice& lat, const Coupling& coup,
                                         const FieldSpec& field, const BoundaryCondition& bc,
                                         const RunParams& params, int origin,
                                         const std::vector<int>& targets);

// ---- translation-averaged torus correlators ---------------------------------

struct AxisCorr {
  std::vector<int> r;
  std::vector<double> value, err;
  std::vector<std::vector<double>> bins;  // bins x r for downstream jackknife fits
};

// <s_0 s_{r e}> on an L x L torus, averaged over origins and both axes, via
// the cluster-connectivity estimator of the Swendsen-Wang bond configuration.
AxisCorr fk_axis_correlations(int L, double beta, const std::vector<int>& rs,
                              const RunParams& params);

// Connected energy-energy correlator <eps_0 eps_{r e}> with eps the bond
// energy s_x s_{x+e}, averaged over origins and both orientations.
AxisCorr energy_axis_correlations(int L, double beta, const std::vector<int>& rs,
                                  const RunParams& params);

struct CorrLengthFit {
  double tau = 0.0;       // decay rate (minus slope of log-linear fit)
  double tau_err = 0.0;
  double r2 = 0.0;
  int rmin = 0, rmax = 0;  // fitted window after trimming
  AxisCorr data;
};

// Log-linear fit of <s_0 s_{r e}> over r in [1, min(L/4, 16)], trimming
// separations indistinguishable from zero.  Requires beta < beta_c.
CorrLengthFit correlation_length_fit(double beta, int L, const RunParams& params, int axis = 0);

// |<exp(z T - z^2/2 <T^2>)> - 1| for the normalised block average
// T = sum_x f(x/L) s_x / sqrt(var-hat), on an L x L torus, jackknife error.
JackknifeResult gaussianity_diagnostic(const std::function<double(double, double)>& f, int L,
                                       double beta, double z, const RunParams& params);

// Pfaffian check data for four equally spaced boundary points at separation s
// on the bottom/top rows of an Lx x Ly free box: relative deviation
// |<s1 s2 s3 s4> - Pf| / Pf with Pf = p12 p34 - p13 p24 + p14 p23.
JackknifeResult boundary_pfaffian_deviation(int lx, int ly, double beta, int s,
                                            const RunParams& params);

}  // namespace ising
