#pragma once
// Correlation-inequality batteries on enumeration-sized instances, Lee-Yang
// zero location, Gaussian domination, and the infrared bound.
#include <cstdint>
#include <string>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/mc.hpp"

namespace ising {

enum class SpinIneq { Griffiths1, Griffiths2, Ghs, SimonLieb, Mms, FkgSpin };

SpinIneq spin_ineq_from_name(const std::string& name);
std::string spin_ineq_name(SpinIneq kind);

// One battery instance.  Config bitmasks used by the FKG functions follow the
// convention: bit v set  <=>  sigma_v = +1.
struct SpinIneqInstance {
  Lattice lat;
  Coupling coup;
  FieldSpec field;
  double beta = 0.5;
  std::vector<int> set_a, set_b;  // Griffiths correlation sets
  std::vector<int> region;        // Simon-Lieb separating region S (contains 0)
  int x = 0;                      // Simon-Lieb target / MMS far vertex
  int mid = 0;                    // MMS near vertex
  std::vector<double> f, g;       // FKG observables, one value per config mask
  double fd_slack = 0.0;          // allowed finite-difference error (GHS)
};

// deterministic pseudo-random battery instance #index for the kind
SpinIneqInstance random_spin_instance(SpinIneq kind, std::uint64_t seed, std::uint64_t index);

// violation magnitude, exactly 0 when the inequality holds (GHS: in excess of
// the instance's finite-difference slack); all sides computed by enumeration
double check_spin_inequality(SpinIneq kind, const SpinIneqInstance& inst);

// ---- Lee-Yang ---------------------------------------------------------------

struct LeeYangResult {
  std::vector<double> moduli;  // |z_i| over all roots of the partition polynomial
  double worst = 0.0;          // max_i ||z_i| - 1|
};

// Z as a polynomial in z = e^(2 beta h), coefficients grouped by the number of
// plus spins; roots via a balanced companion matrix.  V <= 12, beta > 0.
LeeYangResult lee_yang_zeros(const Lattice& lat, const Coupling& coup, double beta);

// ---- reflection-positivity consequences -------------------------------------

// Z_L(h) = sum_sigma exp[-beta sum_edges (s_x - s_y + h_x - h_y)^2] on an
// even-sided torus with V <= 20: returns max(0, Z_L(h)/Z_L(0) - 1).
double gaussian_domination_check(const Lattice& torus, double beta, const std::vector<double>& h);

struct InfraredMode {
  std::vector<int> k_index;  // integer momentum, k_a = 2 pi m_a / L
  double eps = 0.0;          // 2 sum_a (1 - cos k_a)
  double s_hat = 0.0;        // <|sum_x e^{ik.x} s_x|^2> / V
  double s_err = 0.0;
  double margin = 0.0;       // (2/beta)/eps - s_hat
};

struct InfraredResult {
  std::vector<InfraredMode> modes;  // every nonzero torus momentum
  bool in_theorem = false;          // the statement is a d >= 3 theorem
  double worst_margin = 0.0;        // min over modes
  double worst_sigma = 0.0;         // min over modes of margin / s_err
};

// MC estimate of every spin Fourier mode on an L^d torus (L even, >= 4)
// compared against the momentum-space random-walk surrogate (2/beta)/eps(k).
InfraredResult infrared_bound_check(int L, int d, double beta, const RunParams& params);

// ---- randomized check batteries ----------------------------------------------

// Deterministic random-cluster battery instance: increasing observables
// tabulated over edge bitmasks, with cluster weight q cycling over {1,2,3}.
struct FkIneqInstance {
  Lattice lat;
  double p = 0.5;     // FKG edge weight / lower weight for monotonicity
  double p_hi = 0.5;  // upper edge weight (p-monotone only)
  double q = 2.0;
  std::vector<double> f, g;  // one value per edge mask; g empty for p-monotone
};

FkIneqInstance random_fk_instance(const std::string& kind, std::uint64_t seed,
                                  std::uint64_t index);

// Random ferromagnetic (or, with ferro=false, antiferromagnetic) graph for
// the zero-location battery.
struct LeeYangInstance {
  Lattice lat;
  Coupling coup;
  double beta = 0.5;
};

LeeYangInstance random_lee_yang_instance(std::uint64_t seed, std::uint64_t index, int nv_cap = 8,
                                         bool ferro = true);

struct BatteryResult {
  std::string kind;
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;  // min signed distance to the failure boundary
};

// Runs `trials` deterministic pseudo-random instances of the named check.
// Kinds: griffiths1, griffiths2, ghs, simon-lieb, mms, fkg-spin (enumeration
// spin batteries); fkg-fk, p-monotone (random-cluster batteries); lee-yang
// (zero moduli, size_cap bounds the vertex count); gaussian-domination
// (random field profiles on a 4x4 torus); infrared (one MC run on a 4^3
// torus whose modes are the trials; consumes `mc`).  Margin convention:
// inequality batteries report minus the violation magnitude; lee-yang
// reports 1e-6 minus the worst modulus deviation; infrared reports the
// worst margin in stderr units plus 3.
BatteryResult run_check_battery(const std::string& kind, int trials, std::uint64_t seed,
                                int size_cap, const RunParams& mc);

}  // namespace ising
