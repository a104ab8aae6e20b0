#pragma once
// Random-cluster (FK) model: exact small-graph enumeration, the spin/bond
// coupling at q = 2, order/monotonicity checks, and crossing experiments.
#include <cstdint>
#include <functional>
#include <vector>

#include "ising/lattice.hpp"
#include "ising/mc.hpp"

namespace ising {

struct FkConfig {
  std::vector<std::uint8_t> open;  // one flag per edge
  int open_count() const {
    int n = 0;
    for (auto o : open) n += o != 0;
    return n;
  }
};

// cluster count k(omega), isolated vertices included
int fk_cluster_count(const Lattice& lat, const std::vector<std::uint8_t>& open);

// unnormalised log-weight |w| ln p + (|E|-|w|) ln(1-p) + k ln q
double fk_log_weight(const Lattice& lat, const std::vector<std::uint8_t>& open, double p, double q);

// Exact expectations by enumeration over all 2^E bond configurations (E <= 24).
// `f` maps an edge bitmask to a value.
double fk_expectation(const Lattice& lat, double p, double q,
                      const std::function<double(std::uint64_t)>& f);

// Probability that every cluster contains an even number of vertices of A.
double fk_even_event_probability(const Lattice& lat, double p, double q,
                                 const std::vector<int>& a);

// max |<s_A> - phi[F_A]| over all pairs and all 4-subsets at p = 1 - e^(-2 beta)
double es_coupling_check(const Lattice& lat, double beta);

// constant spins on clusters, independent uniform cluster signs
SpinConfig edwards_sokal_spins(const Lattice& lat, const FkConfig& cfg, std::uint64_t seed);

// q = 2 sampler: equilibrate spins by Swendsen-Wang, then open satisfied
// edges with probability p = 1 - e^(-2 beta).
FkConfig fk_sample(const Lattice& lat, double beta, long sweeps, std::uint64_t seed);

// FKG lattice condition check by enumeration: returns max(0, E[f]E[g] - E[fg]).
// f and g must be increasing (verified exhaustively for E <= 16; throws).
double fkg_violation(const Lattice& lat, double p, double q,
                     const std::function<double(std::uint64_t)>& f,
                     const std::function<double(std::uint64_t)>& g);

// stochastic monotonicity in p: returns max(0, E_plo[f] - E_phi[f])
double p_monotone_violation(const Lattice& lat, double p_lo, double p_hi, double q,
                            const std::function<double(std::uint64_t)>& f);

// Left-right crossing probability of a [0, rho*n] x [0, n] rectangle under
// the q = 2 random-cluster measure at edge weight p, by Swendsen-Wang.
Estimate crossing_probability(int n, double rho, double p, long sweeps, std::uint64_t seed,
                              int chains = 2, int threads = 0);

}  // namespace ising
