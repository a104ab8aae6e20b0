#pragma once
// Integer-valued edge currents: truncated source-constrained sums with
// certified tails, exact trace sampling, the source-switching identity,
// Ursell functions, and differential inequalities.
#include <array>
#include <cstdint>
#include <vector>

#include "ising/lattice.hpp"

namespace ising {

struct CurrentSum {
  double value = 0.0;
  double tail = 0.0;  // certified truncation bound
};

// sum over currents with per-edge values <= n_max and source set A of
// prod_e (beta J_e)^{n_e} / n_e!  (factorised over edge parities)
CurrentSum current_sum(const Lattice& lat, const Coupling& coup, double beta,
                       const std::vector<int>& a, int n_max);

// the same sum by literal (n_max+1)^E enumeration (small-case cross-check)
CurrentSum current_sum_literal(const Lattice& lat, const Coupling& coup, double beta,
                               const std::vector<int>& a, int n_max);

// <s_A> as a ratio of source-constrained sums, with combined tail bound
CurrentSum current_correlation(const Lattice& lat, const Coupling& coup, double beta,
                               const std::vector<int>& a, int n_max);

enum class EdgeTrace : std::uint8_t { Zero = 0, Odd = 1, EvenPositive = 2 };

struct TracedCurrent {
  std::vector<EdgeTrace> state;
};

// Exact sampler: the odd-edge set is drawn from source-A subgraphs with
// weight prod tanh(beta J), then non-odd edges become even-positive
// independently with probability (cosh(beta J) - 1)/cosh(beta J).
TracedCurrent sample_current_trace(const Lattice& lat, const Coupling& coup, double beta,
                                   const std::vector<int>& a, std::uint64_t seed,
                                   std::uint64_t sample_index = 0);

enum class SwitchFn { One, TotalParityEven };

struct SwitchResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double tail = 0.0;  // combined certified truncation bound for |lhs - rhs|
};

// Two-current source-switching identity: sum over (n1, n2) with sources
// (A, B) of w w F(n1+n2) against the same sum with sources (A xor B, {})
// restricted to the event that every cluster of the positive-support graph
// meets B evenly.
SwitchResult switching_check(const Lattice& lat, const Coupling& coup, double beta,
                             const std::vector<int>& a, const std::vector<int>& b, SwitchFn f,
                             int n_max);

struct Ursell4 {
  double value = 0.0;     // U4 by spin enumeration
  double rhs = 0.0;       // -2 sum over sources ({x1,x2},{x3,x4}) of w w
                          // restricted to [all four in one support cluster],
                          // divided by the sourceless sum squared
  double residual = 0.0;  // |value - rhs|
  double tail = 0.0;      // certified bound on the truncation error of rhs
};

Ursell4 ursell4(const Lattice& lat, const Coupling& coup, double beta,
                const std::array<int, 4>& xs, int n_max);

struct DiffIneq {
  double violation = 0.0;
  double fd_error = 0.0;
};

// (1 - B/chi) 2d chi^2 / (1 + B) <= d chi / d beta <= 2d chi^2 on a torus
DiffIneq chi_bubble_check(const Lattice& torus, double beta);

// m <= tanh(beta h) dm/d(beta h) + m^2 (beta dm/dbeta + m), h >= 0
DiffIneq magnetization_ineq_check(const Lattice& torus, double beta, double h);

}  // namespace ising
