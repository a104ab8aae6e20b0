#pragma once
// Discrete complex analysis on 2d boxes: the face-wise discrete
// Cauchy-Riemann residual, and exact order-disorder correlators with
// explicit dual cuts.
#include <complex>
#include <functional>
#include <vector>

#include "ising/lattice.hpp"

namespace ising {

struct ComplexLatticeFunction {
  int lx = 0, ly = 0;
  std::vector<std::complex<double>> values;  // row-major, x fastest
  std::complex<double> at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(lx) +
                  static_cast<std::size_t>(x)];
  }
};

// sample f(x + iy) on every vertex of an lx x ly box
ComplexLatticeFunction tabulate_function(
    int lx, int ly, const std::function<std::complex<double>(std::complex<double>)>& f);

// F(NW) - F(SE) - i [F(NE) - F(SW)] on the face whose lower-left corner is
// (fx, fy); zero for discrete holomorphicity
std::complex<double> isaacs_residual(const ComplexLatticeFunction& f, int fx, int fy);

// max |residual| over every face of the box
double preholomorphic_check(const ComplexLatticeFunction& f);

// A cut: primal edge ids whose dual edges form a self-avoiding dual path from
// the outer face to the target face (fx, fy).
struct Cut {
  std::vector<int> primal_edges;
  int target_fx = 0, target_fy = 0;
};

// structural validation; throws invalid_argument on any defect
void validate_cut(const Lattice& box, const Cut& cut);

// canonical cut: enters from below the box and crosses the horizontal edges
// (fx, y)-(fx+1, y) for y = 0..fy
Cut straight_cut(const Lattice& box, int fx, int fy);

// one order-disorder insertion: a spin at x next to a disorder line ending at
// the cut's target face, which must be bordered by x
struct Insertion {
  int x = 0;
  Cut cut;
};

// <prod_i sigma_{x_i} * prod over all cut edges of exp(-2 beta s_u s_v)>
// on the free-bc box at h = 0, unit couplings, by direct enumeration
double order_disorder_correlator(const Lattice& box, double beta,
                                 const std::vector<Insertion>& ins);

// the same correlator computed through the sign-flipped route:
// (Z_neg / Z) * <prod sigma>_neg with couplings negated on the cut edges
double order_disorder_negated(const Lattice& box, double beta, const std::vector<Insertion>& ins);

// |correlator(a) - correlator(b)| for two cut systems with matching spin
// points and target faces
double cut_deformation_check(const Lattice& box, double beta, const std::vector<Insertion>& a,
                             const std::vector<Insertion>& b);

}  // namespace ising
