#pragma once
// Critical-exponent experiments: scaling-relation algebra, power-law fits,
// decay-exponent estimation, and the boundary Pfaffian deviation.
#include <string>
#include <vector>

#include "ising/mc.hpp"

namespace ising {

struct ExponentSet {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0, eta = 0.0, nu = 0.0;
  int d = 0;
};

ExponentSet mean_field_exponents();  // {0, 1/2, 1, 3, 0, 1/2} at d = 4
ExponentSet ising2d_exponents();     // relation-completed from beta = 1/8, eta = 1/4

// max residual over the six adjacent equalities of the chains
//   nu d = 2 - alpha = 2 beta + gamma = beta (delta+1) = gamma (delta+1)/(delta-1)
//   2 - eta = gamma / nu = d (delta-1)/(delta+1)
// requires delta > 1
double scaling_relations_check(const ExponentSet& e);

struct PowerLawFit {
  double exponent = 0.0;  // log-log slope as fitted (decay kinds negate it)
  double err = 0.0;
  double r2 = 0.0;
  double xmin = 0.0, xmax = 0.0;  // window actually used
  int n = 0;                      // points in the window
};

// Weighted least squares of log y on log x inside [xmin, xmax]; yerr empty
// means unweighted with residual-scaled errors.  Needs >= 4 points, x, y > 0.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& yerr, double xmin, double xmax);

enum class ExponentKind { BetaMagnetization, SpinDecay, EnergyDecay };

ExponentKind exponent_kind_from_name(const std::string& name);

// BetaMagnetization: fits closed-form magnetisation samples over
// beta - beta_c in [1e-4, 1e-2]; L and params are unused.
// SpinDecay / EnergyDecay: fit critical torus correlators on an L x L torus
// (separations capped at L/4) and report the positive decay exponent.
// params.beta must be 0 (meaning: use the critical point) or beta_c itself.
// xlo < xhi restricts the fit window; xlo = xhi = 0 keeps the full range.
PowerLawFit exponent_experiment(ExponentKind kind, int L, const RunParams& params,
                                double xlo = 0.0, double xhi = 0.0);

struct PfaffianCheck {
  int s_small = 0, s_large = 0;
  double dev_small = 0.0, err_small = 0.0;
  double dev_large = 0.0, err_large = 0.0;
};

// Relative deviation of the boundary 4-point correlator from the Pfaffian of
// its 2-point functions at the critical point on an lx x ly free box, at two
// point separations.
PfaffianCheck boundary_pfaffian_experiment(int lx, int ly, const RunParams& params,
                                           int s_small = 16, int s_large = 32);

struct ReferenceConstant {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

// beta_c_2d, p_c_fk2, delta_sigma_2d, delta_epsilon_2d, delta_sigma_3d,
// delta_epsilon_3d
std::vector<ReferenceConstant> reference_constants();

}  // namespace ising
