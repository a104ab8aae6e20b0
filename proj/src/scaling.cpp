#include "ising/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ising/common.hpp"
#include "ising/exact.hpp"

namespace ising {

ExponentSet mean_field_exponents() { return {0.0, 0.5, 1.0, 3.0, 0.0, 0.5, 4}; }

ExponentSet ising2d_exponents() {
  // beta and eta are the primitive inputs; alpha, gamma, delta, nu completed
  // through the relations themselves
  return {0.0, 0.125, 1.75, 15.0, 0.25, 1.0, 2};
}

double scaling_relations_check(const ExponentSet& e) {
  if (!(e.delta > 1.0)) throw std::invalid_argument("scaling relations need delta > 1");
  const double c1 = e.nu * e.d;
  const double c2 = 2.0 - e.alpha;
  const double c3 = 2.0 * e.beta + e.gamma;
  const double c4 = e.beta * (e.delta + 1.0);
  const double c5 = e.gamma * (e.delta + 1.0) / (e.delta - 1.0);
  const double f1 = 2.0 - e.eta;
  const double f2 = e.gamma / e.nu;
  const double f3 = e.d * (e.delta - 1.0) / (e.delta + 1.0);
  double r = std::abs(c1 - c2);
  r = std::max(r, std::abs(c2 - c3));
  r = std::max(r, std::abs(c3 - c4));
  r = std::max(r, std::abs(c4 - c5));
  r = std::max(r, std::abs(f1 - f2));
  r = std::max(r, std::abs(f2 - f3));
  return r;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& yerr, double xmin, double xmax) {
  if (x.size() != y.size() || (!yerr.empty() && yerr.size() != y.size())) {
    throw std::invalid_argument("power-law fit needs matching series lengths");
  }
  std::vector<double> lx, ly, w;
  PowerLawFit fit;
  fit.xmin = 1e300;
  fit.xmax = -1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < xmin || x[i] > xmax) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("power-law fit needs positive x and y");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    if (!yerr.empty() && yerr[i] > 0.0) {
      w.push_back(sq(y[i] / yerr[i]));
    } else {
      w.push_back(1.0);
    }
    fit.xmin = std::min(fit.xmin, x[i]);
    fit.xmax = std::max(fit.xmax, x[i]);
  }
  fit.n = static_cast<int>(lx.size());
  if (fit.n < 4) throw std::invalid_argument("power-law fit needs at least 4 points in window");
  const LinearFit lf = weighted_linear_fit(lx, ly, w);
  fit.exponent = lf.slope;
  fit.err = lf.slope_err;
  fit.r2 = lf.r2;
  if (yerr.empty()) {
    // unweighted: scale the unit-variance error by the residual scatter
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      ss += sq(ly[i] - lf.intercept - lf.slope * lx[i]);
    }
    fit.err = lf.slope_err * std::sqrt(ss / (fit.n - 2));
  }
  return fit;
}

ExponentKind exponent_kind_from_name(const std::string& name) {
  if (name == "beta-magnetization") return ExponentKind::BetaMagnetization;
  if (name == "spin-decay") return ExponentKind::SpinDecay;
  if (name == "energy-decay") return ExponentKind::EnergyDecay;
  throw std::invalid_argument("unknown exponent experiment kind: " + name);
}

namespace {

double checked_critical_beta(const RunParams& params) {
  const double bc = critical_beta_2d();
  if (params.beta != 0.0 && std::abs(params.beta - bc) > 1e-12) {
    throw std::invalid_argument("critical-decay experiments run at the critical point only");
  }
  return bc;
}

}  // namespace

PowerLawFit exponent_experiment(ExponentKind kind, int L, const RunParams& params, double xlo,
                                double xhi) {
  const bool window = xlo < xhi;
  switch (kind) {
    case ExponentKind::BetaMagnetization: {
      const double bc = critical_beta_2d();
      std::vector<double> t, m;
      const int npts = 12;
      for (int j = 0; j < npts; ++j) {
        const double tj = 1e-4 * std::pow(100.0, static_cast<double>(j) / (npts - 1));
        t.push_back(tj);
        m.push_back(yang_magnetization(bc + tj));
      }
      return fit_power_law(t, m, {}, window ? xlo : 0.0, window ? xhi : 1.0);
    }
    case ExponentKind::SpinDecay: {
      const double bc = checked_critical_beta(params);
      std::vector<int> rs;
      for (int r : {4, 6, 8, 12, 16, 24, 32, 48, 64}) {
        if (r <= L / 4) rs.push_back(r);
      }
      if (rs.size() < 4) {
        throw std::invalid_argument("spin-decay experiment needs L >= 48 for four separations");
      }
      const AxisCorr corr = fk_axis_correlations(L, bc, rs, params);
      std::vector<double> x(corr.r.begin(), corr.r.end());
      PowerLawFit fit =
          fit_power_law(x, corr.value, corr.err, window ? xlo : 0.5, window ? xhi : L);
      fit.exponent = -fit.exponent;
      return fit;
    }
    case ExponentKind::EnergyDecay: {
      const double bc = checked_critical_beta(params);
      std::vector<int> rs;
      for (int r = 1; r <= std::min(8, L / 4); ++r) rs.push_back(r);
      if (rs.size() < 4) {
        throw std::invalid_argument("energy-decay experiment needs L >= 16 for four separations");
      }
      const AxisCorr corr = energy_axis_correlations(L, bc, rs, params);
      std::vector<double> x(corr.r.begin(), corr.r.end());
      PowerLawFit fit =
          fit_power_law(x, corr.value, corr.err, window ? xlo : 0.5, window ? xhi : L);
      fit.exponent = -fit.exponent;
      return fit;
    }
  }
  throw std::invalid_argument("unknown exponent experiment kind");
}

PfaffianCheck boundary_pfaffian_experiment(int lx, int ly, const RunParams& params, int s_small,
                                           int s_large) {
  const double bc = checked_critical_beta(params);
  PfaffianCheck out;
  out.s_small = s_small;
  out.s_large = s_large;
  const JackknifeResult small = boundary_pfaffian_deviation(lx, ly, bc, s_small, params);
  const JackknifeResult large = boundary_pfaffian_deviation(lx, ly, bc, s_large, params);
  out.dev_small = small.value;
  out.err_small = small.err;
  out.dev_large = large.value;
  out.err_large = large.err;
  return out;
}

std::vector<ReferenceConstant> reference_constants() {
  return {
      {"beta_c_2d", critical_beta_2d(), "closed-form"},
      {"p_c_fk2", fk_self_dual_p(), "closed-form"},
      {"delta_sigma_2d", 0.125, "closed-form"},
      {"delta_epsilon_2d", 1.0, "closed-form"},
      {"delta_sigma_3d", 0.5181489, "reference"},
      {"delta_epsilon_3d", 1.412625, "reference"},
  };
}

}  // namespace ising
