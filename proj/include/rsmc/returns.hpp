#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "rsmc/errors.hpp"
#include "rsmc/model.hpp"
#include "rsmc/report.hpp"
#include "rsmc/rng.hpp"

namespace rsmc {

// Shape of the one-period net-profit-rate distribution.
//   Binomial:  mu_j*dt + sigma_j*sqrt(dt) * {-1, +1}, each 1/2
//   Trinomial: mu_j*dt + sigma_j*sqrt(3*dt/2) * {-1, 0, +1}, each 1/3
// Both have mean mu_j*dt and variance sigma_j^2*dt exactly, independent of
// the step index, and are bounded by gamma = mu_sup*dt + spread_sup.
enum class ReturnKind { Binomial, Trinomial };

inline const char* return_kind_name(ReturnKind k) {
  return k == ReturnKind::Binomial ? "binomial" : "trinomial";
}

class ReturnFamily {
 public:
  ReturnFamily(ReturnKind kind, const RegimeParams& params, const TimeGrid& grid)
      : kind_(kind), params_(params), grid_(grid) {
    const double dt = grid.dt();
    spread_factor_ = kind == ReturnKind::Binomial ? std::sqrt(dt)
                                                  : std::sqrt(1.5 * dt);
    gamma_ = params.drift_sup() * dt + params.volatility_sup() * spread_factor_;
    require(gamma_ < 1.0, Errc::GammaTooLarge,
            "returns must stay above -1: gamma=" + std::to_string(gamma_) +
                "; increase the step count");

    const int d = params.states();
    const int na = atom_count();
    atoms_.resize(static_cast<std::size_t>(d * na));
    log_atoms_.resize(atoms_.size());
    for (int j = 1; j <= d; ++j) {
      for (int a = 0; a < na; ++a) {
        const double r = params.drift(j) * dt +
                         params.volatility(j) * spread_factor_ * offset(a);
        atoms_[index(j, a)] = r;
        log_atoms_[index(j, a)] = std::log1p(r);
      }
    }
  }

  ReturnKind kind() const { return kind_; }
  const RegimeParams& params() const { return params_; }
  const TimeGrid& grid() const { return grid_; }

  // Almost-sure bound on |R|; < 1 by construction.
  double gamma_bound() const { return gamma_; }

  int atom_count() const { return kind_ == ReturnKind::Binomial ? 2 : 3; }
  double atom_probability() const { return 1.0 / atom_count(); }
  double atom(int state, int a) const { return atoms_[index(state, a)]; }
  double log_atom(int state, int a) const { return log_atoms_[index(state, a)]; }

  double mean_return(int state) const {
    return params_.drift(state) * grid_.dt();
  }
  double return_variance(int state) const {
    const double s = params_.volatility(state);
    return s * s * grid_.dt();
  }

  // One draw of the net profit rate in `state`; draws are i.i.d. across
  // calls, matching the independence of the underlying family across steps.
  double sample(int state, SplitMix64& rng) const {
    return atoms_[index(state, pick(rng))];
  }

  double sample_log(int state, SplitMix64& rng) const {
    return log_atoms_[index(state, pick(rng))];
  }

  // E exp(i * alpha * log(1 + R)) for one step in `state`; exact.
  std::complex<double> one_step_cf(int state, double alpha) const {
    std::complex<double> acc{0.0, 0.0};
    for (int a = 0; a < atom_count(); ++a) {
      const double x = alpha * log_atom(state, a);
      acc += std::complex<double>(std::cos(x), std::sin(x));
    }
    return acc * atom_probability();
  }

 private:
  std::size_t index(int state, int a) const {
    return static_cast<std::size_t>((state - 1) * atom_count() + a);
  }

  double offset(int a) const {
    if (kind_ == ReturnKind::Binomial) return a == 0 ? -1.0 : 1.0;
    return static_cast<double>(a - 1);  // -1, 0, +1
  }

  int pick(SplitMix64& rng) const {
    const double u = rng.uniform01_left();
    return std::min(atom_count() - 1,
                    static_cast<int>(u * static_cast<double>(atom_count())));
  }

  ReturnKind kind_;
  RegimeParams params_;
  TimeGrid grid_;
  double spread_factor_;
  double gamma_;
  std::vector<double> atoms_;
  std::vector<double> log_atoms_;
};

// Deterministic checks of the three distributional conditions the scheme
// needs from its return family, over a grid of step counts:
//   gamma:               the a.s. bound gamma_N, with its decay order;
//   mean_compounding:    max_j |(1 + mu_j*dt)^N - exp(mu_j*T)|;
//   variance_checkpoint: at each checkpoint t, the gap between the summed
//                        per-step variances up to floor(N*t/T) and
//                        sigma_j^2 * t, against its closed form
//                        sigma_j^2 * (t - floor(N*t/T)*dt).
inline std::vector<ConvergenceReport> verify_conditions(
    ReturnKind kind, const RegimeParams& params, double horizon,
    const std::vector<int>& n_grid, const std::vector<double>& t_checkpoints) {
  const std::string prefix = std::string(return_kind_name(kind)) + ".";

  ConvergenceReport gamma_report;
  gamma_report.name = prefix + "gamma";
  gamma_report.criterion = "gamma_N -> 0 with decay order about 1/2";
  ConvergenceReport mean_report;
  mean_report.name = prefix + "mean_compounding";
  mean_report.criterion =
      "(1 + mu_j*dt)^N approaches exp(mu_j*T) with decay order about 1";

  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const ReturnFamily family(kind, params, grid);
    gamma_report.push_row(static_cast<double>(n), family.gamma_bound(), 0.0, 0.0);

    double worst = 0.0;
    for (int j = 1; j <= params.states(); ++j) {
      const double compounded =
          std::pow(1.0 + family.mean_return(j), static_cast<double>(n));
      worst = std::max(worst,
                       std::abs(compounded - std::exp(params.drift(j) * horizon)));
    }
    mean_report.push_row(static_cast<double>(n), worst, 0.0, 0.0);
  }
  gamma_report.fit_decay();
  mean_report.fit_decay();
  // Order clauses apply only when a fit exists (>= 3 clear grid points) and
  // the relevant coefficient is present at all.
  gamma_report.pass = gamma_report.errors_decreasing();
  if (params.volatility_sup() > 0.0 && !std::isnan(gamma_report.decay_order))
    gamma_report.pass =
        gamma_report.pass && std::abs(gamma_report.decay_order - 0.5) < 0.2;
  mean_report.pass = mean_report.errors_decreasing();
  if (params.drift_sup() > 0.0 && !std::isnan(mean_report.decay_order))
    mean_report.pass =
        mean_report.pass && std::abs(mean_report.decay_order - 1.0) < 0.2;

  ConvergenceReport var_report;
  var_report.name = prefix + "variance_checkpoint";
  var_report.axis_label = "t";
  var_report.criterion =
      "summed-variance gap equals sigma_j^2*(t - floor(N*t/T)*dt) to 1e-14";
  const int n_ref = n_grid.back();
  const TimeGrid grid(horizon, n_ref);
  const ReturnFamily family(kind, params, grid);
  bool var_pass = true;
  for (double t : t_checkpoints) {
    const int k = grid.cell_index(t);
    double measured = 0.0;
    double analytic = 0.0;
    for (int j = 1; j <= params.states(); ++j) {
      const double summed = static_cast<double>(k) * family.return_variance(j);
      const double sig2 = params.volatility(j) * params.volatility(j);
      measured = std::max(measured, std::abs(summed - sig2 * t));
      analytic = std::max(
          analytic, sig2 * (t - static_cast<double>(k) * grid.dt()));
    }
    var_report.push_row(t, measured, 0.0, analytic);
    if (std::abs(measured - analytic) > 1e-14) var_pass = false;
  }
  var_report.pass = var_pass;

  return {gamma_report, mean_report, var_report};
}

}  // namespace rsmc
