#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rsmc/errors.hpp"

namespace rsmc {

// Per-state drift and volatility of the switching market, plus the initial
// price. States are 1-based everywhere in the public API; accessors translate.
class RegimeParams {
 public:
  // sigma_k > 0 is the model assumption; allow_zero_sigma admits degenerate
  // (deterministic) fixtures and is meant for tests only.
  static RegimeParams validated(std::vector<double> mu, std::vector<double> sigma,
                                double x0, bool allow_zero_sigma = false) {
    require(!mu.empty() && mu.size() == sigma.size(), Errc::ModelInvalid,
            "mu and sigma must be non-empty and of equal length");
    require(x0 > 0.0, Errc::ModelInvalid, "initial price x0 must be positive");
    for (std::size_t k = 0; k < sigma.size(); ++k) {
      const bool ok = allow_zero_sigma ? sigma[k] >= 0.0 : sigma[k] > 0.0;
      require(ok, Errc::ModelInvalid,
              "sigma[" + std::to_string(k + 1) + "] must be positive");
    }
    return RegimeParams(std::move(mu), std::move(sigma), x0);
  }

  int states() const { return static_cast<int>(mu_.size()); }

  double drift(int state) const { return mu_[static_cast<std::size_t>(state - 1)]; }
  double volatility(int state) const {
    return sigma_[static_cast<std::size_t>(state - 1)];
  }

  const std::vector<double>& drifts() const { return mu_; }
  const std::vector<double>& volatilities() const { return sigma_; }

  double initial_price() const { return x0_; }
  double log_initial_price() const { return std::log(x0_); }

  // max_k |mu_k| and max_k sigma_k over the stored (finite) state set.
  double drift_sup() const { return mu_sup_; }
  double volatility_sup() const { return sigma_sup_; }

 private:
  RegimeParams(std::vector<double> mu, std::vector<double> sigma, double x0)
      : mu_(std::move(mu)), sigma_(std::move(sigma)), x0_(x0) {
    mu_sup_ = 0.0;
    sigma_sup_ = 0.0;
    for (double m : mu_) mu_sup_ = std::max(mu_sup_, std::abs(m));
    for (double s : sigma_) sigma_sup_ = std::max(sigma_sup_, s);
  }

  std::vector<double> mu_;
  std::vector<double> sigma_;
  double x0_;
  double mu_sup_;
  double sigma_sup_;
};

// Uniform partition of [0, horizon] into `steps` cells of width dt().
// cell_index(t) is the k with t in [k dt, (k+1) dt), except at the right
// endpoint where cell_index(horizon) == steps.
struct TimeGrid {
  double horizon;
  int steps;

  TimeGrid(double horizon_, int steps_) : horizon(horizon_), steps(steps_) {
    require(horizon > 0.0, Errc::ModelInvalid, "horizon must be positive");
    require(steps >= 1, Errc::ModelInvalid, "step count must be positive");
  }

  double dt() const { return horizon / steps; }

  int cell_index(double t) const {
    require(t >= 0.0 && t <= horizon, Errc::OutOfHorizon,
            "time outside [0, horizon]");
    if (t >= horizon) return steps;
    int k = static_cast<int>(std::floor(t * static_cast<double>(steps) / horizon));
    // Guards against floating-point landing a hair on the wrong side of a
    // cell boundary.
    while (k + 1 <= steps && static_cast<double>(k + 1) * dt() <= t) ++k;
    while (k > 0 && static_cast<double>(k) * dt() > t) --k;
    return std::min(k, steps - 1);
  }

  // t^(N): left endpoint of the cell containing t.
  double cell_time(double t) const { return cell_index(t) * dt(); }
};

// A piecewise-constant frequency profile for characteristic-function probes:
// weight alphas[k-1] applies on [times[k-1], times[k]) with times[0] == 0
// implicit, i.e. block k spans (t_{k-1}, t_k].
struct CfSpec {
  std::vector<double> alphas;
  std::vector<double> times;

  CfSpec(std::vector<double> alphas_, std::vector<double> times_)
      : alphas(std::move(alphas_)), times(std::move(times_)) {
    require(!alphas.empty() && alphas.size() == times.size(), Errc::ModelInvalid,
            "cf spec needs equally many weights and times");
    double prev = 0.0;
    for (double t : times) {
      require(t >= prev, Errc::ModelInvalid, "cf spec times must be non-decreasing");
      prev = t;
    }
  }

  std::size_t blocks() const { return alphas.size(); }

  bool all_zero() const {
    return std::all_of(alphas.begin(), alphas.end(),
                       [](double a) { return a == 0.0; });
  }
};

}  // namespace rsmc
