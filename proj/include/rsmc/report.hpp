#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rsmc/stats.hpp"

namespace rsmc {

// One verification statistic evaluated along an axis (usually the step count
// N, sometimes a frequency or a time). `errors` compares `estimates` against
// `oracles`; `bounds` is an optional hard upper bound per row (e.g. from a
// moment inequality).
struct ConvergenceReport {
  std::string name;
  std::string axis_label = "N";
  std::vector<double> axis;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::vector<double> oracles;
  std::vector<double> errors;
  std::vector<double> bounds;
  std::map<std::string, std::vector<double>> aux;
  double decay_order = std::nan("");
  bool pass = false;
  std::string criterion;

  std::size_t rows() const { return axis.size(); }

  void push_row(double axis_value, double estimate, double std_error,
                double oracle) {
    axis.push_back(axis_value);
    estimates.push_back(estimate);
    std_errors.push_back(std_error);
    oracles.push_back(oracle);
    errors.push_back(std::abs(estimate - oracle));
  }

  void fit_decay(double se_factor = 5.0) {
    decay_order = fit_decay_order(axis, errors, std_errors, se_factor);
  }

  // Error monotonicity along the axis, asserted only between points whose
  // error stands clear of Monte Carlo noise; noise-floor points carry no
  // signal and are skipped.
  bool errors_decreasing(bool strict = false, double se_factor = 5.0) const {
    double last = std::nan("");
    for (std::size_t i = 0; i < errors.size(); ++i) {
      const double noise =
          se_factor * (i < std_errors.size() ? std_errors[i] : 0.0);
      if (errors[i] <= noise) continue;
      if (!std::isnan(last) &&
          (strict ? !(errors[i] < last) : !(errors[i] <= last)))
        return false;
      last = errors[i];
    }
    return true;
  }
};

// Empirical tail families used as tightness diagnostics: for each N,
// sup_tail[n][c] = P(sup_t |U_t - U_0| >= c_grid[c]) and
// modulus_tail[n][d] = P(osc_delta(U) >= epsilon) for delta_grid[d], where
// osc_delta is the path oscillation over windows shorter than delta.
// Both families are computed from one sample set per N, so the monotonicity
// checks below hold exactly, not just statistically.
struct TightnessReport {
  std::vector<int> n_grid;
  std::vector<double> c_grid;
  std::vector<double> delta_grid;
  double epsilon = 0.0;
  std::vector<std::vector<double>> sup_tail;
  std::vector<std::vector<double>> modulus_tail;
  // Per N: number of sampled paths violating the worst-case range bound
  // steps * log1p(gamma); zero is the expected value.
  std::vector<std::uint64_t> range_bound_violations;
  std::uint64_t trials = 0;
  bool pass = false;
  std::string criterion;

  bool sup_tail_monotone_in_c() const {
    for (const auto& row : sup_tail)
      for (std::size_t i = 0; i + 1 < row.size(); ++i)
        if (row[i + 1] > row[i]) return false;
    return true;
  }

  bool modulus_tail_monotone_in_delta() const {
    for (const auto& row : modulus_tail)
      for (std::size_t i = 0; i + 1 < row.size(); ++i)
        if (row[i + 1] < row[i]) return false;
    return true;
  }
};

}  // namespace rsmc
