#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rsmc/errors.hpp"
#include "rsmc/model.hpp"
#include "rsmc/report.hpp"

namespace rsmc {

// Validated intensity matrix of the switching process on a finite state set
// {1..d}. Stores the off-diagonal rates with a zeroed diagonal; exit rates
// are always the row sums of the off-diagonal part.
class GeneratorMatrix {
 public:
  // raw_rates may carry either a zero diagonal or the conventional negative
  // exit rates; anything else inconsistent beyond `tolerance` is rejected.
  // Off-diagonal entries must be strictly positive unless allow_zero_rates.
  static GeneratorMatrix validate(const Eigen::MatrixXd& raw_rates,
                                  double tolerance = 1e-12,
                                  bool allow_zero_rates = false) {
    require(raw_rates.rows() == raw_rates.cols(), Errc::NonSquare,
            "rate matrix must be square");
    const int d = static_cast<int>(raw_rates.rows());
    require(d >= 2, Errc::NonSquare, "need at least two states");

    Eigen::MatrixXd off = raw_rates;
    off.diagonal().setZero();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        const double r = off(i, j);
        require(r >= 0.0, Errc::NegativeRate,
                "rate(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                    ") is negative");
        if (!allow_zero_rates)
          require(r > 0.0, Errc::ZeroRate,
                  "rate(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") is zero; pass allow_zero_rates to relax");
      }
    }

    Eigen::VectorXd exit = off.rowwise().sum();
    for (int i = 0; i < d; ++i) {
      const double diag = raw_rates(i, i);
      if (std::abs(diag) > tolerance &&
          std::abs(diag + exit(i)) > tolerance)
        raise(Errc::RowMismatch,
              "diagonal of row " + std::to_string(i + 1) +
                  " is neither zero nor minus the off-diagonal sum");
      require(exit(i) > 0.0, Errc::ZeroExitRate,
              "state " + std::to_string(i + 1) + " has zero exit rate");
    }
    return GeneratorMatrix(std::move(off), std::move(exit));
  }

  int states() const { return static_cast<int>(exit_rates_.size()); }

  // Off-diagonal rates; the diagonal is zero by construction.
  const Eigen::MatrixXd& rates() const { return rates_; }
  double rate(int from, int to) const { return rates_(from - 1, to - 1); }

  const Eigen::VectorXd& exit_rates() const { return exit_rates_; }
  double exit_rate(int state) const { return exit_rates_(state - 1); }

  double min_exit_rate() const { return min_exit_; }
  double max_exit_rate() const { return max_exit_; }
  // max exit rate over min exit rate; >= 1.
  double rate_ratio() const { return max_exit_ / min_exit_; }

  // Full intensity matrix (negative exit rates on the diagonal).
  Eigen::MatrixXd intensity() const {
    Eigen::MatrixXd a = rates_;
    a.diagonal() = -exit_rates_;
    return a;
  }

 private:
  GeneratorMatrix(Eigen::MatrixXd rates, Eigen::VectorXd exit)
      : rates_(std::move(rates)), exit_rates_(std::move(exit)) {
    min_exit_ = exit_rates_.minCoeff();
    max_exit_ = exit_rates_.maxCoeff();
  }

  Eigen::MatrixXd rates_;
  Eigen::VectorXd exit_rates_;
  double min_exit_;
  double max_exit_;
};

inline int default_max_terms(const GeneratorMatrix& g, double t) {
  return static_cast<int>(
      10.0 * (g.max_exit_rate() * t * static_cast<double>(g.states()) + 50.0));
}

// exp(t * intensity) by uniformization: Poisson-weighted powers of the
// uniformized kernel K = I + A / max_rate. Every partial sum is entrywise
// non-negative and the truncation error is bounded by the remaining Poisson
// tail mass, which is driven below `tol`.
inline Eigen::MatrixXd transition_matrix(const GeneratorMatrix& g, double t,
                                         double tol = 1e-12,
                                         int max_terms = -1) {
  require(t >= 0.0, Errc::ModelInvalid, "time must be non-negative");
  const int d = g.states();
  if (t == 0.0) return Eigen::MatrixXd::Identity(d, d);

  const double rate = g.max_exit_rate();
  Eigen::MatrixXd kernel = g.rates() / rate;
  kernel.diagonal() =
      (Eigen::VectorXd::Constant(d, rate) - g.exit_rates()) / rate;

  const double rho = rate * t;
  if (max_terms < 0) max_terms = default_max_terms(g, t);

  double weight = std::exp(-rho);  // Poisson(rho) pmf at 0
  double cumulative = weight;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd result = weight * power;
  int k = 0;
  while (1.0 - cumulative > tol) {
    ++k;
    if (k > max_terms)
      raise(Errc::ToleranceNotReached,
            "uniformization needs more than " + std::to_string(max_terms) +
                " terms at t=" + std::to_string(t));
    power = power * kernel;
    weight *= rho / static_cast<double>(k);
    cumulative += weight;
    result.noalias() += weight * power;
  }
  return result;
}

// Diagonal convention for the one-step kernel of the N-step chain.
//   RowStochastic:  diagonal is the full return probability p_ii(dt); the
//                   matrix is the exact law of the continuous chain observed
//                   at grid times, and is what simulation uses.
//   NoJumpDiagonal: diagonal is the no-jump probability exp(-lambda_i dt),
//                   which undercounts returns via excursions; the row deficit
//                   p_ii(dt) - exp(-lambda_i dt) >= 0 is reported alongside.
enum class KernelVariant { RowStochastic, NoJumpDiagonal };

struct StepTransition {
  Eigen::MatrixXd probs;
  Eigen::VectorXd row_deficit;
  double dt = 0.0;
  int steps = 0;

  int states() const { return static_cast<int>(probs.rows()); }
};

inline StepTransition step_transition_matrix(const GeneratorMatrix& g,
                                             const TimeGrid& grid,
                                             KernelVariant variant,
                                             double tol = 1e-12) {
  StepTransition out;
  out.dt = grid.dt();
  out.steps = grid.steps;
  out.probs = transition_matrix(g, grid.dt(), tol);
  out.row_deficit = Eigen::VectorXd::Zero(g.states());
  if (variant == KernelVariant::NoJumpDiagonal) {
    for (int i = 0; i < g.states(); ++i) {
      const double no_jump = std::exp(-g.exit_rates()(i) * grid.dt());
      out.row_deficit(i) = out.probs(i, i) - no_jump;
      out.probs(i, i) = no_jump;
    }
  }
  return out;
}

// Checks the small-step behaviour of the one-step kernel: scaled off-diagonal
// entries (N/T) p_ij approach the rates lambda_ij (with empirical decay
// order), and p_ij <= lambda_i * T/N entrywise on every tested grid.
inline ConvergenceReport rate_asymptotics_check(const GeneratorMatrix& g,
                                                double horizon,
                                                const std::vector<int>& n_grid,
                                                double tol = 1e-12) {
  require(n_grid.size() >= 2, Errc::ModelInvalid, "need at least two N values");
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
    require(n_grid[i] < n_grid[i + 1], Errc::ModelInvalid,
            "N grid must be increasing");

  ConvergenceReport report;
  report.name = "kernel_rate_asymptotics";
  report.criterion =
      "scaled off-diagonal step probabilities approach the generator rates; "
      "p_ij <= lambda_i*dt entrywise";
  bool majorized = true;
  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const double dt = grid.dt();
    const Eigen::MatrixXd p = transition_matrix(g, dt, tol);
    double worst = 0.0;
    for (int i = 0; i < g.states(); ++i) {
      for (int j = 0; j < g.states(); ++j) {
        if (i == j) continue;
        worst = std::max(worst, std::abs(p(i, j) / dt - g.rates()(i, j)));
        if (p(i, j) > g.exit_rates()(i) * dt) majorized = false;
      }
    }
    report.push_row(static_cast<double>(n), worst, 0.0, 0.0);
  }
  report.aux["majorization_holds"] =
      std::vector<double>(n_grid.size(), majorized ? 1.0 : 0.0);
  report.fit_decay();
  report.pass = majorized && report.errors_decreasing();
  return report;
}

}  // namespace rsmc
