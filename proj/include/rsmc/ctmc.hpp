#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/report.hpp"
#include "rsmc/rng.hpp"
#include "rsmc/stats.hpp"

namespace rsmc {

// One realized trajectory of the switching process on [0, horizon]:
// jump_times[0] == 0 pairs with the initial state, jump_times[n] with the
// state entered at the n-th jump. All jumps lie strictly before the horizon
// (up to the measure-zero tie at the boundary).
struct CtmcPath {
  std::vector<double> jump_times;
  std::vector<int> states;  // 1-based
  double horizon = 0.0;

  int jump_count() const { return static_cast<int>(jump_times.size()) - 1; }

  // State at time t, right-continuous at jumps.
  int state_at(double t) const {
    require(t >= 0.0 && t <= horizon, Errc::OutOfHorizon,
            "evaluation time outside [0, horizon]");
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
  }

  // Total time spent in `state` over [0, min(up_to, horizon)].
  double occupation_time(int state, double up_to) const {
    double total = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double start = jump_times[k];
      const double end =
          k + 1 < jump_times.size() ? jump_times[k + 1] : horizon;
      if (start >= up_to) break;
      if (states[k] == state) total += std::min(end, up_to) - start;
    }
    return total;
  }
};

namespace detail {

// Cumulative rows of the embedded-chain kernel lambda_ij / lambda_i,
// flattened for cheap categorical draws.
struct EmbeddedKernel {
  explicit EmbeddedKernel(const GeneratorMatrix& g)
      : d(g.states()), cumulative(static_cast<std::size_t>(d * d), 0.0) {
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j != i) acc += g.rates()(i, j) / g.exit_rates()(i);
        cumulative[static_cast<std::size_t>(i * d + j)] = acc;
      }
    }
  }

  int next_state(int current, double u) const {
    const std::size_t row = static_cast<std::size_t>((current - 1) * d);
    for (int j = 0; j < d - 1; ++j)
      if (u <= cumulative[row + static_cast<std::size_t>(j)]) return j + 1;
    return d;
  }

  int d;
  std::vector<double> cumulative;
};

}  // namespace detail

// Exponential holding times and embedded-chain transitions, drawn in the
// order (holding, transition, holding, ...) from `rng`.
inline CtmcPath sample_ctmc_path(const GeneratorMatrix& g, double horizon,
                                 int initial_state, SplitMix64& rng) {
  require(initial_state >= 1 && initial_state <= g.states(), Errc::ModelInvalid,
          "initial state out of range");
  require(horizon > 0.0, Errc::ModelInvalid, "horizon must be positive");
  const detail::EmbeddedKernel kernel(g);

  CtmcPath path;
  path.horizon = horizon;
  path.jump_times.push_back(0.0);
  path.states.push_back(initial_state);
  double t = 0.0;
  int state = initial_state;
  for (;;) {
    t += rng.exponential(g.exit_rate(state));
    if (t >= horizon) break;
    state = kernel.next_state(state, rng.uniform01());
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

inline CtmcPath sample_ctmc_path(const GeneratorMatrix& g, double horizon,
                                 int initial_state, const SeedSpec& seed) {
  SplitMix64 rng = make_rng(seed, salt_of("ctmc.path"));
  return sample_ctmc_path(g, horizon, initial_state, rng);
}

// Joint density of the first m jump times on {N_T = m}, i.e.
// f(t_1..t_m | N_T = m) * P(N_T = m), evaluated by exact summation over the
// (d-1)^m embedded-state sequences from initial state 1. Supports m <= 2.
inline double scaled_jump_density(const GeneratorMatrix& g, double horizon,
                                  const std::vector<double>& times) {
  const std::size_t m = times.size();
  require(m >= 1 && m <= 2, Errc::UnsupportedOrder,
          "jump-law density implemented for one or two jumps");
  double prev = 0.0;
  for (double t : times) {
    require(t > prev && t < horizon, Errc::BadTimePoint,
            "jump times must be strictly increasing inside (0, horizon)");
    prev = t;
  }

  const int d = g.states();
  const int j0 = 1;
  double total = 0.0;
  if (m == 1) {
    for (int j1 = 1; j1 <= d; ++j1) {
      if (j1 == j0) continue;
      total += g.rate(j0, j1) * std::exp(-g.exit_rate(j0) * times[0] -
                                         g.exit_rate(j1) * (horizon - times[0]));
    }
  } else {
    for (int j1 = 1; j1 <= d; ++j1) {
      if (j1 == j0) continue;
      for (int j2 = 1; j2 <= d; ++j2) {
        if (j2 == j1) continue;
        total += g.rate(j0, j1) * g.rate(j1, j2) *
                 std::exp(-g.exit_rate(j0) * times[0] -
                          g.exit_rate(j1) * (times[1] - times[0]) -
                          g.exit_rate(j2) * (horizon - times[1]));
      }
    }
  }
  return total;
}

// Monte Carlo check of the exponential-moment bound for the jump count:
// for each alpha, E exp(alpha * N_T) is estimated and compared against
// exp(-min_rate*T) + (max_rate/min_rate) * exp(alpha + exp(alpha)*max_rate*T).
// Estimates aggregate integer jump-count tallies, so they are exactly
// reproducible regardless of scheduling.
inline ConvergenceReport jump_count_mgf_check(const GeneratorMatrix& g,
                                              double horizon,
                                              const std::vector<double>& alphas,
                                              std::uint64_t trials,
                                              const SeedSpec& seed,
                                              const ParallelConfig& par = {}) {
  require(trials >= 10000, Errc::ModelInvalid, "need at least 1e4 trials");
  for (double a : alphas)
    require(a > 0.0 && a <= 1.0, Errc::ModelInvalid,
            "alpha must lie in (0, 1]");

  struct Tally {
    std::vector<std::uint64_t> counts;
    void merge(const Tally& o) {
      if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
      for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
    }
  };

  const Tally tally = reduce_blocked<Tally>(
      trials, seed, salt_of("ctmc.jump_count"), par,
      [&](Tally& t, std::uint64_t, SplitMix64& rng) {
        const CtmcPath path = sample_ctmc_path(g, horizon, 1, rng);
        const std::size_t n = static_cast<std::size_t>(path.jump_count());
        if (t.counts.size() <= n) t.counts.resize(n + 1, 0);
        ++t.counts[n];
      });

  ConvergenceReport report;
  report.name = "jump_count_mgf";
  report.axis_label = "alpha";
  report.criterion =
      "estimate - 3*SE <= exp(-min_rate*T) + ratio*exp(alpha + e^alpha*max_rate*T)";
  const double lam_min = g.min_exit_rate();
  const double lam_max = g.max_exit_rate();
  const double ratio = g.rate_ratio();

  bool all_pass = true;
  for (double a : alphas) {
    Accumulator acc;
    for (std::size_t n = 0; n < tally.counts.size(); ++n) {
      const double v = std::exp(a * static_cast<double>(n));
      const std::uint64_t c = tally.counts[n];
      acc.sum += v * static_cast<double>(c);
      acc.sum_sq += v * v * static_cast<double>(c);
      acc.count += c;
    }
    const double bound =
        std::exp(-lam_min * horizon) +
        ratio * std::exp(a + std::exp(a) * lam_max * horizon);
    // No analytic oracle for general rates; the bound is the target.
    report.push_row(a, acc.mean(), acc.std_error(), std::nan(""));
    report.errors.back() = 0.0;
    report.bounds.push_back(bound);
    if (acc.mean() - 3.0 * acc.std_error() > bound) all_pass = false;
  }
  report.pass = all_pass;
  return report;
}

}  // namespace rsmc
