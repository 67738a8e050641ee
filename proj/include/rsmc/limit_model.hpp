#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "rsmc/ctmc.hpp"
#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/model.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/rng.hpp"
#include "rsmc/stats.hpp"

namespace rsmc {

// Log-price and price of the limit market at a set of evaluation times,
// sampled conditionally on one switching trajectory.
struct LimitSample {
  std::vector<double> times;
  std::vector<double> log_prices;
  std::vector<double> prices;
};

// Conditionally on `path`, the log-price accrues over every occupation
// interval a deterministic drift (mu - sigma^2/2) * dt plus an independent
// Gaussian sigma * sqrt(dt) * Z. Evaluation times split intervals exactly, so
// the sample is exact in distribution at those times. Draw order: one normal
// per non-degenerate segment, segments sorted by time.
inline LimitSample sample_limit_fdd(const CtmcPath& path,
                                    const RegimeParams& params,
                                    const std::vector<double>& times,
                                    SplitMix64& rng) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0 && times[i] <= path.horizon, Errc::OutOfHorizon,
            "evaluation time outside [0, horizon]");
    require(i == 0 || times[i] >= times[i - 1], Errc::ModelInvalid,
            "evaluation times must be sorted");
  }

  LimitSample sample;
  sample.times = times;
  sample.log_prices.reserve(times.size());

  double u = params.log_initial_price();
  double t = 0.0;
  std::size_t jump = 0;  // index of the current occupation interval
  for (double eval : times) {
    while (t < eval) {
      const double interval_end =
          jump + 1 < path.jump_times.size() ? path.jump_times[jump + 1]
                                            : path.horizon;
      const double seg_end = std::min(eval, interval_end);
      const double dt = seg_end - t;
      if (dt > 0.0) {
        const double mu = params.drift(path.states[jump]);
        const double sigma = params.volatility(path.states[jump]);
        u += (mu - 0.5 * sigma * sigma) * dt;
        if (sigma > 0.0) u += sigma * std::sqrt(dt) * rng.normal();
      }
      t = seg_end;
      if (t >= interval_end && jump + 1 < path.jump_times.size()) ++jump;
    }
    sample.log_prices.push_back(u);
  }
  sample.prices.resize(sample.log_prices.size());
  for (std::size_t i = 0; i < sample.log_prices.size(); ++i)
    sample.prices[i] = std::exp(sample.log_prices[i]);
  return sample;
}

// The conditional characteristic function of the limit log-price increments
// given one switching trajectory: the Gaussian part integrates in closed
// form, leaving exp of a piecewise-constant integrand over the jump times
// and block boundaries. Exact per path; |result| <= 1.
inline std::complex<double> limit_cf_conditional(const CtmcPath& path,
                                                 const RegimeParams& params,
                                                 const CfSpec& spec) {
  double re = 0.0;  // -alpha^2 sigma^2 / 2 accumulated
  double im = 0.0;  // alpha (mu - sigma^2/2) accumulated
  std::size_t jump = 0;
  double t = 0.0;
  for (std::size_t b = 0; b < spec.blocks(); ++b) {
    const double alpha = spec.alphas[b];
    const double block_end = std::min(spec.times[b], path.horizon);
    while (t < block_end) {
      const double interval_end =
          jump + 1 < path.jump_times.size() ? path.jump_times[jump + 1]
                                            : path.horizon;
      const double seg_end = std::min(block_end, interval_end);
      const double dt = seg_end - t;
      if (dt > 0.0) {
        const double mu = params.drift(path.states[jump]);
        const double sigma = params.volatility(path.states[jump]);
        re += -0.5 * alpha * alpha * sigma * sigma * dt;
        im += alpha * (mu - 0.5 * sigma * sigma) * dt;
      }
      t = seg_end;
      if (t >= interval_end && jump + 1 < path.jump_times.size()) ++jump;
    }
  }
  const double mod = std::exp(re);
  return {mod * std::cos(im), mod * std::sin(im)};
}

// Characteristic function of the limit increments: Monte Carlo over switching
// trajectories of the exact conditional value above. No Gaussian sampling is
// involved, which removes the dominant variance component.
inline ComplexEstimate limit_cf(const GeneratorMatrix& g,
                                const RegimeParams& params, const CfSpec& spec,
                                double horizon, std::uint64_t trials,
                                const SeedSpec& seed,
                                const ParallelConfig& par = {}) {
  require(trials >= 10000, Errc::ModelInvalid, "need at least 1e4 trials");
  if (spec.all_zero()) return {{1.0, 0.0}, {0.0, 0.0}, trials};

  ComplexAccumulator acc = reduce_blocked<ComplexAccumulator>(
      trials, seed, salt_of("limit.cf"), par,
      [&](ComplexAccumulator& a, std::uint64_t, SplitMix64& rng) {
        const CtmcPath path = sample_ctmc_path(g, horizon, 1, rng);
        a.add(limit_cf_conditional(path, params, spec));
      });
  return {acc.mean(), acc.std_error(), acc.count()};
}

struct PriceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

// Monte Carlo price of the limit-market European call max(X_T - K, 0).
// Conditionally on the switching path the terminal log-price is Gaussian, so
// each trial needs a single normal draw.
inline PriceEstimate price_european_call(const GeneratorMatrix& g,
                                         const RegimeParams& params,
                                         double horizon, double strike,
                                         std::uint64_t trials,
                                         const SeedSpec& seed,
                                         const ParallelConfig& par = {}) {
  require(strike > 0.0, Errc::ModelInvalid, "strike must be positive");
  Accumulator acc = reduce_blocked<Accumulator>(
      trials, seed, salt_of("limit.call"), par,
      [&](Accumulator& a, std::uint64_t, SplitMix64& rng) {
        const CtmcPath path = sample_ctmc_path(g, horizon, 1, rng);
        double mean = params.log_initial_price();
        double var = 0.0;
        for (std::size_t k = 0; k < path.states.size(); ++k) {
          const double end = k + 1 < path.jump_times.size()
                                 ? path.jump_times[k + 1]
                                 : path.horizon;
          const double dt = end - path.jump_times[k];
          const double mu = params.drift(path.states[k]);
          const double sigma = params.volatility(path.states[k]);
          mean += (mu - 0.5 * sigma * sigma) * dt;
          var += sigma * sigma * dt;
        }
        const double u = mean + (var > 0.0 ? std::sqrt(var) * rng.normal() : 0.0);
        const double x = std::exp(u);
        a.add(x > strike ? x - strike : 0.0);
      });
  return {acc.mean(), acc.std_error(), acc.count};
}

}  // namespace rsmc
