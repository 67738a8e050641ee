#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/model.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/returns.hpp"
#include "rsmc/rng.hpp"
#include "rsmc/stats.hpp"

namespace rsmc {

// Which chain state prices step k: the state at the end of the step (index k,
// the default) or at its start (index k-1). Both lead to the same limit.
enum class ReturnIndexing { EndOfStep, StartOfStep };

namespace detail {

// Sampling tables for the one-step kernel: log of the staying probability
// (for geometric holding times) and cumulative off-diagonal rows.
struct ChainSampler {
  explicit ChainSampler(const StepTransition& step)
      : d(step.states()),
        log_stay(static_cast<std::size_t>(d)),
        cumulative(static_cast<std::size_t>(d * d), 0.0) {
    for (int i = 0; i < d; ++i) {
      double off = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != i) off += step.probs(i, j);
      log_stay[static_cast<std::size_t>(i)] = std::log1p(-off);
      double acc = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j != i && off > 0.0) acc += step.probs(i, j) / off;
        cumulative[static_cast<std::size_t>(i * d + j)] = acc;
      }
    }
  }

  // Steps until the next state change from `state` (>= 1), geometric with
  // the staying probability; `cap` when the change falls beyond cap steps.
  std::int64_t holding(int state, std::int64_t cap, SplitMix64& rng) const {
    const double ls = log_stay[static_cast<std::size_t>(state - 1)];
    if (ls == 0.0) return cap;  // absorbing at this resolution
    const double h = 1.0 + std::floor(std::log(rng.uniform01()) / ls);
    if (h >= static_cast<double>(cap)) return cap;
    return static_cast<std::int64_t>(h);
  }

  int next_state(int current, double u) const {
    const std::size_t row = static_cast<std::size_t>((current - 1) * d);
    for (int j = 0; j < d - 1; ++j)
      if (u <= cumulative[row + static_cast<std::size_t>(j)]) return j + 1;
    return d;
  }

  int d;
  std::vector<double> log_stay;
  std::vector<double> cumulative;
};

}  // namespace detail

// Jump representation of one chain trajectory over indices 0..steps:
// jump_steps[n] is the index of the n-th state change, states[n] the state
// entered there (states[0] == 1 pairs with index 0).
struct ChainSkeleton {
  std::vector<std::int64_t> jump_steps;
  std::vector<int> states;
  std::int64_t steps = 0;

  int switch_count() const { return static_cast<int>(jump_steps.size()) - 1; }

  int state_at_step(std::int64_t k) const {
    auto it = std::upper_bound(jump_steps.begin(), jump_steps.end(), k);
    return states[static_cast<std::size_t>(it - jump_steps.begin()) - 1];
  }
};

// Samples the chain through its jump skeleton: geometric holding times plus
// the conditional jump kernel. Exact and O(number of switches). Draw order
// per switch: (holding, transition). Reuses the buffers of `out`.
inline void sample_chain_skeleton(const detail::ChainSampler& sampler,
                                  std::int64_t steps, SplitMix64& rng,
                                  ChainSkeleton& out) {
  out.steps = steps;
  out.jump_steps.assign(1, 0);
  out.states.assign(1, 1);
  int state = 1;
  std::int64_t k = 0;
  while (k < steps) {
    // A switch at the final index still counts, hence the cap of +1.
    k += sampler.holding(state, steps - k + 1, rng);
    if (k > steps) break;
    state = sampler.next_state(state, rng.uniform01());
    out.jump_steps.push_back(k);
    out.states.push_back(state);
  }
}

inline ChainSkeleton sample_chain_skeleton(const StepTransition& step,
                                           SplitMix64& rng) {
  ChainSkeleton sk;
  sample_chain_skeleton(detail::ChainSampler(step), step.steps, rng, sk);
  return sk;
}

// States of the N-step switching chain at indices 0..N, starting from state 1.
inline std::vector<int> sample_discrete_chain(const StepTransition& step,
                                              SplitMix64& rng) {
  const ChainSkeleton sk = sample_chain_skeleton(step, rng);
  std::vector<int> states(static_cast<std::size_t>(step.steps) + 1);
  std::size_t run = 0;
  for (std::int64_t k = 0; k <= step.steps; ++k) {
    if (run + 1 < sk.jump_steps.size() && k >= sk.jump_steps[run + 1]) ++run;
    states[static_cast<std::size_t>(k)] = sk.states[run];
  }
  return states;
}

// One trajectory of the discrete market: chain states and cumulative
// log-prices, both indexed 0..N.
struct DiscretePath {
  std::vector<int> states;  // 1-based regime per index
  std::vector<double> log_prices;

  int steps() const { return static_cast<int>(states.size()) - 1; }

  // Piecewise-constant embedding: value at index floor(t*N/T).
  double log_price_at(const TimeGrid& grid, double t) const {
    return log_prices[static_cast<std::size_t>(grid.cell_index(t))];
  }

  // Indices where the chain changes state, in increasing order.
  std::vector<int> jump_steps() const {
    std::vector<int> out;
    for (std::size_t k = 1; k < states.size(); ++k)
      if (states[k] != states[k - 1]) out.push_back(static_cast<int>(k));
    return out;
  }
};

// Chain and returns are drawn from the same stream but are independent by
// construction (the chain skeleton consumes its draws first). Draw order:
// chain skeleton, then one return per step k = 1..N.
inline DiscretePath sample_discrete_path(
    const StepTransition& step, const ReturnFamily& family, SplitMix64& rng,
    ReturnIndexing indexing = ReturnIndexing::EndOfStep) {
  DiscretePath path;
  path.states = sample_discrete_chain(step, rng);
  path.log_prices.resize(path.states.size());
  double u = family.params().log_initial_price();
  path.log_prices[0] = u;
  for (std::size_t k = 1; k < path.states.size(); ++k) {
    const int regime =
        indexing == ReturnIndexing::EndOfStep ? path.states[k] : path.states[k - 1];
    u += family.sample_log(regime, rng);
    path.log_prices[k] = u;
  }
  return path;
}

namespace detail {

// Log-price increments accumulated run by run without materializing the
// path; visit(step_index, increment) is called for k = 1..N in order.
template <typename Visit>
void walk_discrete_path(const ChainSampler& sampler, const ReturnFamily& family,
                        std::int64_t steps, SplitMix64& rng,
                        ReturnIndexing indexing, ChainSkeleton& scratch,
                        Visit&& visit) {
  sample_chain_skeleton(sampler, steps, rng, scratch);
  const std::size_t runs = scratch.states.size();
  for (std::size_t r = 0; r < runs; ++r) {
    // Run r occupies indices [jump_steps[r], next_jump - 1] (last run: steps).
    const std::int64_t run_begin = scratch.jump_steps[r];
    const std::int64_t run_end =
        r + 1 < runs ? scratch.jump_steps[r + 1] - 1 : steps;
    std::int64_t lo, hi;
    if (indexing == ReturnIndexing::EndOfStep) {
      lo = std::max<std::int64_t>(run_begin, 1);
      hi = run_end;
    } else {
      lo = run_begin + 1;
      hi = std::min<std::int64_t>(run_end + 1, steps);
    }
    const int regime = scratch.states[r];
    for (std::int64_t k = lo; k <= hi; ++k)
      visit(k, family.sample_log(regime, rng));
  }
}

}  // namespace detail

// Empirical characteristic function of the log-price increments of the
// discrete market over the blocks of `spec` (times mapped to grid cells).
inline ComplexEstimate discrete_cf(const StepTransition& step,
                                   const ReturnFamily& family,
                                   const CfSpec& spec, std::uint64_t trials,
                                   const SeedSpec& seed,
                                   const ParallelConfig& par = {},
                                   ReturnIndexing indexing = ReturnIndexing::EndOfStep) {
  require(trials >= 10000, Errc::ModelInvalid, "need at least 1e4 trials");
  const TimeGrid& grid = family.grid();

  // alpha weight per step: block b covers steps (t_{b-1}^(N), t_b^(N)].
  std::vector<double> step_alpha(static_cast<std::size_t>(grid.steps) + 1, 0.0);
  int prev_cell = 0;
  for (std::size_t b = 0; b < spec.blocks(); ++b) {
    const int cell = grid.cell_index(spec.times[b]);
    for (int k = prev_cell + 1; k <= cell; ++k)
      step_alpha[static_cast<std::size_t>(k)] = spec.alphas[b];
    prev_cell = std::max(prev_cell, cell);
  }

  const detail::ChainSampler sampler(step);
  ComplexAccumulator acc = reduce_blocked<ComplexAccumulator>(
      trials, seed, salt_of("discrete.cf"), par,
      [&, scratch = ChainSkeleton{}](ComplexAccumulator& a, std::uint64_t,
                                     SplitMix64& rng) mutable {
        double phase = 0.0;
        detail::walk_discrete_path(
            sampler, family, grid.steps, rng, indexing, scratch,
            [&](std::int64_t k, double dlog) {
              phase += step_alpha[static_cast<std::size_t>(k)] * dlog;
            });
        a.add({std::cos(phase), std::sin(phase)});
      });

  return {acc.mean(), acc.std_error(), acc.count()};
}

// Monte Carlo payoffs of the discrete-market European call max(X_N - K, 0).
inline Accumulator discrete_call_payoffs(const StepTransition& step,
                                         const ReturnFamily& family,
                                         double strike, std::uint64_t trials,
                                         const SeedSpec& seed,
                                         const ParallelConfig& par = {}) {
  require(strike > 0.0, Errc::ModelInvalid, "strike must be positive");
  const detail::ChainSampler sampler(step);
  const double u0 = family.params().log_initial_price();
  return reduce_blocked<Accumulator>(
      trials, seed, salt_of("discrete.call"), par,
      [&, scratch = ChainSkeleton{}](Accumulator& a, std::uint64_t,
                                     SplitMix64& rng) mutable {
        double u = u0;
        detail::walk_discrete_path(sampler, family, step.steps, rng,
                                   ReturnIndexing::EndOfStep, scratch,
                                   [&](std::int64_t, double dlog) { u += dlog; });
        const double x = std::exp(u);
        a.add(x > strike ? x - strike : 0.0);
      });
}

}  // namespace rsmc
