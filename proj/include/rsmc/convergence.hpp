#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "rsmc/ctmc.hpp"
#include "rsmc/discrete_model.hpp"
#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/limit_model.hpp"
#include "rsmc/model.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/report.hpp"
#include "rsmc/returns.hpp"
#include "rsmc/rng.hpp"
#include "rsmc/stats.hpp"

namespace rsmc {

// ---------------------------------------------------------------------------
// Jump-law comparison: the scaled probability that the N-step chain places
// its first m switches in the grid cells of t_points (and none after) against
// the exact joint jump density of the continuous chain. The report carries
// the density-consistent scaling dt^-m as `estimates` and the alternative
// dt^-(m+1) scaling in aux["alt_scaling"], which grows without bound.
// ---------------------------------------------------------------------------
inline ConvergenceReport jump_law_compare(const GeneratorMatrix& g,
                                          double horizon, int order,
                                          const std::vector<double>& t_points,
                                          const std::vector<int>& n_grid,
                                          std::uint64_t trials,
                                          const SeedSpec& seed,
                                          const ParallelConfig& par = {},
                                          double tolerance = 0.02,
                                          double uniformization_tol = 1e-12) {
  require(order == static_cast<int>(t_points.size()), Errc::ModelInvalid,
          "order must match the number of time points");
  require(order >= 1 && order <= 2, Errc::UnsupportedOrder,
          "jump-law comparison supports one or two switches");

  const double oracle = scaled_jump_density(g, horizon, t_points);

  ConvergenceReport report;
  report.name = "jump_law_m" + std::to_string(order);
  report.criterion =
      "scaled switch-pattern probability approaches the exact jump density";
  report.aux["alt_scaling"] = {};
  report.aux["raw_probability"] = {};

  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    std::vector<std::int64_t> cells;
    for (double t : t_points) {
      const int k = grid.cell_index(t);
      require(k >= 1 && k <= n - 2, Errc::BadTimePoint,
              "time point maps into the first or last grid cell at N=" +
                  std::to_string(n));
      require(cells.empty() || k > cells.back(), Errc::BadTimePoint,
              "time points collapse onto one grid cell at N=" +
                  std::to_string(n));
      cells.push_back(k);
    }

    const StepTransition step =
        step_transition_matrix(g, grid, KernelVariant::RowStochastic,
                               uniformization_tol);
    const detail::ChainSampler sampler(step);
    const Accumulator hits = reduce_blocked<Accumulator>(
        trials, seed, salt_of(("jump_law.N" + std::to_string(n)).c_str()), par,
        [&, scratch = ChainSkeleton{}](Accumulator& a, std::uint64_t,
                                       SplitMix64& rng) mutable {
          sample_chain_skeleton(sampler, n, rng, scratch);
          bool match = scratch.switch_count() == order;
          for (int i = 0; match && i < order; ++i)
            match = scratch.jump_steps[static_cast<std::size_t>(i) + 1] ==
                    cells[static_cast<std::size_t>(i)];
          a.add(match ? 1.0 : 0.0);
        });

    const double scale = std::pow(static_cast<double>(n) / horizon, order);
    report.push_row(static_cast<double>(n), scale * hits.mean(),
                    scale * hits.std_error(), oracle);
    report.aux["alt_scaling"].push_back(scale * static_cast<double>(n) /
                                        horizon * hits.mean());
    report.aux["raw_probability"].push_back(hits.mean());
  }
  report.fit_decay();
  const double final_error = report.errors.back();
  const double final_se = report.std_errors.back();
  report.pass = report.errors_decreasing() &&
                final_error <= std::max(3.0 * final_se, tolerance);
  return report;
}

// ---------------------------------------------------------------------------
// Finite-dimensional distributions of the switching chain: empirical joint
// probabilities P(Y_{t_i} = x_i for all i) of the N-step chain against the
// exact product of transition kernels of the continuous chain.
// ---------------------------------------------------------------------------
inline ConvergenceReport fdd_compare(const GeneratorMatrix& g, double horizon,
                                     const std::vector<double>& times,
                                     const std::vector<int>& states,
                                     const std::vector<int>& n_grid,
                                     std::uint64_t trials, const SeedSpec& seed,
                                     const ParallelConfig& par = {},
                                     double tolerance = 0.01,
                                     double uniformization_tol = 1e-12) {
  require(!times.empty() && times.size() == states.size(), Errc::ModelInvalid,
          "need equally many times and states");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0 && times[i] <= horizon, Errc::OutOfHorizon,
            "times must lie in [0, horizon]");
    require(i == 0 || times[i] > times[i - 1], Errc::ModelInvalid,
            "times must be strictly increasing");
    require(states[i] >= 1 && states[i] <= g.states(), Errc::ModelInvalid,
            "state out of range");
  }

  // Chained-kernel oracle via the Markov property.
  double oracle = 1.0;
  {
    double prev_t = 0.0;
    int prev_x = 1;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Eigen::MatrixXd p =
          transition_matrix(g, times[i] - prev_t, uniformization_tol);
      oracle *= p(prev_x - 1, states[i] - 1);
      prev_t = times[i];
      prev_x = states[i];
    }
  }

  ConvergenceReport report;
  report.name = "chain_fdd";
  report.criterion =
      "joint chain probabilities match the chained-kernel values within "
      "max(3*SE, tolerance)";
  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    std::vector<std::int64_t> cells;
    for (double t : times) cells.push_back(grid.cell_index(t));

    const StepTransition step = step_transition_matrix(
        g, grid, KernelVariant::RowStochastic, uniformization_tol);
    const detail::ChainSampler sampler(step);
    const Accumulator hits = reduce_blocked<Accumulator>(
        trials, seed, salt_of(("chain_fdd.N" + std::to_string(n)).c_str()), par,
        [&, scratch = ChainSkeleton{}](Accumulator& a, std::uint64_t,
                                       SplitMix64& rng) mutable {
          sample_chain_skeleton(sampler, n, rng, scratch);
          bool match = true;
          for (std::size_t i = 0; match && i < cells.size(); ++i)
            match = scratch.state_at_step(cells[i]) == states[i];
          a.add(match ? 1.0 : 0.0);
        });
    report.push_row(static_cast<double>(n), hits.mean(), hits.std_error(),
                    oracle);
  }
  report.fit_decay();
  report.pass = report.errors.back() <=
                std::max(3.0 * report.std_errors.back(), tolerance);
  return report;
}

namespace detail {

// Precomputed tables for the conditional characteristic function of the
// N-step market given a switching trajectory: log one-step characteristic
// function per (state, block) plus block edges in steps.
struct CfResolution {
  double dt = 0.0;
  std::int64_t steps = 0;
  std::size_t blocks = 0;
  std::vector<std::int64_t> block_edges;         // size blocks+1, edges[0]=0
  std::vector<std::complex<double>> log_cf_one;  // d x blocks

  static CfResolution build(const ReturnFamily& family, const CfSpec& spec) {
    const TimeGrid& grid = family.grid();
    const int d = family.params().states();
    CfResolution res;
    res.dt = grid.dt();
    res.steps = grid.steps;
    res.blocks = spec.blocks();
    res.block_edges.push_back(0);
    for (std::size_t b = 0; b < res.blocks; ++b)
      res.block_edges.push_back(grid.cell_index(spec.times[b]));
    res.log_cf_one.resize(static_cast<std::size_t>(d) * res.blocks);
    for (int j = 1; j <= d; ++j)
      for (std::size_t b = 0; b < res.blocks; ++b)
        res.log_cf_one[static_cast<std::size_t>(j - 1) * res.blocks + b] =
            std::log(family.one_step_cf(j, spec.alphas[b]));
    return res;
  }

  // The chain at this resolution is the trajectory observed at grid times:
  // the state run [tau_i, tau_{i+1}) covers the steps whose grid time falls
  // inside it (the horizon edge belongs to the last run). Sums log one-step
  // characteristic functions over steps and blocks.
  std::complex<double> conditional_cf(const CtmcPath& path) const {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t seg = 0; seg < path.states.size(); ++seg) {
      const double t0 = path.jump_times[seg];
      const double t1 = seg + 1 < path.jump_times.size()
                            ? path.jump_times[seg + 1]
                            : path.horizon;
      // Steps k with t0 <= k*dt < t1, floating-point guarded.
      std::int64_t lo = static_cast<std::int64_t>(std::ceil(t0 / dt));
      while (static_cast<double>(lo) * dt < t0) ++lo;
      while (lo > 0 && static_cast<double>(lo - 1) * dt >= t0) --lo;
      std::int64_t hi = static_cast<std::int64_t>(std::ceil(t1 / dt)) - 1;
      while (static_cast<double>(hi + 1) * dt < t1) ++hi;
      while (hi >= 0 && static_cast<double>(hi) * dt >= t1) --hi;
      if (seg + 1 == path.states.size()) hi = steps;
      if (hi > steps) hi = steps;
      if (lo < 1) lo = 1;
      if (hi < lo) continue;
      const int state = path.states[seg];
      for (std::size_t b = 0; b < blocks; ++b) {
        const std::int64_t blo = std::max<std::int64_t>(lo, block_edges[b] + 1);
        const std::int64_t bhi = std::min<std::int64_t>(hi, block_edges[b + 1]);
        if (bhi >= blo)
          acc += static_cast<double>(bhi - blo + 1) *
                 log_cf_one[static_cast<std::size_t>(state - 1) * blocks + b];
      }
    }
    return std::exp(acc);
  }
};

}  // namespace detail

// Conditional characteristic function of the N-step market's log-price
// increments given one switching trajectory (whose grid observation is the
// N-step chain). Exact given the trajectory.
inline std::complex<double> discrete_cf_conditional(const CtmcPath& path,
                                                    const ReturnFamily& family,
                                                    const CfSpec& spec) {
  return detail::CfResolution::build(family, spec).conditional_cf(path);
}

// ---------------------------------------------------------------------------
// Characteristic-function convergence of the discrete market to the limit.
//
// One switching trajectory per trial drives every resolution at once: the
// N-step chain is the trajectory observed at grid times (their laws agree
// exactly), and both characteristic functions are computed conditionally on
// the trajectory in closed form. The per-N distance is then estimated from
// pathwise differences, whose standard error shrinks with the coupling, so
// the decay of the distance is measurable at moderate trial counts.
// ---------------------------------------------------------------------------
struct CfConvergenceResult {
  ConvergenceReport report;
  ComplexEstimate limit;                 // limit characteristic function
  std::vector<ComplexEstimate> per_n;    // discrete characteristic functions
};

inline CfConvergenceResult cf_convergence(
    const GeneratorMatrix& g, const RegimeParams& params, ReturnKind kind,
    const CfSpec& spec, double horizon, const std::vector<int>& n_grid,
    std::uint64_t trials, const SeedSpec& seed, const ParallelConfig& par = {},
    double tolerance = 0.03) {
  require(trials >= 10000, Errc::ModelInvalid, "need at least 1e4 trials");

  const std::size_t n_count = n_grid.size();
  std::vector<detail::CfResolution> resolutions;
  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const ReturnFamily family(kind, params, grid);
    resolutions.push_back(detail::CfResolution::build(family, spec));
  }

  struct Partial {
    ComplexAccumulator limit;
    std::vector<ComplexAccumulator> discrete;
    std::vector<ComplexAccumulator> difference;
    void merge(const Partial& o) {
      if (discrete.size() < o.discrete.size()) {
        discrete.resize(o.discrete.size());
        difference.resize(o.difference.size());
      }
      limit.merge(o.limit);
      for (std::size_t i = 0; i < o.discrete.size(); ++i) {
        discrete[i].merge(o.discrete[i]);
        difference[i].merge(o.difference[i]);
      }
    }
  };

  const Partial total = reduce_blocked<Partial>(
      trials, seed, salt_of("cf_convergence"), par,
      [&](Partial& p, std::uint64_t, SplitMix64& rng) {
        if (p.discrete.empty()) {
          p.discrete.resize(n_count);
          p.difference.resize(n_count);
        }
        const CtmcPath path = sample_ctmc_path(g, horizon, 1, rng);
        const std::complex<double> h_lim =
            limit_cf_conditional(path, params, spec);
        p.limit.add(h_lim);
        for (std::size_t ni = 0; ni < n_count; ++ni) {
          const std::complex<double> h_n = resolutions[ni].conditional_cf(path);
          p.discrete[ni].add(h_n);
          p.difference[ni].add(h_n - h_lim);
        }
      });

  CfConvergenceResult out;
  out.limit = {total.limit.mean(), total.limit.std_error(), total.limit.count()};
  out.report.name = "cf_convergence";
  out.report.criterion =
      "characteristic-function distance shrinks along N and the final "
      "distance is below 3*SE + tolerance";
  out.report.aux["cf_re"] = {};
  out.report.aux["cf_im"] = {};
  out.report.aux["limit_re"] = {};
  out.report.aux["limit_im"] = {};
  for (std::size_t ni = 0; ni < n_count; ++ni) {
    const ComplexAccumulator& diff = total.difference[ni];
    const double dist = std::abs(diff.mean());
    ComplexEstimate diff_est{diff.mean(), diff.std_error(), diff.count()};
    ComplexEstimate zero{};
    const double dist_se = distance_std_error(diff_est, zero);
    out.report.push_row(static_cast<double>(n_grid[ni]), dist, dist_se, 0.0);
    out.per_n.push_back({total.discrete[ni].mean(),
                         total.discrete[ni].std_error(),
                         total.discrete[ni].count()});
    out.report.aux["cf_re"].push_back(out.per_n.back().value.real());
    out.report.aux["cf_im"].push_back(out.per_n.back().value.imag());
    out.report.aux["limit_re"].push_back(out.limit.value.real());
    out.report.aux["limit_im"].push_back(out.limit.value.imag());
  }
  out.report.fit_decay();
  out.report.pass =
      out.report.errors_decreasing(/*strict=*/true) &&
      out.report.errors.back() <= 3.0 * out.report.std_errors.back() + tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Per-regime characteristic-function rate: the exact distance between the
// law of the summed log returns over (s, t] and its Gaussian limit, per
// resolution, against the almost-sure return bound gamma_N. Deterministic.
// ---------------------------------------------------------------------------
inline ConvergenceReport cf_rate_check(ReturnKind kind,
                                       const RegimeParams& params,
                                       double horizon, double s, double t,
                                       const std::vector<double>& alphas,
                                       const std::vector<int>& n_grid) {
  require(s >= 0.0 && s < t && t <= horizon, Errc::ModelInvalid,
          "need 0 <= s < t <= horizon");
  ConvergenceReport report;
  report.name = std::string(return_kind_name(kind)) + ".cf_rate";
  report.criterion =
      "sup_j |cf - gaussian| / gamma_N stays within a factor-4 band";
  report.aux["gamma"] = {};
  report.aux["ratio"] = {};
  report.aux["residual"] = {};

  std::vector<double> deltas, gammas;
  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const ReturnFamily family(kind, params, grid);
    const std::int64_t steps = grid.cell_index(t) - grid.cell_index(s);
    double sup_delta = 0.0;
    for (int j = 1; j <= params.states(); ++j) {
      for (double alpha : alphas) {
        const std::complex<double> one = family.one_step_cf(j, alpha);
        const std::complex<double> cf =
            std::pow(one, static_cast<double>(steps));
        const double mu = params.drift(j);
        const double sig = params.volatility(j);
        const double span = t - s;
        const std::complex<double> gauss =
            std::exp(std::complex<double>(-0.5 * alpha * alpha * sig * sig * span,
                                          alpha * (mu - 0.5 * sig * sig) * span));
        sup_delta = std::max(sup_delta, std::abs(cf - gauss));
      }
    }
    deltas.push_back(sup_delta);
    gammas.push_back(family.gamma_bound());
  }

  // Least-squares constant through the origin for delta ~ C * gamma.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    num += deltas[i] * gammas[i];
    den += gammas[i] * gammas[i];
  }
  const double fitted_c = den > 0.0 ? num / den : 0.0;

  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    report.push_row(static_cast<double>(n_grid[i]), deltas[i], 0.0, 0.0);
    const double ratio = gammas[i] > 0.0 ? deltas[i] / gammas[i] : 0.0;
    report.aux["gamma"].push_back(gammas[i]);
    report.aux["ratio"].push_back(ratio);
    report.aux["residual"].push_back(deltas[i] - fitted_c * gammas[i]);
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  report.aux["fitted_c"] = std::vector<double>(deltas.size(), fitted_c);
  report.fit_decay();
  const bool all_zero =
      std::all_of(deltas.begin(), deltas.end(), [](double d) { return d == 0.0; });
  report.pass = all_zero || (ratio_min > 0.0 && ratio_max / ratio_min <= 4.0);
  return report;
}

// ---------------------------------------------------------------------------
// Tightness diagnostics: tail families of the running range and of the path
// oscillation over short windows, per resolution, on shared samples. The
// range is also checked against the worst-case bound steps * log1p(gamma).
// ---------------------------------------------------------------------------
inline TightnessReport tightness_diagnostics(
    const GeneratorMatrix& g, const RegimeParams& params, ReturnKind kind,
    double horizon, const std::vector<int>& n_grid,
    const std::vector<double>& c_grid, const std::vector<double>& delta_grid,
    double epsilon, std::uint64_t trials, const SeedSpec& seed,
    const ParallelConfig& par = {}, double uniformization_tol = 1e-12) {
  require(!n_grid.empty() && !c_grid.empty() && !delta_grid.empty(),
          Errc::ModelInvalid, "grids must be non-empty");
  require(std::is_sorted(c_grid.begin(), c_grid.end()), Errc::ModelInvalid,
          "c grid must be sorted");
  require(std::is_sorted(delta_grid.begin(), delta_grid.end()),
          Errc::ModelInvalid, "delta grid must be sorted");

  TightnessReport out;
  out.n_grid = n_grid;
  out.c_grid = c_grid;
  out.delta_grid = delta_grid;
  out.epsilon = epsilon;
  out.trials = trials;
  out.criterion =
      "range tails fall in c, oscillation tails rise in delta, and no sampled "
      "path exceeds the worst-case range bound";

  struct Tally {
    std::vector<std::uint64_t> over_c;
    std::vector<std::uint64_t> over_eps;
    std::uint64_t bound_violations = 0;
    std::uint64_t count = 0;
    void merge(const Tally& o) {
      if (over_c.size() < o.over_c.size()) over_c.resize(o.over_c.size(), 0);
      if (over_eps.size() < o.over_eps.size())
        over_eps.resize(o.over_eps.size(), 0);
      for (std::size_t i = 0; i < o.over_c.size(); ++i) over_c[i] += o.over_c[i];
      for (std::size_t i = 0; i < o.over_eps.size(); ++i)
        over_eps[i] += o.over_eps[i];
      bound_violations += o.bound_violations;
      count += o.count;
    }
  };

  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const ReturnFamily family(kind, params, grid);
    const StepTransition step = step_transition_matrix(
        g, grid, KernelVariant::RowStochastic, uniformization_tol);
    const detail::ChainSampler sampler(step);

    // Window of index gaps reachable with |t - u| < delta.
    std::vector<std::int64_t> windows;
    for (double delta : delta_grid) {
      const double q = delta / grid.dt();
      const double qr = std::round(q);
      std::int64_t w;
      if (std::abs(q - qr) < 1e-9 * std::max(1.0, std::abs(q)))
        w = static_cast<std::int64_t>(qr);
      else
        w = static_cast<std::int64_t>(std::ceil(q));
      windows.push_back(std::min<std::int64_t>(std::max<std::int64_t>(w, 0), n));
    }
    const double range_bound =
        static_cast<double>(n) * std::log1p(family.gamma_bound());

    const Tally tally = reduce_blocked<Tally>(
        trials, seed, salt_of(("tightness.N" + std::to_string(n)).c_str()), par,
        [&, scratch = ChainSkeleton{},
         u = std::vector<double>()](Tally& tl, std::uint64_t,
                                    SplitMix64& rng) mutable {
          if (tl.over_c.empty()) {
            tl.over_c.resize(c_grid.size(), 0);
            tl.over_eps.resize(delta_grid.size(), 0);
          }
          u.assign(static_cast<std::size_t>(n) + 1, 0.0);
          double acc = 0.0;
          detail::walk_discrete_path(
              sampler, family, n, rng, ReturnIndexing::EndOfStep, scratch,
              [&](std::int64_t k, double dlog) {
                acc += dlog;
                u[static_cast<std::size_t>(k)] = acc;
              });
          double sup_abs = 0.0;
          for (double v : u) sup_abs = std::max(sup_abs, std::abs(v));
          for (std::size_t ci = 0; ci < c_grid.size(); ++ci)
            if (sup_abs >= c_grid[ci]) ++tl.over_c[ci];
          if (sup_abs > range_bound * (1.0 + 1e-12) + 1e-12)
            ++tl.bound_violations;

          // Oscillation over index windows, sliding min/max deques.
          for (std::size_t di = 0; di < delta_grid.size(); ++di) {
            const std::int64_t w = windows[di];
            if (w <= 0) continue;  // oscillation over an empty window is 0
            double osc = 0.0;
            std::deque<std::size_t> lo_q, hi_q;
            for (std::size_t k = 0; k < u.size(); ++k) {
              while (!hi_q.empty() && u[hi_q.back()] <= u[k]) hi_q.pop_back();
              hi_q.push_back(k);
              while (!lo_q.empty() && u[lo_q.back()] >= u[k]) lo_q.pop_back();
              lo_q.push_back(k);
              const std::size_t left =
                  k >= static_cast<std::size_t>(w) ? k - static_cast<std::size_t>(w) : 0;
              while (hi_q.front() < left) hi_q.pop_front();
              while (lo_q.front() < left) lo_q.pop_front();
              osc = std::max(osc, u[hi_q.front()] - u[lo_q.front()]);
            }
            if (osc >= epsilon) ++tl.over_eps[di];
          }
          ++tl.count;
        });

    const double denom = static_cast<double>(tally.count);
    std::vector<double> sup_row, mod_row;
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci)
      sup_row.push_back(static_cast<double>(tally.over_c[ci]) / denom);
    for (std::size_t di = 0; di < delta_grid.size(); ++di)
      mod_row.push_back(static_cast<double>(tally.over_eps[di]) / denom);
    out.sup_tail.push_back(std::move(sup_row));
    out.modulus_tail.push_back(std::move(mod_row));
    out.range_bound_violations.push_back(tally.bound_violations);
  }

  bool no_violations = true;
  for (std::uint64_t v : out.range_bound_violations) no_violations &= v == 0;
  out.pass = out.sup_tail_monotone_in_c() &&
             out.modulus_tail_monotone_in_delta() && no_violations;
  return out;
}

// ---------------------------------------------------------------------------
// Call-price convergence of the discrete market to the limit-market price.
// ---------------------------------------------------------------------------
inline ConvergenceReport price_convergence(
    const GeneratorMatrix& g, const RegimeParams& params, ReturnKind kind,
    double horizon, double strike, const std::vector<int>& n_grid,
    std::uint64_t trials, const SeedSpec& seed, const ParallelConfig& par = {},
    double tolerance = 0.1, double uniformization_tol = 1e-12) {
  const PriceEstimate limit = price_european_call(
      g, params, horizon, strike, trials, seed, par);

  ConvergenceReport report;
  report.name = "call_price";
  report.criterion =
      "discrete call price approaches the limit-market price within "
      "3*SE + tolerance";
  for (int n : n_grid) {
    const TimeGrid grid(horizon, n);
    const ReturnFamily family(kind, params, grid);
    const StepTransition step = step_transition_matrix(
        g, grid, KernelVariant::RowStochastic, uniformization_tol);
    const Accumulator payoff = discrete_call_payoffs(
        step, family, strike, trials,
        seed.with_stream(seed.stream + 7919 * static_cast<std::uint64_t>(n)),
        par);
    const double se =
        std::sqrt(payoff.std_error() * payoff.std_error() +
                  limit.std_error * limit.std_error);
    report.push_row(static_cast<double>(n), payoff.mean(), se, limit.value);
  }
  report.aux["limit_se"] =
      std::vector<double>(n_grid.size(), limit.std_error);
  report.fit_decay();
  report.pass = report.errors.back() <=
                3.0 * report.std_errors.back() + tolerance;
  return report;
}

}  // namespace rsmc
