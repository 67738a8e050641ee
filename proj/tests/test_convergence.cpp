#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "rsmc/convergence.hpp"
#include "test_util.hpp"

namespace {

using rsmc::CfSpec;
using rsmc::GeneratorMatrix;
using rsmc::RegimeParams;
using rsmc::ReturnFamily;
using rsmc::ReturnKind;
using rsmc::SeedSpec;
using rsmc::TimeGrid;

TEST(JumpLaw, TwoStateOneJump) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::ConvergenceReport report = rsmc::jump_law_compare(
      g, 1.0, 1, {0.4}, {64, 256}, 200000, SeedSpec{42, 0});
  ASSERT_EQ(report.rows(), 2u);
  EXPECT_NEAR(report.oracles.back(), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(report.estimates.back(), std::exp(-1.0),
              3.0 * report.std_errors.back() + 0.02);
  // The extra dt^-1 scaling blows up roughly like the grid ratio.
  const auto& alt = report.aux.at("alt_scaling");
  EXPECT_GT(alt[1] / alt[0], 2.0);
  EXPECT_TRUE(report.pass);
}

// Exact closed form for the two-state one-jump pattern probability:
// P(tau_1 = k, tau_2 > N) = p11^(k-1) p12 p22^(N-k); the scaled Monte Carlo
// estimate must sit within its own error of it.
TEST(JumpLaw, MatchesExactPatternProbability) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const int n = 128;
  const TimeGrid grid(1.0, n);
  const rsmc::StepTransition step = rsmc::step_transition_matrix(
      g, grid, rsmc::KernelVariant::RowStochastic);
  const int k = grid.cell_index(0.4);
  const double exact = std::pow(step.probs(0, 0), k - 1) * step.probs(0, 1) *
                       std::pow(step.probs(1, 1), n - k);
  const rsmc::ConvergenceReport report = rsmc::jump_law_compare(
      g, 1.0, 1, {0.4}, {n}, 400000, SeedSpec{42, 0});
  const double scaled_exact = n * exact;
  EXPECT_NEAR(report.estimates[0], scaled_exact, 3.0 * report.std_errors[0]);
}

// Distance of the exact scaled pattern probability to the jump density
// shrinks by a factor in [1.3, 3.0] per grid doubling (computed in closed
// form, no sampling noise).
TEST(JumpLaw, ExactErrorHalvesPerDoubling) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const double density = std::exp(-1.0);
  std::vector<double> errors;
  for (int n : {64, 128, 256, 512}) {
    const TimeGrid grid(1.0, n);
    const rsmc::StepTransition step = rsmc::step_transition_matrix(
        g, grid, rsmc::KernelVariant::RowStochastic);
    const int k = grid.cell_index(0.4);
    const double exact = std::pow(step.probs(0, 0), k - 1) * step.probs(0, 1) *
                         std::pow(step.probs(1, 1), n - k);
    errors.push_back(std::abs(n * exact - density));
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double ratio = errors[i] / errors[i + 1];
    EXPECT_GT(ratio, 1.3);
    EXPECT_LT(ratio, 3.0);
  }
}

TEST(JumpLaw, TwoJumpPattern) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::ConvergenceReport report = rsmc::jump_law_compare(
      g, 1.0, 2, {0.2, 0.6}, {128}, 400000, SeedSpec{42, 0}, {}, 0.05);
  EXPECT_NEAR(report.oracles[0], std::exp(-1.0), 1e-12);
  EXPECT_NEAR(report.estimates[0], std::exp(-1.0),
              3.0 * report.std_errors[0] + 0.05);
}

TEST(JumpLaw, RejectsBadTimePoints) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  // First grid cell.
  EXPECT_THROW(rsmc::jump_law_compare(g, 1.0, 1, {0.001}, {64}, 10000,
                                      SeedSpec{1, 0}),
               rsmc::Error);
  // Last grid cell.
  EXPECT_THROW(rsmc::jump_law_compare(g, 1.0, 1, {0.999}, {64}, 10000,
                                      SeedSpec{1, 0}),
               rsmc::Error);
  // Collapsing cells at coarse resolution.
  EXPECT_THROW(rsmc::jump_law_compare(g, 1.0, 2, {0.5, 0.51}, {16}, 10000,
                                      SeedSpec{1, 0}),
               rsmc::Error);
  // Unsupported order.
  EXPECT_THROW(rsmc::jump_law_compare(g, 1.0, 3, {0.2, 0.4, 0.6}, {64}, 10000,
                                      SeedSpec{1, 0}),
               rsmc::Error);
}

TEST(FddCompare, InitialConditionIsCertain) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::ConvergenceReport report = rsmc::fdd_compare(
      g, 1.0, {0.0, 0.5}, {1, 1}, {32, 64}, 20000, SeedSpec{42, 0});
  // The t=0 coordinate is certain; the joint reduces to the marginal.
  EXPECT_NEAR(report.oracles[0], (1.0 + std::exp(-1.0)) / 2.0, 1e-12);
  EXPECT_TRUE(report.pass);
}

TEST(FddCompare, ChapmanKolmogorovOracleConsistency) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  // Summing the two-time oracle over the intermediate state recovers the
  // direct kernel entry.
  const double t1 = 0.25, t2 = 0.75;
  double summed = 0.0;
  for (int x1 : {1, 2}) {
    const rsmc::ConvergenceReport r = rsmc::fdd_compare(
        g, 1.0, {t1, t2}, {x1, 2}, {16}, 10000, SeedSpec{42, 0});
    summed += r.oracles[0];
  }
  const double direct = rsmc::transition_matrix(g, t2)(0, 1);
  EXPECT_NEAR(summed, direct, 1e-10);
}

TEST(FddCompare, TwoTimeJointAtModerateResolution) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::ConvergenceReport report = rsmc::fdd_compare(
      g, 1.0, {0.25, 0.75}, {1, 2}, {64, 256}, 100000, SeedSpec{42, 0});
  const double oracle = rsmc::transition_matrix(g, 0.25)(0, 0) *
                        rsmc::transition_matrix(g, 0.5)(0, 1);
  EXPECT_NEAR(report.oracles.back(), oracle, 1e-12);
  EXPECT_LE(report.errors.back(),
            std::max(3.0 * report.std_errors.back(), 0.01));
  EXPECT_TRUE(report.pass);
}

TEST(CfConvergence, ZeroSpecIsExactlyZeroEverywhere) {
  const rsmc::CfConvergenceResult res = rsmc::cf_convergence(
      rsmc_test::two_state_unit(), rsmc_test::fixture_params(),
      ReturnKind::Binomial, CfSpec({0.0}, {1.0}), 1.0, {16, 64}, 10000,
      SeedSpec{42, 0});
  for (double e : res.report.errors) EXPECT_EQ(e, 0.0);
  for (double se : res.report.std_errors) EXPECT_EQ(se, 0.0);
  EXPECT_TRUE(res.report.pass);
}

TEST(CfConvergence, FixtureSingleBlock) {
  const rsmc::CfConvergenceResult res = rsmc::cf_convergence(
      rsmc_test::two_state_unit(), rsmc_test::fixture_params(),
      ReturnKind::Binomial, CfSpec({1.0}, {1.0}), 1.0, {64, 256, 1024}, 50000,
      SeedSpec{42, 0});
  EXPECT_TRUE(res.report.pass);
  EXPECT_LT(res.report.errors.back(), 0.03);
  // Coupled distances genuinely decay here.
  EXPECT_LT(res.report.errors.back(), res.report.errors.front());
  EXPECT_LE(std::abs(res.limit.value), 1.0 + 1e-12);
}

TEST(CfConvergence, DiscreteMarginalsMatchDirectEstimator) {
  // The coupled per-N characteristic function agrees with the standalone
  // direct-sampling estimator within combined errors.
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::fixture_params();
  const CfSpec spec({1.0}, {1.0});
  const int n = 128;
  const rsmc::CfConvergenceResult coupled = rsmc::cf_convergence(
      g, params, ReturnKind::Binomial, spec, 1.0, {n}, 100000, SeedSpec{42, 0});

  const TimeGrid grid(1.0, n);
  const ReturnFamily family(ReturnKind::Binomial, params, grid);
  const rsmc::StepTransition step = rsmc::step_transition_matrix(
      g, grid, rsmc::KernelVariant::RowStochastic);
  const rsmc::ComplexEstimate direct =
      rsmc::discrete_cf(step, family, spec, 100000, SeedSpec{42, 1});

  const rsmc::ComplexEstimate& marginal = coupled.per_n[0];
  const double se_re = std::sqrt(std::pow(marginal.std_error.real(), 2) +
                                 std::pow(direct.std_error.real(), 2));
  const double se_im = std::sqrt(std::pow(marginal.std_error.imag(), 2) +
                                 std::pow(direct.std_error.imag(), 2));
  EXPECT_NEAR(marginal.value.real(), direct.value.real(), 3.0 * se_re);
  EXPECT_NEAR(marginal.value.imag(), direct.value.imag(), 3.0 * se_im);
}

// The segment-walk evaluation of the conditional characteristic function
// agrees with a brute-force per-step product over the trajectory observed at
// grid times, for irregular resolutions and multi-block specs.
TEST(CfConvergence, ConditionalCfMatchesBruteForce) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::fixture_params();
  const CfSpec spec({1.0, -0.7}, {0.37, 1.0});
  for (int n : {17, 64, 129, 1000}) {
    const TimeGrid grid(1.0, n);
    const ReturnFamily family(ReturnKind::Binomial, params, grid);
    for (std::uint64_t s = 0; s < 200; ++s) {
      const rsmc::CtmcPath path =
          rsmc::sample_ctmc_path(g, 1.0, 1, SeedSpec{77, s});
      const std::complex<double> fast =
          rsmc::discrete_cf_conditional(path, family, spec);

      std::complex<double> brute{1.0, 0.0};
      const int edge1 = grid.cell_index(spec.times[0]);
      for (int k = 1; k <= n; ++k) {
        const int state = path.state_at(k * grid.dt());
        const double alpha = k <= edge1 ? spec.alphas[0] : spec.alphas[1];
        brute *= family.one_step_cf(state, alpha);
      }
      ASSERT_NEAR(std::abs(fast - brute), 0.0, 1e-12)
          << "n=" << n << " trial=" << s;
    }
  }
}

TEST(CfRate, ZeroAlphaVanishes) {
  const rsmc::ConvergenceReport report =
      rsmc::cf_rate_check(ReturnKind::Binomial, rsmc_test::fixture_params(),
                          1.0, 0.0, 1.0, {0.0}, {64, 256, 1024});
  for (double d : report.estimates) EXPECT_EQ(d, 0.0);
  EXPECT_TRUE(report.pass);
}

TEST(CfRate, DegenerateSigmaClosedForm) {
  const RegimeParams params = rsmc_test::flat_params(0.05, 0.0, 1.0, true);
  const double alpha = 1.0;
  const rsmc::ConvergenceReport report = rsmc::cf_rate_check(
      ReturnKind::Binomial, params, 1.0, 0.0, 1.0, {alpha}, {64, 256, 1024});
  for (std::size_t i = 0; i < report.rows(); ++i) {
    const double n = report.axis[i];
    const std::complex<double> lhs = std::exp(
        std::complex<double>(0.0, alpha * n * std::log1p(0.05 / n)));
    const std::complex<double> rhs =
        std::exp(std::complex<double>(0.0, alpha * 0.05));
    EXPECT_NEAR(report.estimates[i], std::abs(lhs - rhs), 1e-12);
  }
  // Deterministic returns converge at first order; the distance vanishes.
  EXPECT_LT(report.estimates.back(), report.estimates.front());
}

// For the flat symmetric family the distance is bounded by a small multiple
// of gamma (here far below it, since the family matches mean and variance
// exactly and has no skew).
TEST(CfRate, FlatFamilyBoundedness) {
  const RegimeParams params = rsmc_test::flat_params(0.0, 0.2, 1.0);
  const rsmc::ConvergenceReport report = rsmc::cf_rate_check(
      ReturnKind::Binomial, params, 1.0, 0.0, 1.0, {1.0}, {64, 256, 1024});
  for (const double ratio : report.aux.at("ratio")) EXPECT_LT(ratio, 0.01);
  EXPECT_GT(report.aux.at("fitted_c").front(), 0.0);
}

TEST(CfRate, FixtureBandWithinFactorFour) {
  const rsmc::ConvergenceReport report =
      rsmc::cf_rate_check(ReturnKind::Binomial, rsmc_test::fixture_params(),
                          1.0, 0.0, 1.0, {1.0}, {64, 256, 1024});
  const auto& ratios = report.aux.at("ratio");
  double lo = ratios[0], hi = ratios[0];
  for (double r : ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LE(hi / lo, 4.0);
  EXPECT_TRUE(report.pass);
}

// Monte Carlo route against the exact product characteristic function.
TEST(CfRate, ExactMatchesMonteCarlo) {
  const RegimeParams params = rsmc_test::fixture_params();
  const TimeGrid grid(1.0, 64);
  const ReturnFamily family(ReturnKind::Binomial, params, grid);
  const double alpha = 1.0;
  const int j = 2;
  const std::complex<double> exact =
      std::pow(family.one_step_cf(j, alpha), 64.0);

  rsmc::ComplexAccumulator acc;
  for (std::uint64_t s = 0; s < 100000; ++s) {
    rsmc::SplitMix64 rng = rsmc::make_rng(SeedSpec{42, s}, rsmc::salt_of("mc"));
    double sum = 0.0;
    for (int k = 0; k < 64; ++k) sum += family.sample_log(j, rng);
    acc.add({std::cos(alpha * sum), std::sin(alpha * sum)});
  }
  EXPECT_NEAR(acc.mean().real(), exact.real(), 3.0 * acc.std_error().real());
  EXPECT_NEAR(acc.mean().imag(), exact.imag(), 3.0 * acc.std_error().imag());
}

TEST(Tightness, MonotoneAndBounded) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::TightnessReport report = rsmc::tightness_diagnostics(
      g, rsmc_test::fixture_params(), ReturnKind::Binomial, 1.0, {64, 256},
      {0.1, 0.25, 0.5, 1.0}, {1.0 / 64.0, 1.0 / 16.0, 0.25, 1.0}, 0.5, 4000,
      SeedSpec{42, 0});
  EXPECT_TRUE(report.sup_tail_monotone_in_c());
  EXPECT_TRUE(report.modulus_tail_monotone_in_delta());
  for (std::uint64_t v : report.range_bound_violations) EXPECT_EQ(v, 0u);
  EXPECT_TRUE(report.pass);
  // delta >= T: the oscillation equals the full range, the maximal value.
  for (std::size_t n = 0; n < report.n_grid.size(); ++n)
    EXPECT_GE(report.modulus_tail[n].back(), report.modulus_tail[n].front());
}

TEST(Tightness, TailVanishesBeyondWorstCaseRange) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const int n = 64;
  const TimeGrid grid(1.0, n);
  const ReturnFamily family(ReturnKind::Binomial, rsmc_test::fixture_params(),
                            grid);
  const double beyond = n * std::log1p(family.gamma_bound()) * 1.01;
  const rsmc::TightnessReport report = rsmc::tightness_diagnostics(
      g, rsmc_test::fixture_params(), ReturnKind::Binomial, 1.0, {n},
      {0.5, beyond}, {0.25}, 0.5, 2000, SeedSpec{42, 0});
  EXPECT_EQ(report.sup_tail[0].back(), 0.0);
}

// Degenerate deterministic fixture: the range equals the bound identically
// and must not be counted as a violation.
TEST(Tightness, DegenerateFixtureDoesNotTripBound) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::flat_params(0.05, 0.0, 1.0, true);
  const rsmc::TightnessReport report = rsmc::tightness_diagnostics(
      g, params, ReturnKind::Binomial, 1.0, {32}, {0.1}, {0.5}, 0.5, 500,
      SeedSpec{42, 0});
  EXPECT_EQ(report.range_bound_violations[0], 0u);
}

TEST(Tightness, FixtureOscillationTailSmall) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const rsmc::TightnessReport report = rsmc::tightness_diagnostics(
      g, rsmc_test::fixture_params(), ReturnKind::Binomial, 1.0, {1024},
      {0.5}, {1.0 / 64.0}, 0.5, 4000, SeedSpec{42, 0});
  EXPECT_LT(report.modulus_tail[0][0], 0.05);
}

TEST(PriceConvergence, DeterministicCompoundingGap) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::flat_params(0.05, 0.0, 100.0, true);
  const double strike = 50.0;
  const rsmc::ConvergenceReport report =
      rsmc::price_convergence(g, params, ReturnKind::Binomial, 1.0, strike,
                              {64, 128}, 10000, SeedSpec{42, 0});
  for (std::size_t i = 0; i < report.rows(); ++i) {
    const double n = report.axis[i];
    const double exact =
        100.0 * std::pow(1.0 + 0.05 / n, n) - strike;  // deterministic payoff
    EXPECT_NEAR(report.estimates[i], exact, 1e-10);
    // Gap to the limit price ~ x0 * mu^2 T^2 / (2N).
    const double gap_model = 100.0 * 0.0025 / (2.0 * n);
    EXPECT_NEAR(report.errors[i], gap_model, 0.5 * gap_model);
  }
}

// Expected terminal price is x0 (1 + mu dt)^N: visible at a tiny strike.
TEST(PriceConvergence, SmallStrikeForwardExpectation) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::flat_params(0.05, 0.2, 100.0);
  const int n = 256;
  const TimeGrid grid(1.0, n);
  const ReturnFamily family(ReturnKind::Binomial, params, grid);
  const rsmc::StepTransition step = rsmc::step_transition_matrix(
      g, grid, rsmc::KernelVariant::RowStochastic);
  const rsmc::Accumulator payoff = rsmc::discrete_call_payoffs(
      step, family, 1e-9, 400000, SeedSpec{42, 0});
  const double forward = 100.0 * std::pow(1.0 + 0.05 / n, n);
  EXPECT_NEAR(payoff.mean(), forward, 3.0 * payoff.std_error());
}

TEST(PriceConvergence, FlatMarketTracksLimit) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::flat_params(0.0, 0.2, 100.0);
  const rsmc::ConvergenceReport report =
      rsmc::price_convergence(g, params, ReturnKind::Binomial, 1.0, 100.0,
                              {256, 1024}, 200000, SeedSpec{42, 0}, {}, 0.15);
  EXPECT_TRUE(report.pass);
  EXPECT_NEAR(report.oracles.back(),
              rsmc_test::black_scholes_call(100.0, 100.0, 0.2, 1.0),
              3.0 * report.aux.at("limit_se").back() + 0.02);
}

}  // namespace
