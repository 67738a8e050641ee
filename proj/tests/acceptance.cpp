// Acceptance suite: end-to-end checks of the library's quantitative
// guarantees at fixed seeds and tolerances. Prints one line per criterion.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rsmc/rsmc.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using rsmc::CfSpec;
using rsmc::GeneratorMatrix;
using rsmc::RegimeParams;
using rsmc::ReturnKind;
using rsmc::SeedSpec;

struct Harness {
  int failures = 0;
  int index = 0;

  void report(bool pass, const std::string& label, const std::string& detail) {
    ++index;
    std::printf("criterion %2d [%s] %s: %s\n", index, pass ? "PASS" : "FAIL",
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// 1. Uniformized kernel against the two-state closed form and the semigroup
//    identity, both at 1e-10.
void criterion_kernel_exactness(Harness& h) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0, 10.0}) {
    const Eigen::MatrixXd p = rsmc::transition_matrix(g, t);
    const double p11 = (1.0 + std::exp(-2.0 * t)) / 2.0;
    const double p12 = (1.0 - std::exp(-2.0 * t)) / 2.0;
    worst = std::max({worst, std::abs(p(0, 0) - p11), std::abs(p(0, 1) - p12),
                      std::abs(p(1, 1) - p11), std::abs(p(1, 0) - p12)});
  }
  Eigen::MatrixXd raw(3, 3);
  raw << 0.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0, 3.0, 0.0;
  const GeneratorMatrix g3 = GeneratorMatrix::validate(raw);
  rsmc::SplitMix64 rng(2024);
  double worst_semigroup = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    const double s = 2.0 * rng.uniform01();
    const double t = 2.0 * rng.uniform01();
    const Eigen::MatrixXd lhs = rsmc::transition_matrix(g3, s + t);
    const Eigen::MatrixXd rhs =
        rsmc::transition_matrix(g3, s) * rsmc::transition_matrix(g3, t);
    worst_semigroup =
        std::max(worst_semigroup, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  h.report(worst < 1e-10 && worst_semigroup < 1e-10,
           "transition kernel exactness",
           "closed-form gap " + fmt(worst) + ", semigroup gap " +
               fmt(worst_semigroup) + " (tol 1e-10)");
}

// 2. Scaled one-step probabilities approach the rates at order one, with the
//    entrywise majorization p_ij <= lambda_i dt.
void criterion_rate_asymptotics(Harness& h) {
  const rsmc::ConvergenceReport report = rsmc::rate_asymptotics_check(
      rsmc_test::two_state_unit(), 1.0, {10, 100, 1000, 10000});
  const bool majorized = report.aux.at("majorization_holds").front() == 1.0;
  const bool order_ok = std::abs(report.decay_order - 1.0) <= 0.2;
  h.report(order_ok && majorized && report.pass, "kernel rate asymptotics",
           "fitted order " + fmt(report.decay_order) +
               " (1.0 +- 0.2), majorization " +
               (majorized ? "holds" : "VIOLATED"));
}

// 3. Exponential moment of the jump count: Poisson oracle within 3 SE and
//    below the rate-ratio bound, at 1e6 trials.
void criterion_jump_count_mgf(Harness& h) {
  const std::vector<double> alphas{0.1, 0.5, 1.0};
  const rsmc::ConvergenceReport report = rsmc::jump_count_mgf_check(
      rsmc_test::two_state_unit(), 1.0, alphas, 1000000, SeedSpec{42, 0});
  bool ok = report.pass;
  double worst_dev = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double oracle = std::exp(std::exp(alphas[i]) - 1.0);
    const double dev = std::abs(report.estimates[i] - oracle);
    worst_dev = std::max(worst_dev, dev / std::max(report.std_errors[i], 1e-300));
    if (dev > 3.0 * report.std_errors[i]) ok = false;
    if (report.estimates[i] > report.bounds[i]) ok = false;
  }
  h.report(ok, "jump count exponential moment",
           "worst |dev|/SE " + fmt(worst_dev) +
               " (<= 3), all estimates below the moment bound");
}

// 4. Scaled one-switch pattern probability against the exact jump density at
//    t = 0.4, with the alternative dt^-(m+1) scaling diverging.
void criterion_jump_law(Harness& h) {
  const rsmc::ConvergenceReport report =
      rsmc::jump_law_compare(rsmc_test::two_state_unit(), 1.0, 1, {0.4},
                             {64, 256, 512}, 1000000, SeedSpec{42, 0});
  const double final_error = report.errors.back();
  const auto& alt = report.aux.at("alt_scaling");
  const double alt_growth = alt.back() / alt.front();
  const bool ok = final_error <= 0.02 && report.errors_decreasing() &&
                  alt_growth > 4.0;
  h.report(ok, "jump law scaling",
           "|scaled - exact| " + fmt(final_error) +
               " at N=512 (<= 0.02); dt^-(m+1)-scaled value grows x" +
               fmt(alt_growth) + " across the grid (diverges)");
}

// 5. Joint chain law at (0.25, 0.75) against the chained-kernel oracle for
//    every state pair, at N = 256 and 1e5 trials.
void criterion_chain_fdd(Harness& h) {
  bool ok = true;
  double worst = 0.0;
  for (int x1 : {1, 2}) {
    for (int x2 : {1, 2}) {
      const rsmc::ConvergenceReport report = rsmc::fdd_compare(
          rsmc_test::two_state_unit(), 1.0, {0.25, 0.75}, {x1, x2}, {256},
          100000, SeedSpec{42, static_cast<std::uint64_t>(10 * x1 + x2)});
      const double allowed = std::max(3.0 * report.std_errors.back(), 0.01);
      worst = std::max(worst, report.errors.back());
      if (report.errors.back() > allowed) ok = false;
    }
  }
  h.report(ok, "chain finite-dimensional law",
           "worst joint-probability gap " + fmt(worst) +
               " (<= max(3 SE, 0.01))");
}

// 6. Characteristic functions of the discrete market converge to the limit:
//    strictly shrinking distances and a final gap below 0.03 for both specs.
void criterion_cf_convergence(Harness& h) {
  const std::vector<int> n_grid{64, 256, 1024};
  bool ok = true;
  std::string detail;
  const CfSpec spec_one({1.0}, {1.0});
  const CfSpec spec_two({1.0, -1.0}, {0.5, 1.0});
  const CfSpec* specs[2] = {&spec_one, &spec_two};
  for (int si = 0; si < 2; ++si) {
    const rsmc::CfConvergenceResult res = rsmc::cf_convergence(
        rsmc_test::two_state_unit(), rsmc_test::fixture_params(),
        ReturnKind::Binomial, *specs[si], 1.0, n_grid, 100000,
        SeedSpec{42, static_cast<std::uint64_t>(si)});
    const auto& e = res.report.errors;
    const bool strictly_decreasing = e[1] < e[0] && e[2] < e[1];
    if (!(strictly_decreasing && e.back() < 0.03 && res.report.pass))
      ok = false;
    if (si) detail += "; ";
    detail += "spec" + std::to_string(si + 1) + " distances " + fmt(e[0]) +
              " > " + fmt(e[1]) + " > " + fmt(e[2]) + " (final < 0.03)";
  }
  h.report(ok, "characteristic function convergence", detail);
}

// 7. Return-family conditions: gamma order 1/2, mean-compounding order 1,
//    and the variance-checkpoint identity at 1e-14, for both families.
void criterion_conditions(Harness& h) {
  bool ok = true;
  std::string detail;
  for (ReturnKind kind : {ReturnKind::Binomial, ReturnKind::Trinomial}) {
    const auto reports =
        rsmc::verify_conditions(kind, rsmc_test::fixture_params(), 1.0,
                                {64, 128, 256, 512, 1024}, {0.5, 1.0});
    const double gamma_order = reports[0].decay_order;
    const double mean_order = reports[1].decay_order;
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < reports[2].rows(); ++i)
      worst_gap = std::max(
          worst_gap, std::abs(reports[2].estimates[i] - reports[2].oracles[i]));
    if (std::abs(gamma_order - 0.5) > 0.2) ok = false;
    if (std::abs(mean_order - 1.0) > 0.2) ok = false;
    if (worst_gap > 1e-14) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += std::string(rsmc::return_kind_name(kind)) + ": gamma order " +
              fmt(gamma_order) + ", mean order " + fmt(mean_order) +
              ", checkpoint identity gap " + fmt(worst_gap);
  }
  h.report(ok, "return family conditions", detail);
}

// 8. Per-regime characteristic-function rate: sup_j Delta / gamma stays in a
//    factor-4 band across the grid.
void criterion_cf_rate(Harness& h) {
  const rsmc::ConvergenceReport report =
      rsmc::cf_rate_check(ReturnKind::Binomial, rsmc_test::fixture_params(),
                          1.0, 0.0, 1.0, {1.0}, {64, 256, 1024});
  const auto& ratios = report.aux.at("ratio");
  double lo = ratios[0], hi = ratios[0];
  for (double r : ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  h.report(report.pass && hi / lo <= 4.0, "characteristic function rate",
           "Delta/gamma band factor " + fmt(hi / lo) + " (<= 4) over N in "
           "{64, 256, 1024}");
}

// 9. Tightness diagnostics: exact tail monotonicity on shared samples and no
//    sampled path beyond the worst-case range bound.
void criterion_tightness(Harness& h) {
  const rsmc::TightnessReport report = rsmc::tightness_diagnostics(
      rsmc_test::two_state_unit(), rsmc_test::fixture_params(),
      ReturnKind::Binomial, 1.0, {64, 256, 1024}, {0.1, 0.25, 0.5, 1.0},
      {1.0 / 64.0, 1.0 / 16.0, 0.25, 1.0}, 0.5, 10000, SeedSpec{42, 0});
  std::uint64_t violations = 0;
  for (std::uint64_t v : report.range_bound_violations) violations += v;
  h.report(report.pass, "tightness diagnostics",
           std::string("range tail monotone in c: ") +
               (report.sup_tail_monotone_in_c() ? "yes" : "NO") +
               ", oscillation tail monotone in delta: " +
               (report.modulus_tail_monotone_in_delta() ? "yes" : "NO") +
               ", range-bound violations " + std::to_string(violations));
}

// 10. Discrete call price at N = 1024 against the zero-rate closed form in a
//     flat market, 1e6 trials, within 0.15.
void criterion_pricing(Harness& h) {
  const GeneratorMatrix g = rsmc_test::two_state_unit();
  const RegimeParams params = rsmc_test::flat_params(0.0, 0.2, 100.0);
  const rsmc::TimeGrid grid(1.0, 1024);
  const rsmc::ReturnFamily family(ReturnKind::Binomial, params, grid);
  const rsmc::StepTransition step = rsmc::step_transition_matrix(
      g, grid, rsmc::KernelVariant::RowStochastic);
  const rsmc::Accumulator payoff = rsmc::discrete_call_payoffs(
      step, family, 100.0, 1000000, SeedSpec{42, 0});
  const double oracle = rsmc_test::black_scholes_call(100.0, 100.0, 0.2, 1.0);
  const double gap = std::abs(payoff.mean() - oracle);
  h.report(gap <= 0.15, "call price demo",
           "discrete " + fmt(payoff.mean()) + " vs closed form " + fmt(oracle) +
               ", gap " + fmt(gap) + " (<= 0.15), SE " +
               fmt(payoff.std_error()));
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    out[entry.path().filename().string()] = buf.str();
  }
  return out;
}

// 11. Full report run on the shipped fixture: byte-identical outputs across
//     repeated runs and across thread counts 1 and 8.
void criterion_determinism(Harness& h) {
  const fs::path base = fs::temp_directory_path() / "rsmc_acceptance_runs";
  fs::remove_all(base);
  auto make = [&](const char* sub, int threads) {
    rsmc::RunConfig rc;
    rc.command = rsmc::Command::ReportAll;
    rc.n_grid = {16, 64, 256};
    rc.trials = 20000;
    rc.master_seed = 42;
    rc.threads = threads;
    rc.out_dir = (base / sub).string();
    return rc;
  };
  const int s1 = rsmc::run(make("t1_a", 1));
  const int s2 = rsmc::run(make("t1_b", 1));
  const int s3 = rsmc::run(make("t8", 8));
  const auto a = dir_contents(base / "t1_a");
  const auto b = dir_contents(base / "t1_b");
  const auto c = dir_contents(base / "t8");
  const bool identical = !a.empty() && a == b && a == c;
  const bool status_ok = s1 == 0 && s2 == 0 && s3 == 0;
  h.report(identical && status_ok, "deterministic batch runs",
           std::string("outputs ") + (identical ? "byte-identical" : "DIFFER") +
               " across {run1, run2, 8 threads}; exit status " +
               std::to_string(s1) + "/" + std::to_string(s2) + "/" +
               std::to_string(s3));
}

}  // namespace

int main() {
  Harness h;
  criterion_kernel_exactness(h);
  criterion_rate_asymptotics(h);
  criterion_jump_count_mgf(h);
  criterion_jump_law(h);
  criterion_chain_fdd(h);
  criterion_cf_convergence(h);
  criterion_conditions(h);
  criterion_cf_rate(h);
  criterion_tightness(h);
  criterion_pricing(h);
  criterion_determinism(h);
  if (h.failures == 0)
    std::printf("acceptance: all %d criteria passed\n", h.index);
  else
    std::printf("acceptance: %d of %d criteria FAILED\n", h.failures, h.index);
  return h.failures == 0 ? 0 : 1;
}
