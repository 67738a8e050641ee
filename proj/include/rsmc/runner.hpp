#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rsmc/config.hpp"
#include "rsmc/convergence.hpp"
#include "rsmc/ctmc.hpp"
#include "rsmc/discrete_model.hpp"
#include "rsmc/errors.hpp"
#include "rsmc/generator.hpp"
#include "rsmc/io.hpp"
#include "rsmc/limit_model.hpp"
#include "rsmc/model.hpp"
#include "rsmc/parallel.hpp"
#include "rsmc/report.hpp"
#include "rsmc/returns.hpp"
#include "rsmc/rng.hpp"

namespace rsmc {

enum class Command { Simulate, Converge, Price, ReportAll };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Converge: return "converge";
    case Command::Price: return "price";
    case Command::ReportAll: return "report-all";
  }
  return "?";
}

// Everything a batch run needs. Outputs are a pure function of this struct
// (plus the config file content); thread count changes scheduling only.
struct RunConfig {
  std::string config_path;  // empty: use the built-in fixture
  Command command = Command::ReportAll;
  std::vector<int> n_grid{64, 256, 1024};
  std::uint64_t trials = 100000;
  std::uint64_t tightness_trials = 20000;  // per resolution; paths are O(N)
  std::uint64_t sim_paths = 100;
  std::uint64_t master_seed = 42;
  int threads = 1;
  std::string out_dir = "out";
  double strike = 0.0;  // 0: at the money (x0)
  KernelVariant variant = KernelVariant::RowStochastic;
  double cf_tolerance = 0.03;
  double price_tolerance = 0.1;
  double jump_law_tolerance = 0.02;
  double fdd_tolerance = 0.01;
  double uniformization_tol = 1e-12;
};

namespace detail {

struct RunOutput {
  std::map<std::string, std::string> files;  // name -> content
  std::vector<ConvergenceReport> reports;
  bool tightness_present = false;
  TightnessReport tightness;
};

inline void run_simulate(const RunConfig& rc, const Model& model,
                         RunOutput& out) {
  const SeedSpec seed{rc.master_seed, 0};
  const double horizon = model.grid.horizon;

  CsvWriter ctmc_csv("trial,jump_index,tau,state");
  CsvWriter disc_csv("trial,k,state,u");
  CsvWriter limit_csv("trial,time,u,x");

  const StepTransition step = step_transition_matrix(
      model.generator, model.grid, KernelVariant::RowStochastic,
      rc.uniformization_tol);
  const ReturnFamily family(model.family, model.params, model.grid);
  std::vector<double> eval_times;
  for (int i = 0; i <= 8; ++i)
    eval_times.push_back(horizon * static_cast<double>(i) / 8.0);

  for (std::uint64_t trial = 0; trial < rc.sim_paths; ++trial) {
    SplitMix64 rng = make_rng(seed.with_stream(trial), salt_of("simulate"));
    const CtmcPath path = sample_ctmc_path(model.generator, horizon, 1, rng);
    for (std::size_t k = 0; k < path.states.size(); ++k)
      ctmc_csv.row(trial, static_cast<std::uint64_t>(k), path.jump_times[k],
                   path.states[k]);

    const LimitSample sample =
        sample_limit_fdd(path, model.params, eval_times, rng);
    for (std::size_t i = 0; i < sample.times.size(); ++i)
      limit_csv.row(trial, sample.times[i], sample.log_prices[i],
                    sample.prices[i]);

    const DiscretePath dpath = sample_discrete_path(step, family, rng);
    for (std::size_t k = 0; k < dpath.states.size(); ++k)
      disc_csv.row(trial, static_cast<std::uint64_t>(k), dpath.states[k],
                   dpath.log_prices[k]);
  }

  out.files["ctmc_paths.csv"] = ctmc_csv.str();
  out.files["discrete_paths.csv"] = disc_csv.str();
  out.files["limit_samples.csv"] = limit_csv.str();
}

inline ConvergenceReport kernel_deficit_report(const RunConfig& rc,
                                               const Model& model) {
  ConvergenceReport report;
  report.name = "kernel_row_deficit";
  report.criterion =
      "no-jump diagonal undershoots the full return probability by at most "
      "(max_rate*dt)^2";
  bool pass = true;
  for (int n : rc.n_grid) {
    const TimeGrid grid(model.grid.horizon, n);
    const StepTransition step = step_transition_matrix(
        model.generator, grid, KernelVariant::NoJumpDiagonal,
        rc.uniformization_tol);
    const double worst = step.row_deficit.maxCoeff();
    const double least = step.row_deficit.minCoeff();
    const double cap = std::pow(model.generator.max_exit_rate() * grid.dt(), 2);
    report.push_row(static_cast<double>(n), worst, 0.0, 0.0);
    report.bounds.push_back(cap);
    if (least < 0.0 || worst > cap) pass = false;
  }
  report.fit_decay();
  report.pass = pass;
  return report;
}

inline void run_converge(const RunConfig& rc, const Model& model,
                         RunOutput& out) {
  const SeedSpec seed{rc.master_seed, 0};
  const ParallelConfig par{rc.threads, 4096};
  const double horizon = model.grid.horizon;
  const GeneratorMatrix& g = model.generator;

  out.reports.push_back(
      rate_asymptotics_check(g, horizon, rc.n_grid, rc.uniformization_tol));
  out.reports.push_back(kernel_deficit_report(rc, model));
  out.reports.push_back(jump_count_mgf_check(g, horizon, {0.1, 0.5, 1.0},
                                             std::max<std::uint64_t>(rc.trials, 10000),
                                             seed, par));
  out.reports.push_back(jump_law_compare(
      g, horizon, 1, {0.4 * horizon}, rc.n_grid,
      std::max<std::uint64_t>(rc.trials, 10000), seed, par,
      rc.jump_law_tolerance, rc.uniformization_tol));
  {
    std::vector<int> fdd_states{1, std::min(2, g.states())};
    out.reports.push_back(fdd_compare(
        g, horizon, {0.25 * horizon, 0.75 * horizon}, fdd_states, rc.n_grid,
        std::max<std::uint64_t>(rc.trials, 10000), seed, par, rc.fdd_tolerance,
        rc.uniformization_tol));
  }

  const CfSpec spec_one({1.0}, {horizon});
  const CfSpec spec_two({1.0, -1.0}, {0.5 * horizon, horizon});
  ordered_json cf_json_out;
  const char* spec_names[2] = {"single_block", "two_blocks"};
  const CfSpec* specs[2] = {&spec_one, &spec_two};
  for (int si = 0; si < 2; ++si) {
    CfConvergenceResult res = cf_convergence(
        g, model.params, model.family, *specs[si], horizon, rc.n_grid,
        std::max<std::uint64_t>(rc.trials, 10000),
        seed.with_stream(static_cast<std::uint64_t>(si)), par, rc.cf_tolerance);
    res.report.name += std::string(".") + spec_names[si];
    ordered_json spec_json;
    spec_json["alphas"] = specs[si]->alphas;
    spec_json["times"] = specs[si]->times;
    spec_json["limit"] = cf_json(res.limit.value, res.limit.std_error);
    ordered_json per_n = ordered_json::array();
    for (std::size_t i = 0; i < res.per_n.size(); ++i) {
      ordered_json one = cf_json(res.per_n[i].value, res.per_n[i].std_error);
      one["N"] = rc.n_grid[i];
      per_n.push_back(one);
    }
    spec_json["discrete"] = per_n;
    cf_json_out[spec_names[si]] = spec_json;
    out.reports.push_back(std::move(res.report));
  }
  out.files["cf.json"] = cf_json_out.dump(2) + "\n";

  for (ReturnKind kind : {ReturnKind::Binomial, ReturnKind::Trinomial}) {
    out.reports.push_back(cf_rate_check(kind, model.params, horizon, 0.0,
                                        horizon, {1.0}, rc.n_grid));
    for (ConvergenceReport& r :
         verify_conditions(kind, model.params, horizon, rc.n_grid,
                           {0.5 * horizon, horizon}))
      out.reports.push_back(std::move(r));
  }

  {
    const std::vector<double> c_grid{0.1, 0.25, 0.5, 1.0};
    const std::vector<double> delta_grid{horizon / 64.0, horizon / 16.0,
                                         horizon / 4.0, horizon};
    out.tightness = tightness_diagnostics(
        g, model.params, model.family, horizon, rc.n_grid, c_grid, delta_grid,
        0.5, std::max<std::uint64_t>(rc.tightness_trials, 1000), seed, par,
        rc.uniformization_tol);
    out.tightness_present = true;
  }
}

inline void run_price(const RunConfig& rc, const Model& model, RunOutput& out) {
  const SeedSpec seed{rc.master_seed, 0};
  const ParallelConfig par{rc.threads, 4096};
  const double strike = rc.strike > 0.0 ? rc.strike : model.params.initial_price();
  out.reports.push_back(price_convergence(
      model.generator, model.params, model.family, model.grid.horizon, strike,
      rc.n_grid, std::max<std::uint64_t>(rc.trials, 10000), seed, par,
      rc.price_tolerance, rc.uniformization_tol));
}

}  // namespace detail

// Executes the selected command and writes all artifacts under out_dir.
// Returns 0 when every check passed, 1 otherwise. Output bytes depend only
// on the run configuration and config file content, never on thread count.
inline int run(const RunConfig& rc) {
  const ModelConfig cfg = rc.config_path.empty()
                              ? default_model_config()
                              : load_model_config(rc.config_path);
  const Model model = build_model(cfg);
  require(!rc.n_grid.empty(), Errc::ModelInvalid, "n_grid must be non-empty");
  for (std::size_t i = 0; i + 1 < rc.n_grid.size(); ++i)
    require(rc.n_grid[i] < rc.n_grid[i + 1], Errc::ModelInvalid,
            "n_grid must be strictly increasing");
  require(rc.trials >= 1, Errc::ModelInvalid, "trials must be positive");

  detail::RunOutput out;

  // Kernel exports at the configured resolution.
  out.files["generator.csv"] = matrix_csv(model.generator.intensity());
  {
    const StepTransition chosen = step_transition_matrix(
        model.generator, model.grid, rc.variant, rc.uniformization_tol);
    const StepTransition no_jump = step_transition_matrix(
        model.generator, model.grid, KernelVariant::NoJumpDiagonal,
        rc.uniformization_tol);
    out.files["kernel.csv"] = matrix_csv(chosen.probs);
    CsvWriter deficit("i,value");
    for (Eigen::Index i = 0; i < no_jump.row_deficit.size(); ++i)
      deficit.row(static_cast<int>(i + 1), no_jump.row_deficit(i));
    out.files["kernel_deficit.csv"] = deficit.str();
  }

  switch (rc.command) {
    case Command::Simulate:
      detail::run_simulate(rc, model, out);
      break;
    case Command::Converge:
      detail::run_converge(rc, model, out);
      break;
    case Command::Price:
      detail::run_price(rc, model, out);
      break;
    case Command::ReportAll:
      detail::run_converge(rc, model, out);
      detail::run_price(rc, model, out);
      break;
  }

  bool all_pass = true;
  if (!out.reports.empty() || out.tightness_present) {
    ordered_json reports_json = ordered_json::array();
    CsvWriter rows("name,N,estimate,se,oracle,error,pass");
    CsvWriter summary("name,pass,final_error,decay_order,criterion");
    for (const ConvergenceReport& r : out.reports) {
      reports_json.push_back(report_json(r));
      append_report_rows(rows, r);
      summary.row(r.name, r.pass, r.rows() ? r.errors.back() : 0.0,
                  std::isnan(r.decay_order) ? std::string("")
                                            : format_number(r.decay_order),
                  r.criterion);
      all_pass &= r.pass;
    }
    if (out.tightness_present) {
      reports_json.push_back(report_json(out.tightness));
      summary.row("tightness", out.tightness.pass, 0.0, std::string(""),
                  out.tightness.criterion);
      all_pass &= out.tightness.pass;
    }
    out.files["reports.json"] = reports_json.dump(2) + "\n";
    out.files["reports.csv"] = rows.str();
    out.files["summary.csv"] = summary.str();
  }

  const std::filesystem::path dir(rc.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, Errc::IoFailure, "cannot create output directory: " + rc.out_dir);

  for (const auto& [name, content] : out.files)
    write_text_file(dir / name, content);

  // Manifest: run identity plus per-file checksums. No timestamps and no
  // thread count; two equivalent runs must produce identical bytes.
  ordered_json manifest;
  manifest["command"] = command_name(rc.command);
  manifest["master_seed"] = rc.master_seed;
  manifest["trials"] = rc.trials;
  manifest["n_grid"] = rc.n_grid;
  manifest["variant"] = rc.variant == KernelVariant::RowStochastic
                            ? "stochastic"
                            : "paper";
  {
    ordered_json model_json;
    model_json["states"] = cfg.states;
    model_json["mu"] = cfg.mu;
    model_json["sigma"] = cfg.sigma;
    model_json["x0"] = cfg.x0;
    model_json["T"] = cfg.horizon;
    model_json["N"] = cfg.steps;
    model_json["family"] = return_kind_name(cfg.family);
    const std::string canon = model_json.dump();
    manifest["config_hash"] = hex64(fnv1a64(canon.data(), canon.size()));
  }
  ordered_json files_json;
  for (const auto& [name, content] : out.files)
    files_json[name] = hex64(fnv1a64(content.data(), content.size()));
  manifest["files"] = files_json;
  manifest["all_pass"] = all_pass;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  return all_pass ? 0 : 1;
}

}  // namespace rsmc
