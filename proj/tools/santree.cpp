// santree: run online experiments and compute optimal static trees.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "santree/santree.hpp"

namespace {

int report(const std::exception& e, int code) {
  std::cerr << "santree: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-adjusting k-ary search tree networks"};
  app.require_subcommand(1);

  std::string structure, workload, delimiter;
  santree::ExperimentConfig run_cfg;
  auto* run = app.add_subcommand("run", "Serve a workload and write cumulative costs as CSV");
  run->add_option("--structure", structure, "static-balanced | static-optimal | splaynet | centroid-splaynet")->required();
  run->add_option("--k", run_cfg.k, "Arity")->default_val(2);
  run->add_option("--nodes", run_cfg.n, "Node count (for traces: how many of the most active ids to keep)")->required();
  run->add_option("--workload", workload, "uniform | finite-uniform | temporal | trace")->required();
  run->add_option("--requests", run_cfg.requests, "Number of requests (uniform, temporal)")->default_val(0);
  run->add_option("--theta", run_cfg.theta, "Temporal: probability of a fresh pair")->default_val(0.5);
  run->add_option("--window", run_cfg.window, "Temporal: history window")->default_val(64);
  run->add_option("--seed", run_cfg.seed, "Generator seed")->default_val(0);
  run->add_option("--trace-file", run_cfg.trace_file, "Trace file for --workload trace");
  run->add_option("--src-col", run_cfg.columns.src, "Source column")->default_val(0);
  run->add_option("--dst-col", run_cfg.columns.dst, "Destination column")->default_val(1);
  run->add_option("--delimiter", delimiter, "Field delimiter (default: whitespace)");
  run->add_option("--trace-cache", run_cfg.trace_cache, "Also write the served trace here");
  run->add_option("--stride", run_cfg.stride, "CSV row every this many requests")->default_val(1000);
  run->add_option("--output", run_cfg.output, "CSV output path")->required();

  santree::OptimizerConfig opt_cfg;
  auto* optimize = app.add_subcommand("optimize", "Compute an optimal static tree");
  auto* demand_opt = optimize->add_option("--demand-file", opt_cfg.demand_file, "Demand file: 'n' then 'u v count' lines");
  auto* uniform_opt = optimize->add_option("--uniform-n", opt_cfg.uniform_n, "Uniform demand on this many nodes");
  demand_opt->excludes(uniform_opt);
  optimize->add_option("--k", opt_cfg.k, "Arity")->default_val(2);
  optimize->add_option("--output", opt_cfg.output, "Tree output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : santree::kExitConfig;
  }

  try {
    if (*run) {
      run_cfg.structure = santree::parse_structure(structure);
      run_cfg.workload = santree::parse_workload(workload);
      if (delimiter.size() > 1) throw santree::ConfigError("delimiter must be a single character");
      if (delimiter.size() == 1) run_cfg.columns.delimiter = delimiter[0];
      run_cfg.verify = santree::verify_requested_by_env();
      const auto r = santree::run_experiment(run_cfg);
      std::cout << r.structure << " n=" << r.n << " requests=" << r.requests << " routing=" << r.routing_total
                << " adjustment=" << r.adjustment_total << " avg=" << santree::format_average(r.routing_total + r.adjustment_total, r.requests);
      if (run_cfg.workload == santree::WorkloadKind::Temporal)
        std::cout << " history_fraction=" << santree::format_average(r.history_draws, r.requests);
      std::cout << '\n';
    } else {
      const auto r = santree::run_optimizer(opt_cfg);
      std::cout << "cost " << r.cost << '\n';
    }
  } catch (const santree::ConfigError& e) {
    return report(e, santree::kExitConfig);
  } catch (const santree::WorkloadError& e) {
    return report(e, santree::kExitWorkload);
  } catch (const santree::InvariantError& e) {
    return report(e, santree::kExitInvariant);
  } catch (const std::invalid_argument& e) {
    return report(e, santree::kExitConfig);
  } catch (const std::exception& e) {
    return report(e, santree::kExitWorkload);
  }
  return 0;
}
