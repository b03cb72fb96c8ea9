#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace tinspec::cli;
  RunConfig cfg;
  cfg.format.clear();  // filled in per subcommand after parsing
  std::optional<std::uint64_t> seed_flag;

  CLI::App app{"Trace-inverse tools for stationary covariance sequences"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--cov", cfg.cov_path, "Covariance lags from a CSV or JSON file");
    sub->add_option("--c", cfg.cov_inline, "Covariance lags inline, e.g. \"1,0.6054,0.1324\"");
    sub->add_option("--format", cfg.format, "Output format: csv or json (complete defaults to json)");
    sub->add_option("--seed", seed_flag, "Solver seed (overrides TINSPEC_SEED)");
  };

  auto* tin = app.add_subcommand("tin", "Normalized Tin sequence M_n");
  common(tin);
  tin->add_option("--n", cfg.n_max, "Largest order (default: all lags)");

  auto* complete = app.add_subcommand("complete", "Extend a covariance prefix");
  common(complete);
  complete->add_option("--method", cfg.method, "maxent, mintin-step, mintin-greedy, mintin-rar or maxtin")
      ->capture_default_str();
  complete->add_option("--lags", cfg.n_lags, "Largest output lag")->capture_default_str();
  complete->add_option("--variant", cfg.variant, "MaxTin variant: comb or periodic")->capture_default_str();
  complete->add_option("--grid", cfg.n_grid, "Spectral grid size")->capture_default_str();
  complete->add_option("--tol", cfg.tolerance, "RAR fit tolerance relative to c_0")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Power spectral density on the grid");
  common(spectrum);
  spectrum->add_option("--grid", cfg.n_grid, "Grid size")->capture_default_str();
  spectrum->add_option("--model", cfg.model, "maxent, mintin-rar, finite or maxtin")->capture_default_str();
  spectrum->add_option("--ar", cfg.ar_path, "AR model JSON {\"a\": [...], \"sigma_w2\": ...}");
  spectrum->add_flag("--log", cfg.log_s, "Add a log_S column");
  spectrum->add_flag("--inv", cfg.inv_s, "Add an inv_S column");

  auto* subset = app.add_subcommand("subset-tin", "k-out-of-n averaged Tin");
  common(subset);
  subset->add_option("--k", cfg.k, "Subset size (default: every k)");
  subset->add_option("--matrix", cfg.matrix_path, "General covariance matrix (CSV rows or JSON)");
  subset->add_option("--samples", cfg.samples, "Samples when n exceeds the enumeration cap")->capture_default_str();

  auto* ma = app.add_subcommand("ma-match", "Finite-support admissible continuation");
  common(ma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.format.empty()) cfg.format = cfg.subcommand == "complete" ? "json" : "csv";
  try {
    cfg.seed = resolve_seed(seed_flag, std::getenv("TINSPEC_SEED"));
  } catch (const tinspec::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return run(cfg, std::cout, std::cerr);
}
