#include <CLI11.hpp>

#include "rbffd/rbffd.hpp"

namespace {

rbffd::RunConfig load_config(const std::string& config_path, long long seed, int threads) {
  rbffd::RunConfig cfg;
  if (!config_path.empty()) cfg = rbffd::parse_config_file(config_path);
  if (seed >= 0) cfg.seed = static_cast<unsigned long long>(seed);
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RBF-FD solver for 2D elasticity and von Mises elasto-plasticity"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "key = value configuration file");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--threads", threads, "override the configured thread count");
  };

  auto* solve = app.add_subcommand("solve", "run one incremental solve");
  add_common(solve, true);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, true);
  auto* gen = app.add_subcommand("gen-nodes", "generate the node arrangement only");
  add_common(gen, true);
  auto* check = app.add_subcommand("check", "run the built-in invariant suite");
  add_common(check, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return rbffd::run_solve(load_config(config_path, seed, threads), out_dir);
    if (sweep->parsed())
      return rbffd::run_sweep_cmd(load_config(config_path, seed, threads), out_dir);
    if (gen->parsed())
      return rbffd::run_gen_nodes(load_config(config_path, seed, threads), out_dir);
    if (check->parsed()) return rbffd::run_check(seed >= 0 ? seed : 12345);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
