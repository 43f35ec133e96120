// Command-line front end: run / sweep / post over flat-file experiment
// configurations. Exit codes: 0 success, 2 partial sweep, 3 fatal.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tis/config.hpp"
#include "tis/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path output_root(const tis::ExperimentConfig& cfg) {
  if (const char* env = std::getenv("TIS_OUTPUT_ROOT"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(cfg.output_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static simulator for slab-like topologically interlocked structures"};
  app.require_subcommand(1);

  std::string config_path, run_id, post_dir, reference_csv;
  int jobs = 0;

  auto* run = app.add_subcommand("run", "execute a single run");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--id", run_id, "run id from the expanded grid");

  auto* sweep = app.add_subcommand("sweep", "execute every run in the grid, then aggregate");
  sweep->add_option("--config", config_path, "configuration file")->required();
  sweep->add_option("--jobs", jobs, "parallel runs (default: hardware)");

  auto* post = app.add_subcommand("post", "re-aggregate an output directory");
  post->add_option("--dir", post_dir, "output directory")->required();
  post->add_option("--reference", reference_csv, "digitized reference curve CSV for overlays");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = tis::parse_config(read_file(config_path));
      return tis::cmd_run(cfg, output_root(cfg), run_id);
    }
    if (sweep->parsed()) {
      const auto cfg = tis::parse_config(read_file(config_path));
      return tis::cmd_sweep(cfg, output_root(cfg), jobs);
    }
    if (post->parsed()) return tis::cmd_post(post_dir, reference_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
