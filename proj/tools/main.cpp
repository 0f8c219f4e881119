#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "proxeig/cli/commands.hpp"
#include "proxeig/cli/config.hpp"
#include "proxeig/error.hpp"
#include "proxeig/io.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool no_timing = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--set", f.overrides, "Override a config value, e.g. rule.c=0.5")
      ->take_all()
      ->allow_extra_args(false);
  sub->add_option("--out", f.out_dir, "Output directory");
  sub->add_option("--jobs", f.jobs, "Worker threads for independent runs");
  sub->add_option("--seed", f.seed, "Override every seed in the config");
  sub->add_flag("--no-timing", f.no_timing, "Write wall_ms as 0 so reruns are byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear eigenproblems via proximal power iterations"};
  app.require_subcommand(1);
  CommonFlags flags;
  for (const auto& name : proxeig::cli::command_names()) add_common(app.add_subcommand(name), flags);
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  nlohmann::json config = nlohmann::json::object();
  try {
    if (!flags.config_path.empty()) config = proxeig::io::read_json(flags.config_path);
    for (const auto& o : flags.overrides) proxeig::cli::apply_override(config, o);
  } catch (const proxeig::Error& e) {
    std::cerr << nlohmann::json{{"error", proxeig::to_string(e.kind())}, {"message", e.what()}}.dump()
              << '\n';
    return 1;
  }
  proxeig::cli::RunOptions opts;
  opts.out_dir = flags.out_dir;
  opts.jobs = flags.jobs;
  opts.seed = flags.seed;
  opts.record_timing = !flags.no_timing;
  return proxeig::cli::run_command(command, config, opts, std::cerr);
}
