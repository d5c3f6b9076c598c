#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dicke/errors.hpp"

int main(int argc, char** argv) {
  using namespace dicke::cli;

  CLI::App app{"Selective-transition state synthesis on the symmetric Dicke ladder"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> frame;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  const std::pair<const char*, const char*> commands[] = {
      {"compile", "Compile the target into a pulse schedule"},
      {"simulate", "Compile and integrate the full ladder dynamics"},
      {"budget", "Decoherence and leakage error budget"},
      {"validate", "Check the ladder reduction against the 2^N product space"},
      {"cavity", "Compare the cavity model with its dispersive reduction"},
      {"sweep", "Run a command over a parameter grid"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--frame", frame, "lab or rotating")->check(CLI::IsMember({"lab", "rotating"}));
    sub->add_option("--seed", seed, "Seed for random schedules and targets");
    sub->add_option("--jobs", jobs, "Sweep workers")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    config = load_config(config_path);
    if (frame) config.frame = parse_frame(*frame);
  } catch (const dicke::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed) config.seed = *seed;
  if (jobs) config.jobs = *jobs;
  const std::filesystem::path dir = out_dir.value_or(config.out_dir);

  try {
    const auto result = run_guarded(command, config, dir, config.jobs);
    (result.exit_code == kExitOk ? std::cout : std::cerr) << result.summary;
    write_outputs(dir, result);
    for (const auto& file : result.files) std::cout << "wrote " << (dir / file.first).string() << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
