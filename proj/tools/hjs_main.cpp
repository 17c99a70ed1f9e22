#include <iostream>

#include "CLI11.hpp"

#include "hjs/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lax-Oleinik regularization, singular characteristics and mountain-pass toolkit"};
  app.set_version_flag("--version", std::string(hjs::kToolVersion));

  hjs::RunOptions options;
  std::string scenario;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out;

  app.add_option("task", options.task, "fundamental | regularize | characteristic | mountainpass | verify")
      ->required()
      ->check(CLI::IsMember(hjs::task_names()));
  app.add_option("--scenario", scenario, "scenario JSON file")->required();
  app.add_option("--set", overrides, "override a scenario value, key.path=value (repeatable)")->allow_extra_args(false);
  app.add_option("--jobs", options.jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the scenario)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hjs::kExitValidation;
  }

  options.scenario = scenario;
  options.overrides = overrides;
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.out = out;

  const hjs::RunOutcome outcome = hjs::run(options);
  if (outcome.exit_code != hjs::kExitOk) std::cerr << "hjs " << options.task << ": " << outcome.message << "\n";
  else std::cout << "hjs " << options.task << ": ok, outputs in " << outcome.out_dir.string() << "\n";
  return outcome.exit_code;
}
