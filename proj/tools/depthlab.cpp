#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "depthlab/acceptance.hpp"
#include "depthlab/harness.hpp"
#include "depthlab/parallel.hpp"

namespace {

using namespace depthlab;

void print_problems(const std::vector<Assertion>& assertions) {
  for (const Assertion& a : assertions) {
    if (a.status == AssertionStatus::kPass) continue;
    std::cerr << "  " << to_string(a.status) << ": " << a.name;
    if (a.status == AssertionStatus::kFail) {
      std::cerr << " measured " << format_double(a.measured) << " " << a.relation << " " << format_double(a.bound);
    }
    if (!a.detail.empty()) std::cerr << " (" << a.detail << ")";
    std::cerr << "\n";
  }
}

int command_run(const std::string& path, const std::optional<std::string>& out, std::optional<std::uint64_t> seed) {
  ExperimentConfig config = load_config(path);
  if (seed) config.seed = *seed;
  const std::string dir = out.value_or(config.output_dir);
  std::cerr << "run " << experiment_name(config.experiment) << " on " << kind_name(config.measure) << ", seed "
            << config.seed << ", config " << config_hash(config) << ", threads " << default_threads() << "\n";
  const RunRecord record = run(config, [](const std::string& m) { std::cerr << "  " << m << "\n"; });
  const std::vector<std::string> files = emit(record, dir, config.formats);
  print_problems(record.assertions);
  for (const std::string& f : files) std::cout << f << "\n";
  std::cerr << record.count(AssertionStatus::kPass) << " passed, " << record.count(AssertionStatus::kFail)
            << " failed, " << record.count(AssertionStatus::kSkipped) << " skipped";
  if (record.partial) std::cerr << "; partial run: " << record.error;
  std::cerr << "\n";
  return record.all_passed() ? 0 : 1;
}

int command_verify(const std::string& suite, const std::optional<std::string>& out,
                   std::optional<std::uint64_t> seed) {
  AcceptanceOptions options;
  if (seed) options.seed = *seed;
  options.progress = [](const std::string& m) { std::cerr << "  " << m << "\n"; };
  std::vector<CriterionResult> results;
  bool ok = true;
  for (const int id : suite_criteria(suite)) {
    results.push_back(run_criterion(id, options));
    print_problems(results.back().assertions);
    std::cout << results.back().line() << std::endl;
    ok = ok && results.back().passed();
  }
  if (out) {
    for (const std::string& f : emit(acceptance_record(suite, results, options.seed), *out, {"csv", "json"})) {
      std::cerr << "wrote " << f << "\n";
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depthlab: half-space depth and random polytope experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", depthlab::artifact_version());

  std::string config_path, suite;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("config", config_path, "Config file path")->required();
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run acceptance criteria; exit 0 iff all pass");
  verify_cmd->add_option("suite", suite, "acceptance, all, a criterion slug, or criterion-<k>")->required();
  for (CLI::App* cmd : {run_cmd, verify_cmd}) {
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--threads", threads, "Worker threads (default: DEPTHLAB_THREADS, else 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Override the configured seed");
  }

  CLI11_PARSE(app, argc, argv);
  if (threads) depthlab::set_default_threads(*threads);
  try {
    if (*run_cmd) return command_run(config_path, out, seed);
    return command_verify(suite, out, seed);
  } catch (const depthlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case depthlab::Errc::kConfig:
      case depthlab::Errc::kInvalidArgument: return 2;
      case depthlab::Errc::kIo: return 3;
      default: return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
