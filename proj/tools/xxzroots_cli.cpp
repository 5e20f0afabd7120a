// Command-line driver: xxzroots <subcommand> --config FILE [--out FILE] [--seed N] [--tol X] [--cap D]
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "xxzroots/cli/run.hpp"

namespace {

int emit(const xxzroots::cli::json& report, const std::string& out_path) {
  // Serialize first so a failure never leaves half a document behind.
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text << std::flush;
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return 1;
  }
  f << text;
  return f.good() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace xxzroots::cli;
  CLI::App app{"Bethe ansatz and root-of-unity degeneracy checks for the inhomogeneous XXZ chain"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::size_t cap = 0;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "report path (default: stdout)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--tol", tol, "residual tolerance (overrides the default)")->check(CLI::PositiveNumber);
    sub->add_option("--cap", cap, "Hilbert space dimension cap")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kPrecondition;
  }
  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();

  Overrides ov;
  if (chosen->count("--seed")) ov.seed = seed;
  if (chosen->count("--tol")) ov.tol = tol;
  if (chosen->count("--cap")) ov.cap = cap;

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    std::ifstream in(config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    outcome = run(name, parse_config(buf.str()), ov);
  } catch (const ConfigError& e) {
    outcome.report = {{"format_version", kFormatVersion},
                      {"subcommand", name},
                      {"status", "precondition_failed"},
                      {"error", e.what()},
                      {"error_path", e.path()},
                      {"notices", json::array()},
                      {"results", json::object()},
                      {"residuals", json::object()},
                      {"checks", json::array()}};
    outcome.code = kPrecondition;
  } catch (const std::exception& e) {
    outcome.report = {{"format_version", kFormatVersion},
                      {"subcommand", name},
                      {"status", "internal_error"},
                      {"error", e.what()},
                      {"notices", json::array()},
                      {"results", json::object()},
                      {"residuals", json::object()},
                      {"checks", json::array()}};
    outcome.code = kInternal;
  }
  outcome.report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (outcome.report.contains("error")) std::cerr << "xxzroots " << name << ": " << outcome.report["error"].get<std::string>() << "\n";
  if (emit(outcome.report, out_path) != 0) return kInternal;
  return outcome.code;
}
