#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plaque/commands.hpp"
#include "plaque/config.hpp"
#include "plaque/error.hpp"
#include "plaque/output.hpp"

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::optional<double> theta;
  std::optional<double> xi;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> threads;
};

const std::map<std::string, std::string> kDescriptions = {
    {"equilibrium", "interior equilibrium and admissibility bounds"},
    {"stability", "homogeneous and Turing stability report"},
    {"dispersion", "dispersion curve and discrete mode growth rates"},
    {"bifurcation", "regime map over a (theta, xi) grid"},
    {"simulate", "reaction-diffusion-chemotaxis run with space-time output"},
    {"kinetic-limit", "kinetic solver convergence to the macroscopic limit"},
    {"ode", "spatially homogeneous trajectory and Hopf period"},
    {"appendix-check", "population closed forms and Euler positivity step"},
};

int fail(const std::string& command, const std::string& kind, const std::string& message,
         const std::filesystem::path& out) {
  const auto j = plaque::error_json(kind, message, command);
  std::cerr << j.dump(2) << '\n';
  std::error_code ec;
  if (std::filesystem::is_directory(out, ec)) {
    std::ofstream f(out / "error.json");
    if (f) f << j.dump(2) << '\n';
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leukocyte plaque model: stability analysis, simulation and kinetic checks"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;

  for (const auto& name : plaque::command_names()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", flags.config, "INI file or JSON sidecar");
    sub->add_option("--preset", flags.preset, "starting parameter set");
    sub->add_option("--theta", flags.theta, "override theta");
    sub->add_option("--xi", flags.xi, "override xi");
    sub->add_option("--seed", flags.seed, "override the random seed");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::filesystem::path out(flags.out);
  try {
    const std::optional<std::string> preset =
        flags.preset.empty() ? std::nullopt : std::optional<std::string>(flags.preset);
    plaque::RunConfig cfg = flags.config.empty()
                                ? plaque::preset_config(preset.value_or("paper-pars"))
                                : plaque::parse_config(flags.config, preset);
    if (!flags.config.empty()) {
      std::ifstream f(flags.config);
      std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
      const auto first = text.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && text[first] == '{') {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("command") && j["command"] != chosen) {
          throw plaque::ConfigError(0, "sidecar was written by '" + j["command"].get<std::string>() +
                                           "', not '" + chosen + "'");
        }
      }
    }
    if (flags.theta) cfg.set_theta(*flags.theta);
    if (flags.xi) cfg.set_xi(*flags.xi);
    if (flags.seed) cfg.run.seed = *flags.seed;
    if (flags.threads) cfg.run.threads = *flags.threads;
    const auto result = plaque::run_command(chosen, cfg, out);
    std::cout << plaque::rounded(result.summary).dump(2) << '\n';
    if (result.partial) {
      std::cerr << "warning: outputs are partial (see the report)\n";
      return 3;
    }
    return 0;
  } catch (const plaque::Error& e) {
    return fail(chosen, e.kind(), e.what(), out);
  } catch (const std::exception& e) {
    return fail(chosen, "internal", e.what(), out);
  }
}
