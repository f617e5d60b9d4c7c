#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "plaque/config.hpp"

using namespace plaque;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_message(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("paper-pars preset") {
  const auto c = preset_config("paper-pars");
  const auto& p = c.params;
  CHECK(p.beta == 0.2);
  CHECK(p.zeta == 2.0);
  CHECK(p.mu == 2.01);
  CHECK(p.tau == 0.5);
  CHECK(p.eta == 1.0);
  CHECK(p.phi == 1.0);
  CHECK(p.delta == 0.1);
  CHECK(p.Theta == 30.0);
  CHECK(p.Xi == 0.02);
  CHECK(p.Omega == 0.001);
  CHECK(c.grid.L == doctest::Approx(7.0 * std::numbers::pi));
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset_config(name));
}

TEST_CASE("empty text and empty sections are valid") {
  const auto c = parse_config_text("");
  CHECK(c.preset == "paper-pars");
  CHECK_NOTHROW(parse_config_text("[sweep]\n"));
  CHECK_NOTHROW(parse_config_text("# comment\n; another\n\n[run]\n"));
}

TEST_CASE("values are parsed into their sections") {
  const auto c = parse_config_text(
      "preset = regime-frozen\n"
      "[params]\n"
      "theta = 0.4  # inline comment\n"
      "[grid]\n"
      "L = 5 pi\n"
      "N = 128\n"
      "[run]\n"
      "t_end = 12.5\n"
      "seed = 18446744073709551615\n"
      "record = E, R\n"
      "scheme = central\n"
      "[sweep]\n"
      "eps = 0.2, 0.1\n");
  CHECK(c.params.xi == 16.5);
  CHECK(c.params.theta == 0.4);
  CHECK(c.grid.L == doctest::Approx(5.0 * std::numbers::pi));
  CHECK(c.grid.N == 128);
  CHECK(c.run.t_end == 12.5);
  CHECK(c.run.seed == 18446744073709551615ULL);
  CHECK(c.run.record == std::vector<Component>{kE, kR});
  CHECK(c.run.scheme == ChemotaxisScheme::Central);
  CHECK(c.sweep.eps == std::vector<double>{0.2, 0.1});
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_line("[run]\nt_end = 1\n\nt_end = 2\n") == 4);
  const auto dup = error_message("[run]\nt_end = 1\n\nt_end = 2\n");
  CHECK(dup.find("line 2") != std::string::npos);
  CHECK(dup.find("line 4") != std::string::npos);
  CHECK(error_line("[run]\nbogus = 1\n") == 2);
  CHECK(error_line("[grid]\nN = 12x\n") == 2);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("[run]\nno equals sign\n") == 2);
  CHECK(error_line("[params]\ntheta = 0.4\n[dimensional]\nd2 = 0.3\n") > 0);
  CHECK(error_line("[params]\npreset = none\nbeta = 0.2\n") == 2);
  CHECK(error_message("[params]\npreset = none\nbeta = 0.2\n").find("missing required key") !=
        std::string::npos);
}

TEST_CASE("a fully specified block under preset = none") {
  const std::string text =
      "[params]\npreset = none\nbeta = 0.2\nzeta = 2\nmu = 2.01\ndelta = 0.1\ntau = 0.5\n"
      "xi = 6\neta = 1\nphi = 1\ntheta = 0.42\nTheta = 30\nOmega = 0.001\nXi = 0.02\n";
  const auto c = parse_config_text(text);
  CHECK(c.params.mu == 2.01);
}

TEST_CASE("theta and xi overrides on both parameter blocks") {
  auto c = preset_config("paper-pars");
  c.set_theta(0.45);
  c.set_xi(9.0);
  CHECK(c.model().theta == 0.45);
  CHECK(c.model().xi == 9.0);
  auto d = preset_config("paper-dimensional");
  d.set_theta(0.45);
  d.set_xi(9.0);
  CHECK(d.model().theta == doctest::Approx(0.45));
  CHECK(d.model().xi == doctest::Approx(9.0));
}

TEST_CASE("JSON round trip and file dispatch") {
  auto c = parse_config_text("preset = regime-mixed\n[run]\nrecord = E, A\nseed = 7\n");
  const auto j = to_json(c);
  CHECK(to_json(parse_config_json(j)) == j);
  CHECK(to_json(parse_config_json(nlohmann::json{{"config", j}})) == j);
  auto d = preset_config("paper-dimensional");
  CHECK(to_json(parse_config_json(to_json(d))) == to_json(d));

  const auto dir = std::filesystem::temp_directory_path() / "plaque_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.json") << j.dump();
    std::ofstream(dir / "a.ini") << "[run]\nt_end = 3\n";
  }
  CHECK(to_json(parse_config(dir / "a.json")) == j);
  CHECK(parse_config(dir / "a.ini").run.t_end == 3.0);
  CHECK_THROWS_AS(parse_config(dir / "missing.ini"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(nlohmann::json{{"run", {{"bogus", 1}}}}), ConfigError);
  std::filesystem::remove_all(dir);
}
