#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resochain/io.hpp"

using namespace resochain;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config hash is deterministic and key-order independent") {
  const auto a = json::parse(R"({"scan": {"grid": 10, "lambda_max": 3}, "library": "standard"})");
  const auto b = json::parse(R"({"library": "standard", "scan": {"lambda_max": 3, "grid": 10}})");
  const auto c = json::parse(R"({"library": "standard", "scan": {"lambda_max": 3, "grid": 11}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(json::object()) == "08f44b07b5901a25");
}

TEST_CASE("doubles print in shortest round-trip form") {
  for (double x : {0.1, 1.0 / 3.0, 4.788695317962102, 1e-300, -2.5}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("tridiagonal round-trip") {
  const TridiagonalXd m(Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector2d(-0.5, 0.25));
  const auto back = tridiagonal_from_json(json::parse(to_json(m).dump()));
  CHECK(back.diag == m.diag);
  CHECK(back.offdiag == m.offdiag);
  CHECK_THROWS_AS(tridiagonal_from_json(json::parse(R"({"diag": [1, 2], "offdiag": []})")), ValidationError);
  CHECK_THROWS_AS(tridiagonal_from_json(json::parse(R"({"diag": [1], "offdiag": [], "x": 1})")), ValidationError);
}

TEST_CASE("library round-trip") {
  const auto lib = standard_library();
  CHECK(library_from_json(json::parse(to_json(lib).dump())) == lib);
  CHECK(library_from_json(json("standard")) == lib);

  const auto uniform = library_from_json(json::parse(
      R"({"blocks": [[{"length": 1, "spacing": 2}], [{"length": 1, "spacing": 1, "wave_speed": 2}]]})"));
  CHECK(uniform.probabilities()[0] == 0.5);
  CHECK(uniform.block(1)[0].wave_speed == 1.0);

  CHECK_THROWS_AS(library_from_json(json::parse(R"({"blocks": [[{"length": 1, "spacing": 2, "speed": 1}]]})")),
                  ValidationError);
  CHECK_THROWS_AS(library_from_json(json::parse(R"({"blocks": [[{"length": -1, "spacing": 2}]]})")),
                  ValidationError);
  CHECK_THROWS_AS(library_from_json(json("mystery")), ValidationError);
}

TEST_CASE("sequence round-trip keeps provenance") {
  const auto lib = standard_library();
  for (const auto& seq : {sample_iid(lib, 20, 42), pseudo_ergodic_word(2, 3), BlockSequence{{1, 2, 2}}}) {
    CHECK(sequence_from_json(json::parse(to_json(seq).dump())) == seq);
  }
  CHECK_THROWS_AS(sequence_from_json(json::parse(R"({"labels": [1], "provenance": {"kind": "other"}})")),
                  ValidationError);
}

TEST_CASE("band report round-trip and CSV") {
  const auto report = scan(standard_library(), 0.0, 4.0, {200});
  const OutputStamp stamp{"0123456789abcdef"};
  const auto j = to_json(report, stamp);
  CHECK(j.at("config_hash") == "0123456789abcdef");
  CHECK(j.at("version") == kToolVersion);
  const auto back = band_report_from_json(json::parse(j.dump()));
  REQUIRE(back.intervals.size() == report.intervals.size());
  for (std::size_t k = 0; k < report.intervals.size(); ++k) {
    CHECK(back.intervals[k].lo == report.intervals[k].lo);
    CHECK(back.intervals[k].hi == report.intervals[k].hi);
    CHECK(back.intervals[k].verdict == report.intervals[k].verdict);
    CHECK(back.intervals[k].non_hyperbolic == report.intervals[k].non_hyperbolic);
  }
  CHECK(back.endpoints == report.endpoints);

  std::ostringstream os;
  write_bands_csv(os, report, stamp);
  const auto lines = lines_of(os.str());
  REQUIRE(lines.size() == report.intervals.size() + 2);
  CHECK(lines[0] == "# config_hash=0123456789abcdef version=0.1.0");
  CHECK(lines[1] == "lambda_lo,lambda_hi,verdict");
  CHECK(lines[2].rfind("0,", 0) == 0);
}

TEST_CASE("spectrum and eigenvector CSV") {
  const OutputStamp stamp{"ffffffffffffffff"};
  std::ostringstream os;
  write_spectrum_csv(os, {{7, 3, {0, 0.0, 0.0, false}}, {7, 3, {1, 1.5, 0.5, true}}}, stamp);
  const auto lines = lines_of(os.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "seed,M,index,lambda,distance_to_sigma,flag");
  CHECK(lines[2] == "7,3,0,0,0,0");
  CHECK(lines[3] == "7,3,1,1.5,0.5,1");

  std::ostringstream ev;
  write_eigenvector_csv(ev, Eigen::Vector2d(0.6, -0.8), stamp);
  const auto elines = lines_of(ev.str());
  REQUIRE(elines.size() == 4);
  CHECK(elines[1] == "index,value");
  CHECK(elines[3] == "1,-0.8");
}

TEST_CASE("edge mode JSON") {
  EdgeMode m;
  m.lambda = 4.5;
  m.indicator_residual = 1e-12;
  m.decay_rate = 0.4;
  m.decay_fit_residual = 0.05;
  m.support = 12;
  const auto j = to_json(std::vector<EdgeModeRecord>{{"left", m}}, {"00"});
  REQUIRE(j.at("edge_modes").size() == 1);
  CHECK(j.at("edge_modes")[0].at("side") == "left");
  CHECK(j.at("edge_modes")[0].at("lambda") == 4.5);
  CHECK(j.at("edge_modes")[0].at("support") == 12);
  CHECK(j.at("config_hash") == "00");
}

TEST_CASE("run config defaults and validation") {
  const auto c = run_config_from_json(json::object());
  CHECK(c.library == standard_library());
  CHECK(c.scan.grid == 1000);
  CHECK(c.spectrum.seeds == std::vector<std::uint64_t>{1});
  CHECK(c.output_dir == ".");

  const auto d = run_config_from_json(json::parse(
      R"({"scan": {"grid": 50}, "edge": {"gaps": [[1.1, 1.9]]}, "sample": {"mode": "pseudo_ergodic", "depth": 4}})"));
  CHECK(d.scan.grid == 50);
  REQUIRE(d.edge.gaps.size() == 1);
  CHECK(d.edge.gaps[0].lo == 1.1);
  CHECK(d.sample.depth == 4);

  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scna": {}})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scan": {"grid": "many"}})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"scan": {"tolerance": -1}})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"sample": {"mode": "markov"}})")), ValidationError);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"edge": {"gaps": [[2, 1]]}})")), ValidationError);
}

TEST_CASE("library file resolves against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "resochain_test_io";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "lib.json") << to_json(standard_library()).dump();
    std::ofstream(dir / "run.json") << R"({"library": {"file": "lib.json"}, "output_dir": "out"})";
  }
  const auto c = load_run_config((dir / "run.json").string());
  CHECK(c.library == standard_library());
  CHECK(c.raw.at("output_dir") == "out");
  CHECK_THROWS_AS(load_run_config((dir / "missing.json").string()), ValidationError);
  std::filesystem::remove_all(dir);
}
