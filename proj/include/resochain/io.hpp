#pragma once

// JSON and CSV for the library's data types, plus the run-config schema the
// command-line tool reads. Every output carries a stamp with the config hash
// and tool version: a leading "# ..." line in CSV, top-level fields in JSON.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resochain/blocks.hpp"
#include "resochain/capacitance.hpp"
#include "resochain/classify.hpp"
#include "resochain/edge.hpp"
#include "resochain/finite.hpp"

namespace resochain {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputStamp {
  std::string config_hash;
  std::string version = kToolVersion;
};

/// FNV-1a (64-bit) over the compact dump of the config, as 16 hex digits.
std::string config_hash(const json& config);

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

json to_json(const TridiagonalXd& m);
TridiagonalXd tridiagonal_from_json(const json& j);

/// {"blocks": [[{"length", "spacing", "wave_speed"}, ...], ...], "probabilities": [...]}
/// Probabilities may be omitted for a uniform draw. The string "standard" names the standard library.
BlockLibrary library_from_json(const json& j);
json to_json(const BlockLibrary& library);

json to_json(const BlockSequence& seq);
BlockSequence sequence_from_json(const json& j);

json to_json(const BandReport& report, const OutputStamp& stamp);
BandReport band_report_from_json(const json& j);
/// Columns lambda_lo, lambda_hi, verdict.
void write_bands_csv(std::ostream& os, const BandReport& report, const OutputStamp& stamp);

struct SpectrumRow {
  std::uint64_t seed = 0;
  std::size_t blocks = 0;
  InclusionEntry entry;
};
/// Columns seed, M, index, lambda, distance_to_sigma, flag.
void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows, const OutputStamp& stamp);

struct EdgeModeRecord {
  std::string side;  // "left" or "right"
  EdgeMode mode;
};
json to_json(const std::vector<EdgeModeRecord>& modes, const OutputStamp& stamp);
/// Columns index, value.
void write_eigenvector_csv(std::ostream& os, const Eigen::VectorXd& v, const OutputStamp& stamp);

// Run configuration. Unknown keys are rejected so that a typo cannot silently
// fall back to a default.

struct ScanConfig {
  double lambda_min = 0.0;
  double lambda_max = 4.0;
  std::size_t grid = 1000;
  double tolerance = 1e-10;
};

struct SpectrumConfig {
  std::size_t blocks = 1000;
  std::vector<std::uint64_t> seeds{1};
  double eigen_tolerance = 1e-12;
  double inclusion_tolerance = 1e-8;
  std::size_t edge_grid = 200;
};

struct EdgeConfig {
  std::size_t blocks = 400;
  std::uint64_t seed = 1;
  std::size_t grid = 200;
  std::vector<GapInterval> gaps;  // empty: every certified gap of the scan, trimmed by gap_margin
  double gap_margin = 0.02;       // fraction of each scanned gap left out at either end
};

struct SampleConfig {
  std::string mode = "iid";  // "iid" or "pseudo_ergodic"
  std::size_t blocks = 100;
  std::uint64_t seed = 1;
  int depth = 3;
};

struct RunConfig {
  BlockLibrary library = standard_library();
  ScanConfig scan;
  SpectrumConfig spectrum;
  EdgeConfig edge;
  SampleConfig sample;
  std::string output_dir = ".";
  json raw;
};

/// Validates and fills defaults. Relative library file paths resolve against base_dir.
RunConfig run_config_from_json(const json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

json read_json_file(const std::string& path);

}  // namespace resochain
