#include "resochain/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "resochain/errors.hpp"

namespace resochain {

namespace {

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

double positive(double x, const std::string& what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError(what + " must be positive and finite");
  return x;
}

void write_stamp(std::ostream& os, const OutputStamp& stamp) {
  os << "# config_hash=" << stamp.config_hash << " version=" << stamp.version << "\n";
}

json stamp_json(const OutputStamp& stamp) {
  return {{"config_hash", stamp.config_hash}, {"version", stamp.version}};
}

}  // namespace

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

json to_json(const TridiagonalXd& m) {
  return {{"diag", std::vector<double>(m.diag.data(), m.diag.data() + m.diag.size())},
          {"offdiag", std::vector<double>(m.offdiag.data(), m.offdiag.data() + m.offdiag.size())}};
}

TridiagonalXd tridiagonal_from_json(const json& j) {
  require_keys(j, "tridiagonal", {"diag", "offdiag"});
  const auto d = j.at("diag").get<std::vector<double>>();
  const auto e = j.at("offdiag").get<std::vector<double>>();
  return {Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())),
          Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()))};
}

BlockLibrary library_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "standard") return standard_library();
    throw ValidationError("unknown named library '" + j.get<std::string>() + "'");
  }
  require_keys(j, "library", {"blocks", "probabilities"});
  if (!j.contains("blocks") || !j.at("blocks").is_array()) {
    throw ValidationError("library.blocks must be an array of blocks");
  }
  std::vector<Block> blocks;
  for (const auto& jb : j.at("blocks")) {
    if (!jb.is_array()) throw ValidationError("each block must be an array of resonators");
    std::vector<Resonator> rs;
    for (const auto& jr : jb) {
      require_keys(jr, "resonator", {"length", "spacing", "wave_speed"});
      try {
        rs.emplace_back(jr.at("length").get<double>(), jr.at("spacing").get<double>(),
                        jr.value("wave_speed", 1.0));
      } catch (const json::exception& e) {
        throw ValidationError(std::string("resonator: ") + e.what());
      }
    }
    blocks.emplace_back(std::move(rs));
  }
  if (!j.contains("probabilities")) return BlockLibrary(std::move(blocks));
  return BlockLibrary(std::move(blocks), get_or<std::vector<double>>(j, "probabilities", {}, "library"));
}

json to_json(const BlockLibrary& library) {
  json blocks = json::array();
  for (const auto& b : library.blocks()) {
    json jb = json::array();
    for (const auto& r : b.resonators()) {
      jb.push_back({{"length", r.length}, {"spacing", r.spacing}, {"wave_speed", r.wave_speed}});
    }
    blocks.push_back(jb);
  }
  return {{"blocks", blocks},
          {"probabilities", std::vector<double>(library.probabilities().begin(), library.probabilities().end())}};
}

json to_json(const BlockSequence& seq) {
  json prov;
  if (const auto* iid = std::get_if<IidSample>(&seq.provenance)) {
    prov = {{"kind", "iid"}, {"seed", iid->seed}};
  } else if (const auto* pe = std::get_if<PseudoErgodicWord>(&seq.provenance)) {
    prov = {{"kind", "pseudo_ergodic"}, {"depth", pe->depth}};
  } else {
    prov = {{"kind", "explicit"}};
  }
  return {{"labels", seq.labels}, {"provenance", prov}};
}

BlockSequence sequence_from_json(const json& j) {
  require_keys(j, "sequence", {"labels", "provenance"});
  BlockSequence seq;
  seq.labels = j.at("labels").get<std::vector<int>>();
  if (j.contains("provenance")) {
    const auto& p = j.at("provenance");
    const auto kind = p.value("kind", std::string("explicit"));
    if (kind == "iid") {
      seq.provenance = IidSample{p.at("seed").get<std::uint64_t>()};
    } else if (kind == "pseudo_ergodic") {
      seq.provenance = PseudoErgodicWord{p.at("depth").get<int>()};
    } else if (kind != "explicit") {
      throw ValidationError("unknown provenance kind '" + kind + "'");
    }
  }
  return seq;
}

json to_json(const BandReport& report, const OutputStamp& stamp) {
  json intervals = json::array();
  for (const auto& iv : report.intervals) {
    intervals.push_back({{"lambda_lo", iv.lo},
                         {"lambda_hi", iv.hi},
                         {"verdict", std::string(to_string(iv.verdict))},
                         {"non_hyperbolic", iv.non_hyperbolic}});
  }
  json out = stamp_json(stamp);
  out["lambda_min"] = report.lambda_min;
  out["lambda_max"] = report.lambda_max;
  out["endpoints"] = report.endpoints;
  out["intervals"] = intervals;
  return out;
}

BandReport band_report_from_json(const json& j) {
  BandReport r;
  r.lambda_min = j.at("lambda_min").get<double>();
  r.lambda_max = j.at("lambda_max").get<double>();
  r.endpoints = j.at("endpoints").get<std::vector<double>>();
  for (const auto& ji : j.at("intervals")) {
    r.intervals.push_back({ji.at("lambda_lo").get<double>(), ji.at("lambda_hi").get<double>(),
                           verdict_from_string(ji.at("verdict").get<std::string>()),
                           ji.value("non_hyperbolic", std::vector<int>{})});
  }
  return r;
}

void write_bands_csv(std::ostream& os, const BandReport& report, const OutputStamp& stamp) {
  write_stamp(os, stamp);
  os << "lambda_lo,lambda_hi,verdict\n";
  for (const auto& iv : report.intervals) {
    os << format_double(iv.lo) << ',' << format_double(iv.hi) << ',' << to_string(iv.verdict) << "\n";
  }
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows, const OutputStamp& stamp) {
  write_stamp(os, stamp);
  os << "seed,M,index,lambda,distance_to_sigma,flag\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << r.blocks << ',' << r.entry.index << ',' << format_double(r.entry.lambda) << ','
       << format_double(r.entry.distance) << ',' << (r.entry.flagged ? 1 : 0) << "\n";
  }
}

json to_json(const std::vector<EdgeModeRecord>& modes, const OutputStamp& stamp) {
  json list = json::array();
  for (const auto& m : modes) {
    list.push_back({{"side", m.side},
                    {"lambda", m.mode.lambda},
                    {"residual", m.mode.indicator_residual},
                    {"decay_rate", m.mode.decay_rate},
                    {"decay_fit_residual", m.mode.decay_fit_residual},
                    {"support", m.mode.support}});
  }
  json out = stamp_json(stamp);
  out["edge_modes"] = list;
  return out;
}

void write_eigenvector_csv(std::ostream& os, const Eigen::VectorXd& v, const OutputStamp& stamp) {
  write_stamp(os, stamp);
  os << "index,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << i << ',' << format_double(v(i)) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

RunConfig run_config_from_json(const json& j, const std::string& base_dir) {
  require_keys(j, "config", {"library", "scan", "spectrum", "edge", "sample", "output_dir"});
  RunConfig c;
  c.raw = j;
  if (j.contains("library")) {
    const auto& lib = j.at("library");
    if (lib.is_object() && lib.contains("file")) {
      require_keys(lib, "library", {"file"});
      std::filesystem::path p = lib.at("file").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      c.library = library_from_json(read_json_file(p.string()));
    } else {
      c.library = library_from_json(lib);
    }
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    require_keys(s, "scan", {"lambda_min", "lambda_max", "grid", "tolerance"});
    c.scan.lambda_min = get_or(s, "lambda_min", c.scan.lambda_min, "scan");
    c.scan.lambda_max = get_or(s, "lambda_max", c.scan.lambda_max, "scan");
    c.scan.grid = get_or(s, "grid", c.scan.grid, "scan");
    c.scan.tolerance = positive(get_or(s, "tolerance", c.scan.tolerance, "scan"), "scan.tolerance");
    if (!(c.scan.lambda_min >= 0.0) || !(c.scan.lambda_max > c.scan.lambda_min)) {
      throw ValidationError("scan range must satisfy 0 <= lambda_min < lambda_max");
    }
    if (c.scan.grid < 2) throw ValidationError("scan.grid must be at least 2");
  }
  if (j.contains("spectrum")) {
    const auto& s = j.at("spectrum");
    require_keys(s, "spectrum", {"blocks", "seeds", "eigen_tolerance", "inclusion_tolerance", "edge_grid"});
    c.spectrum.blocks = get_or(s, "blocks", c.spectrum.blocks, "spectrum");
    c.spectrum.seeds = get_or(s, "seeds", c.spectrum.seeds, "spectrum");
    c.spectrum.eigen_tolerance =
        positive(get_or(s, "eigen_tolerance", c.spectrum.eigen_tolerance, "spectrum"), "spectrum.eigen_tolerance");
    c.spectrum.inclusion_tolerance = positive(
        get_or(s, "inclusion_tolerance", c.spectrum.inclusion_tolerance, "spectrum"), "spectrum.inclusion_tolerance");
    c.spectrum.edge_grid = get_or(s, "edge_grid", c.spectrum.edge_grid, "spectrum");
  }
  if (j.contains("edge")) {
    const auto& s = j.at("edge");
    require_keys(s, "edge", {"blocks", "seed", "grid", "gaps", "gap_margin"});
    c.edge.blocks = get_or(s, "blocks", c.edge.blocks, "edge");
    c.edge.seed = get_or(s, "seed", c.edge.seed, "edge");
    c.edge.grid = get_or(s, "grid", c.edge.grid, "edge");
    c.edge.gap_margin = get_or(s, "gap_margin", c.edge.gap_margin, "edge");
    if (!(c.edge.gap_margin >= 0.0 && c.edge.gap_margin < 0.5)) {
      throw ValidationError("edge.gap_margin must lie in [0, 0.5)");
    }
    if (c.edge.blocks < 1) throw ValidationError("edge.blocks must be at least 1");
    if (c.edge.grid < 2) throw ValidationError("edge.grid must be at least 2");
    for (const auto& g : get_or(s, "gaps", std::vector<std::vector<double>>{}, "edge")) {
      if (g.size() != 2 || !(g[1] > g[0])) throw ValidationError("edge.gaps entries must be [lo, hi] with lo < hi");
      c.edge.gaps.push_back({g[0], g[1]});
    }
  }
  if (j.contains("sample")) {
    const auto& s = j.at("sample");
    require_keys(s, "sample", {"mode", "blocks", "seed", "depth"});
    c.sample.mode = get_or(s, "mode", c.sample.mode, "sample");
    c.sample.blocks = get_or(s, "blocks", c.sample.blocks, "sample");
    c.sample.seed = get_or(s, "seed", c.sample.seed, "sample");
    c.sample.depth = get_or(s, "depth", c.sample.depth, "sample");
    if (c.sample.mode != "iid" && c.sample.mode != "pseudo_ergodic") {
      throw ValidationError("sample.mode must be 'iid' or 'pseudo_ergodic'");
    }
    if (c.sample.depth < 1) throw ValidationError("sample.depth must be at least 1");
  }
  if (j.contains("output_dir")) c.output_dir = get_or(j, "output_dir", c.output_dir, "config");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const auto j = read_json_file(path);
  return run_config_from_json(j, std::filesystem::path(path).parent_path().string());
}

}  // namespace resochain
