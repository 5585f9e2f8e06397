// Command-line driver: one JSON config per run, subcommands scan, spectrum,
// edge and sample. Exit codes: 0 success, 1 numerical failure, 2 config error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "resochain/classify.hpp"
#include "resochain/edge.hpp"
#include "resochain/errors.hpp"
#include "resochain/finite.hpp"
#include "resochain/io.hpp"
#include "resochain/parallel.hpp"

namespace fs = std::filesystem;
using namespace resochain;

namespace {

struct Context {
  RunConfig config;
  OutputStamp stamp;
  fs::path out;
  int verbosity = 0;
  unsigned threads = 1;

  void log(const std::string& msg) const {
    if (verbosity > 0) std::cerr << msg << "\n";
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream os(out / name);
    if (!os) throw ValidationError("cannot write '" + (out / name).string() + "'");
    return os;
  }
};

BandReport run_scan(const Context& ctx, double lambda_max) {
  ScanOptions opt;
  opt.grid = ctx.config.scan.grid;
  opt.tolerance = ctx.config.scan.tolerance;
  opt.threads = ctx.threads;
  return scan(ctx.config.library, ctx.config.scan.lambda_min, lambda_max, opt);
}

std::vector<GapInterval> trimmed_gaps(const BandReport& report, double margin) {
  std::vector<GapInterval> out;
  for (const auto& iv : report.with_verdict(Verdict::CertifiedGap)) {
    const double pad = margin * iv.width();
    out.push_back({iv.lo + pad, iv.hi - pad});
  }
  return out;
}

void cmd_scan(const Context& ctx) {
  const auto report = run_scan(ctx, ctx.config.scan.lambda_max);
  ctx.log("scan: " + std::to_string(report.intervals.size()) + " intervals");
  auto csv = ctx.open("bands.csv");
  write_bands_csv(csv, report, ctx.stamp);
  ctx.open("bands.json") << to_json(report, ctx.stamp).dump(2) << "\n";
}

void cmd_spectrum(const Context& ctx) {
  const auto& sc = ctx.config.spectrum;
  std::vector<std::uint64_t> seeds = sc.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<FiniteSpectrumResult> results(sc.blocks == 0 ? 0 : seeds.size());
  parallel_for(results.size(), ctx.threads, [&](std::size_t k) {
    const auto seq = sample_iid(ctx.config.library, sc.blocks, seeds[k]);
    results[k] = finite_spectrum(ctx.config.library, seq, sc.eigen_tolerance, ctx.stamp.config_hash);
  });

  double top = ctx.config.scan.lambda_max;
  for (const auto& r : results) {
    if (!r.eigenvalues.eigenvalues.empty()) top = std::max(top, r.eigenvalues.eigenvalues.back() + 1e-6);
  }
  const BandReport report = results.empty() ? BandReport{} : run_scan(ctx, top);
  const auto gaps = trimmed_gaps(report, ctx.config.edge.gap_margin);

  std::vector<SpectrumRow> rows;
  json runs = json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    auto& r = results[k];
    const auto edges = finite_edge_lambdas(ctx.config.library, r.sequence, gaps, sc.edge_grid);
    const auto& inc = inclusion_check(r, report, edges.lambdas, sc.inclusion_tolerance);
    for (const auto& e : inc.entries) rows.push_back({seeds[k], sc.blocks, e});
    runs.push_back({{"seed", seeds[k]},
                    {"M", sc.blocks},
                    {"N", r.resonators},
                    {"flagged", inc.flagged},
                    {"edge_lambdas", edges.lambdas},
                    {"unresolved_edges", edges.unresolved}});
    ctx.log("spectrum: seed " + std::to_string(seeds[k]) + ", " + std::to_string(r.resonators) +
            " eigenvalues, " + std::to_string(inc.flagged) + " flagged");
  }
  auto csv = ctx.open("spectrum.csv");
  write_spectrum_csv(csv, rows, ctx.stamp);
  json summary = {{"config_hash", ctx.stamp.config_hash},
                  {"version", ctx.stamp.version},
                  {"inclusion_tolerance", sc.inclusion_tolerance},
                  {"runs", runs}};
  if (!results.empty() && results.front().inclusion) summary["note"] = results.front().inclusion->note;
  ctx.open("spectrum.json") << summary.dump(2) << "\n";
}

void cmd_edge(const Context& ctx) {
  const auto& ec = ctx.config.edge;
  const auto report = run_scan(ctx, ctx.config.scan.lambda_max);
  const auto gaps = ec.gaps.empty() ? trimmed_gaps(report, ec.gap_margin) : ec.gaps;
  const auto seq = sample_iid(ctx.config.library, ec.blocks, ec.seed);
  const auto right = right_chain(ctx.config.library, seq);

  std::vector<EdgeModeRecord> modes;
  for (const auto& gap : gaps) {
    for (auto& m : find_edge_modes(ctx.config.library, seq, gap, ec.grid)) modes.push_back({"left", std::move(m)});
    for (double root : indicator_roots(right, gap, ec.grid)) {
      modes.push_back({"right", reconstruct_edge_mode(right, root)});
    }
  }
  ctx.log("edge: " + std::to_string(modes.size()) + " edge modes");
  ctx.open("edge_modes.json") << to_json(modes, ctx.stamp).dump(2) << "\n";
  for (std::size_t k = 0; k < modes.size(); ++k) {
    auto csv = ctx.open("edge_mode_" + std::to_string(k) + ".csv");
    write_eigenvector_csv(csv, modes[k].mode.eigenvector, ctx.stamp);
  }
}

void cmd_sample(const Context& ctx) {
  const auto& s = ctx.config.sample;
  const int alphabet = static_cast<int>(ctx.config.library.size());
  const auto seq = s.mode == "iid" ? sample_iid(ctx.config.library, s.blocks, s.seed)
                                   : pseudo_ergodic_word(alphabet, s.depth);
  json out = {{"config_hash", ctx.stamp.config_hash}, {"version", ctx.stamp.version}, {"sequence", to_json(seq)}};
  ctx.open("sequence.json") << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of block-disordered resonator chains"};
  app.require_subcommand(1);
  std::string config_path, output_dir;
  int verbosity = 0;
  unsigned threads = 1;
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr");
  app.add_option("-j,--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("-o,--output-dir", output_dir, "Overrides output_dir from the config");

  std::map<std::string, void (*)(const Context&)> commands{
      {"scan", cmd_scan}, {"spectrum", cmd_spectrum}, {"edge", cmd_edge}, {"sample", cmd_sample}};
  const std::map<std::string, std::string> help{
      {"scan", "Classify frequencies and write bands.csv / bands.json"},
      {"spectrum", "Finite spectra with the inclusion check; writes spectrum.csv / spectrum.json"},
      {"edge", "Edge modes in certified gaps; writes edge_modes.json and eigenvector CSVs"},
      {"sample", "Write a sampled block sequence to sequence.json"}};
  for (const auto& [name, fn] : commands) {
    app.add_subcommand(name, help.at(name))->add_option("config", config_path, "JSON run config")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Context ctx{load_run_config(config_path), {}, {}, verbosity, threads};
    ctx.stamp.config_hash = config_hash(ctx.config.raw);
    ctx.out = output_dir.empty() ? fs::path(ctx.config.output_dir) : fs::path(output_dir);
    fs::create_directories(ctx.out);
    commands.at(app.get_subcommands().front()->get_name())(ctx);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
