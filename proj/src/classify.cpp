#include "resochain/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resochain/capacitance.hpp"
#include "resochain/errors.hpp"
#include "resochain/parallel.hpp"
#include "resochain/tridiag_eigen.hpp"

namespace resochain {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::InSpectrum: return "InSpectrum";
    case Verdict::CertifiedGap: return "CertifiedGap";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "InSpectrum") return Verdict::InSpectrum;
  if (s == "CertifiedGap") return Verdict::CertifiedGap;
  if (s == "Indeterminate") return Verdict::Indeterminate;
  throw ValidationError("unknown verdict '" + std::string(s) + "'");
}

std::vector<Mat2d> block_family(const BlockLibrary& library, double lambda) {
  std::vector<Mat2d> family;
  family.reserve(library.size());
  for (const auto& b : library.blocks()) family.push_back(block_propagation(b, lambda));
  return family;
}

SpectralVerdict classify_frequency(const BlockLibrary& library, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("frequency must be finite and >= 0");
  SpectralVerdict out;
  out.lambda = lambda;
  const auto family = block_family(library, lambda);
  bool near_parabolic = false;
  for (std::size_t d = 0; d < family.size(); ++d) {
    const double tr = family[d].trace();
    out.traces.push_back(tr);
    if (std::abs(tr) <= 2.0) {
      out.non_hyperbolic.push_back(static_cast<int>(d) + 1);
    } else if (std::abs(tr) <= 2.0 + kParabolicMargin<double>) {
      near_parabolic = true;
    }
  }
  if (!out.non_hyperbolic.empty()) {
    out.verdict = Verdict::InSpectrum;
    return out;
  }
  out.verdict = Verdict::Indeterminate;
  if (near_parabolic) return out;

  const auto ss = source_sink_condition<double>(family);
  if (!ss.holds) return out;
  out.sink_component = ss.sink_component;
  out.cone = invariant_cone<double>(family);
  if (out.cone) out.verdict = Verdict::CertifiedGap;
  return out;
}

const BandInterval* BandReport::find(double lambda) const {
  for (const auto& iv : intervals) {
    if (lambda >= iv.lo && lambda <= iv.hi) return &iv;
  }
  return nullptr;
}

std::vector<BandInterval> BandReport::with_verdict(Verdict v) const {
  std::vector<BandInterval> out;
  for (const auto& iv : intervals) {
    if (iv.verdict == v) out.push_back(iv);
  }
  return out;
}

namespace {

struct RegionKey {
  Verdict verdict;
  std::vector<int> non_hyperbolic;
  friend bool operator==(const RegionKey&, const RegionKey&) = default;
};

RegionKey key_at(const BlockLibrary& library, double lambda) {
  auto v = classify_frequency(library, lambda);
  return {v.verdict, std::move(v.non_hyperbolic)};
}

}  // namespace

BandReport scan(const BlockLibrary& library, double lambda_min, double lambda_max,
                const ScanOptions& options) {
  if (!(lambda_min >= 0.0) || !(lambda_max > lambda_min) || !std::isfinite(lambda_max)) {
    throw ValidationError("scan range must satisfy 0 <= lambda_min < lambda_max");
  }
  if (options.grid < 2) throw ValidationError("scan grid needs at least 2 points");
  if (!(options.tolerance > 0.0)) throw ValidationError("scan tolerance must be positive");

  const std::size_t n = options.grid;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = k + 1 == n ? lambda_max
                         : lambda_min + (lambda_max - lambda_min) * static_cast<double>(k) /
                                            static_cast<double>(n - 1);
  }
  std::vector<RegionKey> keys(n);
  parallel_for(n, options.threads, [&](std::size_t k) { keys[k] = key_at(library, grid[k]); });

  BandReport report;
  report.lambda_min = lambda_min;
  report.lambda_max = lambda_max;

  double start = lambda_min;
  RegionKey current = keys[0];
  auto close = [&](double end, const RegionKey& next) {
    report.intervals.push_back({start, end, current.verdict, current.non_hyperbolic});
    report.endpoints.push_back(end);
    start = end;
    current = next;
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    double a = grid[k];
    const double c = grid[k + 1];
    // Walk across the cell, peeling off every region boundary inside it.
    for (int guard = 0; !(current == keys[k + 1]) && guard < 64; ++guard) {
      double lo = a, hi = c;
      RegionKey hi_key = keys[k + 1];
      while (hi - lo > options.tolerance) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        RegionKey mk = key_at(library, mid);
        if (mk == current) {
          lo = mid;
        } else {
          hi = mid;
          hi_key = std::move(mk);
        }
      }
      close(lo + (hi - lo) / 2, hi_key);
      a = hi;
    }
  }
  report.intervals.push_back({start, lambda_max, current.verdict, current.non_hyperbolic});

  // A region narrower than the tolerance (the near-parabolic sliver at a band
  // edge) is below the scan's resolution: drop it and merge equal neighbours.
  std::vector<BandInterval> kept;
  for (std::size_t k = 0; k < report.intervals.size(); ++k) {
    const auto& iv = report.intervals[k];
    const bool interior = k > 0 && k + 1 < report.intervals.size();
    if (interior && iv.width() <= options.tolerance) {
      kept.back().hi = iv.lo + iv.width() / 2;
      continue;
    }
    if (!kept.empty()) {
      BandInterval& prev = kept.back();
      if (prev.verdict == iv.verdict && prev.non_hyperbolic == iv.non_hyperbolic) {
        prev.hi = iv.hi;
        continue;
      }
      prev.hi = std::max(prev.hi, iv.lo);
      BandInterval next = iv;
      next.lo = prev.hi;
      kept.push_back(next);
      continue;
    }
    kept.push_back(iv);
  }
  report.intervals = std::move(kept);
  report.endpoints.clear();
  for (std::size_t k = 0; k + 1 < report.intervals.size(); ++k) report.endpoints.push_back(report.intervals[k].hi);
  return report;
}

std::vector<ProbeResult> finite_size_probe(const BlockLibrary& library, double lambda,
                                           const std::vector<std::size_t>& sizes,
                                           const std::vector<std::uint64_t>& seeds) {
  std::vector<ProbeResult> out;
  for (std::size_t m : sizes) {
    for (std::uint64_t seed : seeds) {
      const auto seq = sample_iid(library, m, seed);
      const auto chain = expand_blocks(library, seq);
      const auto jac = assemble_jacobi_finite<double>(chain);
      out.push_back({m, seed, chain.size(), distance_to_spectrum(jac, lambda, 1e-12)});
    }
  }
  return out;
}

}  // namespace resochain
