#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "resochain/blocks.hpp"
#include "resochain/cocycle.hpp"
#include "resochain/projective.hpp"

namespace resochain {

enum class Verdict { InSpectrum, CertifiedGap, Indeterminate };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

/// Classification of one frequency for a block library.
///
/// InSpectrum: some block propagation matrix has |trace| <= 2, so the
/// frequency belongs to the spectrum of every pseudo-ergodic arrangement.
/// CertifiedGap: every block is hyperbolic, the sinks share one component of
/// RP^1 minus the sources, and an invariant cone was verified.
/// Indeterminate: all blocks hyperbolic but no cone could be certified.
struct SpectralVerdict {
  double lambda = 0;
  Verdict verdict = Verdict::Indeterminate;
  std::vector<double> traces;
  std::vector<int> non_hyperbolic;  // 1-based labels with |trace| <= 2
  std::optional<Arcd> sink_component;
  std::optional<Arcd> cone;
};

/// Block propagation matrices of every library block at lambda, in label order.
std::vector<Mat2d> block_family(const BlockLibrary& library, double lambda);

SpectralVerdict classify_frequency(const BlockLibrary& library, double lambda);

struct BandInterval {
  double lo = 0;
  double hi = 0;
  Verdict verdict = Verdict::Indeterminate;
  std::vector<int> non_hyperbolic;

  double width() const { return hi - lo; }
};

/// Partition of [lambda_min, lambda_max] into maximal runs with the same
/// verdict and the same set of non-hyperbolic blocks.
struct BandReport {
  double lambda_min = 0;
  double lambda_max = 0;
  std::vector<BandInterval> intervals;
  std::vector<double> endpoints;  // interior boundaries, ascending

  /// Interval containing lambda (the left one at a shared endpoint).
  const BandInterval* find(double lambda) const;
  std::vector<BandInterval> with_verdict(Verdict v) const;
};

struct ScanOptions {
  std::size_t grid = 1000;
  double tolerance = 1e-10;
  unsigned threads = 1;
};

BandReport scan(const BlockLibrary& library, double lambda_min, double lambda_max,
                const ScanOptions& options = {});

struct ProbeResult {
  std::size_t blocks = 0;
  std::uint64_t seed = 0;
  std::size_t resonators = 0;
  double distance = 0;
};

/// Finite-section shadow of the classification: dist(lambda, spectrum of J_N)
/// for i.i.d. samples of each (size, seed).
std::vector<ProbeResult> finite_size_probe(const BlockLibrary& library, double lambda,
                                           const std::vector<std::size_t>& sizes,
                                           const std::vector<std::uint64_t>& seeds);

}  // namespace resochain
