#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resochain/blocks.hpp"
#include "resochain/classify.hpp"
#include "resochain/edge.hpp"
#include "resochain/tridiag_eigen.hpp"

namespace resochain {

struct InclusionEntry {
  std::size_t index = 0;
  double lambda = 0;
  double distance = 0;  // to (InSpectrum and Indeterminate intervals) plus edge-mode frequencies
  bool flagged = false;
};

/// Which way the operational spectrum set can be wrong: gaps are only claimed
/// where certified (over-approximating the spectrum elsewhere), while the
/// edge set holds only the roots that were found (under-approximating it).
/// A flag is therefore either a genuine exception or a missed edge mode.
struct InclusionReport {
  std::vector<InclusionEntry> entries;
  std::size_t flagged = 0;
  double tolerance = 0;
  std::string note;
};

struct FiniteSpectrumResult {
  std::string library_id;
  BlockSequence sequence;
  std::size_t resonators = 0;
  Spectrum<double> eigenvalues;
  std::optional<InclusionReport> inclusion;
};

FiniteSpectrumResult finite_spectrum(const BlockLibrary& library, const BlockSequence& seq,
                                     double tol = 1e-12, std::string library_id = {});

/// Distance from lambda to the non-gap intervals of the report and the edge frequencies.
double distance_to_sigma(double lambda, const BandReport& report, std::span<const double> edge_lambdas);

/// Fills result.inclusion and returns it. Eigenvalues more than `tolerance`
/// outside the report range violate the precondition.
const InclusionReport& inclusion_check(FiniteSpectrumResult& result, const BandReport& report,
                                       std::span<const double> edge_lambdas, double tolerance = 1e-8);

struct EdgeLambdas {
  std::vector<double> lambdas;  // ascending
  std::size_t unresolved = 0;   // (gap, end) pairs where the chain was too short to converge
};

/// Edge-mode frequencies of both ends of the finite chain inside the gaps.
/// An end whose stable direction does not converge within the chain is
/// skipped and counted, which can only shrink the edge set.
EdgeLambdas finite_edge_lambdas(const BlockLibrary& library, const BlockSequence& seq,
                                std::span<const GapInterval> gaps, std::size_t grid);

struct Histogram {
  std::vector<double> edges;    // bins + 1 ascending
  std::vector<double> mass;     // fraction of counted eigenvalues per bin, sums to 1
  std::vector<std::size_t> counts;
};

/// Normalised histogram of the eigenvalues inside [lo, hi].
Histogram density_of_states(const FiniteSpectrumResult& result, std::size_t bins, double lo, double hi);

/// Lower-left entry of the total propagation product divided by its largest
/// entry. It vanishes exactly when (1,0) is an eigenvector of the product,
/// which for the physical boundary values happens at the eigenvalues of J_N.
double factorization_entry(const ResonatorSequence& chain, double lambda);

}  // namespace resochain
