#include "resochain/finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resochain/capacitance.hpp"
#include "resochain/errors.hpp"

namespace resochain {

FiniteSpectrumResult finite_spectrum(const BlockLibrary& library, const BlockSequence& seq, double tol,
                                     std::string library_id) {
  const auto chain = expand_blocks(library, seq);
  FiniteSpectrumResult out;
  out.library_id = std::move(library_id);
  out.sequence = seq;
  out.resonators = chain.size();
  out.eigenvalues = eigenvalues(assemble_jacobi_finite<double>(chain), tol);
  return out;
}

double distance_to_sigma(double lambda, const BandReport& report, std::span<const double> edge_lambdas) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : report.intervals) {
    if (iv.verdict == Verdict::CertifiedGap) continue;
    if (lambda >= iv.lo && lambda <= iv.hi) return 0.0;
    best = std::min(best, lambda < iv.lo ? iv.lo - lambda : lambda - iv.hi);
  }
  for (double e : edge_lambdas) best = std::min(best, std::abs(lambda - e));
  return best;
}

const InclusionReport& inclusion_check(FiniteSpectrumResult& result, const BandReport& report,
                                       std::span<const double> edge_lambdas, double tolerance) {
  InclusionReport rep;
  rep.tolerance = tolerance;
  rep.note =
      "gaps are claimed only where certified; edge frequencies are only the detected roots, "
      "so a flag is a genuine exception or a missed edge mode";
  const auto& ev = result.eigenvalues.eigenvalues;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const double lambda = ev[k];
    if (lambda < report.lambda_min - tolerance || lambda > report.lambda_max + tolerance) {
      throw PreconditionError("band report does not cover eigenvalue " + std::to_string(lambda));
    }
    InclusionEntry e{k, lambda, distance_to_sigma(lambda, report, edge_lambdas), false};
    e.flagged = e.distance > tolerance;
    if (e.flagged) ++rep.flagged;
    rep.entries.push_back(e);
  }
  result.inclusion = std::move(rep);
  return *result.inclusion;
}

EdgeLambdas finite_edge_lambdas(const BlockLibrary& library, const BlockSequence& seq,
                                std::span<const GapInterval> gaps, std::size_t grid) {
  const EdgeChain ends[] = {left_chain(library, seq), right_chain(library, seq)};
  EdgeLambdas out;
  for (const auto& gap : gaps) {
    for (const auto& chain : ends) {
      try {
        for (double r : indicator_roots(chain, gap, grid)) out.lambdas.push_back(r);
      } catch (const NumericalError&) {
        ++out.unresolved;
      }
    }
  }
  std::sort(out.lambdas.begin(), out.lambdas.end());
  return out;
}

Histogram density_of_states(const FiniteSpectrumResult& result, std::size_t bins, double lo, double hi) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  if (!(hi > lo)) throw ValidationError("histogram range must satisfy lo < hi");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges[k] = k == bins ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  std::size_t total = 0;
  for (double lambda : result.eigenvalues.eigenvalues) {
    if (lambda < lo || lambda > hi) continue;
    auto k = static_cast<std::size_t>((lambda - lo) / (hi - lo) * static_cast<double>(bins));
    k = std::min(k, bins - 1);
    ++h.counts[k];
    ++total;
  }
  h.mass.assign(bins, 0.0);
  if (total > 0) {
    for (std::size_t k = 0; k < bins; ++k) h.mass[k] = static_cast<double>(h.counts[k]) / static_cast<double>(total);
  }
  return h;
}

double factorization_entry(const ResonatorSequence& chain, double lambda) {
  IteratedProduct<double> prod;
  for (const auto& r : chain.resonators) prod.absorb_left(propagation_matrix<double>(r, lambda));
  return prod.matrix(1, 0);
}

}  // namespace resochain
