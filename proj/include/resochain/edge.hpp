#pragma once

// Semi-infinite chains with a physical (Neumann-type) left edge. A chain is
// stored from its edge inwards; right edges are handled by reflecting the
// chain so that its last resonator becomes the edge.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "resochain/blocks.hpp"
#include "resochain/classify.hpp"
#include "resochain/cocycle.hpp"
#include "resochain/projective.hpp"

namespace resochain {

/// Resonators listed from the edge inwards, grouped into propagation steps
/// (one step per block for block chains).
struct EdgeChain {
  std::vector<Resonator> resonators;
  std::vector<std::size_t> step_offsets;

  std::size_t steps() const noexcept { return step_offsets.size(); }
  /// Propagation matrix of step j at lambda.
  Mat2d step_matrix(std::size_t j, double lambda) const;
};

/// Left edge of the chain built from seq (block 0 at the edge).
EdgeChain left_chain(const BlockLibrary& library, const BlockSequence& seq);

/// Right edge of the finite chain built from seq, reflected so the last
/// resonator becomes the edge. Reflected resonator k keeps its length and
/// speed and takes the spacing of its original left neighbour; the boundary
/// value is then v^2 / (l s) with s the gap to that neighbour.
EdgeChain right_chain(const BlockLibrary& library, const BlockSequence& seq);

/// Right edge of the half-line ..., B(seq[1]), B(seq[0]) | (the mirrored
/// arrangement used for the left/right edge comparison).
EdgeChain mirrored_chain(const BlockLibrary& library, const BlockSequence& seq_plus);

struct StableDirection {
  ProjectivePointd point;
  double contraction_estimate = 0;  // per-step contraction of the stable vector
  std::size_t depth_used = 0;       // steps multiplied
};

struct StableDirectionOptions {
  double tolerance = 1e-9;         // direction stationarity between checks
  double singular_ratio = 1e8;     // sigma_max / sigma_min before checking
  std::size_t stationarity_lag = 20;
};

/// Most-contracted right singular direction of the forward product starting at the edge.
StableDirection stable_direction(const EdgeChain& chain, double lambda,
                                 const StableDirectionOptions& options = {});

/// Requires lambda in a certified gap of the library.
StableDirection stable_direction(const BlockLibrary& library, const BlockSequence& seq, double lambda,
                                 double tol = 1e-9);

/// Signed sine of the angle from (1,0) to the stable direction, in [-1, 1];
/// zero exactly at edge-mode frequencies.
double edge_mode_indicator(const EdgeChain& chain, double lambda);
double edge_mode_indicator(const BlockLibrary& library, const BlockSequence& seq, double lambda);

struct GapInterval {
  double lo = 0;
  double hi = 0;
};

/// Roots of the indicator in (lo, hi): sign changes through (1,0) on a grid
/// of interior points, refined by bisection to machine precision.
std::vector<double> indicator_roots(const EdgeChain& chain, GapInterval gap, std::size_t grid);

struct EdgeMode {
  double lambda = 0;
  double indicator_residual = 0;
  Eigen::VectorXd eigenvector;    // unit norm, one entry per chain resonator
  std::size_t support = 0;        // entries past this index are zero
  double decay_rate = 0;          // fitted per-resonator factor, < 1
  double decay_fit_residual = 0;  // 1 - R^2 of the log-linear fit
};

/// Eigenvector from propagating (1,0) through the chain, mapped back to
/// the symmetric coordinates by the inverse conjugacy; cut where rounding
/// growth overtakes the decaying mode.
EdgeMode reconstruct_edge_mode(const EdgeChain& chain, double lambda);

/// Edge modes of the left edge of seq inside a certified gap.
std::vector<EdgeMode> find_edge_modes(const BlockLibrary& library, const BlockSequence& seq,
                                      GapInterval gap, std::size_t grid);

/// True when (1,0) lies in the component of RP^1 minus the block sources that
/// holds every sink: then no arrangement has an edge mode at lambda.
bool exclusion_check(const BlockLibrary& library, double lambda);
/// Same test for an explicit family of block matrices.
bool exclusion_check(std::span<const Mat2d> family);

struct CoburnReport {
  bool holds = true;
  double min_joint_indicator = 1;  // min over probes of max(|left|, |right|)
  std::vector<double> left_roots;
  std::vector<double> right_roots;
};

/// No frequency in the gap has both a left edge mode for seq_plus and a
/// right edge mode for its mirror image.
CoburnReport coburn_check(const BlockLibrary& library, const BlockSequence& seq_plus, GapInterval gap,
                          std::size_t grid, double threshold = 1e-8);

struct EdgeSearchOptions {
  double budget = 0.5;       // relative perturbation of lengths and spacings
  std::size_t attempts = 1000;
  std::uint64_t seed = 1;
  std::size_t sequence_blocks = 400;
  std::uint64_t sequence_seed = 1;
  double lambda_max = 8.0;
  std::size_t scan_grid = 400;
  std::size_t gap_grid = 200;
};

struct EdgeSearchResult {
  BlockLibrary library;
  BlockSequence sequence;
  GapInterval gap;
  std::vector<double> roots;
  std::size_t attempt = 0;
};

/// Randomised perturbation of the seed library's lengths and spacings until
/// the left edge of an i.i.d. sequence shows an edge mode in a certified gap.
std::optional<EdgeSearchResult> search_edge_mode_library(const BlockLibrary& seed_library,
                                                         const EdgeSearchOptions& options = {});

}  // namespace resochain
