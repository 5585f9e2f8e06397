#include "resochain/edge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "resochain/errors.hpp"

namespace resochain {

Mat2d EdgeChain::step_matrix(std::size_t j, double lambda) const {
  const std::size_t begin = step_offsets.at(j);
  const std::size_t end = j + 1 < step_offsets.size() ? step_offsets[j + 1] : resonators.size();
  Mat2d p = Mat2d::Identity();
  for (std::size_t i = begin; i < end; ++i) p = propagation_matrix<double>(resonators[i], lambda) * p;
  return p;
}

EdgeChain left_chain(const BlockLibrary& library, const BlockSequence& seq) {
  auto flat = expand_blocks(library, seq);
  return {std::move(flat.resonators), std::move(flat.block_offsets)};
}

EdgeChain right_chain(const BlockLibrary& library, const BlockSequence& seq) {
  const auto flat = expand_blocks(library, seq);
  const std::size_t n = flat.size();
  EdgeChain out;
  out.resonators.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Resonator r = flat.resonators[n - 1 - k];
    if (k + 1 < n) r.spacing = flat.resonators[n - 2 - k].spacing;
    out.resonators.push_back(r);
  }
  for (std::size_t b = flat.block_offsets.size(); b-- > 0;) {
    const std::size_t end = b + 1 < flat.block_offsets.size() ? flat.block_offsets[b + 1] : n;
    out.step_offsets.push_back(n - end);
  }
  return out;
}

EdgeChain mirrored_chain(const BlockLibrary& library, const BlockSequence& seq_plus) {
  BlockSequence reversed = seq_plus;
  std::reverse(reversed.labels.begin(), reversed.labels.end());
  return right_chain(library, reversed);
}

namespace {

struct SvdSummary {
  Vec2d stable;   // right singular vector of sigma_min
  double sigma_max;
};

SvdSummary summarise(const Mat2d& m) {
  const double p = m.col(0).squaredNorm();
  const double r = m.col(1).squaredNorm();
  const double q = m.col(0).dot(m.col(1));
  const double disc = std::hypot((p - r) / 2, q);
  const double mu1 = (p + r) / 2 + disc;
  const Vec2d a(q, mu1 - p);
  const Vec2d b(mu1 - r, q);
  const Vec2d v1 = a.squaredNorm() >= b.squaredNorm() ? a : b;
  SvdSummary out;
  out.stable = Vec2d(-v1.y(), v1.x()).normalized();
  out.sigma_max = std::sqrt(mu1);
  return out;
}

struct StableVector {
  Vec2d vec;
  std::size_t depth;
  double contraction;
};

StableVector stable_vector(const EdgeChain& chain, double lambda, const StableDirectionOptions& options) {
  if (chain.steps() == 0) throw ValidationError("edge chain is empty");
  IteratedProduct<double> prod;
  bool pending = false;
  std::size_t check_at = 0;
  Vec2d previous = Vec2d::Zero();
  // The renormalised determinant cancels catastrophically; track it exactly.
  double log_det = 0;
  for (std::size_t j = 0; j < chain.steps(); ++j) {
    const Mat2d step = chain.step_matrix(j, lambda);
    log_det += std::log(std::abs(step.determinant()));
    prod.absorb_left(step);
    if (pending && j < check_at) continue;
    const auto svd = summarise(prod.matrix);
    const double log_sigma_max = prod.log_scale + std::log(svd.sigma_max);
    if (2 * log_sigma_max - log_det < std::log(options.singular_ratio)) continue;
    if (pending) {
      const double drift = std::abs(previous.x() * svd.stable.y() - previous.y() * svd.stable.x());
      if (drift <= options.tolerance) {
        const double n = static_cast<double>(j + 1);
        return {svd.stable, j + 1, std::exp((log_det - log_sigma_max) / n)};
      }
    }
    pending = true;
    previous = svd.stable;
    check_at = j + options.stationarity_lag;
  }
  throw NumericalError("stable direction did not converge within " + std::to_string(chain.steps()) +
                       " steps at lambda = " + std::to_string(lambda));
}

// Signed angle of the stable direction from (1,0), in (-pi/2, pi/2].
double signed_angle(const EdgeChain& chain, double lambda) {
  const Vec2d s = stable_vector(chain, lambda, {}).vec;
  if (s.x() == 0) return std::numbers::pi / 2;
  return std::atan(s.y() / s.x());
}

void require_certified(const BlockLibrary& library, double lambda) {
  if (classify_frequency(library, lambda).verdict != Verdict::CertifiedGap) {
    throw PreconditionError("lambda = " + std::to_string(lambda) + " is not in a certified gap");
  }
}

std::vector<double> interior_grid(GapInterval gap, std::size_t grid) {
  if (!(gap.hi > gap.lo)) throw ValidationError("gap interval must satisfy lo < hi");
  if (grid < 2) throw ValidationError("gap grid needs at least 2 points");
  std::vector<double> out(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    out[k] = gap.lo + (gap.hi - gap.lo) * static_cast<double>(k + 1) / static_cast<double>(grid + 1);
  }
  return out;
}

// A sign change is a crossing of (1,0) when the angle moves by less than
// pi/2; a jump across the vertical direction flips the sign as well.
bool crosses_zero(double a, double b) {
  return ((a <= 0 && b >= 0) || (a >= 0 && b <= 0)) && std::abs(a - b) < std::numbers::pi / 2;
}

}  // namespace

StableDirection stable_direction(const EdgeChain& chain, double lambda, const StableDirectionOptions& options) {
  const auto sv = stable_vector(chain, lambda, options);
  return {ProjectivePointd::from_vector(sv.vec), sv.contraction, sv.depth};
}

StableDirection stable_direction(const BlockLibrary& library, const BlockSequence& seq, double lambda,
                                 double tol) {
  require_certified(library, lambda);
  StableDirectionOptions options;
  options.tolerance = tol;
  return stable_direction(left_chain(library, seq), lambda, options);
}

double edge_mode_indicator(const EdgeChain& chain, double lambda) {
  return std::sin(signed_angle(chain, lambda));
}

double edge_mode_indicator(const BlockLibrary& library, const BlockSequence& seq, double lambda) {
  require_certified(library, lambda);
  return edge_mode_indicator(left_chain(library, seq), lambda);
}

std::vector<double> indicator_roots(const EdgeChain& chain, GapInterval gap, std::size_t grid) {
  const auto lambdas = interior_grid(gap, grid);
  std::vector<double> phi(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) phi[k] = signed_angle(chain, lambdas[k]);

  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    if (!crosses_zero(phi[k], phi[k + 1])) continue;
    if (phi[k + 1] == 0 && k + 2 < lambdas.size()) continue;  // counted by the next cell
    double lo = lambdas[k], hi = lambdas[k + 1];
    double flo = phi[k], fhi = phi[k + 1];
    for (int it = 0; it < 200 && flo != 0 && fhi != 0; ++it) {
      const double mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      const double fm = signed_angle(chain, mid);
      if (crosses_zero(flo, fm)) {
        hi = mid;
        fhi = fm;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    const double root = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    if (std::abs(std::sin(std::min(std::abs(flo), std::abs(fhi)))) <= 1e-10) roots.push_back(root);
  }
  return roots;
}

EdgeMode reconstruct_edge_mode(const EdgeChain& chain, double lambda) {
  const auto& r = chain.resonators;
  const std::size_t n = r.size();
  if (n < 3) throw ValidationError("edge-mode reconstruction needs at least 3 resonators");

  // (u, u') at the left edge of every resonator, starting from (1, 0).
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<double> pair_norm(n, 0.0);
  Vec2d x(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) {
      const Vec2d pair = conjugacy<double>(r[i], r[i - 1]).inverse() * x;
      w(static_cast<Eigen::Index>(i)) = pair(0);
      if (i == 1) w(0) = pair(1);
      pair_norm[i] = pair.norm();
    }
    x = propagation_matrix<double>(r[i], lambda) * x;
  }

  std::size_t cut = 1;
  for (std::size_t i = 2; i < n; ++i) {
    if (pair_norm[i] < pair_norm[cut]) cut = i;
  }
  for (std::size_t i = cut + 1; i < n; ++i) w(static_cast<Eigen::Index>(i)) = 0;

  // Fit only where the mode is three decades above the rounding floor.
  const double log_stop = std::log(pair_norm[cut]) + std::log(1e3);
  std::size_t end = 1;
  for (std::size_t i = 1; i <= cut; ++i) {
    if (std::log(pair_norm[i]) >= log_stop) end = i;
  }
  if (end < 3) end = cut;

  EdgeMode out;
  out.lambda = lambda;
  out.indicator_residual = std::abs(edge_mode_indicator(chain, lambda));
  out.support = cut;
  if (end >= 3) {
    const std::size_t count = end;  // points i = 1..end
    double sx = 0, sy = 0;
    for (std::size_t i = 1; i <= end; ++i) {
      sx += static_cast<double>(i);
      sy += std::log(pair_norm[i]);
    }
    const double mx = sx / count, my = sy / count;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 1; i <= end; ++i) {
      const double dx = static_cast<double>(i) - mx;
      const double dy = std::log(pair_norm[i]) - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    const double slope = sxy / sxx;
    out.decay_rate = std::exp(slope);
    out.decay_fit_residual = syy > 0 ? std::max(0.0, 1.0 - sxy * sxy / (sxx * syy)) : 0.0;
  } else {
    out.decay_rate = 0;
    out.decay_fit_residual = 1;
  }
  out.eigenvector = w / w.norm();
  if (out.eigenvector(0) < 0) out.eigenvector = -out.eigenvector;
  return out;
}

std::vector<EdgeMode> find_edge_modes(const BlockLibrary& library, const BlockSequence& seq,
                                      GapInterval gap, std::size_t grid) {
  for (double lambda : interior_grid(gap, grid)) require_certified(library, lambda);
  const auto chain = left_chain(library, seq);
  std::vector<EdgeMode> out;
  for (double root : indicator_roots(chain, gap, grid)) out.push_back(reconstruct_edge_mode(chain, root));
  return out;
}

bool exclusion_check(const BlockLibrary& library, double lambda) {
  const auto family = block_family(library, lambda);
  return exclusion_check(std::span<const Mat2d>(family));
}

bool exclusion_check(std::span<const Mat2d> family) {
  for (std::size_t d = 0; d < family.size(); ++d) {
    if (!is_hyperbolic(family[d]) || std::abs(family[d].trace()) <= 2.0 + kParabolicMargin<double>) {
      throw PreconditionError("block " + std::to_string(d + 1) + " is not hyperbolic");
    }
  }
  const auto ss = source_sink_condition<double>(family);
  if (!ss.holds) throw PreconditionError("block family violates the source-sink condition");
  return ss.sink_component->contains(ProjectivePointd(0.0));
}

CoburnReport coburn_check(const BlockLibrary& library, const BlockSequence& seq_plus, GapInterval gap,
                          std::size_t grid, double threshold) {
  const auto lambdas = interior_grid(gap, grid);
  for (double lambda : lambdas) require_certified(library, lambda);
  const auto left = left_chain(library, seq_plus);
  const auto right = mirrored_chain(library, seq_plus);

  CoburnReport out;
  auto probe = [&](double lambda) {
    const double joint = std::max(std::abs(edge_mode_indicator(left, lambda)),
                                  std::abs(edge_mode_indicator(right, lambda)));
    out.min_joint_indicator = std::min(out.min_joint_indicator, joint);
    if (joint < threshold) out.holds = false;
  };
  for (double lambda : lambdas) probe(lambda);
  out.left_roots = indicator_roots(left, gap, grid);
  out.right_roots = indicator_roots(right, gap, grid);
  for (double lambda : out.left_roots) probe(lambda);
  for (double lambda : out.right_roots) probe(lambda);
  return out;
}

std::optional<EdgeSearchResult> search_edge_mode_library(const BlockLibrary& seed_library,
                                                         const EdgeSearchOptions& options) {
  if (!(options.budget >= 0.0) || !(options.budget < 1.0)) {
    throw ValidationError("perturbation budget must lie in [0, 1)");
  }
  SplitMix64 rng(options.seed);
  const std::size_t attempts = options.budget == 0.0 ? std::min<std::size_t>(options.attempts, 1)
                                                     : options.attempts;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    std::vector<Block> blocks;
    for (const auto& b : seed_library.blocks()) {
      std::vector<Resonator> rs;
      for (const auto& r : b.resonators()) {
        const double fl = 1.0 + options.budget * (2.0 * rng.uniform() - 1.0);
        const double fs = 1.0 + options.budget * (2.0 * rng.uniform() - 1.0);
        rs.emplace_back(r.length * fl, r.spacing * fs, r.wave_speed);
      }
      blocks.emplace_back(std::move(rs));
    }
    const std::vector<double> probs(seed_library.probabilities().begin(), seed_library.probabilities().end());
    BlockLibrary candidate(std::move(blocks), probs);
    const auto seq = sample_iid(candidate, options.sequence_blocks, options.sequence_seed);
    ScanOptions scan_options;
    scan_options.grid = options.scan_grid;
    const auto report = scan(candidate, 0.0, options.lambda_max, scan_options);
    const auto chain = left_chain(candidate, seq);
    for (const auto& iv : report.with_verdict(Verdict::CertifiedGap)) {
      const double pad = 0.05 * iv.width();
      const GapInterval gap{iv.lo + pad, iv.hi - pad};
      try {
        auto roots = indicator_roots(chain, gap, options.gap_grid);
        if (!roots.empty()) return EdgeSearchResult{candidate, seq, gap, std::move(roots), attempt};
      } catch (const NumericalError&) {
        continue;
      }
    }
  }
  return std::nullopt;
}

}  // namespace resochain
