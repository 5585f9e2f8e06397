#pragma once

// The real projective line as angles modulo pi; Moebius action of 2x2
// matrices, hyperbolic fixed points, the source-sink condition and
// invariant-cone construction.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resochain/cocycle.hpp"
#include "resochain/errors.hpp"

namespace resochain {

template <typename Scalar>
Scalar wrap_angle(Scalar theta) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  theta = std::fmod(theta, pi);
  if (theta < 0) theta += pi;
  if (theta >= pi) theta = 0;
  return theta;
}

/// Line through the origin, stored by its angle in [0, pi).
template <typename Scalar = double>
class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  explicit ProjectivePoint(Scalar angle) : angle_(wrap_angle(angle)) {}

  static ProjectivePoint from_vector(const Vec2<Scalar>& v) {
    if (v.x() == Scalar(0) && v.y() == Scalar(0)) throw DomainError("zero vector has no direction");
    return ProjectivePoint(std::atan2(v.y(), v.x()));
  }

  Scalar angle() const noexcept { return angle_; }
  Vec2<Scalar> representative() const { return {std::cos(angle_), std::sin(angle_)}; }

 private:
  Scalar angle_ = 0;
};

using ProjectivePointd = ProjectivePoint<double>;

/// Open arc of directions (start, start + width), measured counter-clockwise
/// modulo pi. Invariant cones have width < pi; a width of exactly pi is the
/// complement of the single point `start`.
template <typename Scalar = double>
struct Arc {
  Scalar start = 0;
  Scalar width = 0;

  Arc() = default;
  Arc(Scalar s, Scalar w) : start(wrap_angle(s)), width(w) {
    if (!(w > 0) || !(w <= std::numbers::pi_v<Scalar>)) throw ValidationError("arc width must lie in (0, pi]");
  }

  /// Position of p measured from start, in [0, pi).
  Scalar offset(const ProjectivePoint<Scalar>& p) const { return wrap_angle(p.angle() - start); }

  bool contains(const ProjectivePoint<Scalar>& p) const {
    const Scalar t = offset(p);
    return t > 0 && t < width;
  }

  ProjectivePoint<Scalar> lower() const { return ProjectivePoint<Scalar>(start); }
  ProjectivePoint<Scalar> upper() const { return ProjectivePoint<Scalar>(start + width); }
  bool proper() const { return width < std::numbers::pi_v<Scalar>; }
};

using Arcd = Arc<double>;

template <typename Scalar>
struct FixedPoints {
  ProjectivePoint<Scalar> source;  // eigendirection with |xi| < 1
  ProjectivePoint<Scalar> sink;    // eigendirection with |xi| > 1
  Scalar source_multiplier{};
  Scalar sink_multiplier{};
};

/// sin of the angle between two lines.
template <typename Scalar>
Scalar proj_distance(const ProjectivePoint<Scalar>& p, const ProjectivePoint<Scalar>& q) {
  return std::abs(std::sin(p.angle() - q.angle()));
}

template <typename Scalar>
ProjectivePoint<Scalar> moebius_apply(const Mat2<Scalar>& m, const ProjectivePoint<Scalar>& p) {
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0) || std::abs(m.determinant()) <= 64 * std::numeric_limits<Scalar>::epsilon() * scale * scale) {
    throw DomainError("Moebius action needs an invertible matrix");
  }
  return ProjectivePoint<Scalar>::from_vector(m * p.representative());
}

namespace detail {

// The determinant of a long product carries rounding error proportional to
// the squared entry size, so the 1e-10 tolerance is scaled for large entries.
template <typename Scalar>
void require_unimodular(const Mat2<Scalar>& m) {
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  if (std::abs(m.determinant() - Scalar(1)) > Scalar(1e-10) * scale * scale) {
    throw DomainError("matrix is not in SL(2,R): det = " + std::to_string(double(m.determinant())));
  }
}

template <typename Scalar>
Vec2<Scalar> eigendirection(const Mat2<Scalar>& m, Scalar xi) {
  const Vec2<Scalar> a(m(0, 1), xi - m(0, 0));
  const Vec2<Scalar> b(xi - m(1, 1), m(1, 0));
  return a.squaredNorm() >= b.squaredNorm() ? a : b;
}

}  // namespace detail

template <typename Scalar>
bool is_hyperbolic(const Mat2<Scalar>& m) {
  detail::require_unimodular(m);
  return std::abs(m.trace()) > Scalar(2);
}

/// Threshold below which |trace| - 2 is too small for reliable fixed points.
template <typename Scalar>
constexpr Scalar kParabolicMargin = Scalar(1e-12);

template <typename Scalar>
FixedPoints<Scalar> fixed_points(const Mat2<Scalar>& m) {
  if (!is_hyperbolic(m)) throw NotHyperbolicError("matrix is not hyperbolic (|trace| <= 2)", 0);
  const Scalar tr = m.trace();
  if (std::abs(tr) <= Scalar(2) + kParabolicMargin<Scalar>) {
    throw NumericalError("matrix too close to parabolic for fixed-point computation");
  }
  const Scalar root = std::sqrt((tr - 2) * (tr + 2));
  const Scalar xi_u = (tr + std::copysign(root, tr)) / 2;
  const Scalar xi_s = m.determinant() / xi_u;
  FixedPoints<Scalar> fp;
  fp.sink = ProjectivePoint<Scalar>::from_vector(detail::eigendirection(m, xi_u));
  fp.source = ProjectivePoint<Scalar>::from_vector(detail::eigendirection(m, xi_s));
  fp.sink_multiplier = xi_u;
  fp.source_multiplier = xi_s;
  return fp;
}

template <typename Scalar>
struct SourceSinkResult {
  bool holds = false;
  std::optional<Arc<Scalar>> sink_component;
  std::vector<FixedPoints<Scalar>> fixed;
};

/// Do all sinks lie in one connected component of RP^1 minus the sources?
template <typename Scalar>
SourceSinkResult<Scalar> source_sink_condition(std::span<const Mat2<Scalar>> family) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (family.empty()) throw ValidationError("source-sink condition needs a nonempty family");
  SourceSinkResult<Scalar> out;
  for (std::size_t d = 0; d < family.size(); ++d) {
    if (!is_hyperbolic(family[d])) {
      throw NotHyperbolicError("family member " + std::to_string(d) + " is not hyperbolic", d);
    }
    out.fixed.push_back(fixed_points(family[d]));
  }
  std::vector<Scalar> sources;
  for (const auto& fp : out.fixed) sources.push_back(fp.source.angle());
  std::sort(sources.begin(), sources.end());

  auto component_of = [&](const ProjectivePoint<Scalar>& p) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const Scalar lo = sources[k];
      const Scalar hi = k + 1 < sources.size() ? sources[k + 1] : sources[0] + pi;
      const Scalar width = hi - lo;
      if (width <= 0) continue;
      const Scalar t = wrap_angle(p.angle() - lo);
      if (t > 0 && t < width) return k;
    }
    return std::nullopt;
  };

  const auto first = component_of(out.fixed.front().sink);
  if (!first) return out;
  for (const auto& fp : out.fixed) {
    if (component_of(fp.sink) != first) return out;
  }
  const std::size_t k = *first;
  const Scalar lo = sources[k];
  const Scalar hi = k + 1 < sources.size() ? sources[k + 1] : sources[0] + pi;
  out.holds = true;
  out.sink_component = Arc<Scalar>(lo, std::min(hi - lo, pi));
  return out;
}

/// Smallest distance by which the image of the closed arc stays inside the
/// open arc; negative when it escapes. Matrices act orientation-preservingly.
template <typename Scalar>
Scalar cone_margin(const Mat2<Scalar>& m, const Arc<Scalar>& arc) {
  const Scalar p1 = arc.offset(moebius_apply(m, arc.lower()));
  const Scalar p2 = arc.offset(moebius_apply(m, arc.upper()));
  if (!(p1 < p2)) return -1;
  return std::min(p1, arc.width - p2);
}

template <typename Scalar>
bool cone_is_invariant(std::span<const Mat2<Scalar>> family, const Arc<Scalar>& arc,
                       Scalar margin = Scalar(1e-9)) {
  if (!arc.proper()) return false;
  return std::all_of(family.begin(), family.end(),
                     [&](const Mat2<Scalar>& m) { return cone_margin(m, arc) >= margin; });
}

/// Open arc containing every sink, its closure avoiding every source, mapped
/// strictly into itself by every member. Returns nullopt when no candidate verifies.
template <typename Scalar>
std::optional<Arc<Scalar>> invariant_cone(std::span<const Mat2<Scalar>> family,
                                          Scalar margin = Scalar(1e-9)) {
  const auto ss = source_sink_condition(family);
  if (!ss.holds) throw PreconditionError("family violates the source-sink condition");
  const Arc<Scalar>& comp = *ss.sink_component;
  Scalar tmin = comp.width, tmax = 0;
  for (const auto& fp : ss.fixed) {
    const Scalar t = comp.offset(fp.sink);
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  // Start at 10% padding toward the nearest sources, then sweep dyadic paddings in (0, 1).
  std::vector<Scalar> paddings{Scalar(0.1)};
  for (int level = 1; level <= 6; ++level) {
    const int parts = 1 << level;
    for (int j = 1; j < parts; j += 2) paddings.push_back(Scalar(j) / Scalar(parts));
  }
  for (Scalar f : paddings) {
    const Scalar lo = tmin * (1 - f);
    const Scalar hi = tmax + f * (comp.width - tmax);
    if (!(hi > lo) || !(hi - lo < std::numbers::pi_v<Scalar>)) continue;
    const Arc<Scalar> cone(comp.start + lo, hi - lo);
    if (cone_is_invariant(family, cone, margin)) return cone;
  }
  return std::nullopt;
}

}  // namespace resochain
