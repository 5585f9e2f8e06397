#pragma once

// Finite capacitance-level assembly. Resonators are indexed 0..N-1; the
// trailing spacing of resonator i is the gap between resonators i and i+1, so
// the last resonator's spacing is carried by the data model but never read.

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "resochain/blocks.hpp"
#include "resochain/errors.hpp"

namespace resochain {

/// Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal.
template <typename Scalar>
struct Tridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector diag;
  Vector offdiag;  // size() - 1 entries

  Tridiagonal() = default;
  Tridiagonal(Vector d, Vector e) : diag(std::move(d)), offdiag(std::move(e)) {
    if (diag.size() < 1) throw ValidationError("tridiagonal matrix must be at least 1x1");
    if (offdiag.size() != diag.size() - 1) {
      throw ValidationError("off-diagonal must have exactly N-1 entries");
    }
  }

  Eigen::Index size() const noexcept { return diag.size(); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
      m.diagonal(1) = offdiag;
      m.diagonal(-1) = offdiag;
    }
    return m;
  }

  /// y = M x
  Vector apply(const Vector& x) const {
    const Eigen::Index n = size();
    Vector y = diag.cwiseProduct(x);
    if (n > 1) {
      y.head(n - 1) += offdiag.cwiseProduct(x.tail(n - 1));
      y.tail(n - 1) += offdiag.cwiseProduct(x.head(n - 1));
    }
    return y;
  }

  /// Max absolute row sum; an upper bound for the spectral norm.
  Scalar norm_inf() const {
    using std::abs;
    const Eigen::Index n = size();
    Scalar best = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar row = abs(diag(i));
      if (i > 0) row += abs(offdiag(i - 1));
      if (i + 1 < n) row += abs(offdiag(i));
      best = std::max(best, row);
    }
    return best;
  }
};

using TridiagonalXd = Tridiagonal<double>;

/// Capacitance matrix C for N = spacings.size() + 1 resonators.
template <typename Scalar = double>
Tridiagonal<Scalar> assemble_capacitance(std::span<const Scalar> spacings) {
  if (spacings.empty()) throw ValidationError("capacitance matrix needs N >= 2 resonators");
  const auto gaps = static_cast<Eigen::Index>(spacings.size());
  typename Tridiagonal<Scalar>::Vector d = Tridiagonal<Scalar>::Vector::Zero(gaps + 1);
  typename Tridiagonal<Scalar>::Vector e(gaps);
  for (Eigen::Index i = 0; i < gaps; ++i) {
    const Scalar s = spacings[static_cast<std::size_t>(i)];
    if (!(s > 0) || !std::isfinite(static_cast<double>(s))) {
      throw ValidationError("spacings must be positive and finite");
    }
    const Scalar inv = Scalar(1) / s;
    d(i) += inv;
    d(i + 1) += inv;
    e(i) = -inv;
  }
  return {std::move(d), std::move(e)};
}

/// Diagonal of the material matrix V: v_i^2 / l_i.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> assemble_material(std::span<const Resonator> resonators) {
  if (resonators.empty()) throw ValidationError("material matrix needs at least one resonator");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(static_cast<Eigen::Index>(resonators.size()));
  for (std::size_t i = 0; i < resonators.size(); ++i) {
    const auto& r = resonators[i];
    v(static_cast<Eigen::Index>(i)) = Scalar(r.wave_speed) * Scalar(r.wave_speed) / Scalar(r.length);
  }
  return v;
}

/// Off-diagonal band a_i coupling resonators i and i+1 (i uses its trailing spacing).
template <typename Scalar = double>
Scalar jacobi_offdiag(const Resonator& cur, const Resonator& next) {
  using std::sqrt;
  return -Scalar(cur.wave_speed) * Scalar(next.wave_speed) /
         (Scalar(cur.spacing) * sqrt(Scalar(cur.length) * Scalar(next.length)));
}

/// Interior diagonal band b_i of resonator cur, given the spacing to its left neighbour.
template <typename Scalar = double>
Scalar jacobi_diag(const Resonator& cur, Scalar left_spacing) {
  return Scalar(cur.wave_speed) * Scalar(cur.wave_speed) / Scalar(cur.length) *
         (Scalar(1) / left_spacing + Scalar(1) / Scalar(cur.spacing));
}

/// J_N = V^{1/2} C V^{1/2} with the physical edge values
/// b_0 = v_0^2/(l_0 s_0) and b_{N-1} = v_{N-1}^2/(l_{N-1} s_{N-2}).
template <typename Scalar = double>
Tridiagonal<Scalar> assemble_jacobi_finite(std::span<const Resonator> r) {
  if (r.size() < 2) throw ValidationError("finite Jacobi matrix needs N >= 2 resonators");
  const auto n = static_cast<Eigen::Index>(r.size());
  typename Tridiagonal<Scalar>::Vector d(n);
  typename Tridiagonal<Scalar>::Vector e(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    e(i) = jacobi_offdiag<Scalar>(r[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i + 1)]);
  }
  auto vsq_over_l = [&](Eigen::Index i) {
    const auto& x = r[static_cast<std::size_t>(i)];
    return Scalar(x.wave_speed) * Scalar(x.wave_speed) / Scalar(x.length);
  };
  d(0) = vsq_over_l(0) / Scalar(r[0].spacing);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    d(i) = jacobi_diag<Scalar>(r[static_cast<std::size_t>(i)], Scalar(r[static_cast<std::size_t>(i - 1)].spacing));
  }
  d(n - 1) = vsq_over_l(n - 1) / Scalar(r[static_cast<std::size_t>(n - 2)].spacing);
  return {std::move(d), std::move(e)};
}

template <typename Scalar = double>
Tridiagonal<Scalar> assemble_jacobi_finite(const ResonatorSequence& seq) {
  return assemble_jacobi_finite<Scalar>(std::span<const Resonator>(seq.resonators));
}

/// Leading-order subwavelength frequency sqrt(delta * lambda).
inline double subwavelength_frequency(double lambda, double delta) {
  if (!(lambda >= 0.0)) throw DomainError("eigenvalue must be non-negative");
  if (!(delta > 0.0)) throw DomainError("contrast parameter must be positive");
  return std::sqrt(delta * lambda);
}

}  // namespace resochain
