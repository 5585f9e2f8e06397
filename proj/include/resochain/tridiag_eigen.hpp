#pragma once

// Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
// eigenvalues, inverse iteration for the eigenvectors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resochain/blocks.hpp"
#include "resochain/capacitance.hpp"
#include "resochain/errors.hpp"

namespace resochain {

template <typename Scalar>
struct Spectrum {
  std::vector<Scalar> eigenvalues;  // nondecreasing
  Scalar tolerance{};

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

template <typename Scalar>
struct Interval {
  Scalar lo{};
  Scalar hi{};
};

/// Gershgorin enclosure of the spectrum.
template <typename Scalar>
Interval<Scalar> gershgorin_bounds(const Tridiagonal<Scalar>& m) {
  using std::abs;
  const Eigen::Index n = m.size();
  Interval<Scalar> b{std::numeric_limits<Scalar>::max(), std::numeric_limits<Scalar>::lowest()};
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar radius = 0;
    if (i > 0) radius += abs(m.offdiag(i - 1));
    if (i + 1 < n) radius += abs(m.offdiag(i));
    b.lo = std::min(b.lo, m.diag(i) - radius);
    b.hi = std::max(b.hi, m.diag(i) + radius);
  }
  return b;
}

namespace detail {

template <typename Scalar>
Scalar pivot_floor(const Tridiagonal<Scalar>& m) {
  Scalar emax = 1;
  for (Eigen::Index i = 0; i < m.offdiag.size(); ++i) emax = std::max(emax, m.offdiag(i) * m.offdiag(i));
  return std::numeric_limits<Scalar>::min() * emax;
}

}  // namespace detail

/// Number of eigenvalues strictly below lambda (signed LDL^T pivot count).
/// Pivots decrease with lambda, so a vanishing pivot is replaced by +pivmin,
/// its sign just below lambda, which keeps the count strict.
template <typename Scalar>
Eigen::Index sturm_count(const Tridiagonal<Scalar>& m, Scalar lambda) {
  using std::abs;
  const Scalar pivmin = detail::pivot_floor(m);
  const Eigen::Index n = m.size();
  Eigen::Index count = 0;
  Scalar q = m.diag(0) - lambda;
  if (abs(q) < pivmin) q = pivmin;
  if (q < 0) ++count;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar e = m.offdiag(i - 1);
    q = (m.diag(i) - lambda) - e * e / q;
    if (abs(q) < pivmin) q = pivmin;
    if (q < 0) ++count;
  }
  return count;
}

/// All eigenvalues, each bracketed by bisection to width <= tol.
template <typename Scalar>
Spectrum<Scalar> eigenvalues(const Tridiagonal<Scalar>& m, Scalar tol) {
  if (!(tol > 0)) throw ValidationError("eigenvalue tolerance must be positive");
  const Eigen::Index n = m.size();
  auto bounds = gershgorin_bounds(m);
  const Scalar pad = (std::abs(bounds.lo) + std::abs(bounds.hi) + 1) * 4 * std::numeric_limits<Scalar>::epsilon();
  bounds.lo -= pad;
  bounds.hi += pad;

  Spectrum<Scalar> out;
  out.tolerance = tol;
  out.eigenvalues.reserve(static_cast<std::size_t>(n));

  struct Bracket {
    Scalar lo, hi;
    Eigen::Index count_lo, count_hi;
  };
  std::vector<Bracket> stack{{bounds.lo, bounds.hi, 0, n}};
  // Depth-first with the upper half pushed first yields ascending output.
  while (!stack.empty()) {
    Bracket b = stack.back();
    stack.pop_back();
    if (b.count_hi == b.count_lo) continue;
    const Scalar mid = b.lo + (b.hi - b.lo) / 2;
    if (b.hi - b.lo <= tol || mid <= b.lo || mid >= b.hi) {
      for (Eigen::Index k = b.count_lo; k < b.count_hi; ++k) out.eigenvalues.push_back(mid);
      continue;
    }
    const Eigen::Index c = sturm_count(m, mid);
    stack.push_back({mid, b.hi, c, b.count_hi});
    stack.push_back({b.lo, mid, b.count_lo, c});
  }
  return out;
}

/// The k-th smallest eigenvalue (0-based), bracketed to width <= tol.
template <typename Scalar>
Scalar eigenvalue_at(const Tridiagonal<Scalar>& m, Eigen::Index k, Scalar tol) {
  if (k < 0 || k >= m.size()) throw ValidationError("eigenvalue index out of range");
  auto b = gershgorin_bounds(m);
  Scalar lo = b.lo - tol, hi = b.hi + tol;
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(m, mid) > k) hi = mid; else lo = mid;
  }
  return lo + (hi - lo) / 2;
}

/// Distance from lambda to the nearest eigenvalue, accurate to tol.
template <typename Scalar>
Scalar distance_to_spectrum(const Tridiagonal<Scalar>& m, Scalar lambda, Scalar tol) {
  using std::abs;
  const Eigen::Index below = sturm_count(m, lambda);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  if (below > 0) best = std::min(best, abs(lambda - eigenvalue_at(m, below - 1, tol)));
  if (below < m.size()) best = std::min(best, abs(eigenvalue_at(m, below, tol) - lambda));
  return best;
}

namespace detail {

/// LU factorisation with partial pivoting of the tridiagonal M - shift*I
/// (LAPACK gttrf layout), used for inverse iteration.
template <typename Scalar>
class ShiftedTridiagonalLU {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ShiftedTridiagonalLU(const Tridiagonal<Scalar>& m, Scalar shift, Scalar tiny) {
    using std::abs;
    const Eigen::Index n = m.size();
    d_ = m.diag.array() - shift;
    dl_ = m.offdiag;
    du_ = m.offdiag;
    du2_ = Vector::Zero(std::max<Eigen::Index>(n - 2, 0));
    swap_.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (abs(d_(i)) >= abs(dl_(i))) {
        if (d_(i) == 0) d_(i) = tiny;
        const Scalar f = dl_(i) / d_(i);
        dl_(i) = f;
        d_(i + 1) -= f * du_(i);
        if (i + 2 < n) du2_(i) = 0;
      } else {
        const Scalar f = d_(i) / dl_(i);
        d_(i) = dl_(i);
        dl_(i) = f;
        const Scalar tmp = du_(i);
        du_(i) = d_(i + 1);
        d_(i + 1) = tmp - f * d_(i + 1);
        if (i + 2 < n) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -f * du_(i + 1);
        }
        swap_[static_cast<std::size_t>(i)] = true;
      }
    }
    if (d_(n - 1) == 0) d_(n - 1) = tiny;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (abs(d_(i)) < tiny) d_(i) = d_(i) < 0 ? -tiny : tiny;
    }
  }

  Vector solve(Vector b) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (swap_[static_cast<std::size_t>(i)]) {
        const Scalar tmp = b(i);
        b(i) = b(i + 1);
        b(i + 1) = tmp - dl_(i) * b(i);
      } else {
        b(i + 1) -= dl_(i) * b(i);
      }
    }
    b(n - 1) /= d_(n - 1);
    if (n > 1) b(n - 2) = (b(n - 2) - du_(n - 2) * b(n - 1)) / d_(n - 2);
    for (Eigen::Index i = n - 3; i >= 0; --i) {
      b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / d_(i);
    }
    return b;
  }

 private:
  Vector d_, dl_, du_, du2_;
  std::vector<bool> swap_;
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inverse_iteration(
    const Tridiagonal<Scalar>& m, Scalar lambda,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& orthogonal_to, std::uint64_t seed) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = m.size();
  const Scalar norm = std::max(m.norm_inf(), std::numeric_limits<Scalar>::min());
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar target = Scalar(1e-8) * norm;
  ShiftedTridiagonalLU<Scalar> lu(m, lambda, eps * norm);

  SplitMix64 rng(seed);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = Scalar(rng.uniform() - 0.5);

  auto project = [&](Vector& v) {
    for (const auto& q : orthogonal_to) v -= q.dot(v) * q;
  };
  project(x);
  x.normalize();

  Scalar residual = std::numeric_limits<Scalar>::infinity();
  constexpr int kMaxIterations = 10;
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector y = lu.solve(x);
    project(y);
    const Scalar ny = y.norm();
    if (!(ny > 0) || !std::isfinite(static_cast<double>(ny))) break;
    x = y / ny;
    residual = (m.apply(x) - lambda * x).norm();
    if (residual <= target && it >= 1) return x;
  }
  if (residual <= target) return x;
  throw NumericalError("inverse iteration did not converge at lambda=" + std::to_string(double(lambda)) +
                       " (residual " + std::to_string(double(residual)) + ", target " +
                       std::to_string(double(target)) + ")");
}

}  // namespace detail

/// Unit eigenvector for an eigenvalue lambda (sign fixed so the largest entry is positive).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvector(const Tridiagonal<Scalar>& m, Scalar lambda) {
  auto v = detail::inverse_iteration<Scalar>(m, lambda, {}, 0x5eed);
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  return v;
}

template <typename Scalar>
struct EigenPairs {
  std::vector<Scalar> values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // one column per value
};

/// Eigenvalues and eigenvectors; vectors of eigenvalues closer than
/// 1e-8 * ||m|| are reorthogonalised against each other.
template <typename Scalar>
EigenPairs<Scalar> eigenpairs(const Tridiagonal<Scalar>& m, Scalar tol) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  EigenPairs<Scalar> out;
  out.values = eigenvalues(m, tol).eigenvalues;
  const Eigen::Index n = m.size();
  out.vectors.resize(n, n);
  const Scalar cluster_gap = Scalar(1e-8) * m.norm_inf();
  std::vector<Vector> cluster;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (k == 0 || out.values[kk] - out.values[kk - 1] > cluster_gap) cluster.clear();
    Vector v = detail::inverse_iteration<Scalar>(m, out.values[kk], cluster, 0x5eed + static_cast<std::uint64_t>(k));
    cluster.push_back(v);
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace resochain
