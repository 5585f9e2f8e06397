#pragma once

// Transfer matrices, the conjugacy sequence and resonator/block propagation
// matrices, plus renormalised cocycle products.

#include <cmath>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "resochain/blocks.hpp"
#include "resochain/capacitance.hpp"
#include "resochain/errors.hpp"

namespace resochain {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Mat2d = Mat2<double>;
using Vec2d = Vec2<double>;

/// Propagates (u, u') at the left edge of a resonator to the left edge of the next one.
template <typename Scalar = double>
Mat2<Scalar> propagation_matrix(const Resonator& r, Scalar lambda) {
  const Scalar k = Scalar(r.length) * lambda / (Scalar(r.wave_speed) * Scalar(r.wave_speed));
  const Scalar s = Scalar(r.spacing);
  Mat2<Scalar> p;
  p << Scalar(1) - s * k, s,
       -k, Scalar(1);
  return p;
}

/// Jacobi cocycle map advancing (v_i, v_{i-1}) to (v_{i+1}, v_i).
template <typename Scalar = double>
Mat2<Scalar> transfer_matrix(Scalar a_prev, Scalar a_cur, Scalar b_cur, Scalar lambda) {
  if (a_cur == Scalar(0)) throw DomainError("transfer matrix needs a nonzero off-diagonal entry");
  Mat2<Scalar> t;
  t << lambda - b_cur, -a_prev,
       a_cur, Scalar(0);
  return t / a_cur;
}

/// Transfer matrix of the bi-infinite bands at interior resonator i (needs i-1 and i+1).
template <typename Scalar = double>
Mat2<Scalar> transfer_matrix_at(std::span<const Resonator> r, std::size_t i, Scalar lambda) {
  if (i == 0 || i + 1 >= r.size()) throw DomainError("transfer matrix needs both neighbours");
  const Scalar a_prev = jacobi_offdiag<Scalar>(r[i - 1], r[i]);
  const Scalar a_cur = jacobi_offdiag<Scalar>(r[i], r[i + 1]);
  const Scalar b_cur = jacobi_diag<Scalar>(r[i], Scalar(r[i - 1].spacing));
  return transfer_matrix<Scalar>(a_prev, a_cur, b_cur, lambda);
}

/// Change of basis (v_i, v_{i-1}) -> (u(x_i), u'(x_i)): undo the V^{1/2}
/// symmetrisation, then take value and left-gap derivative.
template <typename Scalar = double>
Mat2<Scalar> conjugacy(const Resonator& cur, const Resonator& prev) {
  using std::sqrt;
  const Scalar gap = Scalar(prev.spacing);
  const Scalar wc = Scalar(cur.wave_speed) / sqrt(Scalar(cur.length));
  const Scalar wp = Scalar(prev.wave_speed) / sqrt(Scalar(prev.length));
  Mat2<Scalar> q;
  q << wc, Scalar(0),
       wc / gap, -wp / gap;
  return q;
}

/// Block propagation matrix P_len ... P_1 (first resonator applied first).
template <typename Scalar = double>
Mat2<Scalar> block_propagation(const Block& block, Scalar lambda) {
  Mat2<Scalar> p = Mat2<Scalar>::Identity();
  for (const auto& r : block.resonators()) p = propagation_matrix<Scalar>(r, lambda) * p;
  return p;
}

/// Product stored as exp(log_scale) * matrix with matrix renormalised to max-abs entry 1.
template <typename Scalar>
struct IteratedProduct {
  Mat2<Scalar> matrix = Mat2<Scalar>::Identity();
  Scalar log_scale = 0;

  Mat2<Scalar> reconstruct() const { return std::exp(log_scale) * matrix; }

  void absorb_left(const Mat2<Scalar>& factor) {
    matrix = factor * matrix;
    renormalise();
  }
  void renormalise() {
    const Scalar scale = matrix.cwiseAbs().maxCoeff();
    if (!(scale > 0) || !std::isfinite(static_cast<double>(scale))) {
      throw NumericalError("cocycle product degenerated");
    }
    matrix /= scale;
    log_scale += std::log(scale);
  }
};

template <typename Scalar>
using CocycleSource = std::function<Mat2<Scalar>(long)>;

/// Cocycle iteration A_n(i): A(i+n-1)...A(i) for n > 0, identity for n = 0,
/// A(i+n)^{-1} ... A(i-1)^{-1} for n < 0.
template <typename Scalar = double>
IteratedProduct<Scalar> iterate(const CocycleSource<Scalar>& source, long start, long n) {
  IteratedProduct<Scalar> out;
  if (n > 0) {
    for (long k = 0; k < n; ++k) out.absorb_left(source(start + k));
  } else if (n < 0) {
    for (long k = start - 1; k >= start + n; --k) {
      const Mat2<Scalar> a = source(k);
      const Scalar det = a.determinant();
      if (det == Scalar(0) || !std::isfinite(static_cast<double>(det))) {
        throw NumericalError("singular cocycle factor at index " + std::to_string(k));
      }
      out.absorb_left(a.inverse());
    }
  }
  return out;
}

}  // namespace resochain
