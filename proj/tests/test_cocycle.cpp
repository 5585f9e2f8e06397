#include <doctest.h>

#include "resochain/cocycle.hpp"

using namespace resochain;

namespace {

Resonator random_resonator(SplitMix64& rng) {
  return {0.2 + 3 * rng.uniform(), 0.2 + 3 * rng.uniform(), 0.2 + 3 * rng.uniform()};
}

double max_abs(const Mat2d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("propagation matrix") {
  Mat2d shear;
  shear << 1, 1, 0, 1;
  CHECK(propagation_matrix(Resonator(1, 1, 1), 0.0) == shear);
  Mat2d p;
  p << -7, 2, -4, 1;
  CHECK(propagation_matrix(Resonator(2, 2, 1), 2.0) == p);

  SplitMix64 rng(1);
  double worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto m = propagation_matrix(random_resonator(rng), 10 * rng.uniform());
    worst = std::max(worst, std::abs(m.determinant() - 1));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("transfer matrix") {
  Mat2d expected;
  const double lambda = 0.7;
  expected << 2 - lambda, -1, 1, 0;
  CHECK((transfer_matrix(-1.0, -1.0, 2.0, lambda) - expected).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(transfer_matrix(-1.0, -2.0, 3.0, 3.0)(0, 0) == 0.0);
  CHECK_THROWS_AS(transfer_matrix(-1.0, 0.0, 1.0, 1.0), DomainError);

  SplitMix64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const double ap = -0.1 - rng.uniform(), ac = -0.1 - rng.uniform();
    const auto m = transfer_matrix(ap, ac, 4 * rng.uniform(), 4 * rng.uniform());
    CHECK(std::abs(m.determinant() - ap / ac) <= 1e-14 * std::max(1.0, max_abs(m) * max_abs(m)));
  }
}

TEST_CASE("conjugacy") {
  Mat2d unit;
  unit << 1, 0, 1, -1;
  CHECK(conjugacy(Resonator(1, 1, 1), Resonator(1, 1, 1)) == unit);

  SplitMix64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto cur = random_resonator(rng), prev = random_resonator(rng);
    const double det = -cur.wave_speed * prev.wave_speed / (std::sqrt(cur.length * prev.length) * prev.spacing);
    CHECK(conjugacy(cur, prev).determinant() == doctest::Approx(det).epsilon(1e-13));
  }
}

TEST_CASE("cohomology between the Jacobi and propagation cocycles") {
  SplitMix64 rng(4);
  double worst = 0;
  for (int chain = 0; chain < 100; ++chain) {
    std::vector<Resonator> r;
    for (int i = 0; i < 50; ++i) r.push_back(random_resonator(rng));
    const double lambda = 5 * rng.uniform();
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const Mat2d t = transfer_matrix_at<double>(r, i, lambda);
      const Mat2d lhs = conjugacy(r[i + 1], r[i]) * t * conjugacy(r[i], r[i - 1]).inverse();
      worst = std::max(worst, max_abs(lhs - propagation_matrix(r[i], lambda)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("block propagation") {
  const Block mono({Resonator(2, 2, 1)});
  const Block dimer({Resonator(1, 1, 1), Resonator(1, 2, 1)});
  for (double lambda : {0.0, 0.3, 1.0, 1.5, 2.5, 3.5, 7.0}) {
    CHECK(block_propagation(mono, lambda).trace() == doctest::Approx(2 - 4 * lambda).epsilon(1e-14));
    CHECK(block_propagation(dimer, lambda).trace() ==
          doctest::Approx(2 * lambda * lambda - 6 * lambda + 2).epsilon(1e-13));
    CHECK(block_propagation(mono, lambda) == propagation_matrix(mono[0], lambda));
  }
  // First resonator applied first.
  const Mat2d p = propagation_matrix(dimer[1], 0.8) * propagation_matrix(dimer[0], 0.8);
  CHECK(max_abs(block_propagation(dimer, 0.8) - p) <= 1e-15);

  SplitMix64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<Resonator> a, b;
    for (int i = 0; i < 1 + static_cast<int>(rng.next() % 4); ++i) a.push_back(random_resonator(rng));
    for (int i = 0; i < 1 + static_cast<int>(rng.next() % 4); ++i) b.push_back(random_resonator(rng));
    std::vector<Resonator> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const double lambda = 3 * rng.uniform();
    const Mat2d joint = block_propagation(Block(ab), lambda);
    const Mat2d split = block_propagation(Block(b), lambda) * block_propagation(Block(a), lambda);
    CHECK(max_abs(joint - split) <= 1e-12 * std::max(1.0, max_abs(joint)));
    CHECK(std::abs(joint.determinant() - 1) <= 1e-10 * std::max(1.0, max_abs(joint) * max_abs(joint)));
  }
}

TEST_CASE("cocycle iteration") {
  SplitMix64 rng(6);
  std::vector<Mat2d> factors;
  for (int i = 0; i < 200; ++i) factors.push_back(propagation_matrix(random_resonator(rng), 4 * rng.uniform()));
  const CocycleSource<double> source = [&](long k) { return factors.at(static_cast<std::size_t>(k + 100)); };

  const auto id = iterate(source, 3, 0);
  CHECK(id.matrix == Mat2d::Identity());
  CHECK(id.log_scale == 0.0);
  CHECK(max_abs(iterate(source, 5, 1).reconstruct() - source(5)) <= 1e-14 * max_abs(source(5)));

  for (int t = 0; t < 100; ++t) {
    const long i = static_cast<long>(rng.next() % 40) - 20;
    const long m = 1 + static_cast<long>(rng.next() % 20), n = 1 + static_cast<long>(rng.next() % 20);
    const Mat2d whole = iterate(source, i, m + n).reconstruct();
    const Mat2d parts = iterate(source, i + m, n).reconstruct() * iterate(source, i, m).reconstruct();
    CHECK(max_abs(whole - parts) <= 1e-9 * max_abs(whole));
    const auto it = iterate(source, i, m);
    CHECK(max_abs(it.matrix) == doctest::Approx(1.0));
  }

  SUBCASE("matches the naive product") {
    Mat2d naive = Mat2d::Identity();
    for (long k = 0; k < 30; ++k) naive = source(k) * naive;
    CHECK(max_abs(iterate(source, 0, 30).reconstruct() - naive) <= 1e-10 * max_abs(naive));
  }
  SUBCASE("negative iteration inverts") {
    const Mat2d fwd = iterate(source, -7, 12).reconstruct();
    const Mat2d back = iterate(source, 5, -12).reconstruct();
    CHECK(max_abs(back * fwd - Mat2d::Identity()) <= 1e-8);
  }
  SUBCASE("singular factor") {
    const CocycleSource<double> bad = [](long) { return Mat2d::Zero(); };
    CHECK_THROWS_AS(iterate(bad, 0, -2), NumericalError);
  }
}
