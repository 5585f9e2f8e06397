#include <doctest.h>

#include "resochain/classify.hpp"
#include "resochain/tridiag_eigen.hpp"

using namespace resochain;

namespace {

std::vector<BandInterval> in_spectrum(const BandReport& r) { return r.with_verdict(Verdict::InSpectrum); }

}  // namespace

TEST_CASE("verdict names round-trip") {
  for (auto v : {Verdict::InSpectrum, Verdict::CertifiedGap, Verdict::Indeterminate}) {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(verdict_from_string("gap"), ValidationError);
}

TEST_CASE("classify_frequency on the standard blocks") {
  const auto lib = standard_library();
  const auto v05 = classify_frequency(lib, 0.5);
  CHECK(v05.verdict == Verdict::InSpectrum);
  CHECK(v05.traces[0] == doctest::Approx(0.0));
  CHECK(v05.non_hyperbolic == std::vector<int>{1, 2});

  const auto v15 = classify_frequency(lib, 1.5);
  CHECK(v15.verdict == Verdict::CertifiedGap);
  CHECK(v15.traces[0] == doctest::Approx(-4.0));
  CHECK(v15.traces[1] == doctest::Approx(-2.5));
  REQUIRE(v15.cone);
  REQUIRE(v15.sink_component);

  const auto v25 = classify_frequency(lib, 2.5);
  CHECK(v25.verdict == Verdict::InSpectrum);
  CHECK(v25.traces[1] == doctest::Approx(-0.5));
  CHECK(v25.non_hyperbolic == std::vector<int>{2});

  const auto v35 = classify_frequency(lib, 3.5);
  CHECK(v35.verdict == Verdict::CertifiedGap);
  CHECK(v35.traces[0] == doctest::Approx(-12.0));
  CHECK(v35.traces[1] == doctest::Approx(5.5));

  CHECK_THROWS_AS(classify_frequency(lib, -0.1), DomainError);
}

TEST_CASE("verdict trichotomy is consistent with the traces") {
  const auto lib = standard_library();
  for (int k = 0; k <= 800; ++k) {
    const double lambda = 8.0 * k / 800;
    const auto v = classify_frequency(lib, lambda);
    bool any_elliptic = false;
    for (double t : v.traces) any_elliptic |= std::abs(t) <= 2;
    CHECK((v.verdict == Verdict::InSpectrum) == any_elliptic);
    if (v.verdict == Verdict::CertifiedGap) CHECK(v.cone.has_value());
  }
}

TEST_CASE("scan of the standard blocks") {
  const auto lib = standard_library();
  ScanOptions opt;
  opt.grid = 401;
  const auto report = scan(lib, 0.0, 4.0, opt);
  const auto bands = in_spectrum(report);
  REQUIRE(bands.size() == 2);
  CHECK(bands[0].lo == 0.0);
  CHECK(std::abs(bands[0].hi - 1.0) <= 1e-10);
  CHECK(std::abs(bands[1].lo - 2.0) <= 1e-10);
  CHECK(std::abs(bands[1].hi - 3.0) <= 1e-10);
  CHECK(bands[0].non_hyperbolic == std::vector<int>{1, 2});
  CHECK(bands[1].non_hyperbolic == std::vector<int>{2});

  // Intervals partition the range.
  CHECK(report.intervals.front().lo == 0.0);
  CHECK(report.intervals.back().hi == 4.0);
  for (std::size_t k = 0; k + 1 < report.intervals.size(); ++k) {
    CHECK(report.intervals[k].hi == report.intervals[k + 1].lo);
    CHECK(report.endpoints[k] == report.intervals[k].hi);
  }
  const auto* gap = report.find(1.5);
  REQUIRE(gap);
  CHECK(gap->verdict == Verdict::CertifiedGap);
  CHECK(report.find(3.5)->verdict == Verdict::CertifiedGap);

  SUBCASE("deterministic and thread-count independent") {
    ScanOptions par = opt;
    par.threads = 4;
    const auto again = scan(lib, 0.0, 4.0, par);
    REQUIRE(again.intervals.size() == report.intervals.size());
    for (std::size_t k = 0; k < again.intervals.size(); ++k) {
      CHECK(again.intervals[k].lo == report.intervals[k].lo);
      CHECK(again.intervals[k].hi == report.intervals[k].hi);
      CHECK(again.intervals[k].verdict == report.intervals[k].verdict);
    }
  }
}

TEST_CASE("scan edge cases") {
  const BlockLibrary mono({Block({Resonator(2, 2, 1)})});
  const auto report = scan(mono, 0.0, 4.0, {});
  const auto bands = in_spectrum(report);
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].lo == 0.0);
  CHECK(std::abs(bands[0].hi - 1.0) <= 1e-10);

  ScanOptions two;
  two.grid = 2;
  const auto tiny = scan(standard_library(), 1.2, 1.8, two);
  CHECK(tiny.intervals.size() == 1);
  CHECK(tiny.intervals[0].verdict == Verdict::CertifiedGap);

  CHECK_THROWS_AS(scan(mono, 1.0, 1.0, {}), ValidationError);
  CHECK_THROWS_AS(scan(mono, 2.0, 1.0, {}), ValidationError);
  CHECK_THROWS_AS(scan(mono, -1.0, 1.0, {}), ValidationError);
  ScanOptions one;
  one.grid = 1;
  CHECK_THROWS_AS(scan(mono, 0.0, 1.0, one), ValidationError);
}

TEST_CASE("finite-size probe") {
  const auto lib = standard_library();
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  for (const auto& p : finite_size_probe(lib, 1.5, {50, 100, 200}, seeds)) CHECK(p.distance >= 0.05);
  double best = 1;
  for (const auto& p : finite_size_probe(lib, 0.5, {200}, seeds)) best = std::min(best, p.distance);
  CHECK(best <= 0.02);

  SUBCASE("exact eigenvalue") {
    const auto seq = sample_iid(lib, 30, 4);
    const auto j = assemble_jacobi_finite<double>(expand_blocks(lib, seq));
    const double ev = eigenvalue_at(j, 5, 1e-14);
    const auto probe = finite_size_probe(lib, ev, {30}, {4});
    CHECK(probe[0].distance <= 1e-12);
  }
}

TEST_CASE("certified gaps keep finite sections away") {
  const auto lib = standard_library();
  const auto report = scan(lib, 0.0, 4.0, {});
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (const auto& iv : report.with_verdict(Verdict::CertifiedGap)) {
    for (int k = 1; k <= 10; ++k) {
      const double lambda = iv.lo + (iv.hi - iv.lo) * k / 11.0;
      // Margin: half the distance to the nearest band edge.
      const double margin = 0.5 * std::min(lambda - iv.lo, iv.hi - lambda);
      for (const auto& p : finite_size_probe(lib, lambda, {50, 100, 200}, seeds)) CHECK(p.distance >= margin);
    }
  }
}

TEST_CASE("minimum in-spectrum distance over seeds is nonincreasing in size") {
  const auto lib = standard_library();
  const auto report = scan(lib, 0.0, 4.0, {});
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (const auto& iv : report.with_verdict(Verdict::InSpectrum)) {
    for (int k = 1; k <= 10; ++k) {
      const double lambda = iv.lo + (iv.hi - iv.lo) * k / 11.0;
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t m : {50, 100, 200, 400}) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : finite_size_probe(lib, lambda, {m}, seeds)) best = std::min(best, p.distance);
        CHECK_MESSAGE(best <= prev, "lambda = " << lambda << ", M = " << m);
        prev = best;
      }
    }
  }
}
