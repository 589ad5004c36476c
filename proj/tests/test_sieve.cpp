#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <random>
#include <vector>

#include "nearperfect/arith.hpp"
#include "nearperfect/sieve.hpp"

using namespace nearperfect;

TEST_CASE("isqrt_u64 is exact") {
  CHECK(isqrt_u64(0) == 0);
  CHECK(isqrt_u64(1) == 1);
  CHECK(isqrt_u64(3) == 1);
  CHECK(isqrt_u64(4) == 2);
  CHECK(isqrt_u64(99) == 9);
  CHECK(isqrt_u64(100) == 10);
  CHECK(isqrt_u64(~u64{0}) == 4294967295ull);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const u64 n = rng();
    const u64 r = isqrt_u64(n);
    CHECK(r <= n / (r ? r : 1));
    CHECK(r + 1 > n / (r + 1));
  }
}

TEST_CASE("sigma_segment examples") {
  const SigmaSegment seg = sigma_segment(1, 8);
  CHECK(seg.sigma_values == std::vector<u64>{1, 3, 4, 7, 6, 12, 8});
  CHECK(sigma_segment(6, 7).sigma_values == std::vector<u64>{12});

  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const u64 lo = rng() % 1000000 + 1;
    CHECK(sigma_segment(lo, lo + 1).sigma_values == std::vector<u64>{sigma(lo)});
  }
}

TEST_CASE("segment entries agree with arith.sigma pointwise") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    const u64 lo = rng() % 100000000 + 1;
    const u64 hi = lo + 100;
    const SigmaSegment seg = sigma_segment(lo, hi);
    REQUIRE(seg.sigma_values.size() == hi - lo);
    for (u64 n = lo; n < hi; ++n) CHECK(seg.sigma_values[n - lo] == sigma(n));
  }
}

TEST_CASE("odd segments agree with arith.sigma and skip even n") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 60; ++rep) {
    const u64 lo = rng() % 10000000 + 1;
    const u64 hi = lo + rng() % 300 + 2;
    const OddSigmaSegment seg = sigma_segment_odd(lo, hi);
    const u64 first = lo | 1;
    u64 count = 0;
    for (u64 n = first; n < hi; n += 2) {
      CHECK(seg.sigma_values[(n - first) / 2] == sigma(n));
      ++count;
    }
    CHECK(seg.sigma_values.size() == count);
  }
}

TEST_CASE("segmentation invariance: concatenated halves equal the whole") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 40; ++rep) {
    const u64 a = rng() % 5000000 + 1;
    const u64 width = rng() % 3000 + 2;
    const u64 c = a + width;
    const u64 b = a + 1 + rng() % (width - 1);
    const SigmaSegment whole = sigma_segment(a, c);
    const SigmaSegment left = sigma_segment(a, b);
    const SigmaSegment right = sigma_segment(b, c);
    std::vector<u64> glued = left.sigma_values;
    glued.insert(glued.end(), right.sigma_values.begin(), right.sigma_values.end());
    CHECK(glued == whole.sigma_values);
  }
}

TEST_CASE("scan_range finds the classical perfect numbers") {
  const auto hits = scan_range(1, 10000000, ScanPredicate::perfect);
  CHECK(hits == std::vector<ScanHit>{{6, 12}, {28, 56}, {496, 992}, {8128, 16256}});

  CHECK(scan_range(1, 30, ScanPredicate::perfect) == std::vector<ScanHit>{{6, 12}, {28, 56}});
  CHECK(scan_range(1, 2, ScanPredicate::perfect).empty());
  CHECK(scan_range(1, 1000, ScanPredicate::perfect) ==
        std::vector<ScanHit>{{6, 12}, {28, 56}, {496, 992}});
}

TEST_CASE("the fifth perfect number appears once the range reaches it") {
  const auto hits = scan_range(10000000, 40000000, ScanPredicate::perfect);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == ScanHit{33550336, 67100672});
}

TEST_CASE("every even perfect number found has the 2^(p-1)(2^p - 1) shape") {
  for (const auto& h : scan_range(1, 40000000, ScanPredicate::perfect)) {
    const int p = std::countr_zero(h.n) + 1;
    CHECK(is_prime_u64(static_cast<u64>(p)));
    const u64 mersenne = (u64{1} << p) - 1;
    CHECK(is_prime_u64(mersenne));
    CHECK(h.n == (u64{1} << (p - 1)) * mersenne);
  }
}

TEST_CASE("scan_range predicates partition the range") {
  const u64 lo = 1, hi = 20000;
  const auto def = scan_range(lo, hi, ScanPredicate::deficient);
  const auto perf = scan_range(lo, hi, ScanPredicate::perfect);
  const auto ab = scan_range(lo, hi, ScanPredicate::abundant);
  CHECK(def.size() + perf.size() + ab.size() == hi - lo);
  for (const auto& h : def) CHECK(h.sigma < 2 * h.n);
  for (const auto& h : perf) CHECK(h.sigma == 2 * h.n);
  for (const auto& h : ab) CHECK(h.sigma > 2 * h.n);
  // near-perfect candidates are exactly the abundant numbers
  CHECK(scan_range(lo, hi, ScanPredicate::near_perfect_candidate) == ab);
}

TEST_CASE("odd-only predicates return only odd n and match a filtered scan") {
  const u64 lo = 1, hi = 200000;
  const auto odd_ab = scan_range(lo, hi, ScanPredicate::odd_abundant);
  for (const auto& h : odd_ab) CHECK(h.n % 2 == 1);
  std::vector<ScanHit> expect;
  for (const auto& h : scan_range(lo, hi, ScanPredicate::abundant))
    if (h.n % 2 == 1) expect.push_back(h);
  CHECK(odd_ab == expect);
  // scans do not depend on where the segment boundaries fall
  SieveOptions tiny;
  tiny.block_size = 777;
  CHECK(scan_range(lo, hi, ScanPredicate::odd_abundant, tiny) == odd_ab);
}

TEST_CASE("segment preconditions are enforced") {
  CHECK_THROWS_AS(sigma_segment(0, 5), std::range_error);
  CHECK_THROWS_AS(sigma_segment(5, 5), std::range_error);
  CHECK_THROWS_AS(sigma_segment(9, 5), std::range_error);
  SieveOptions opts;
  opts.block_size = 16;
  CHECK_THROWS_AS(sigma_segment(1, 100, opts), std::range_error);
  SieveOptions bounded;
  bounded.max_hi = 1000;
  CHECK_THROWS_AS(sigma_segment(990, 1001, bounded), std::range_error);
  CHECK_NOTHROW(sigma_segment(990, 1000, bounded));
  // beyond the provable 64-bit-entry range: overflow, not a range problem
  SieveOptions huge;
  huge.max_hi = ~u64{0};
  CHECK_THROWS_AS(sigma_segment(kSigmaEntrySafeHi, kSigmaEntrySafeHi + 10, huge),
                  std::overflow_error);
  CHECK_THROWS_AS(scan_range(0, 10, ScanPredicate::perfect), std::range_error);
  CHECK_THROWS_AS(scan_range(10, 10, ScanPredicate::perfect), std::range_error);
}
