#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nearperfect/arith.hpp"

namespace nearperfect {

// Above this bound sigma(n) <= n*(1 + ln n) is no longer provably below
// 2^64, so 64-bit sieve entries could wrap. Requests past it are refused.
inline constexpr u64 kSigmaEntrySafeHi = 10'000'000'000'000'000ull;  // 1e16

struct SieveOptions {
  u64 max_hi = 1ull << 42;      // global bound for range scans
  u64 block_size = 1ull << 22;  // entries per segment
};

// sigma over a contiguous range: sigma_values[i] = sigma(lo + i).
struct SigmaSegment {
  u64 lo = 0;
  u64 hi = 0;  // exclusive
  std::vector<u64> sigma_values;
};

// sigma over the odd numbers in [lo, hi): sigma_values[i] = sigma(first_odd + 2i).
struct OddSigmaSegment {
  u64 lo = 0;
  u64 hi = 0;
  u64 first_odd = 0;
  std::vector<u64> sigma_values;
};

inline u64 isqrt_u64(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

namespace detail {

inline void check_segment_bounds(u64 lo, u64 hi, const SieveOptions& opts) {
  if (lo < 1 || lo >= hi) throw std::range_error("sigma_segment: need 1 <= lo < hi");
  if (hi - lo > opts.block_size) throw std::range_error("sigma_segment: width exceeds block size");
  if (hi > opts.max_hi) throw std::range_error("sigma_segment: hi exceeds configured bound");
  if (hi > kSigmaEntrySafeHi)
    throw std::overflow_error("sigma_segment: sigma values may exceed 64-bit entries");
}

}  // namespace detail

// Divisor accumulation with cofactor pairing: every divisor pair (d, n/d)
// with d <= sqrt(n) is visited once from its small half, so only divisors
// up to sqrt(hi) are enumerated. About (hi-lo)*ln(sqrt(hi)) additions.
inline SigmaSegment sigma_segment(u64 lo, u64 hi, const SieveOptions& opts = {}) {
  detail::check_segment_bounds(lo, hi, opts);
  SigmaSegment seg{lo, hi, std::vector<u64>(hi - lo, 0)};
  auto& vals = seg.sigma_values;
  const u64 root = isqrt_u64(hi - 1);
  for (u64 d = 1; d <= root; ++d) {
    const u64 d2 = d * d;
    u64 m = d2 >= lo ? d2 : ((lo + d - 1) / d) * d;
    u64 c = m / d;  // cofactor, c >= d
    for (; m < hi; m += d, ++c) vals[m - lo] += d + c;
    if (d2 >= lo && d2 < hi) vals[d2 - lo] -= d;  // m = d^2 contributes d once
  }
  return seg;
}

// Odd-only variant: skips even n and even divisors at the sieve level
// (odd n has only odd divisors), roughly a quarter of the additions.
inline OddSigmaSegment sigma_segment_odd(u64 lo, u64 hi, const SieveOptions& opts = {}) {
  detail::check_segment_bounds(lo, hi, opts);
  const u64 first = lo | 1;
  const u64 count = first < hi ? (hi - first + 1) / 2 : 0;
  OddSigmaSegment seg{lo, hi, first, std::vector<u64>(count, 0)};
  auto& vals = seg.sigma_values;
  const u64 root = isqrt_u64(hi - 1);
  for (u64 d = 1; d <= root; d += 2) {
    const u64 d2 = d * d;
    const u64 start = d2 >= first ? d2 : first;
    u64 c = (start + d - 1) / d;
    if (c % 2 == 0) ++c;  // odd multiples only
    u64 m = c * d;
    for (; m < hi; m += 2 * d, c += 2) vals[(m - first) / 2] += d + c;
    if (d2 >= first && d2 < hi) vals[(d2 - first) / 2] -= d;
  }
  return seg;
}

enum class ScanPredicate {
  deficient,
  perfect,
  abundant,
  near_perfect_candidate,  // sigma(n) > 2n, the near-perfect prefilter
  odd_deficient,
  odd_perfect,
  odd_abundant,
  odd_near_perfect_candidate,
};

inline bool scan_predicate_is_odd_only(ScanPredicate p) {
  return p == ScanPredicate::odd_deficient || p == ScanPredicate::odd_perfect ||
         p == ScanPredicate::odd_abundant || p == ScanPredicate::odd_near_perfect_candidate;
}

struct ScanHit {
  u64 n;
  u64 sigma;
  friend bool operator==(const ScanHit&, const ScanHit&) = default;
};

namespace detail {

inline bool scan_keep(ScanPredicate pred, u64 n, u64 sig) {
  switch (pred) {
    case ScanPredicate::deficient:
    case ScanPredicate::odd_deficient:
      return sig < 2 * n;
    case ScanPredicate::perfect:
    case ScanPredicate::odd_perfect:
      return sig == 2 * n;
    case ScanPredicate::abundant:
    case ScanPredicate::odd_abundant:
    case ScanPredicate::near_perfect_candidate:
    case ScanPredicate::odd_near_perfect_candidate:
      return sig > 2 * n;
  }
  return false;
}

}  // namespace detail

// Qualifying (n, sigma(n)) pairs in [lo, hi), ascending. The result does
// not depend on how the range is cut into segments.
inline std::vector<ScanHit> scan_range(u64 lo, u64 hi, ScanPredicate pred,
                                       const SieveOptions& opts = {}) {
  if (lo < 1 || lo >= hi) throw std::range_error("scan_range: need 1 <= lo < hi");
  if (hi > opts.max_hi) throw std::range_error("scan_range: hi exceeds configured bound");
  std::vector<ScanHit> out;
  const bool odd_only = scan_predicate_is_odd_only(pred);
  for (u64 block_lo = lo; block_lo < hi;) {
    const u64 block_hi = std::min(hi, block_lo + opts.block_size);
    if (odd_only) {
      const OddSigmaSegment seg = sigma_segment_odd(block_lo, block_hi, opts);
      for (std::size_t i = 0; i < seg.sigma_values.size(); ++i) {
        const u64 n = seg.first_odd + 2 * i;
        if (detail::scan_keep(pred, n, seg.sigma_values[i])) out.push_back({n, seg.sigma_values[i]});
      }
    } else {
      const SigmaSegment seg = sigma_segment(block_lo, block_hi, opts);
      for (std::size_t i = 0; i < seg.sigma_values.size(); ++i) {
        const u64 n = seg.lo + i;
        if (detail::scan_keep(pred, n, seg.sigma_values[i])) out.push_back({n, seg.sigma_values[i]});
      }
    }
    block_lo = block_hi;
  }
  return out;
}

}  // namespace nearperfect
