#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "nearperfect/arith.hpp"
#include "nearperfect/parallel.hpp"
#include "nearperfect/sieve.hpp"

namespace nearperfect {

enum class Tag { deficient, perfect, abundant };

inline std::string_view to_string(Tag t) {
  switch (t) {
    case Tag::deficient: return "deficient";
    case Tag::perfect: return "perfect";
    case Tag::abundant: return "abundant";
  }
  return "?";
}

struct Classification {
  u64 n;
  u64 sigma;
  Tag tag;
  std::int64_t abundance;  // sigma(n) - 2n
};

// A near-perfect number together with its redundant divisor
// d = sigma(n) - 2n, the one proper divisor left out of the sum.
struct NearPerfectWitness {
  u64 n;
  u64 sigma;
  u64 redundant;
  friend bool operator==(const NearPerfectWitness&, const NearPerfectWitness&) = default;
};

inline Classification classify(u64 n) {
  if (n == 0) throw std::invalid_argument("classify: n must be positive");
  const u64 s = sigma(n);
  const __int128 ab = static_cast<__int128>(s) - static_cast<__int128>(2) * n;
  if (ab > INT64_MAX || ab < INT64_MIN) throw std::overflow_error("classify: abundance exceeds 64 bits");
  const Tag tag = ab == 0 ? Tag::perfect : (ab < 0 ? Tag::deficient : Tag::abundant);
  return {n, s, tag, static_cast<std::int64_t>(ab)};
}

namespace detail {

// d = sigma - 2n must be a proper divisor: 1 <= d < n and d | n. d = n
// (sigma = 3n) is rejected; n itself is not a proper divisor.
inline std::optional<NearPerfectWitness> witness_from_sigma(u64 n, u64 sig) {
  if (sig <= 2 * n) return std::nullopt;
  const u64 d = sig - 2 * n;
  if (d >= n || n % d != 0) return std::nullopt;
  return NearPerfectWitness{n, sig, d};
}

}  // namespace detail

inline std::optional<NearPerfectWitness> near_perfect_witness(u64 n) {
  if (n == 0) throw std::invalid_argument("near_perfect_witness: n must be positive");
  return detail::witness_from_sigma(n, sigma(n));
}

// Near-perfect numbers in [lo, hi), ascending. Sieve-filters on abundance
// first, so non-candidates are never factorized or divided.
inline std::vector<NearPerfectWitness> enumerate_near_perfect(u64 lo, u64 hi,
                                                              const SieveOptions& opts = {},
                                                              unsigned workers = 1) {
  if (lo < 1 || lo >= hi) throw std::range_error("enumerate_near_perfect: need 1 <= lo < hi");
  std::vector<NearPerfectWitness> out;
  run_segments_ordered(
      lo, hi, opts.block_size, workers,
      [&opts](u64 seg_lo, u64 seg_hi) {
        std::vector<NearPerfectWitness> hits;
        for (const ScanHit& h : scan_range(seg_lo, seg_hi, ScanPredicate::near_perfect_candidate, opts))
          if (auto w = detail::witness_from_sigma(h.n, h.sigma)) hits.push_back(*w);
        return hits;
      },
      [&out](u64, u64, std::vector<NearPerfectWitness>&& hits) {
        out.insert(out.end(), hits.begin(), hits.end());
      });
  return out;
}

struct PseudoperfectOptions {
  u64 cap = 10'000'000;  // subset-sum DP costs about n * tau(n) / 64 word ops
};

// Exact subset-sum over the proper divisors: true iff some subset sums to
// n. Deficient n can never qualify; perfect and near-perfect n always do.
inline bool is_pseudoperfect(u64 n, const PseudoperfectOptions& opts = {}) {
  if (n == 0) throw std::invalid_argument("is_pseudoperfect: n must be positive");
  if (n > opts.cap) throw std::domain_error("is_pseudoperfect: n exceeds configured cap");
  const u64 sig = sigma(n);
  if (sig < 2 * n) return false;        // proper divisors sum below n
  if (sig == 2 * n) return true;        // perfect: all proper divisors
  if (detail::witness_from_sigma(n, sig)) return true;  // drop the redundant one

  std::vector<u64> props = divisors(n);
  props.pop_back();  // drop n itself
  std::vector<u64> reach((n + 64) / 64, 0);
  reach[0] = 1;  // empty subset
  const auto test = [&](u64 bit) { return (reach[bit / 64] >> (bit % 64)) & 1; };
  for (const u64 d : props) {
    // reach |= reach << d, top-down so each divisor is used at most once
    const std::size_t word_shift = d / 64;
    const unsigned bit_shift = d % 64;
    if (bit_shift == 0) {
      for (std::size_t i = reach.size(); i-- > word_shift;) reach[i] |= reach[i - word_shift];
    } else {
      for (std::size_t i = reach.size(); i-- > word_shift + 1;)
        reach[i] |= (reach[i - word_shift] << bit_shift) |
                    (reach[i - word_shift - 1] >> (64 - bit_shift));
      reach[word_shift] |= reach[0] << bit_shift;
    }
    if (test(n)) return true;
  }
  return test(n);
}

// Perfect when l does not divide n; otherwise near-perfect with redundant
// divisor exactly l.
inline bool is_n_minus_l_perfect(u64 n, u64 l) {
  if (n == 0 || l == 0) throw std::invalid_argument("is_n_minus_l_perfect: arguments must be positive");
  if (n % l != 0) return classify(n).tag == Tag::perfect;
  const auto w = near_perfect_witness(n);
  return w.has_value() && w->redundant == l;
}

}  // namespace nearperfect
