#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nearperfect/arith.hpp"
#include "nearperfect/bignat.hpp"
#include "nearperfect/classify.hpp"

namespace nearperfect {

// Raised when an argument that must be an even perfect number is not.
struct NotPerfectError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A prime 2^t - 2^k - 1 with t >= k+1, k >= 1. Primality is exact below
// 2^64 and strong-probable-prime above; the (t, k) pair determines the
// value and vice versa.
struct PkPrime {
  unsigned t;
  unsigned k;
  BigNat value;
};

enum class TheoremId { theorem3, theorem4, theorem5 };

struct Provenance {
  TheoremId id;
  u64 a;  // t | m | p
  u64 b;  // k | x | unused
};

inline std::string to_string(const Provenance& p) {
  switch (p.id) {
    case TheoremId::theorem3:
      return "theorem3(t=" + std::to_string(p.a) + ",k=" + std::to_string(p.b) + ")";
    case TheoremId::theorem4:
      return "theorem4(m=" + std::to_string(p.a) + ",x=" + std::to_string(p.b) + ")";
    case TheoremId::theorem5:
      return "theorem5(p=" + std::to_string(p.a) + ")";
  }
  return "?";
}

// A constructed near-perfect number. Values that fit 64 bits are re-checked
// through the classifier at generation time; larger ones are reported in
// exact big form with verified = false.
struct GeneratedNearPerfect {
  BigNat n;
  BigNat redundant;
  Provenance provenance;
  bool verified = false;
};

namespace detail {

inline void verify_generated(GeneratedNearPerfect& g) {
  if (!g.n.fits_u64()) return;  // beyond the checker's range, left unverified
  const auto w = near_perfect_witness(g.n.to_u64());
  if (!w || !g.redundant.fits_u64() || w->redundant != g.redundant.to_u64())
    throw std::logic_error("construct: generated value failed the near-perfect check: " + g.n.str());
  g.verified = true;
}

inline BigNat p_family_value(unsigned t, unsigned k) {
  return BigNat::pow2(t) - BigNat::pow2(k) - BigNat(1);
}

}  // namespace detail

// Euclid's construction: 2^(p-1)(2^p - 1), present iff 2^p - 1 is prime.
inline std::optional<u64> euclid_perfect(u64 p) {
  if (!is_prime_u64(p)) throw std::invalid_argument("euclid_perfect: p must be prime");
  if (!lucas_lehmer(p)) return std::nullopt;
  if (p > 31) throw std::overflow_error("euclid_perfect: 2^(p-1)(2^p-1) exceeds 64 bits");
  return (u64{1} << (p - 1)) * ((u64{1} << p) - 1);
}

// All primes 2^t - 2^k - 1 with t <= t_max, ascending by value. Distinct
// (t, k) pairs never collide, so no deduplication is needed.
inline std::vector<PkPrime> enumerate_p_primes(unsigned t_max, unsigned rounds = 0) {
  if (t_max < 2) throw std::invalid_argument("enumerate_p_primes: t_max must be at least 2");
  std::vector<PkPrime> out;
  for (unsigned t = 2; t <= t_max; ++t) {
    for (unsigned k = 1; k < t; ++k) {
      BigNat v = detail::p_family_value(t, k);
      if (is_probable_prime(v, rounds)) out.push_back({t, k, std::move(v)});
    }
  }
  std::sort(out.begin(), out.end(), [](const PkPrime& a, const PkPrime& b) { return a.value < b.value; });
  return out;
}

struct PkRepresentation {
  unsigned t;
  unsigned k;
  friend bool operator==(const PkRepresentation&, const PkRepresentation&) = default;
};

// The unique (t, k) with q = 2^t - 2^k - 1, k >= 1, t >= k+1, if any:
// q + 1 = 2^k (2^(t-k) - 1), so strip the power of two and require an
// all-ones remainder.
inline std::optional<PkRepresentation> represent_in_p(u64 q) {
  if (q < 2) throw std::invalid_argument("represent_in_p: q must be at least 2");
  u128 m = u128(q) + 1;
  unsigned k = 0;
  while ((m & 1) == 0) {
    m >>= 1;
    ++k;
  }
  if (k == 0) return std::nullopt;  // q + 1 odd, no 2^k factor
  if ((m & (m + 1)) != 0) return std::nullopt;  // odd part is not 2^s - 1
  unsigned s = 0;
  while (m) {
    m >>= 1;
    ++s;
  }
  return PkRepresentation{k + s, k};
}

// Theorem: 2^(t-1)(2^t - 2^k - 1) is near-perfect with redundant divisor
// 2^k whenever 2^t - 2^k - 1 is prime.
inline std::optional<GeneratedNearPerfect> theorem3_generate(unsigned t, unsigned k,
                                                             unsigned rounds = 0) {
  if (t < 2 || k < 1 || k > t - 1)
    throw std::invalid_argument("theorem3_generate: need t >= 2 and 1 <= k <= t-1");
  BigNat q = detail::p_family_value(t, k);
  if (!is_probable_prime(q, rounds)) return std::nullopt;
  GeneratedNearPerfect g{BigNat::pow2(t - 1) * q, BigNat::pow2(k),
                         Provenance{TheoremId::theorem3, t, k}, false};
  detail::verify_generated(g);
  return g;
}

// Theorem: 2^x m with m even perfect is near-perfect iff x = 1 or x = p,
// where 2^(p-1) || m; the redundant divisor is 2^p (2^x - 1).
inline std::optional<GeneratedNearPerfect> theorem4_generate(u64 m, unsigned x) {
  if (x < 1) throw std::invalid_argument("theorem4_generate: x must be at least 1");
  if (m == 0 || m % 2 != 0 || classify(m).tag != Tag::perfect)
    throw NotPerfectError("theorem4_generate: m is not an even perfect number");
  const unsigned p = static_cast<unsigned>(std::countr_zero(m)) + 1;
  if (x != 1 && x != p) return std::nullopt;
  GeneratedNearPerfect g{BigNat::pow2(x) * BigNat(m),
                         BigNat::pow2(p) * (BigNat::pow2(x) - BigNat(1)),
                         Provenance{TheoremId::theorem4, m, x}, false};
  detail::verify_generated(g);
  return g;
}

// Theorem: 2^(p-1)(2^p - 1)^2 is near-perfect with odd redundant divisor
// 2^p - 1 whenever 2^p - 1 is a Mersenne prime.
inline std::optional<GeneratedNearPerfect> theorem5_generate(u64 p) {
  if (!is_prime_u64(p)) throw std::invalid_argument("theorem5_generate: p must be prime");
  if (!lucas_lehmer(p)) return std::nullopt;
  const BigNat q = BigNat::pow2(static_cast<unsigned>(p)) - BigNat(1);
  GeneratedNearPerfect g{BigNat::pow2(static_cast<unsigned>(p - 1)) * q * q, q,
                         Provenance{TheoremId::theorem5, p, 0}, false};
  detail::verify_generated(g);
  return g;
}

// Every even perfect m is a difference of two near-perfect numbers:
// n2 = 2^p m (Theorem 4 with x = p) minus n3 = (2^p - 1) m (Theorem 5).
inline std::pair<GeneratedNearPerfect, GeneratedNearPerfect> perfect_difference_pair(u64 m) {
  if (m == 0 || m % 2 != 0 || classify(m).tag != Tag::perfect)
    throw NotPerfectError("perfect_difference_pair: m is not an even perfect number");
  const unsigned p = static_cast<unsigned>(std::countr_zero(m)) + 1;
  auto n2 = theorem4_generate(m, p);
  auto n3 = theorem5_generate(p);
  if (!n2 || !n3) throw std::logic_error("perfect_difference_pair: construction vanished");
  if (n2->n - n3->n != BigNat(m))
    throw std::logic_error("perfect_difference_pair: difference is not m");
  return {std::move(*n2), std::move(*n3)};
}

}  // namespace nearperfect
