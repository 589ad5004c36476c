#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nearperfect/bignat.hpp"

namespace nearperfect {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct PrimePower {
  u64 prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Prime-power decomposition of n, primes strictly increasing. n = 1 has an
// empty factor list.
struct Factorization {
  u64 n = 1;
  std::vector<PrimePower> factors;

  u64 recompose() const {
    u64 r = 1;
    for (const auto& [p, e] : factors)
      for (unsigned i = 0; i < e; ++i) r *= p;
    return r;
  }
};

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Odd primes below 2^16, sieved once at first use. Immutable afterwards.
inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t limit = 1u << 16;
    std::vector<bool> composite(limit, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i < limit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint32_t j = i * i; j < limit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

}  // namespace detail

// Deterministic primality for the full 64-bit range: strong tests with a
// fixed witness set known to have no 64-bit strong pseudoprimes.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;

  const int s = std::countr_zero(n - 1);
  const u64 d = (n - 1) >> s;
  for (u64 a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
    a %= n;
    if (a == 0) continue;
    u64 x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s && witness; ++i) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) witness = false;
    }
    if (witness) return false;
  }
  return true;
}

namespace detail {

// Brent's cycle variant of the rho method. n must be odd, composite, and
// free of factors below 2^16. Start point and polynomial increment are
// derived from (n, attempt) with splitmix64, so output is reproducible.
inline u64 pollard_brent(u64 n) {
  for (u64 attempt = 0;; ++attempt) {
    const u64 c = 1 + splitmix64(n + 0x1000 * attempt) % (n - 1);
    u64 y = 1 + splitmix64(~n + attempt) % (n - 1);
    const auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };

    u64 g = 1, r = 1, q = 1, x = 0, ys = y;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += 128) {
        ys = y;
        const u64 lim = std::min<u64>(128, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
      r <<= 1;
    }
    if (g == n) {
      // The batched gcd jumped past the factor; replay one step at a time.
      g = 1;
      while (g == 1) {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      }
    }
    if (g != n) return g;
  }
}

}  // namespace detail

// Prime-power decomposition via trial division below 2^16 and seeded Brent
// rho for whatever survives. Deterministic for a given n.
inline Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  Factorization f;
  f.n = n;
  u64 m = n;
  for (const std::uint32_t p : detail::small_primes()) {
    if (u64(p) * p > m) break;
    if (m % p == 0) {
      unsigned e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      f.factors.push_back({p, e});
    }
  }
  if (m > 1) {
    // m has no factor below 2^16, so it splits into at most three primes.
    std::vector<u64> pending{m};
    std::vector<u64> primes;
    while (!pending.empty()) {
      const u64 x = pending.back();
      pending.pop_back();
      if (is_prime_u64(x)) {
        primes.push_back(x);
        continue;
      }
      const u64 d = detail::pollard_brent(x);
      pending.push_back(d);
      pending.push_back(x / d);
    }
    std::sort(primes.begin(), primes.end());
    for (std::size_t i = 0; i < primes.size();) {
      std::size_t j = i;
      while (j < primes.size() && primes[j] == primes[i]) ++j;
      f.factors.push_back({primes[i], static_cast<unsigned>(j - i)});
      i = j;
    }
  }
  return f;
}

// sigma(n) = sum of all divisors, computed as prod (p^(e+1)-1)/(p-1) in 128
// bits. For n < 2^64 the result is below 2^70, so the wide form never wraps.
inline u128 sigma_wide(u64 n) {
  const Factorization f = factorize(n);
  u128 r = 1;
  for (const auto& [p, e] : f.factors) {
    u128 term = 1, pk = 1;
    for (unsigned i = 0; i < e; ++i) {
      pk *= p;
      term += pk;
    }
    r *= term;
  }
  return r;
}

inline u64 sigma(u64 n) {
  const u128 s = sigma_wide(n);
  if (s > ~u64{0}) throw std::overflow_error("sigma: result exceeds 64 bits");
  return static_cast<u64>(s);
}

// All divisors of n, ascending; divisors(1) = {1}.
inline std::vector<u64> divisors(u64 n) {
  const Factorization f = factorize(n);
  std::vector<u64> ds{1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = ds.size();
    u64 pk = 1;
    for (unsigned i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

namespace detail {

inline bool mpz_strong_sprp(mpz_srcptr n, mpz_srcptr base) {
  mpz_t n1, d, x;
  mpz_inits(n1, d, x, nullptr);
  mpz_sub_ui(n1, n, 1);
  const mp_bitcnt_t s = mpz_scan1(n1, 0);
  mpz_tdiv_q_2exp(d, n1, s);
  mpz_powm(x, base, d, n);
  bool probable = mpz_cmp_ui(x, 1) == 0 || mpz_cmp(x, n1) == 0;
  for (mp_bitcnt_t i = 1; i < s && !probable; ++i) {
    mpz_mul(x, x, x);
    mpz_mod(x, x, n);
    if (mpz_cmp(x, n1) == 0) probable = true;
  }
  mpz_clears(n1, d, x, nullptr);
  return probable;
}

// Strong Lucas test with Selfridge's parameter choice (P = 1, Q = (1-D)/4,
// D the first of 5, -7, 9, -11, ... with Jacobi(D, n) = -1). The caller has
// excluded perfect squares and numbers with factors below 2^16.
inline bool mpz_strong_lucas(mpz_srcptr n) {
  long d_param = 5;
  mpz_t tmp;
  mpz_init(tmp);
  for (;;) {
    mpz_set_si(tmp, d_param);
    const int j = mpz_jacobi(tmp, n);
    if (j == 0) {
      // gcd(|D|, n) > 1; impossible here unless n is composite.
      mpz_clear(tmp);
      return false;
    }
    if (j == -1) break;
    d_param = d_param > 0 ? -(d_param + 2) : -(d_param - 2);
    if (d_param > 1000000 || d_param < -1000000)
      throw std::logic_error("strong_lucas: no viable D (square slipped through)");
  }
  const long q_param = (1 - d_param) / 4;

  mpz_t delta, dd, u, v, qk, t;
  mpz_inits(delta, dd, u, v, qk, t, nullptr);
  mpz_add_ui(delta, n, 1);
  const mp_bitcnt_t s = mpz_scan1(delta, 0);
  mpz_tdiv_q_2exp(dd, delta, s);

  const auto halve_mod = [&](mpz_ptr x) {
    mpz_mod(x, x, n);  // into [0, n) before the parity check
    if (mpz_odd_p(x)) mpz_add(x, x, n);
    mpz_tdiv_q_2exp(x, x, 1);
  };

  // Binary ladder over the bits of dd, starting from U_1 = 1, V_1 = P = 1.
  mpz_set_ui(u, 1);
  mpz_set_ui(v, 1);
  mpz_set_si(qk, q_param);
  mpz_mod(qk, qk, n);
  for (mp_bitcnt_t i = mpz_sizeinbase(dd, 2) - 1; i-- > 0;) {
    // (U, V, Q^m) -> (U*V, V^2 - 2Q^m, Q^2m)
    mpz_mul(u, u, v);
    mpz_mod(u, u, n);
    mpz_mul(v, v, v);
    mpz_submul_ui(v, qk, 2);
    mpz_mod(v, v, n);
    mpz_mul(qk, qk, qk);
    mpz_mod(qk, qk, n);
    if (mpz_tstbit(dd, i)) {
      // (U, V) -> ((U + V)/2, (D*U + V)/2), Q^m -> Q^(m+1)
      mpz_set(t, u);
      mpz_add(u, u, v);
      halve_mod(u);
      mpz_mul_si(t, t, d_param);
      mpz_add(v, v, t);
      halve_mod(v);
      mpz_mul_si(qk, qk, q_param);
      mpz_mod(qk, qk, n);
    }
  }

  bool probable = mpz_sgn(u) == 0 || mpz_sgn(v) == 0;
  for (mp_bitcnt_t r = 1; r < s && !probable; ++r) {
    mpz_mul(v, v, v);
    mpz_submul_ui(v, qk, 2);
    mpz_mod(v, v, n);
    if (mpz_sgn(v) == 0) probable = true;
    mpz_mul(qk, qk, qk);
    mpz_mod(qk, qk, n);
  }
  mpz_clears(delta, dd, u, v, qk, t, nullptr);
  return probable;
}

// Probable-prime battery for odd n with no factor below 2^16: a base-2
// strong test plus a strong Lucas test (no composite passing both is
// known), then `rounds` additional strong tests with bases drawn from a
// fixed-seed generator.
inline bool baillie_psw(mpz_srcptr n, unsigned rounds) {
  if (mpz_perfect_square_p(n)) return false;
  mpz_t base;
  mpz_init_set_ui(base, 2);
  bool ok = mpz_strong_sprp(n, base);
  if (ok) ok = mpz_strong_lucas(n);
  if (ok && rounds > 0) {
    gmp_randstate_t rng;
    gmp_randinit_mt(rng);
    gmp_randseed_ui(rng, 0x5eed5eedul);
    mpz_t span;
    mpz_init(span);
    mpz_sub_ui(span, n, 3);
    for (unsigned i = 0; i < rounds && ok; ++i) {
      mpz_urandomm(base, rng, span);
      mpz_add_ui(base, base, 2);
      ok = mpz_strong_sprp(n, base);
    }
    mpz_clear(span);
    gmp_randclear(rng);
  }
  mpz_clear(base);
  return ok;
}

}  // namespace detail

// False is definitive. True is exact below 2^64 (deterministic witness set)
// and strong-probable-prime above it.
inline bool is_probable_prime(const BigNat& n, unsigned rounds = 0) {
  if (n.fits_u64()) return is_prime_u64(n.to_u64());
  mpz_srcptr z = n.raw();
  if (mpz_even_p(z)) return false;
  for (const std::uint32_t p : detail::small_primes())
    if (mpz_fdiv_ui(z, p) == 0) return false;
  return detail::baillie_psw(z, rounds);
}

// True iff 2^p - 1 is prime. Exponent must itself be prime.
inline bool lucas_lehmer(u64 p) {
  if (!is_prime_u64(p)) throw std::invalid_argument("lucas_lehmer: exponent must be prime");
  if (p == 2) return true;
  if (p <= 63) {
    const u64 m = (u64{1} << p) - 1;
    u64 s = 4;
    for (u64 i = 0; i + 2 < p; ++i) s = (static_cast<u64>(u128(s) * s % m) + m - 2) % m;
    return s == 0;
  }
  mpz_t m, s;
  mpz_init(m);
  mpz_init_set_ui(s, 4);
  mpz_setbit(m, static_cast<mp_bitcnt_t>(p));
  mpz_sub_ui(m, m, 1);
  for (u64 i = 0; i + 2 < p; ++i) {
    mpz_mul(s, s, s);
    mpz_sub_ui(s, s, 2);
    mpz_mod(s, s, m);
  }
  const bool prime = mpz_sgn(s) == 0;
  mpz_clears(m, s, nullptr);
  return prime;
}

}  // namespace nearperfect
