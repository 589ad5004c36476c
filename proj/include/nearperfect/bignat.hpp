#pragma once

#include <gmp.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace nearperfect {

static_assert(sizeof(unsigned long) >= sizeof(std::uint64_t),
              "BigNat relies on mpz_*_ui covering the full 64-bit range");

// Arbitrary-precision nonnegative integer, a value-semantic wrapper over
// GMP's mpz_t. GMP keeps a unique limb representation, so equal values
// compare equal bit for bit (no representational aliasing).
//
// The public surface stays nonnegative: subtraction below zero throws
// instead of producing a negative value.
class BigNat {
 public:
  BigNat() { mpz_init(v_); }

  BigNat(std::uint64_t x) { mpz_init_set_ui(v_, static_cast<unsigned long>(x)); }

  // Parses a base-10 string. Rejects signs, whitespace and junk.
  explicit BigNat(const std::string& decimal) {
    if (decimal.empty() || decimal.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("BigNat: not a decimal numeral: '" + decimal + "'");
    }
    if (mpz_init_set_str(v_, decimal.c_str(), 10) != 0) {
      mpz_clear(v_);
      throw std::invalid_argument("BigNat: not a decimal numeral: '" + decimal + "'");
    }
  }

  BigNat(const BigNat& o) { mpz_init_set(v_, o.v_); }

  BigNat(BigNat&& o) noexcept {
    mpz_init(v_);
    mpz_swap(v_, o.v_);
  }

  BigNat& operator=(const BigNat& o) {
    if (this != &o) mpz_set(v_, o.v_);
    return *this;
  }

  BigNat& operator=(BigNat&& o) noexcept {
    mpz_swap(v_, o.v_);
    return *this;
  }

  ~BigNat() { mpz_clear(v_); }

  static BigNat pow2(unsigned bits) {
    BigNat r;
    mpz_setbit(r.v_, bits);
    return r;
  }

  bool is_zero() const { return mpz_sgn(v_) == 0; }
  bool is_odd() const { return mpz_odd_p(v_) != 0; }

  // Number of bits in the binary representation; 0 for zero.
  std::size_t bit_length() const { return is_zero() ? 0 : mpz_sizeinbase(v_, 2); }

  bool fits_u64() const { return mpz_fits_ulong_p(v_) != 0; }

  std::uint64_t to_u64() const {
    if (!fits_u64()) throw std::overflow_error("BigNat: value exceeds 64 bits");
    return static_cast<std::uint64_t>(mpz_get_ui(v_));
  }

  std::string str() const {
    char* s = mpz_get_str(nullptr, 10, v_);
    std::string out(s);
    void (*freefn)(void*, std::size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(s, out.size() + 1);
    return out;
  }

  friend BigNat operator+(const BigNat& a, const BigNat& b) {
    BigNat r;
    mpz_add(r.v_, a.v_, b.v_);
    return r;
  }

  friend BigNat operator-(const BigNat& a, const BigNat& b) {
    if (mpz_cmp(a.v_, b.v_) < 0) throw std::underflow_error("BigNat: negative difference");
    BigNat r;
    mpz_sub(r.v_, a.v_, b.v_);
    return r;
  }

  friend BigNat operator*(const BigNat& a, const BigNat& b) {
    BigNat r;
    mpz_mul(r.v_, a.v_, b.v_);
    return r;
  }

  friend bool operator==(const BigNat& a, const BigNat& b) { return mpz_cmp(a.v_, b.v_) == 0; }

  friend std::strong_ordering operator<=>(const BigNat& a, const BigNat& b) {
    const int c = mpz_cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
         : c > 0 ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }

  // Read-only handle for gmp-level routines (primality tests and the like).
  mpz_srcptr raw() const { return v_; }

 private:
  mpz_t v_;
};

}  // namespace nearperfect
