#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace smoothtwin {

using BigInt = mpz_class;

/// Ordered set of distinct primes p_1 < ... < p_n, all at most `bound`.
///
/// Slot 0 may stand for the prime power 2^f instead of 2 (see `pow2_f`);
/// `primes` always stores the underlying primes, `generator(i)` the value
/// that actually generates the lattice column.
struct FactorBase {
  std::uint64_t bound = 0;
  std::vector<std::uint64_t> primes;
  int pow2_f = 1;

  std::size_t size() const { return primes.size(); }
  bool empty() const { return primes.empty(); }

  /// Multiplicity of the underlying prime carried by one unit of slot i.
  int multiplicity(std::size_t i) const {
    return (i == 0 && pow2_f > 1 && primes[0] == 2) ? pow2_f : 1;
  }
  BigInt generator(std::size_t i) const;
  double log_generator(std::size_t i) const;

  /// Copy with the slot holding 2 replaced by 2^f. Requires 2 in slot 0.
  FactorBase with_pow2(int f) const;
  /// Copy with the given primes removed.
  FactorBase without(const std::vector<std::uint64_t>& removed) const;
  bool contains(std::uint64_t p) const;
  std::size_t index_of(std::uint64_t p) const;
};

/// Exponent vector of a smooth rational a/b: positive exponents build a,
/// negative exponents build b. Only nonzero exponents are kept.
class SignedFactorization {
 public:
  using Entry = std::pair<std::uint64_t, std::int64_t>;

  SignedFactorization() = default;
  /// Merges repeated primes and drops zero exponents.
  explicit SignedFactorization(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::int64_t exponent(std::uint64_t p) const;

  BigInt numerator() const;
  BigInt denominator() const;
  /// The integer product; requires every exponent to be positive.
  BigInt value() const;
  bool all_positive() const;
  std::uint64_t max_prime() const;

  SignedFactorization negated() const;
  SignedFactorization operator*(const SignedFactorization& other) const;

  std::string to_string() const;

  friend bool operator==(const SignedFactorization&, const SignedFactorization&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Consecutive integers (r, r+1) with r(r+1) smooth.
struct SmoothTwin {
  BigInt r;
  SignedFactorization fac_r;
  SignedFactorization fac_r1;
  std::uint64_t strict_bound = 0;
  double bits = 0.0;
};

struct TwinRejection {
  BigInt cofactor;
  /// 0 when the rough part belongs to r, 1 when it belongs to r+1.
  int which = 0;
};

using TwinVerdict = std::variant<SmoothTwin, TwinRejection>;

/// All primes up to B. Throws std::invalid_argument for B < 2.
FactorBase sieve_primes(std::uint64_t bound);

/// Primes up to `limit` as a plain list (no bound checks); limit may be < 2.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Trial division of n over the factor base. The cofactor is n divided by
/// the smooth part and is coprime to every prime of the base.
std::pair<SignedFactorization, BigInt> factor_over(const BigInt& n, const FactorBase& fb);

/// Accepts iff r(r+1) is B-smooth.
TwinVerdict verify_twin(const BigInt& r, std::uint64_t bound);

/// Builds the twin record for an r already known to be smooth enough;
/// throws std::invalid_argument if it is not.
SmoothTwin make_twin(const BigInt& r, std::uint64_t bound);

/// Miller-Rabin. Deterministic below 3.3e24 (prime bases up to 41), otherwise
/// `rounds` pseudo-random bases drawn from a fixed-seed generator.
bool is_probable_prime(const BigInt& n, int rounds = 64);

/// 2-adic valuation; 0 for n == 0.
std::uint64_t val2(const BigInt& n);

/// log2 of a positive integer, accurate for arbitrarily large values.
double log2_big(const BigInt& n);

BigInt parse_bigint(const std::string& text);

}  // namespace smoothtwin
