#pragma once

#include <cstdint>
#include <vector>

#include "smoothtwin/arith.hpp"
#include "smoothtwin/search.hpp"

namespace smoothtwin {

/// Smoothness data of p = 2 r^2 - 1, read off p^2 - 1 = 4 r^2 (r-1)(r+1).
struct BoostReport {
  BigInt r;
  BigInt p;
  bool is_prime = false;
  /// val2(p + 1) = 2 val2(r) + 1, the usable power of two.
  std::uint64_t f = 0;
  /// val2(p^2 - 1) = f + val2(p - 1).
  std::uint64_t val2_total = 0;
  /// Odd B-smooth part of p^2 - 1.
  BigInt T;
  SignedFactorization T_factorization;
  /// Prime (or unsplit) factors above B, with multiplicity.
  std::vector<BigInt> rough_cofactors;
  bool meets_T_bound = false;  // T^4 >= p^5
  bool meets_torsion = false;  // 2^f T <= p^2 - 1
  /// f <= log2(p) / 4: primality of p alone settles the parameter.
  bool f_below_quarter = false;
  std::uint64_t B_used = 0;
};

BoostReport boost_check(const BigInt& r, std::uint64_t B = 2048);

/// Reports for both r and r+1 of each twin, kept when p is prime and f >= f_min.
std::vector<BoostReport> twin_and_boost_filter(const TwinSet& twins, std::uint64_t B, std::uint64_t f_min);

/// Splits n into prime factors with Pollard-Brent rho; parts that resist
/// `iterations` steps are returned unsplit. Ascending.
std::vector<BigInt> split_cofactor(const BigInt& n, std::uint64_t iterations = 1u << 20);

}  // namespace smoothtwin
