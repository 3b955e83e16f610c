#include "doctest.h"
#include "oracles.hpp"
#include "smoothtwin/arith.hpp"

using namespace smoothtwin;

TEST_CASE("sieve_primes lists the primes up to B") {
  CHECK(sieve_primes(10).primes == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(sieve_primes(200).size() == 46);
  CHECK(sieve_primes(773).size() == 137);
  CHECK(sieve_primes(2).size() == 1);
  CHECK_THROWS_AS(sieve_primes(1), std::invalid_argument);
  CHECK(primes_up_to(1).empty());
}

TEST_CASE("factor base copies") {
  const FactorBase fb = sieve_primes(13);
  const FactorBase f4 = fb.with_pow2(4);
  CHECK(f4.generator(0) == 16);
  CHECK(f4.multiplicity(0) == 4);
  CHECK(f4.multiplicity(1) == 1);
  CHECK(f4.log_generator(0) == doctest::Approx(4 * std::log(2.0)));
  const FactorBase w = fb.without({5, 11});
  CHECK(w.primes == std::vector<std::uint64_t>{2, 3, 7, 13});
  CHECK(w.contains(7));
  CHECK_FALSE(w.contains(5));
  CHECK(w.index_of(13) == 3);
  CHECK_THROWS(w.index_of(5));
  CHECK_THROWS_AS(fb.without({2}).with_pow2(3), std::invalid_argument);
}

TEST_CASE("factor_over examples") {
  const auto [fac, co] = factor_over(BigInt("63927525375"), sieve_primes(41));
  CHECK(co == 1);
  CHECK(fac.entries() == std::vector<SignedFactorization::Entry>{{3, 3}, {5, 3}, {7, 7}, {23, 1}});
  const auto [one, co1] = factor_over(BigInt(1), sieve_primes(7));
  CHECK(one.empty());
  CHECK(co1 == 1);
  const auto [f202, c202] = factor_over(BigInt(202), sieve_primes(10));
  CHECK(f202.entries() == std::vector<SignedFactorization::Entry>{{2, 1}});
  CHECK(c202 == 101);
  CHECK_THROWS(factor_over(BigInt(0), sieve_primes(10)));
}

TEST_CASE("factor_over reconstructs every n up to 10^5") {
  const FactorBase fb = sieve_primes(30);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    const auto [fac, co] = factor_over(BigInt(std::to_string(n)), fb);
    const BigInt back = (fac.empty() ? BigInt(1) : fac.value()) * co;
    REQUIRE(back == n);
    for (auto p : fb.primes) REQUIRE(co % p != 0);
  }
}

TEST_CASE("verify_twin examples") {
  auto v = verify_twin(BigInt(80), 5);
  REQUIRE(std::holds_alternative<SmoothTwin>(v));
  const auto& t = std::get<SmoothTwin>(v);
  CHECK(t.strict_bound == 5);
  CHECK(t.fac_r.value() == 80);
  CHECK(t.fac_r1.value() == 81);

  auto big = verify_twin(BigInt("53234795127882729824"), 127);
  REQUIRE(std::holds_alternative<SmoothTwin>(big));
  CHECK(std::get<SmoothTwin>(big).strict_bound == 127);

  auto rej = verify_twin(BigInt(7), 5);
  REQUIRE(std::holds_alternative<TwinRejection>(rej));
  CHECK(std::get<TwinRejection>(rej).cofactor == 7);
  CHECK(std::get<TwinRejection>(rej).which == 0);

  auto rej1 = verify_twin(BigInt(81), 5);
  REQUIRE(std::holds_alternative<TwinRejection>(rej1));
  CHECK(std::get<TwinRejection>(rej1).which == 1);
  CHECK_THROWS_AS(make_twin(BigInt(81), 5), std::invalid_argument);
}

TEST_CASE("verify_twin agrees with trial division") {
  for (std::uint64_t B : {3, 7, 13, 29}) {
    for (std::uint64_t r = 1; r < 20000; ++r) {
      const bool expect = oracle::smooth_by_trial(r, B) && oracle::smooth_by_trial(r + 1, B);
      const auto v = verify_twin(BigInt(std::to_string(r)), B);
      REQUIRE(std::holds_alternative<SmoothTwin>(v) == expect);
      if (expect) {
        const auto& t = std::get<SmoothTwin>(v);
        REQUIRE(t.strict_bound <= B);
        const BigInt prod = t.r * (t.r + 1);
        REQUIRE(prod % t.strict_bound == 0);
      }
    }
  }
}

TEST_CASE("primality") {
  CHECK(is_probable_prime(BigInt(2)));
  CHECK_FALSE(is_probable_prime(BigInt(561)));
  CHECK_FALSE(is_probable_prime(BigInt(1)));
  CHECK(is_probable_prime(BigInt("170141183460469231731687303715884105727")));
  BigInt r = BigInt(1) << 31;
  r *= BigInt("2493490582368659543466244025");
  CHECK(is_probable_prime(2 * r * r - 1));
  CHECK_FALSE(is_probable_prime(BigInt("3317044064679887385961981")));  // strong pseudoprime to every prime base up to 41
  for (std::uint64_t n = 2; n < 5000; ++n) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) prime = false;
    REQUIRE(is_probable_prime(BigInt(std::to_string(n))) == prime);
  }
}

TEST_CASE("signed factorizations") {
  SignedFactorization x({{3, -2}, {2, 3}, {5, 0}, {2, 1}});
  CHECK(x.entries() == std::vector<SignedFactorization::Entry>{{2, 4}, {3, -2}});
  CHECK(x.numerator() == 16);
  CHECK(x.denominator() == 9);
  CHECK(x.exponent(3) == -2);
  CHECK(x.exponent(7) == 0);
  CHECK((x * x.negated()).empty());
  CHECK_THROWS(x.value());
  CHECK(x.max_prime() == 3);
}

TEST_CASE("helpers") {
  CHECK(val2(BigInt(48)) == 4);
  CHECK(val2(BigInt(0)) == 0);
  CHECK(log2_big(BigInt(1) << 300) == doctest::Approx(300.0));
  CHECK(parse_bigint("123456789012345678901234567890") == BigInt("123456789012345678901234567890"));
  CHECK_THROWS_AS(parse_bigint("12x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bigint(""), std::invalid_argument);
}
