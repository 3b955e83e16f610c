#include "smoothtwin/arith.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace smoothtwin {

BigInt FactorBase::generator(std::size_t i) const {
  BigInt g;
  mpz_ui_pow_ui(g.get_mpz_t(), primes.at(i), static_cast<unsigned long>(multiplicity(i)));
  return g;
}

double FactorBase::log_generator(std::size_t i) const {
  return multiplicity(i) * std::log(static_cast<double>(primes.at(i)));
}

FactorBase FactorBase::with_pow2(int f) const {
  if (f < 1) throw std::invalid_argument("pow2 exponent must be >= 1");
  if (primes.empty() || primes[0] != 2) {
    throw std::invalid_argument("factor base has no slot for 2");
  }
  FactorBase out = *this;
  out.pow2_f = f;
  return out;
}

FactorBase FactorBase::without(const std::vector<std::uint64_t>& removed) const {
  FactorBase out;
  out.bound = bound;
  out.pow2_f = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (std::find(removed.begin(), removed.end(), primes[i]) != removed.end()) continue;
    if (i == 0 && primes[0] == 2) out.pow2_f = pow2_f;
    out.primes.push_back(primes[i]);
  }
  return out;
}

bool FactorBase::contains(std::uint64_t p) const {
  return std::binary_search(primes.begin(), primes.end(), p);
}

std::size_t FactorBase::index_of(std::uint64_t p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) {
    throw std::out_of_range("prime " + std::to_string(p) + " not in factor base");
  }
  return static_cast<std::size_t>(it - primes.begin());
}

SignedFactorization::SignedFactorization(std::vector<Entry> entries) {
  std::map<std::uint64_t, std::int64_t> merged;
  for (const auto& [p, e] : entries) merged[p] += e;
  for (const auto& [p, e] : merged) {
    if (e != 0) entries_.emplace_back(p, e);
  }
}

std::int64_t SignedFactorization::exponent(std::uint64_t p) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                             [](const Entry& e, std::uint64_t q) { return e.first < q; });
  return (it != entries_.end() && it->first == p) ? it->second : 0;
}

namespace {

BigInt product_of(const std::vector<SignedFactorization::Entry>& entries, int sign) {
  BigInt acc = 1;
  BigInt pw;
  for (const auto& [p, e] : entries) {
    if (e * sign <= 0) continue;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(e * sign));
    acc *= pw;
  }
  return acc;
}

}  // namespace

BigInt SignedFactorization::numerator() const { return product_of(entries_, 1); }
BigInt SignedFactorization::denominator() const { return product_of(entries_, -1); }

BigInt SignedFactorization::value() const {
  if (!all_positive()) throw std::logic_error("factorization has negative exponents");
  return numerator();
}

bool SignedFactorization::all_positive() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.second > 0; });
}

std::uint64_t SignedFactorization::max_prime() const {
  return entries_.empty() ? 1 : entries_.back().first;
}

SignedFactorization SignedFactorization::negated() const {
  SignedFactorization out = *this;
  for (auto& entry : out.entries_) entry.second = -entry.second;
  return out;
}

SignedFactorization SignedFactorization::operator*(const SignedFactorization& other) const {
  std::vector<Entry> all = entries_;
  all.insert(all.end(), other.entries_.begin(), other.entries_.end());
  return SignedFactorization(std::move(all));
}

std::string SignedFactorization::to_string() const {
  if (entries_.empty()) return "1";
  std::ostringstream out;
  bool first = true;
  for (const auto& [p, e] : entries_) {
    if (!first) out << " * ";
    first = false;
    out << p;
    if (e != 1) out << "^" << e;
  }
  return out.str();
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

FactorBase sieve_primes(std::uint64_t bound) {
  if (bound < 2) throw std::invalid_argument("smoothness bound must be at least 2");
  FactorBase fb;
  fb.bound = bound;
  fb.primes = primes_up_to(bound);
  return fb;
}

std::pair<SignedFactorization, BigInt> factor_over(const BigInt& n, const FactorBase& fb) {
  if (n < 1) throw std::invalid_argument("factor_over expects n >= 1");
  BigInt rest = n;
  std::vector<SignedFactorization::Entry> entries;
  for (std::uint64_t p : fb.primes) {
    if (rest == 1) break;
    std::int64_t e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    if (e > 0) entries.emplace_back(p, e);
  }
  return {SignedFactorization(std::move(entries)), rest};
}

TwinVerdict verify_twin(const BigInt& r, std::uint64_t bound) {
  if (r < 1) throw std::invalid_argument("verify_twin expects r >= 1");
  const FactorBase fb = sieve_primes(bound);
  auto [fac_r, co_r] = factor_over(r, fb);
  if (co_r != 1) return TwinRejection{co_r, 0};
  auto [fac_r1, co_r1] = factor_over(BigInt(r + 1), fb);
  if (co_r1 != 1) return TwinRejection{co_r1, 1};
  SmoothTwin twin;
  twin.r = r;
  twin.strict_bound = std::max(fac_r.max_prime(), fac_r1.max_prime());
  twin.fac_r = std::move(fac_r);
  twin.fac_r1 = std::move(fac_r1);
  twin.bits = log2_big(r);
  return twin;
}

SmoothTwin make_twin(const BigInt& r, std::uint64_t bound) {
  auto verdict = verify_twin(r, bound);
  if (auto* twin = std::get_if<SmoothTwin>(&verdict)) return std::move(*twin);
  throw std::invalid_argument(r.get_str() + " is not a " + std::to_string(bound) + "-smooth twin");
}

namespace {

bool miller_rabin_round(const BigInt& n, const BigInt& d, std::uint64_t s, const BigInt& base) {
  const BigInt n_minus_1 = n - 1;
  BigInt x;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n_minus_1) return true;
  for (std::uint64_t i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

}  // namespace

bool is_probable_prime(const BigInt& n, int rounds) {
  if (n < 2) return false;
  static constexpr unsigned kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned p : kSmall) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  const BigInt n_minus_1 = n - 1;
  const std::uint64_t s = val2(n_minus_1);
  BigInt d = n_minus_1 >> static_cast<mp_bitcnt_t>(s);

  // 3317044064679887385961981: first 13 prime bases are deterministic below it.
  static const BigInt kDeterministic("3317044064679887385961981");
  if (n < kDeterministic) {
    for (unsigned p : kSmall) {
      if (!miller_rabin_round(n, d, s, BigInt(p))) return false;
    }
    return true;
  }
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(0x5eed5eedUL);
  const BigInt span = n - 3;
  for (int i = 0; i < std::max(rounds, 1); ++i) {
    BigInt base = rng.get_z_range(span) + 2;
    if (!miller_rabin_round(n, d, s, base)) return false;
  }
  return true;
}

std::uint64_t val2(const BigInt& n) {
  if (n == 0) return 0;
  return mpz_scan1(n.get_mpz_t(), 0);
}

double log2_big(const BigInt& n) {
  if (n <= 0) throw std::domain_error("log2 of non-positive integer");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

BigInt parse_bigint(const std::string& text) {
  BigInt out;
  if (text.empty() || out.set_str(text, 10) != 0) {
    throw std::invalid_argument("not a decimal integer: '" + text + "'");
  }
  return out;
}

}  // namespace smoothtwin
