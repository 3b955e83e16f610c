#include "smoothtwin/sqisign.hpp"

#include <algorithm>
#include <stdexcept>

namespace smoothtwin {

namespace {

std::uint64_t pos_val2(const BigInt& n) { return val2(n); }

// Brent's cycle finding on x -> x^2 + c mod n with batched gcds.
BigInt rho_factor(const BigInt& n, std::uint64_t c, std::uint64_t iterations) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  BigInt y = 2, x, ys, q = 1, g = 1;
  const std::uint64_t m = 128;
  std::uint64_t r = 1, steps = 0;
  auto f = [&](const BigInt& v) {
    BigInt w = v * v + c;
    return BigInt(w % n);
  };
  while (g == 1 && steps < iterations) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = f(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      const std::uint64_t lim = std::min(m, r - k);
      for (std::uint64_t i = 0; i < lim; ++i) {
        y = f(y);
        q = (q * abs(x - y)) % n;
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += lim;
      steps += lim;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = f(ys);
      BigInt d = abs(x - ys);
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

void split_into(const BigInt& n, std::uint64_t iterations, std::vector<BigInt>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  for (std::uint64_t c = 1; c <= 4; ++c) {
    BigInt d = rho_factor(n, c, iterations);
    if (d != 1 && d != n) {
      split_into(d, iterations, out);
      split_into(n / d, iterations, out);
      return;
    }
  }
  out.push_back(n);
}

}  // namespace

std::vector<BigInt> split_cofactor(const BigInt& n, std::uint64_t iterations) {
  if (n < 1) throw std::invalid_argument("cofactor must be positive");
  std::vector<BigInt> out;
  split_into(n, iterations, out);
  std::sort(out.begin(), out.end());
  return out;
}

BoostReport boost_check(const BigInt& r, std::uint64_t B) {
  if (r < 2) throw std::invalid_argument("boost_check needs r >= 2");
  BoostReport rep;
  rep.r = r;
  rep.B_used = B;
  rep.p = 2 * r * r - 1;
  rep.is_prime = is_probable_prime(rep.p);
  rep.f = 2 * pos_val2(r) + 1;
  rep.val2_total = rep.f + 1 + pos_val2(r - 1) + pos_val2(r + 1);

  FactorBase odd = sieve_primes(std::max<std::uint64_t>(B, 2)).without({2});
  std::vector<SignedFactorization::Entry> entries;
  std::vector<BigInt> rough;
  auto absorb = [&](const BigInt& n, int times) {
    BigInt m = n;
    mpz_tdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), pos_val2(m));
    auto [fac, cof] = factor_over(m, odd);
    for (const auto& [p, e] : fac.entries()) entries.emplace_back(p, e * times);
    if (cof != 1)
      for (const auto& part : split_cofactor(cof))
        for (int t = 0; t < times; ++t) rough.push_back(part);
  };
  absorb(r, 2);
  absorb(r - 1, 1);
  absorb(r + 1, 1);
  rep.T_factorization = SignedFactorization(std::move(entries));
  rep.T = rep.T_factorization.empty() ? BigInt(1) : rep.T_factorization.value();
  std::sort(rough.begin(), rough.end());
  rep.rough_cofactors = std::move(rough);

  BigInt check = rep.T;
  check <<= static_cast<mp_bitcnt_t>(rep.val2_total);
  for (const auto& c : rep.rough_cofactors) check *= c;
  const BigInt p2m1 = rep.p * rep.p - 1;
  if (check != p2m1) throw std::logic_error("boost factorization does not reconstruct p^2 - 1");

  BigInt T4, p5;
  mpz_pow_ui(T4.get_mpz_t(), rep.T.get_mpz_t(), 4);
  mpz_pow_ui(p5.get_mpz_t(), rep.p.get_mpz_t(), 5);
  rep.meets_T_bound = T4 >= p5;
  BigInt torsion = rep.T;
  torsion <<= static_cast<mp_bitcnt_t>(rep.f);
  rep.meets_torsion = torsion <= p2m1;
  rep.f_below_quarter = 4.0 * static_cast<double>(rep.f) <= log2_big(rep.p);
  return rep;
}

std::vector<BoostReport> twin_and_boost_filter(const TwinSet& twins, std::uint64_t B, std::uint64_t f_min) {
  std::vector<BoostReport> out;
  for (const auto& rec : twins.records()) {
    for (const BigInt& cand : {rec.twin.r, BigInt(rec.twin.r + 1)}) {
      if (cand < 2) continue;
      BoostReport rep = boost_check(cand, B);
      if (rep.is_prime && rep.f >= f_min) out.push_back(std::move(rep));
    }
  }
  return out;
}

}  // namespace smoothtwin
