#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothtwin/classical.hpp"

using namespace smoothtwin;

namespace {

std::vector<std::uint64_t> small(const TwinSet& ts) {
  std::vector<std::uint64_t> out;
  for (const auto& r : ts.values()) out.push_back(r.get_ui());
  std::sort(out.begin(), out.end());
  return out;
}

std::set<BigInt> as_set(const TwinSet& ts) {
  const auto v = ts.values();
  return {v.begin(), v.end()};
}

// Chakravala method, independent of the continued fraction code.
std::pair<mpz_class, mpz_class> chakravala(long D) {
  mpz_class a = static_cast<long>(std::llround(std::sqrt(double(D)))), b = 1;
  mpz_class k = a * a - D;
  while (k != 1) {
    const mpz_class ak = abs(k);
    mpz_class best_m = 0, best_val = -1;
    // candidates m with a + b m = 0 mod |k| around sqrt(D)
    const mpz_class root = sqrt(mpz_class(D));
    for (mpz_class m = root - 2 * ak; m <= root + 2 * ak; ++m) {
      if (m <= 0) continue;
      if ((a + b * m) % ak != 0) continue;
      const mpz_class val = abs(m * m - D);
      if (best_val < 0 || val < best_val) {
        best_val = val;
        best_m = m;
      }
    }
    const mpz_class m = best_m;
    const mpz_class na = (a * m + D * b) / ak, nb = (a + b * m) / ak;
    k = (m * m - D) / k;
    a = abs(na);
    b = abs(nb);
  }
  return {a, b};
}

std::set<BigInt> chm_quadratic(std::uint64_t B) {
  std::set<BigInt> S;
  for (std::uint64_t r = 1; r < B; ++r) S.insert(BigInt(static_cast<unsigned long>(r)));
  for (;;) {
    const std::vector<BigInt> v(S.begin(), S.end());
    std::set<BigInt> add;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        BigInt num = v[i] * (v[j] + 1), den = (v[i] + 1) * v[j];
        const BigInt g = gcd(num, den);
        num /= g;
        den /= g;
        if (den - num == 1 && !S.count(num)) add.insert(num);
      }
    if (add.empty()) return S;
    S.insert(add.begin(), add.end());
  }
}

}  // namespace

TEST_CASE("smooth numbers") {
  CHECK(smooth_numbers(3, 20) == std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 9, 12, 16, 18});
  const auto s = smooth_numbers(7, 100000);
  std::vector<std::uint64_t> want;
  for (std::uint64_t n = 1; n <= 100000; ++n)
    if (oracle::smooth_by_trial(n, 7)) want.push_back(n);
  CHECK(s == want);
}

TEST_CASE("brute force examples") {
  CHECK(small(brute_force_twins(5, BigInt(1000))) == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 8, 9, 15, 24, 80});
  CHECK(small(brute_force_twins(3, BigInt(1000))) == std::vector<std::uint64_t>{1, 2, 3, 8});
  const auto b7 = brute_force_twins(7, BigInt(10'000'000));
  CHECK(b7.values().front() == 4374);
  for (std::uint64_t B : {2, 5, 7, 11, 13, 17}) {
    CHECK(small(brute_force_twins(B, BigInt(200000))) == oracle::sweep_twins(B, 200000));
  }
  CHECK(brute_force_twins(2, BigInt(1000)).size() == 1);
  CHECK_THROWS_AS(brute_force_twins(5, BigInt("10000000000000")), std::invalid_argument);
}

TEST_CASE("pell fundamental solutions") {
  const auto d2 = pell_fundamental(BigInt(2));
  CHECK(d2.x == 3);
  CHECK(d2.y == 2);
  const auto d6 = pell_fundamental(BigInt(6));
  CHECK(d6.x == 5);
  CHECK(d6.y == 2);
  const auto d61 = pell_fundamental(BigInt(61));
  CHECK(d61.x == BigInt("1766319049"));
  CHECK(d61.y == BigInt("226153980"));
  CHECK_THROWS_AS(pell_fundamental(BigInt(1)), std::domain_error);
  CHECK_THROWS_AS(pell_fundamental(BigInt(49)), std::domain_error);
  CHECK_THROWS_AS(pell_fundamental(BigInt(-3)), std::domain_error);
}

TEST_CASE("pell fundamental solutions are minimal for D up to 200") {
  for (long D = 2; D <= 200; ++D) {
    const long s = std::lround(std::sqrt(double(D)));
    if (s * s == D) continue;
    const auto sol = pell_fundamental(BigInt(D));
    REQUIRE(sol.x * sol.x - D * sol.y * sol.y == 1);
    REQUIRE(sol.y > 0);
    const auto [x, y] = chakravala(D);
    INFO("D=" << D);
    CHECK(sol.x == x);
    CHECK(sol.y == y);
    const BigInt cap = std::min<BigInt>(sol.y, BigInt(100000));
    for (BigInt t = 1; t < cap; ++t) {
      const BigInt v = D * t * t + 1;
      REQUIRE_FALSE(mpz_perfect_square_p(v.get_mpz_t()));
    }
  }
}

TEST_CASE("pell solution recurrence") {
  const auto f = pell_fundamental(BigInt(7));
  BigInt x = f.x, y = f.y;
  for (int k = 2; k <= 6; ++k) {
    const BigInt nx = f.x * x + 7 * f.y * y, ny = f.x * y + f.y * x;
    x = nx;
    y = ny;
    const auto s = pell_solution(f, k);
    CHECK(s.x == x);
    CHECK(s.y == y);
    CHECK(s.index == k);
  }
}

TEST_CASE("stormer examples") {
  CHECK(small(stormer_enumerate(5)) == small(brute_force_twins(5, BigInt(1000))));
  StormerOptions five;
  five.k_max = 5;
  CHECK(stormer_enumerate(7, five).contains(BigInt(4374)));
  CHECK(stormer_default_k_max(13) == 7);
  CHECK(stormer_default_k_max(3) == 3);
  CHECK(stormer_default_x_max_log2(13) == doctest::Approx(4 * std::exp(1.0) * std::sqrt(13.0) / std::log(2.0)));
  CHECK(as_set(stormer_enumerate(13)) == as_set(brute_force_twins(13, BigInt(1'000'000'000))));
}

TEST_CASE("stormer contains brute force for every B up to 13") {
  for (std::uint64_t B = 2; B <= 13; ++B) {
    const auto st = stormer_enumerate(B);
    for (const auto& r : brute_force_twins(B, BigInt(1'000'000)).values()) {
      INFO("B=" << B << " r=" << r);
      CHECK(st.contains(r));
    }
    for (const auto& rec : st.records()) CHECK(std::holds_alternative<SmoothTwin>(verify_twin(rec.twin.r, B)));
  }
}

TEST_CASE("twin to pell roundtrip") {
  for (const auto& r : brute_force_twins(13, BigInt(1'000'000)).values()) {
    const BigInt x = 2 * r + 1, prod = 4 * r * (r + 1);
    BigInt D = 1, rest = prod;
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul}) {
      int e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      if (e % 2) D *= p;
    }
    REQUIRE(rest == 1);
    const BigInt y2 = prod / D;
    REQUIRE(mpz_perfect_square_p(y2.get_mpz_t()));
    const BigInt y = sqrt(y2);
    CHECK(x * x - D * y * y == 1);
    const auto f = pell_fundamental(D);
    bool hit = false;
    for (int k = 1; k <= 10 && !hit; ++k) hit = pell_solution(f, k).x == x;
    CHECK(hit);
  }
}

TEST_CASE("chm step example") {
  ChmState st;
  st.S = {BigInt(2), BigInt(3)};
  st.frontier = st.S;
  const auto next = chm_step(st, 3);
  CHECK(std::find(next.S.begin(), next.S.end(), BigInt(8)) != next.S.end());
  CHECK(next.round == 1);
  CHECK(next.frontier == std::vector<BigInt>{BigInt(8)});
}

TEST_CASE("chm runs to a sound fixed point") {
  ChmState st = chm_initial(10);
  CHECK(st.S.size() == 9);
  std::size_t prev = st.S.size();
  while (!st.frontier.empty()) {
    st = chm_step(st, 10);
    CHECK(st.S.size() >= prev);
    CHECK(std::is_sorted(st.S.begin(), st.S.end()));
    prev = st.S.size();
  }
  const auto again = chm_step(st, 10);
  CHECK(again.S == st.S);
  CHECK(again.frontier.empty());
  const auto brute = as_set(brute_force_twins(10, BigInt(1'000'000)));
  for (const auto& r : st.S) CHECK(brute.count(r) == 1);
  const auto res = chm_run(10);
  CHECK(res.converged);
  CHECK(as_set(res.twins) == std::set<BigInt>(st.S.begin(), st.S.end()));
  CHECK(std::is_sorted(res.sizes.begin(), res.sizes.end()));
}

TEST_CASE("chm coverage at B=13 and the frontier shortcut") {
  const auto res = chm_run(13);
  const auto brute = as_set(brute_force_twins(13, BigInt(1'000'000)));
  std::size_t covered = 0;
  for (const auto& r : brute) covered += res.twins.contains(r);
  CHECK(covered >= 0.95 * brute.size());
  for (const auto& r : res.twins.values()) CHECK(brute.count(r) == 1);
  CHECK(as_set(chm_run(50).twins) == chm_quadratic(50));
  const auto cut = chm_run(13, 1);
  CHECK_FALSE(cut.converged);
  CHECK(cut.rounds == 1);
}
