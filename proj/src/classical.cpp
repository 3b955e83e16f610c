#include "smoothtwin/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace smoothtwin {

namespace {

void extend_smooth(const std::vector<std::uint64_t>& primes, std::size_t from, std::uint64_t value,
                   std::uint64_t limit, std::vector<std::uint64_t>& out) {
  out.push_back(value);
  for (std::size_t i = from; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    if (value > limit / p) break;
    extend_smooth(primes, i, value * p, limit, out);
  }
}

TwinRecord record_for(const BigInt& r, std::uint64_t B, const char* source) {
  TwinRecord rec;
  rec.twin = make_twin(r, B);
  rec.provenance.source = source;
  return rec;
}

}  // namespace

std::vector<std::uint64_t> smooth_numbers(std::uint64_t B, std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit == 0) return out;
  extend_smooth(primes_up_to(B), 0, 1, limit, out);
  std::sort(out.begin(), out.end());
  return out;
}

TwinSet brute_force_twins(std::uint64_t B, const BigInt& bound) {
  if (B < 2) throw std::invalid_argument("B must be at least 2");
  if (bound < 0 || bound > BigInt("1000000000000")) throw std::invalid_argument("bound must lie in [0, 10^12]");
  const auto smooth = smooth_numbers(B, bound.get_ui());
  TwinSet ts;
  ts.bound = B;
  for (std::size_t i = 0; i + 1 < smooth.size(); ++i)
    if (smooth[i + 1] == smooth[i] + 1) ts.insert(record_for(BigInt(std::to_string(smooth[i])), B, "brute"));
  return ts;
}

PellSolution pell_fundamental(const BigInt& D) {
  if (D < 2) throw std::domain_error("Pell equation needs D >= 2");
  const BigInt a0 = sqrt(D);
  if (a0 * a0 == D) throw std::domain_error("Pell equation needs a non-square D");
  BigInt m = 0, d = 1, a = a0;
  BigInt h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  for (;;) {
    BigInt h = a * h1 + h2;
    BigInt k = a * k1 + k2;
    if (h * h - D * k * k == 1) return {D, h, k, 1};
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    m = d * a - m;
    d = (D - m * m) / d;
    a = (a0 + m) / d;
  }
}

PellSolution pell_solution(const PellSolution& fundamental, int k) {
  if (k < 1) throw std::invalid_argument("solution index must be at least 1");
  BigInt x = fundamental.x, y = fundamental.y;
  for (int i = 1; i < k; ++i) {
    BigInt nx = fundamental.x * x + fundamental.D * fundamental.y * y;
    BigInt ny = fundamental.x * y + fundamental.y * x;
    x = std::move(nx);
    y = std::move(ny);
  }
  return {fundamental.D, x, y, k};
}

double stormer_default_x_max_log2(std::uint64_t B) {
  return 4.0 * std::numbers::e * std::sqrt(static_cast<double>(B)) * std::numbers::log2e;
}

int stormer_default_k_max(std::uint64_t B) {
  const auto ps = primes_up_to(B);
  const std::uint64_t q = ps.empty() ? 2 : ps.back();
  return std::max<int>(3, static_cast<int>((q + 1) / 2));
}

TwinSet stormer_enumerate(std::uint64_t B, const StormerOptions& opts) {
  const auto primes = primes_up_to(B);
  if (primes.empty()) throw std::invalid_argument("B must be at least 2");
  if (primes.size() > 24) throw std::invalid_argument("too many squarefree D for pi(B) > 24");
  const double x_max = std::isnan(opts.x_max_log2) ? stormer_default_x_max_log2(B) : opts.x_max_log2;
  const int k_max = opts.k_max > 0 ? opts.k_max : stormer_default_k_max(B);

  TwinSet ts;
  ts.bound = B;
  const std::uint64_t subsets = 1ULL << primes.size();
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    BigInt D = 1;
    for (std::size_t i = 0; i < primes.size(); ++i)
      if (mask >> i & 1) D *= primes[i];
    const PellSolution fund = pell_fundamental(D);
    if (log2_big(fund.x) > x_max) continue;
    BigInt x_prev = 1, x = fund.x;
    for (int k = 1; k <= k_max; ++k) {
      if (log2_big(x) > x_max) break;
      if (mpz_odd_p(x.get_mpz_t())) {
        const BigInt r = (x - 1) / 2;
        if (r > 0 && std::holds_alternative<SmoothTwin>(verify_twin(r, B))) ts.insert(record_for(r, B, "pell"));
      }
      BigInt next = 2 * fund.x * x - x_prev;
      x_prev = std::move(x);
      x = std::move(next);
    }
  }
  return ts;
}

ChmState chm_initial(std::uint64_t B) {
  ChmState st;
  for (std::uint64_t r = 1; r + 1 <= B; ++r) st.S.emplace_back(std::to_string(r));
  st.frontier = st.S;
  return st;
}

ChmState chm_step(const ChmState& state, std::uint64_t B) {
  std::set<BigInt> added;
  const std::set<BigInt> members(state.S.begin(), state.S.end());
  BigInt num, den, g;
  for (const auto& f : state.frontier) {
    for (const auto& s : state.S) {
      if (s == f) continue;
      const BigInt& lo = f < s ? f : s;
      const BigInt& hi = f < s ? s : f;
      num = lo * (hi + 1);
      den = (lo + 1) * hi;
      mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
      num /= g;
      den /= g;
      if (den - num == 1 && !members.count(num)) added.insert(num);
    }
  }
  ChmState next;
  next.round = state.round + 1;
  for (const auto& t : added) {
    if (!std::holds_alternative<SmoothTwin>(verify_twin(t, B)))
      throw std::logic_error("CHM produced a non-smooth twin " + t.get_str());
    next.frontier.push_back(t);
  }
  next.S.reserve(state.S.size() + added.size());
  std::merge(state.S.begin(), state.S.end(), next.frontier.begin(), next.frontier.end(), std::back_inserter(next.S));
  return next;
}

ChmResult chm_run(std::uint64_t B, int max_rounds) {
  if (B < 2) throw std::invalid_argument("B must be at least 2");
  ChmResult res;
  ChmState st = chm_initial(B);
  res.sizes.push_back(st.S.size());
  while (res.rounds < max_rounds) {
    st = chm_step(st, B);
    ++res.rounds;
    res.sizes.push_back(st.S.size());
    if (st.frontier.empty()) {
      res.converged = true;
      break;
    }
  }
  res.twins.bound = B;
  for (const auto& r : st.S) res.twins.insert(record_for(r, B, "chm"));
  return res;
}

}  // namespace smoothtwin
