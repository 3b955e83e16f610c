#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "smoothtwin/classical.hpp"
#include "smoothtwin/dickman.hpp"
#include "smoothtwin/lattice.hpp"
#include "smoothtwin/reduction.hpp"
#include "smoothtwin/search.hpp"
#include "smoothtwin/sqisign.hpp"

using namespace smoothtwin;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += " (over the time limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s | %.2fs\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

template <class... T>
std::string fmt(const char* f, T... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome table1() {
  const std::pair<std::uint64_t, double> rows[] = {
      {200, 91.138890},   {500, 154.417132},  {750, 193.534196},  {1000, 226.657489},
      {1100, 238.750073}, {1250, 255.920233}, {1500, 282.426575}, {2000, 329.581941},
      {2500, 371.202628}, {3000, 408.877910}, {4500, 506.210979}, {10000, 767.101783}};
  double worst = 0;
  for (const auto& [B, bits] : rows) worst = std::max(worst, std::fabs(estimate_optimal(B, 2).log2_r - bits));
  return {worst <= 1e-3, fmt("12 rows, max deviation %.2e bits", worst)};
}

Outcome dickman() {
  const double at2 = std::fabs(rho(2.0) - (1.0 - std::log(2.0)));
  SplitMix64 rng(2);
  double worst_dde = 0;
  for (int i = 0; i < 100; ++i) {
    const double u = 1.0 + 39.0 * (0.005 + 0.99 * rng.uniform());
    const double h = 1e-4;
    const double d = (rho(u + h) - rho(u - h)) / (2 * h);
    worst_dde = std::max(worst_dde, std::fabs(u * d + rho(u - 1.0)) / rho(u - 1.0));
  }
  double worst_q = 0;
  for (double u : {3.0, 5.0, 10.0, 20.0}) {
    const double q = oracle::rho_quadrature(u);
    worst_q = std::max(worst_q, std::fabs(rho(u) - q) / q);
  }
  return {at2 <= 1e-9 && worst_dde <= 1e-5 && worst_q <= 1e-8,
          fmt("|rho(2)-(1-log2)|=%.1e, max relative DDE residual %.1e, max relative oracle gap %.1e", at2, worst_dde,
              worst_q)};
}

std::string provenance(const TwinSet& ts, const BigInt& r) {
  for (const auto& rec : ts.records())
    if (rec.twin.r == r)
      return fmt("alpha=2^%.4g rank %ld (%s)", rec.provenance.alpha_log2, rec.provenance.vector_rank,
                 rec.provenance.source.c_str());
  return "not found";
}

Outcome lehmer() {
  SearchConfig cfg;
  cfg.B = 41;
  cfg.alpha_log2_grid = {36};
  const BigInt r("63927525375");
  const TwinSet ts = run_search(cfg, 1);
  return {ts.contains(r), fmt("%zu twins, r=63927525375 %s", ts.size(), provenance(ts, r).c_str())};
}

Outcome medium() {
  SearchConfig cfg;
  cfg.B = 127;
  const double center = std::round(estimate_optimal(127).log2_r);
  for (int d = -3; d <= 3; ++d) cfg.alpha_log2_grid.push_back(center + d);
  const BigInt r("53234795127882729824");
  const TwinSet ts = run_search(cfg, 1);
  return {ts.contains(r), fmt("grid 2^%g..2^%g, %zu twins, r=53234795127882729824 %s", center - 3, center + 3,
                              ts.size(), provenance(ts, r).c_str())};
}

Outcome oracles() {
  bool ok = true;
  std::ostringstream os;
  for (std::uint64_t B : {5, 7, 10, 13}) {
    const TwinSet brute = brute_force_twins(B, BigInt(1'000'000));
    const auto bv = brute.values();
    const std::set<BigInt> ref(bv.begin(), bv.end());
    const auto sv = stormer_enumerate(B).values();
    const bool equal = std::set<BigInt>(sv.begin(), sv.end()) == ref;
    const ChmResult chm = chm_run(B);
    std::size_t covered = 0, false_members = 0;
    for (const auto& r : chm.twins.values()) {
      if (ref.count(r))
        ++covered;
      else if (!std::holds_alternative<SmoothTwin>(verify_twin(r, B)))
        ++false_members;
    }
    const double cov = static_cast<double>(covered) / ref.size();
    ok = ok && equal && cov >= 0.9 && false_members == 0;
    os << "B=" << B << " stormer" << (equal ? "=" : "!=") << "brute(" << ref.size() << ") chm " << covered << "/"
       << ref.size() << "; ";
  }
  return {ok, os.str()};
}

std::vector<std::pair<std::uint64_t, BigInt>> corpus_rows(bool appendix_only, std::uint64_t max_B) {
  std::vector<std::pair<std::uint64_t, BigInt>> out;
  const auto corpus = oracle::load_corpus();
  for (const auto& row : corpus["twins"]) {
    if (appendix_only && row["source"] != "appendix") continue;
    const std::uint64_t B = row["B"];
    if (B > max_B) continue;
    out.emplace_back(B, BigInt(row["r"].get<std::string>()));
  }
  return out;
}

Outcome ratios() {
  const auto rows = corpus_rows(true, 199);
  double sum = 0, mx = 0, sum_st = 0, mx_st = 0;
  for (const auto& [B, r] : rows) {
    const auto rep = gh_ratio(twin_rational(make_twin(r, B)), LatticeInstance{sieve_primes(199), 0.0, {}, 128}, true);
    sum += rep.ratio;
    mx = std::max(mx, rep.ratio);
    sum_st += rep.ratio_stirling;
    mx_st = std::max(mx_st, rep.ratio_stirling);
  }
  const double mean = sum / rows.size();
  return {rows.size() >= 10 && std::fabs(mean - 1.28) <= 0.15 && mx <= 2.3,
          fmt("%zu appendix twins with B<=199 in the P_199 lattice: mean %.4f, max %.4f (sqrt(n/2 pi e) gh: mean %.4f, max %.4f)",
              rows.size(), mean, mx, sum_st / rows.size(), mx_st)};
}

Outcome bracket() {
  const auto rows = corpus_rows(false, 100000);
  std::size_t inside = 0;
  for (const auto& [B, r] : rows) inside += analysis_bounds(make_twin(r, B), sieve_primes(B)).within_bracket;
  return {inside == rows.size() && !rows.empty(), fmt("%zu/%zu corpus twins inside the bracket", inside, rows.size())};
}

Outcome lemma_b1() {
  const double g6 = geometric_mean_logprimes(1'000'000), g3 = geometric_mean_logprimes(1000);
  const double d6 = std::fabs(g6 - (std::log(1e6) - 1)), d3 = std::fabs(g3 - (std::log(1e3) - 1));
  return {d6 <= 0.2 && d6 < d3, fmt("deviation %.4f at 10^3, %.4f at 10^6", d3, d6)};
}

Outcome boosting() {
  BigInt r1, r2, p37, p31;
  mpz_ui_pow_ui(p37.get_mpz_t(), 2, 37);
  mpz_ui_pow_ui(p31.get_mpz_t(), 2, 31);
  r1 = p37 * BigInt(387420489) * BigInt("2053899652631121509");
  r2 = p31 * BigInt("2493490582368659543466244025");
  std::ostringstream os;
  bool ok = true;
  for (const auto& [r, f] : {std::pair{r1, 75u}, std::pair{r2, 63u}}) {
    const auto rep = boost_check(r);
    BigInt prod, two;
    mpz_ui_pow_ui(two.get_mpz_t(), 2, rep.val2_total);
    prod = two * rep.T;
    for (const auto& c : rep.rough_cofactors) prod *= c;
    const bool exact = prod == rep.p * rep.p - 1;
    ok = ok && rep.is_prime && rep.f == f && exact;
    os << "f=" << rep.f << (rep.is_prime ? " prime" : " composite") << (exact ? " exact" : " mismatch") << " rough {";
    for (std::size_t i = 0; i < rep.rough_cofactors.size(); ++i) os << (i ? "," : "") << rep.rough_cofactors[i];
    os << "}; ";
  }
  return {ok, os.str()};
}

Outcome pow2() {
  auto cfg_for = [](double eta, int f) {
    SearchConfig cfg;
    cfg.B = 41;
    cfg.alpha_log2_grid = {18, 21, 24};
    cfg.eta = eta;
    cfg.pow2_f = f;
    cfg.guess_k = 2;
    cfg.protected_prefix_bound = 5;
    cfg.trials = 32;
    cfg.seed = 1;
    cfg.bkz_block = 10;
    return cfg;
  };
  const auto low = pow2_report(run_search(cfg_for(1, 1), 1), 1);
  const auto high = pow2_report(run_search(cfg_for(20, 1), 1), 1);
  const TwinSet f4 = run_search(cfg_for(1, 4), 1);
  const auto rep4 = pow2_report(f4, 4);
  return {high.max_val2 > low.max_val2 && rep4.all_divisible && !f4.empty(),
          fmt("max val2 eta=20: %llu vs eta=1: %llu over 32 matched trials; pow2_f=4: %zu twins, all divisible %s",
              (unsigned long long)high.max_val2, (unsigned long long)low.max_val2, f4.size(),
              rep4.all_divisible ? "yes" : "no")};
}

bool recovered(const oracle::Knapsack& k, std::size_t l) {
  const auto rb = lll(k.rows);
  IntVector planted;
  for (long x : k.planted) planted.emplace_back(x);
  auto canon = [](IntVector v) {
    for (const auto& x : v) {
      if (x == 0) continue;
      if (x < 0)
        for (auto& y : v) y = -y;
      break;
    }
    return v;
  };
  planted = canon(planted);
  for (std::size_t i = 0; i < l; ++i)
    if (canon(rb.basis[i]) == planted) return true;
  const auto proj = enumerate_below(rb, std::sqrt(4.0 / 3.0) * projected_gh(rb, l), 1'000'000'000, l);
  for (const auto& v : project_and_lift(rb, l, proj).vectors) {
    IntVector x(k.rows.size(), 0);
    for (std::size_t i = 0; i < k.rows.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += k.rows[i][j] * v.coords[i];
    if (canon(x) == planted) return true;
  }
  return false;
}

Outcome planted() {
  mpz_class q;
  mpz_nextprime(q.get_mpz_t(), mpz_class(1'000'000'000).get_mpz_t());
  int hits = 0;
  for (int seed = 0; seed < 100; ++seed) hits += recovered(oracle::knapsack(25, 10, q, seed), 5);
  return {hits >= 50, fmt("planted recovery at l=5 on n=25: %d/100 (record twins for B=751/997 are out of desk "
                          "scale, substituted by criteria 3-5 and this test)",
                          hits)};
}

}  // namespace

int main() {
  run(1, "optimal size estimates", 10, table1);
  run(2, "Dickman rho correctness", 0, dickman);
  run(3, "Lehmer twin at B=41", 60, lehmer);
  run(4, "B=127 twin recovery", 1800, medium);
  run(5, "oracle equivalence", 300, oracles);
  run(6, "GH ratio statistics", 0, ratios);
  run(7, "beta2 bracket", 0, bracket);
  run(8, "geometric mean of log p", 0, lemma_b1);
  run(9, "SQIsign boosting", 5, boosting);
  run(10, "power of two regime", 0, pow2);
  run(11, "planted recovery substitute", 0, planted);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
