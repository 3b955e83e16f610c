#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "smoothtwin/search.hpp"

using namespace smoothtwin;

namespace {

const BigInt kLehmer("63927525375");

SearchConfig b41(double eta, std::uint64_t seed) {
  SearchConfig cfg;
  cfg.B = 41;
  cfg.alpha_log2_grid = {18, 21, 24};
  cfg.eta = eta;
  cfg.guess_k = 2;
  cfg.protected_prefix_bound = 5;
  cfg.trials = 32;
  cfg.seed = seed;
  cfg.bkz_block = 10;
  return cfg;
}

bool same_records(const TwinSet& a, const TwinSet& b) {
  const auto ra = a.records(), rb = b.records();
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto &x = ra[i].provenance, &y = rb[i].provenance;
    if (ra[i].twin.r != rb[i].twin.r || x.trial != y.trial || x.trial_seed != y.trial_seed || x.guessed != y.guessed ||
        x.alpha_log2 != y.alpha_log2 || x.vector_rank != y.vector_rank || x.source != y.source)
      return false;
  }
  return true;
}

void check_members(const TwinSet& ts, std::uint64_t B) {
  for (const auto& rec : ts.records()) {
    REQUIRE(std::holds_alternative<SmoothTwin>(verify_twin(rec.twin.r, B)));
    for (auto q : rec.provenance.guessed) {
      REQUIRE(rec.twin.r % q != 0);
      REQUIRE((rec.twin.r + 1) % q != 0);
    }
  }
}

}  // namespace

TEST_CASE("config validation") {
  SearchConfig cfg;
  cfg.B = 41;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [&](auto mutate) {
    SearchConfig c = cfg;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  bad([](SearchConfig& c) { c.guess_k = 7, c.lift_l = 6; });
  bad([](SearchConfig& c) { c.eta = 0.5; });
  bad([](SearchConfig& c) { c.pow2_f = 0; });
  bad([](SearchConfig& c) { c.radius_factor = 1.2; });
  bad([](SearchConfig& c) { c.trials = 0; });
  bad([](SearchConfig& c) { c.alpha_log2_grid = {std::nan("")}; });
  bad([](SearchConfig& c) { c.B = 293; });
  SearchConfig sieve = cfg;
  sieve.B = 229;
  sieve.mode = HarvestMode::sieve;
  CHECK_NOTHROW(sieve.validate());
  const auto grid = cfg.effective_grid();
  REQUIRE(grid.size() == 4);
  CHECK(grid[3] - grid[0] == doctest::Approx(3.0));
}

TEST_CASE("guess subsets") {
  const FactorBase fb = sieve_primes(823);
  CHECK(guess_subsets(fb, 0, 300, 1, 1) == std::vector<std::vector<std::uint64_t>>{{}});
  const auto draws = guess_subsets(fb, 5, 300, 42, 2000);
  CHECK(draws == guess_subsets(fb, 5, 300, 42, 2000));
  std::vector<std::uint64_t> unprotected;
  for (auto p : fb.primes)
    if (p > 300) unprotected.push_back(p);
  REQUIRE(unprotected.size() == 81);
  const std::set<std::uint64_t> support(unprotected.begin(), unprotected.begin() + 16);
  int avoided = 0;
  for (const auto& q : draws) {
    REQUIRE(q.size() == 5);
    REQUIRE(std::set<std::uint64_t>(q.begin(), q.end()).size() == 5);
    for (auto p : q) REQUIRE(p > 300);
    avoided += std::none_of(q.begin(), q.end(), [&](auto p) { return support.count(p) != 0; });
  }
  const double rate = avoided / 2000.0;
  MESSAGE("avoidance rate " << rate);
  CHECK(std::fabs(rate - 0.3224) <= 0.05);
  CHECK_THROWS_AS(guess_subsets(sieve_primes(41), 1, 300, 1, 1), std::invalid_argument);
}

TEST_CASE("search factor base") {
  const auto fb = search_factor_base(41, {13, 37}, 4);
  CHECK(fb.size() == 11);
  CHECK_FALSE(fb.contains(13));
  CHECK(fb.generator(0) == 16);
  CHECK_THROWS_AS(search_factor_base(41, {2}, 4), std::invalid_argument);
}

TEST_CASE("B=41 search recovers the Lehmer twin") {
  SearchConfig cfg;
  cfg.B = 41;
  cfg.alpha_log2_grid = {36};
  const TwinSet ts = run_search(cfg);
  CHECK(ts.contains(kLehmer));
  check_members(ts, 41);
  const auto vals = ts.values();
  CHECK(std::is_sorted(vals.rbegin(), vals.rend()));
}

TEST_CASE("B=10 search agrees with brute force") {
  SearchConfig cfg;
  cfg.B = 10;
  cfg.alpha_log2_grid = {7};
  const TwinSet ts = run_search(cfg);
  const auto brute = oracle::sweep_twins(10, 10'000'000);
  const std::set<std::uint64_t> ref(brute.begin(), brute.end());
  CHECK_FALSE(ts.empty());
  for (const auto& r : ts.values()) {
    REQUIRE(r < 10'000'000);
    CHECK(ref.count(r.get_ui()) == 1);
  }
}

TEST_CASE("search is deterministic and independent of the worker count") {
  const auto cfg = b41(1.0, 7);
  const TwinSet one = run_search(cfg, 1);
  CHECK(same_records(one, run_search(cfg, 1)));
  CHECK(same_records(one, run_search(cfg, 4)));
  check_members(one, 41);
  CHECK(one.trials == 32);
}

TEST_CASE("repeating an instance adds no new twins") {
  SearchConfig cfg;
  cfg.B = 41;
  const LatticeInstance inst{search_factor_base(41, {}, 1), 30.0, {}, 128};
  TwinSet ts;
  std::size_t added = 0;
  for (auto& rec : search_instance(inst, 41, cfg)) added += ts.insert(rec);
  CHECK(added > 0);
  std::size_t again = 0;
  for (auto& rec : search_instance(inst, 41, cfg)) again += ts.insert(rec);
  CHECK(again == 0);
}

TEST_CASE("histogram") {
  TwinSet one;
  one.trials = 4;
  one.insert({make_twin(BigInt(80), 5), {}});
  const auto h = size_histogram(one);
  REQUIRE(h.size() == 1);
  CHECK(h[0].lo == 6.0);
  CHECK(h[0].count == 1);
  CHECK(h[0].normalized == doctest::Approx(0.25));
  CHECK(size_histogram(TwinSet{}).empty());
  CHECK_THROWS_AS(size_histogram(one, 0.0), std::invalid_argument);
}

TEST_CASE("histogram peak tracks alpha at B=41") {
  double prev_peak = 0;
  int inside = 0;
  for (int a = 30; a <= 36; ++a) {
    SearchConfig cfg;
    cfg.B = 41;
    cfg.alpha_log2_grid = {double(a)};
    cfg.guess_k = 2;
    cfg.protected_prefix_bound = 5;
    cfg.trials = 64;
    cfg.seed = 1;
    cfg.bkz_block = 10;
    const auto h = size_histogram(run_search(cfg, 4));
    REQUIRE_FALSE(h.empty());
    const auto peak = std::max_element(h.begin(), h.end(), [](const auto& x, const auto& y) { return x.count < y.count; });
    MESSAGE("alpha 2^" << a << " peak bucket " << peak->lo);
    inside += peak->lo >= a - 4 && peak->lo <= a - 1;
    CHECK(peak->lo >= prev_peak);
    prev_peak = peak->lo;
  }
  CHECK(inside >= 6);
}

TEST_CASE("power of two regime") {
  CHECK(twin_val2(make_twin(BigInt(8), 3)) == 3);
  SearchConfig cfg = b41(1.0, 1);
  cfg.pow2_f = 4;
  const TwinSet ts = run_search(cfg);
  const auto rep = pow2_report(ts, 4);
  CHECK_FALSE(ts.empty());
  CHECK(rep.all_divisible);
  for (const auto& [v, c] : rep.counts) {
    CHECK(v % 4 == 0);
    CHECK(v >= 4);
  }
  const auto low = pow2_report(run_search(b41(1.0, 1)), 1);
  const auto high = pow2_report(run_search(b41(5.0, 1)), 1);
  MESSAGE("max val2 eta=1: " << low.max_val2 << " eta=5: " << high.max_val2);
  CHECK(high.max_val2 > low.max_val2);
}

TEST_CASE("completeness enumeration") {
  const auto b7 = enumerate_toward_complete(7, 0, 4, 1);
  CHECK(b7.found.contains(BigInt(4374)));
  const auto raw = oracle::sweep_twins(13, 1'000'000);
  std::vector<BigInt> ref;
  for (auto r : raw) ref.emplace_back(static_cast<unsigned long>(r));
  const auto full = enumerate_toward_complete(13, 3, 6, 0, ref);
  CHECK(full.reference_size == ref.size());
  CHECK(full.coverage == 1.0);
  CHECK(full.missing.empty());
  CHECK_FALSE(full.partial);
  check_members(full.found, 13);
  double prev = 0;
  for (int kappa = 1; kappa <= 4; ++kappa) {
    const double c = enumerate_toward_complete(13, 1, kappa, 5, ref).coverage;
    CHECK(c >= prev);
    prev = c;
  }
  prev = 0;
  for (int k = 0; k <= 3; ++k) {
    const double c = enumerate_toward_complete(13, k, 2, 5, ref).coverage;
    CHECK(c >= prev);
    prev = c;
  }
  CompletenessOptions tight;
  tight.instance_budget = 3;
  const auto cut = enumerate_toward_complete(13, 2, 2, 5, ref, tight);
  CHECK(cut.partial);
  CHECK(cut.instances <= 3);
  CHECK_THROWS_AS(enumerate_toward_complete(101, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
}
