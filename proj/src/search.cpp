#include "smoothtwin/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "smoothtwin/dickman.hpp"

namespace smoothtwin {

namespace {

std::size_t prime_count(std::uint64_t B) { return primes_up_to(B).size(); }

double default_center(std::uint64_t B) {
  if (B >= 20) return estimate_optimal(B).log2_r;
  return asymptotic_estimate(static_cast<double>(B));
}

// Radical inverse in base 2, the start of a nested low-discrepancy sequence.
double van_der_corput(std::uint64_t j) {
  double x = 0.0, f = 0.5;
  for (; j; j >>= 1, f *= 0.5)
    if (j & 1) x += f;
  return x;
}

std::string join_primes(const std::vector<std::uint64_t>& q) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < q.size(); ++i) os << (i ? "," : "") << q[i];
  os << '}';
  return os.str();
}

bool support_avoids(const SmoothTwin& t, const std::vector<std::uint64_t>& q) {
  for (auto p : q)
    if (t.fac_r.exponent(p) != 0 || t.fac_r1.exponent(p) != 0) return false;
  return true;
}

}  // namespace

void SearchConfig::validate() const {
  if (B < 2) throw std::invalid_argument("B must be at least 2");
  const std::size_t pi = prime_count(B);
  if (guess_k < 0 || lift_l < 0) throw std::invalid_argument("guess_k and lift_l must be nonnegative");
  if (static_cast<std::size_t>(guess_k + lift_l) >= pi)
    throw std::invalid_argument("guess_k + lift_l must be below pi(B)");
  const std::size_t dim = pi - guess_k - lift_l;
  const std::size_t cap = mode == HarvestMode::sieve ? 50 : 45;
  if (dim > cap)
    throw std::invalid_argument("harvest dimension " + std::to_string(dim) + " exceeds the desk-scale limit " +
                                std::to_string(cap));
  for (double a : alpha_log2_grid)
    if (!std::isfinite(a)) throw std::invalid_argument("alpha grid entries must be finite");
  if (!(eta >= 1.0)) throw std::invalid_argument("eta must be at least 1");
  if (!(e > 0.0)) throw std::invalid_argument("weight exponent e must be positive");
  if (pow2_f < 1) throw std::invalid_argument("pow2_f must be at least 1");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(radius_factor > 0.0) || radius_factor > std::sqrt(4.0 / 3.0) + 1e-12)
    throw std::invalid_argument("radius_factor must lie in (0, sqrt(4/3)]");
  if (precision_bits < 16) throw std::invalid_argument("precision_bits must be at least 16");
  if (bkz_tours < 0) throw std::invalid_argument("bkz_tours must be nonnegative");
  if (!(sieve_saturation >= 0.0)) throw std::invalid_argument("sieve_saturation must be nonnegative");
}

std::vector<double> SearchConfig::effective_grid() const {
  if (!alpha_log2_grid.empty()) return alpha_log2_grid;
  const double c = default_center(B);
  return {c, c + 1.0, c + 2.0, c + 3.0};
}

bool TwinSet::insert(TwinRecord rec) {
  BigInt key = rec.twin.r;
  return twins_.emplace(std::move(key), std::move(rec)).second;
}

std::vector<TwinRecord> TwinSet::records() const {
  std::vector<TwinRecord> out;
  out.reserve(twins_.size());
  for (auto it = twins_.rbegin(); it != twins_.rend(); ++it) out.push_back(it->second);
  return out;
}

std::vector<BigInt> TwinSet::values() const {
  std::vector<BigInt> out;
  out.reserve(twins_.size());
  for (auto it = twins_.rbegin(); it != twins_.rend(); ++it) out.push_back(it->first);
  return out;
}

void TwinSet::merge(const TwinSet& other) {
  for (const auto& [r, rec] : other.twins_) twins_.emplace(r, rec);
  trials += other.trials;
  failed_trials += other.failed_trials;
  bound = std::max(bound, other.bound);
  log.insert(log.end(), other.log.begin(), other.log.end());
}

std::vector<std::uint64_t> draw_guess(const FactorBase& fb, int k, std::uint64_t protected_bound,
                                      SplitMix64& rng) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  std::vector<std::uint64_t> pool;
  for (auto p : fb.primes)
    if (p > protected_bound) pool.push_back(p);
  if (static_cast<std::size_t>(k) > pool.size())
    throw std::invalid_argument("cannot guess " + std::to_string(k) + " primes out of " +
                                std::to_string(pool.size()) + " unprotected ones");
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::uint64_t> q(pool.begin(), pool.begin() + k);
  std::sort(q.begin(), q.end());
  return q;
}

std::vector<std::vector<std::uint64_t>> guess_subsets(const FactorBase& fb, int k, std::uint64_t protected_bound,
                                                      std::uint64_t seed, std::size_t count) {
  SplitMix64 rng(seed);
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_guess(fb, k, protected_bound, rng));
  return out;
}

FactorBase search_factor_base(std::uint64_t B, const std::vector<std::uint64_t>& guessed, int pow2_f) {
  FactorBase fb = sieve_primes(B).without(guessed);
  if (pow2_f > 1) {
    if (fb.empty() || fb.primes[0] != 2) throw std::invalid_argument("pow2_f > 1 needs 2 in the factor base");
    fb = fb.with_pow2(pow2_f);
  }
  return fb;
}

std::vector<TwinRecord> search_instance(const LatticeInstance& inst, std::uint64_t B, const SearchConfig& cfg,
                                        HarvestStats* stats) {
  HarvestStats local;
  HarvestStats& st = stats ? *stats : local;
  const std::size_t n = inst.rank();
  const IntMatrix rows = basis_rows(inst);

  ReducedBasis rb;
  if (cfg.bkz_block >= 2 && cfg.bkz_tours > 0 && n >= 2) {
    BkzOptions bo;
    bo.node_budget = std::max<std::uint64_t>(cfg.node_budget / 20, 1'000'000);
    rb = bkz(rows, std::min<int>(cfg.bkz_block, static_cast<int>(n)), cfg.bkz_tours, bo);
  } else {
    rb = lll(rows);
  }

  const std::size_t l = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.lift_l, 0)), n ? n - 1 : 0);
  ShortVectorSet harvest;
  try {
    if (cfg.mode == HarvestMode::enumeration) {
      const double radius = cfg.radius_factor * projected_gh(rb, l);
      harvest = enumerate_below(rb, radius, cfg.node_budget, l);
    } else {
      SieveOptions so;
      so.saturation = cfg.sieve_saturation;
      so.seed = cfg.seed ^ static_cast<std::uint64_t>(std::llround(inst.alpha_log2 * 1024.0));
      so.level = l;
      harvest = gauss_sieve(rb, so);
    }
  } catch (const BudgetExceeded& ex) {
    harvest = ex.partial();
    st.partial = true;
  }
  st.nodes += harvest.nodes;
  if (l > 0) harvest = project_and_lift(rb, l, harvest);

  struct Candidate {
    std::vector<std::int64_t> coords;
    long rank;
    const char* source;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < harvest.vectors.size(); ++i)
    cands.push_back({harvest.vectors[i].coords, static_cast<long>(i),
                     cfg.mode == HarvestMode::enumeration ? "enumeration" : "sieve"});
  for (std::size_t i = 0; i < rb.transform.size(); ++i) {
    std::vector<std::int64_t> c(n);
    bool fits = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!rb.transform[i][j].fits_slong_p()) {
        fits = false;
        break;
      }
      c[j] = rb.transform[i][j].get_si();
    }
    if (fits) cands.push_back({std::move(c), -1 - static_cast<long>(i), "basis"});
  }

  BigInt screen_bound = 1;
  screen_bound <<= static_cast<mp_bitcnt_t>(inst.precision_bits + 10);

  std::vector<TwinRecord> out;
  for (const auto& cand : cands) {
    ++st.candidates;
    BigInt v0 = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (cand.coords[i] != 0) v0 += rows[i][0] * cand.coords[i];
    if (abs(v0) > screen_bound) continue;
    ++st.screened;
    bool zero = std::all_of(cand.coords.begin(), cand.coords.end(), [](std::int64_t x) { return x == 0; });
    if (zero) continue;
    const SignedFactorization x = decode(cand.coords, inst.fb);
    const BigInt a = x.numerator();
    const BigInt b = x.denominator();
    if (a - b != 1) continue;
    auto verdict = verify_twin(b, B);
    if (!std::holds_alternative<SmoothTwin>(verdict)) continue;
    TwinRecord rec;
    rec.twin = std::get<SmoothTwin>(std::move(verdict));
    rec.provenance.alpha_log2 = inst.alpha_log2;
    rec.provenance.vector_rank = cand.rank;
    rec.provenance.source = cand.source;
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

struct TrialResult {
  std::vector<TwinRecord> records;
  std::vector<std::string> log;
  bool failed = false;
};

TrialResult run_trial(const SearchConfig& cfg, const std::vector<double>& grid, int trial) {
  TrialResult res;
  SplitMix64 rng = SplitMix64(cfg.seed).split(static_cast<std::uint64_t>(trial));
  const std::uint64_t trial_seed = rng();
  try {
    const FactorBase full = sieve_primes(cfg.B);
    const auto q = draw_guess(full, cfg.guess_k, cfg.protected_prefix_bound, rng);
    const FactorBase fb = search_factor_base(cfg.B, q, cfg.pow2_f);
    SearchConfig local = cfg;
    local.seed = trial_seed;
    std::size_t instance_failures = 0;
    for (double a : grid) {
      LatticeInstance inst{fb, a, {cfg.e, cfg.eta}, cfg.precision_bits};
      try {
        HarvestStats st;
        auto hits = search_instance(inst, cfg.B, local, &st);
        std::ostringstream os;
        os << "trial " << trial << " Q=" << join_primes(q) << " alpha=2^" << a << " candidates=" << st.candidates
           << " nodes=" << st.nodes << " twins=" << hits.size() << (st.partial ? " partial" : "");
        res.log.push_back(os.str());
        for (auto& h : hits) {
          if (!support_avoids(h.twin, q)) {
            res.log.push_back("trial " + std::to_string(trial) + " dropped r=" + h.twin.r.get_str() +
                              " using a guessed prime");
            continue;
          }
          h.provenance.trial = trial;
          h.provenance.trial_seed = trial_seed;
          h.provenance.guessed = q;
          res.records.push_back(std::move(h));
        }
      } catch (const std::exception& ex) {
        ++instance_failures;
        std::ostringstream os;
        os << "trial " << trial << " alpha=2^" << a << " failed: " << ex.what();
        res.log.push_back(os.str());
      }
    }
    res.failed = instance_failures == grid.size();
  } catch (const std::exception& ex) {
    res.failed = true;
    res.log.push_back("trial " + std::to_string(trial) + " failed: " + ex.what());
  }
  return res;
}

}  // namespace

TwinSet run_search(const SearchConfig& cfg, int workers) {
  cfg.validate();
  const auto grid = cfg.effective_grid();
  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  parallel_for(results.size(), workers,
               [&](std::size_t t) { results[t] = run_trial(cfg, grid, static_cast<int>(t)); });

  TwinSet ts;
  ts.bound = cfg.B;
  ts.trials = cfg.trials;
  for (auto& res : results) {
    for (auto& rec : res.records) ts.insert(std::move(rec));
    ts.log.insert(ts.log.end(), res.log.begin(), res.log.end());
    if (res.failed) ++ts.failed_trials;
  }
  if (ts.failed_trials == ts.trials) {
    std::string msg = "all trials failed";
    if (!ts.log.empty()) msg += ": " + ts.log.back();
    throw SearchFailed(msg);
  }
  return ts;
}

std::vector<HistogramBucket> size_histogram(const TwinSet& ts, double bucket_bits, int trials) {
  if (!(bucket_bits > 0.0)) throw std::invalid_argument("bucket_bits must be positive");
  if (ts.empty()) return {};
  const double norm = static_cast<double>(trials > 0 ? trials : std::max(ts.trials, 1));
  std::map<long, std::size_t> counts;
  for (const auto& rec : ts.records()) ++counts[static_cast<long>(std::floor(log2_big(rec.twin.r) / bucket_bits))];
  std::vector<HistogramBucket> out;
  for (long b = counts.begin()->first; b <= counts.rbegin()->first; ++b) {
    HistogramBucket h;
    h.lo = b * bucket_bits;
    h.hi = (b + 1) * bucket_bits;
    auto it = counts.find(b);
    h.count = it == counts.end() ? 0 : it->second;
    h.normalized = h.count / norm;
    out.push_back(h);
  }
  return out;
}

std::uint64_t twin_val2(const SmoothTwin& t) { return val2(t.r) + val2(t.r + 1); }

Pow2Report pow2_report(const TwinSet& ts, int pow2_f) {
  Pow2Report rep;
  rep.f = pow2_f;
  for (const auto& rec : ts.records()) {
    const auto v = twin_val2(rec.twin);
    ++rep.counts[v];
    rep.max_val2 = std::max(rep.max_val2, v);
    if (pow2_f > 1 && (v < static_cast<std::uint64_t>(pow2_f) || v % pow2_f != 0)) rep.all_divisible = false;
  }
  return rep;
}

CompletenessReport enumerate_toward_complete(std::uint64_t B, int k_max, int kappa, std::uint64_t seed,
                                             const std::vector<BigInt>& reference,
                                             const CompletenessOptions& opts) {
  if (k_max < 0 || kappa < 1) throw std::invalid_argument("k_max must be >= 0 and kappa >= 1");
  const FactorBase full = sieve_primes(B);
  const std::size_t n = full.size();
  if (n > 24) throw std::invalid_argument("exhaustive subsets need pi(B) <= 24");

  const double lo = 1.0;
  const double hi = default_center(B) + 3.0;
  const SplitMix64 root(seed);
  // each subset gets its own rotation of the same nested sequence
  auto alphas_for = [&](std::uint64_t subset) {
    const double shift = root.split(subset).uniform();
    std::vector<double> out;
    for (int j = 0; j < kappa; ++j) {
      double u = van_der_corput(static_cast<std::uint64_t>(j) + 1) + shift;
      u -= std::floor(u);
      out.push_back(lo + (hi - lo) * u);
    }
    return out;
  };

  SearchConfig cfg;
  cfg.B = B;
  cfg.radius_factor = opts.radius_factor;
  cfg.node_budget = opts.node_budget;
  cfg.bkz_block = static_cast<int>(n);
  cfg.bkz_tours = 4;
  cfg.seed = seed;

  CompletenessReport rep;
  rep.found.bound = B;
  const std::size_t kcap = std::min<std::size_t>(static_cast<std::size_t>(k_max), n - 1);
  std::uint64_t subset = 0;
  for (std::size_t k = 0; k <= kcap && !rep.partial; ++k) {
    // subsets of size k in lexicographic order via a selection mask
    std::vector<bool> pick(n, false);
    std::fill(pick.end() - k, pick.end(), true);
    do {
      std::vector<std::uint64_t> q;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) q.push_back(full.primes[i]);
      const FactorBase fb = full.without(q);
      for (double a : alphas_for(subset++)) {
        if (rep.instances >= opts.instance_budget) {
          rep.partial = true;
          break;
        }
        ++rep.instances;
        LatticeInstance inst{fb, a, {}, 128};
        HarvestStats st;
        try {
          for (auto& rec : search_instance(inst, B, cfg, &st)) {
            rec.provenance.guessed = q;
            rep.found.insert(std::move(rec));
          }
        } catch (const PrecisionError& ex) {
          rep.found.log.push_back(std::string("Q=") + join_primes(q) + " skipped: " + ex.what());
        }
        if (st.partial) rep.partial = true;
      }
      if (rep.partial) break;
    } while (std::next_permutation(pick.begin(), pick.end()));
    ++rep.found.trials;
  }

  rep.reference_size = reference.size();
  for (const auto& r : reference) {
    if (rep.found.contains(r))
      ++rep.covered;
    else
      rep.missing.push_back(r);
  }
  rep.coverage = reference.empty() ? 0.0 : static_cast<double>(rep.covered) / reference.size();
  return rep;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(count, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace smoothtwin
