#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothtwin/arith.hpp"
#include "smoothtwin/lattice.hpp"
#include "smoothtwin/reduction.hpp"
#include "smoothtwin/rng.hpp"

namespace smoothtwin {

struct SearchConfig {
  std::uint64_t B = 0;
  /// Empty selects estimate_optimal(B) + {0, 1, 2, 3}.
  std::vector<double> alpha_log2_grid;
  double e = 1.0;
  double eta = 1.0;
  int pow2_f = 1;
  int guess_k = 0;
  int lift_l = 0;
  std::uint64_t protected_prefix_bound = 300;
  int trials = 1;
  std::uint64_t seed = 0;
  double radius_factor = 1.1547005383792515;  // sqrt(4/3)
  HarvestMode mode = HarvestMode::enumeration;
  int precision_bits = 128;
  int bkz_block = 20;
  int bkz_tours = 8;
  std::uint64_t node_budget = 2'000'000'000ULL;
  double sieve_saturation = 0.5;

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
  /// Grid actually used (fills the default).
  std::vector<double> effective_grid() const;
};

struct Provenance {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::vector<std::uint64_t> guessed;
  double alpha_log2 = 0.0;
  /// Position in the norm-sorted harvest, or -1-i for reduced basis row i.
  long vector_rank = 0;
  std::string source;
};

struct TwinRecord {
  SmoothTwin twin;
  Provenance provenance;
};

/// Unique twins keyed by r. `records()` is sorted by r descending.
class TwinSet {
 public:
  /// Adds the twin unless r is already present; returns true when new.
  bool insert(TwinRecord rec);
  bool contains(const BigInt& r) const { return twins_.count(r) != 0; }
  std::size_t size() const { return twins_.size(); }
  bool empty() const { return twins_.empty(); }
  std::vector<TwinRecord> records() const;
  std::vector<BigInt> values() const;
  void merge(const TwinSet& other);

  int trials = 0;
  int failed_trials = 0;
  std::uint64_t bound = 0;
  std::vector<std::string> log;

 private:
  std::map<BigInt, TwinRecord> twins_;
};

class SearchFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One uniformly random k-subset of the factor base primes above `protected_bound`, sorted.
std::vector<std::uint64_t> draw_guess(const FactorBase& fb, int k, std::uint64_t protected_bound, SplitMix64& rng);

/// `count` successive draws from the stream seeded by `seed`.
std::vector<std::vector<std::uint64_t>> guess_subsets(const FactorBase& fb, int k, std::uint64_t protected_bound,
                                                      std::uint64_t seed, std::size_t count);

/// Factor base of the search: primes up to B without Q, with 2 -> 2^f.
FactorBase search_factor_base(std::uint64_t B, const std::vector<std::uint64_t>& guessed, int pow2_f);

struct HarvestStats {
  std::size_t candidates = 0;
  std::size_t screened = 0;
  std::uint64_t nodes = 0;
  bool partial = false;
};

/// Reduce one instance, harvest short vectors and return the twins among
/// them (verified at bound B).
std::vector<TwinRecord> search_instance(const LatticeInstance& inst, std::uint64_t B, const SearchConfig& cfg,
                                        HarvestStats* stats = nullptr);

/// Full pipeline over cfg.trials trials. Result is independent of `workers`.
TwinSet run_search(const SearchConfig& cfg, int workers = 1);

struct HistogramBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double normalized = 0.0;
};

/// Counts of log2 r per bucket divided by `trials` (ts.trials when 0).
std::vector<HistogramBucket> size_histogram(const TwinSet& ts, double bucket_bits = 1.0, int trials = 0);

struct Pow2Report {
  std::map<std::uint64_t, std::size_t> counts;  // val2(r(r+1)) -> twins
  std::uint64_t max_val2 = 0;
  int f = 1;
  bool all_divisible = true;
};
Pow2Report pow2_report(const TwinSet& ts, int pow2_f = 1);
std::uint64_t twin_val2(const SmoothTwin& t);

struct CompletenessReport {
  TwinSet found;
  std::size_t reference_size = 0;
  std::size_t covered = 0;
  double coverage = 0.0;
  std::vector<BigInt> missing;
  std::size_t instances = 0;
  bool partial = false;
};

struct CompletenessOptions {
  double radius_factor = 2.0;
  std::uint64_t node_budget = 100'000'000;
  std::uint64_t instance_budget = 1'000'000;
};

/// Every subset Q of P_B with |Q| <= k_max and kappa alpha values per subset;
/// coverage against `reference` (empty reference leaves coverage at 0).
CompletenessReport enumerate_toward_complete(std::uint64_t B, int k_max, int kappa, std::uint64_t seed,
                                             const std::vector<BigInt>& reference = {},
                                             const CompletenessOptions& opts = {});

/// Runs f(i) for i in [0, count) on `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f);

}  // namespace smoothtwin
