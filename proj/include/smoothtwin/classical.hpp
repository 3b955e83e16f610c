#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "smoothtwin/arith.hpp"
#include "smoothtwin/search.hpp"

namespace smoothtwin {

/// All B-smooth integers in [1, limit], ascending.
std::vector<std::uint64_t> smooth_numbers(std::uint64_t B, std::uint64_t limit);

/// Every twin (r, r+1) with r + 1 <= bound, from the list of smooth numbers.
/// bound is limited to 10^12.
TwinSet brute_force_twins(std::uint64_t B, const BigInt& bound);

struct PellSolution {
  BigInt D;
  BigInt x;
  BigInt y;
  int index = 1;
};

/// Minimal positive solution of x^2 - D y^2 = 1 from the continued fraction of sqrt(D).
/// Throws std::domain_error when D < 2 or D is a square.
PellSolution pell_fundamental(const BigInt& D);

/// The k-th solution (x_k + y_k sqrt D) = (x_1 + y_1 sqrt D)^k.
PellSolution pell_solution(const PellSolution& fundamental, int k);

struct StormerOptions {
  /// Solutions with log2 x above this are skipped; NaN picks 4 e sqrt(B) log2(e).
  double x_max_log2 = std::numeric_limits<double>::quiet_NaN();
  /// 0 picks max(3, (q+1)/2) with q the largest prime up to B.
  int k_max = 0;
};

double stormer_default_x_max_log2(std::uint64_t B);
int stormer_default_k_max(std::uint64_t B);

/// Twins from the Pell equations x^2 - D y^2 = 1 over all squarefree D > 1
/// supported on the primes up to B, with r = (x - 1) / 2.
TwinSet stormer_enumerate(std::uint64_t B, const StormerOptions& opts = {});

struct ChmState {
  /// Sorted lower members r.
  std::vector<BigInt> S;
  int round = 0;
  /// Members added by the last step (all of S before the first step).
  std::vector<BigInt> frontier;
};

/// S^(0) = {1, ..., B-1}.
ChmState chm_initial(std::uint64_t B);

/// Adds every t with r/(r+1) * (s+1)/s = t/(t+1), r < s, for pairs touching the frontier.
ChmState chm_step(const ChmState& state, std::uint64_t B);

struct ChmResult {
  TwinSet twins;
  bool converged = false;
  int rounds = 0;
  std::vector<std::size_t> sizes;
};

ChmResult chm_run(std::uint64_t B, int max_rounds = 1000);

}  // namespace smoothtwin
