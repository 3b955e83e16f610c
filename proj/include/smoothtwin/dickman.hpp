#pragma once

#include <cstdint>
#include <vector>

namespace smoothtwin {

/// Dickman's rho on [0, max_u].
///
/// On each interval [k-1, k] rho is a power series in x = k - u. The
/// coefficients follow from u rho'(u) = -rho(u-1) by a two-term recurrence
/// and are built once in multi-precision arithmetic (the constant term
/// rho(k) is a cancelling difference); all higher coefficients are positive,
/// so evaluation in double precision is stable.
class RhoEvaluator {
 public:
  explicit RhoEvaluator(double max_u = 60.0, double rel_eps = 1e-9);

  /// Throws std::domain_error outside [0, max_u].
  double operator()(double u) const;
  /// Natural log of rho, same domain.
  double log_rho(double u) const;

  double max_u() const { return max_u_; }
  double rel_eps() const { return rel_eps_; }

  /// Process-wide evaluator with the default range.
  static const RhoEvaluator& shared();

 private:
  double max_u_;
  double rel_eps_;
  // series_[k] holds the coefficients for u in [k-1, k], k >= 1.
  std::vector<std::vector<double>> series_;
};

double rho(double u);

/// (e / (u log u))^u, the asymptotic form without its o(1) term. u > 1.
double rho_approx(double u);

/// Principal branch W0 on x > 0 via Halley iteration.
double lambert_w0(double x);

struct EstimateResult {
  std::uint64_t bound = 0;
  int m = 2;
  double u = 0.0;
  double log2_r = 0.0;
  int iterations = 0;
};

/// Bisection for rho(u)^m * r = 1 with u = log r / log B.
EstimateResult estimate_optimal(std::uint64_t bound, int m = 2,
                                const RhoEvaluator& rho_eval = RhoEvaluator::shared());

/// m e B^(1/m) / log 2 bits.
double asymptotic_estimate(double bound, int m = 2);

/// exp of the mean of log log p over primes p <= x.
double geometric_mean_logprimes(std::uint64_t x);

}  // namespace smoothtwin
