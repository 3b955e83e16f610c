#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothtwin/arith.hpp"

namespace smoothtwin {

using IntVector = std::vector<BigInt>;
using IntMatrix = std::vector<IntVector>;

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagonal weights alpha_i = log(g_i)^exponent, where g_i generates slot i.
/// When slot 0 holds the prime 2 (or 2^f) its weight is further divided by eta.
struct WeightScheme {
  double exponent = 1.0;
  double eta = 1.0;
};

/// The weighted prime number lattice over a factor base.
///
/// Basis vector i (one per slot) is (alpha * log g_i, 0, ..., alpha_i, ..., 0)
/// in R^{n+1}; real entries are stored as integers scaled by 2^precision_bits.
struct LatticeInstance {
  FactorBase fb;
  double alpha_log2 = 0.0;
  WeightScheme weights;
  int precision_bits = 128;

  std::size_t rank() const { return fb.size(); }
  std::vector<double> weight_values() const;
  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

/// The (n+1) x n basis matrix; column i is basis vector i.
IntMatrix build_basis(const LatticeInstance& inst);
/// Same basis as n row vectors of length n+1 (the layout reduction works on).
IntMatrix basis_rows(const LatticeInstance& inst);

/// Exponents in slot units for each factor base slot. Throws when a prime is
/// outside the factor base or a power of two is not a multiple of 2^f.
std::vector<std::int64_t> slot_coordinates(const SignedFactorization& x, const FactorBase& fb);

/// B x in the scaled-integer embedding.
IntVector encode(const SignedFactorization& x, const LatticeInstance& inst);

/// Factorization whose slot exponents are `coords`. With `normalize`, the sign
/// is flipped so that the rational is >= 1 (v and -v are one candidate).
SignedFactorization decode(std::span<const std::int64_t> coords, const FactorBase& fb,
                           bool normalize = true);

/// |log(a/b)| for coprime a, b > 0 evaluated through log1p in high precision.
double abs_log_ratio(const BigInt& a, const BigInt& b);

/// alpha^2 log(a/b)^2 + sum (x_i alpha_i)^2, unscaled.
double vector_norm_sq(const SignedFactorization& x, const LatticeInstance& inst);

/// log2 of the covolume.
double volume_log2(const LatticeInstance& inst);

/// log2 of the volume of the unit n-ball.
double unit_ball_volume_log2(std::size_t n);
/// vol^{1/n} / vol(B^n)^{1/n} from a log2 covolume, exact ball volume.
double gaussian_heuristic_from_volume(double volume_log2, std::size_t n);
/// Same with the sqrt(n / (2 pi e)) approximation of the ball volume.
double gaussian_heuristic_stirling(double volume_log2, std::size_t n);

/// Gaussian heuristic in unscaled units.
double gaussian_heuristic(const LatticeInstance& inst);

struct AlphaOpt {
  double log2 = 0.0;
  /// sqrt(beta2/(n-1)) * b/|a-b|, the near-twin shortcut.
  double twin_shortcut_log2 = 0.0;
};

/// Scalar alpha minimizing ||v|| / gh for the rational x. Throws
/// std::domain_error when x == 1 or the factor base has a single slot.
AlphaOpt alpha_opt(const SignedFactorization& x, const FactorBase& fb, const WeightScheme& weights);

struct AnalysisReport {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double gamma = 0.0;
  double alpha_log2 = 0.0;
  double alpha_opt_log2 = 0.0;
  double gh = 0.0;
  double vector_norm = 0.0;
  double ratio = 0.0;
  /// ||v|| / gh with the sqrt(n/(2 pi e)) ball approximation.
  double ratio_stirling = 0.0;
  /// Closed form at alpha_opt; zero unless alpha_opt was used.
  double ratio_closed_form = 0.0;
};

/// GH ratio of the vector for x in `inst`; with `use_alpha_opt` the scalar of
/// `inst` is replaced by alpha_opt.
AnalysisReport gh_ratio(const SignedFactorization& x, const LatticeInstance& inst, bool use_alpha_opt);

/// Gamma constant of the ratio analysis for a factor base and weights.
double gamma_constant(const FactorBase& fb, const WeightScheme& weights);

struct AnalysisBounds {
  double beta2 = 0.0;
  /// (sum |x_i log p_i|)^2 / n and (sum |x_i log p_i|)^2.
  double beta2_lo = 0.0;
  double beta2_hi = 0.0;
  bool within_bracket = false;
  /// 4 log(r)^2 / n and 4 (log r + 1/r)^2.
  double lemma_lo = 0.0;
  double lemma_hi = 0.0;
  double gamma_asym = 0.0;
  double gamma_exact = 0.0;
};

/// Norm brackets of a twin vector for the log-weighted lattice on `fb`.
/// Only weights with exponent 1 and eta 1 are supported.
AnalysisBounds analysis_bounds(const SmoothTwin& twin, const FactorBase& fb,
                               const WeightScheme& weights = {});

/// The twin as the rational (r+1)/r.
SignedFactorization twin_rational(const SmoothTwin& twin);

}  // namespace smoothtwin
