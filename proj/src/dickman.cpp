#include "smoothtwin/dickman.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "smoothtwin/arith.hpp"
#include "smoothtwin/bigfloat.hpp"

namespace smoothtwin {

namespace {

// rho(60) is about 2^-430 and every interval cancels a few more bits when
// forming rho(k), so the build runs well past that.
constexpr mpfr_prec_t kBuildPrecision = 768;

}  // namespace

RhoEvaluator::RhoEvaluator(double max_u, double rel_eps) : max_u_(max_u), rel_eps_(rel_eps) {
  if (!(max_u >= 1.0)) throw std::invalid_argument("max_u must be >= 1");
  if (!(rel_eps > 0.0)) throw std::invalid_argument("rel_eps must be positive");
  const int intervals = static_cast<int>(std::ceil(max_u));
  series_.resize(intervals + 1);
  series_[1] = {1.0};

  // Coefficients of the previous interval, in x = (k-1) - (u-1) = k - u.
  std::vector<BigFloat> prev{BigFloat(1.0, kBuildPrecision)};
  BigFloat prev_at_left(1.0, kBuildPrecision);  // rho(k-1)
  const BigFloat tiny = BigFloat::exp2(-static_cast<double>(kBuildPrecision) - 16, kBuildPrecision);
  // Evaluation only needs terms above rel_eps^2 * rho(k); the x^i factor is <= 1.
  const double keep = std::min(rel_eps * rel_eps, 1e-20);

  for (int k = 2; k <= intervals; ++k) {
    // k (i+1) a_{i+1} = b_i + i a_i,  with b the previous interval's series.
    std::vector<BigFloat> a;
    a.emplace_back(0.0, kBuildPrecision);
    BigFloat tail_sum(0.0, kBuildPrecision);
    BigFloat term(kBuildPrecision);
    for (std::size_t i = 0;; ++i) {
      BigFloat rhs = i < prev.size() ? prev[i] : BigFloat(0.0, kBuildPrecision);
      if (i > 0) {
        mpfr_mul_ui(term.get(), a[i].get(), i, MPFR_RNDN);
        rhs += term;
      }
      mpfr_div_ui(rhs.get(), rhs.get(), static_cast<unsigned long>(k) * (i + 1), MPFR_RNDN);
      if (i >= prev.size() && rhs < tiny) break;
      tail_sum += rhs;
      a.push_back(std::move(rhs));
    }
    a[0] = prev_at_left - tail_sum;  // rho(k)
    if (a[0].sign() <= 0) throw std::logic_error("rho series lost all precision");

    const double rho_k = a[0].to_double();
    std::vector<double> coeffs;
    for (const auto& c : a) {
      double v = c.to_double();
      if (!coeffs.empty() && v < keep * rho_k) break;
      coeffs.push_back(v);
    }
    series_[k] = std::move(coeffs);
    prev_at_left = a[0];
    prev = std::move(a);
  }
}

double RhoEvaluator::operator()(double u) const {
  if (!(u >= 0.0) || u > max_u_) {
    throw std::domain_error("rho: u=" + std::to_string(u) + " outside [0, max_u]");
  }
  if (u <= 1.0) return 1.0;
  const int k = static_cast<int>(std::ceil(u));
  const double x = static_cast<double>(k) - u;
  const auto& c = series_[k];
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RhoEvaluator::log_rho(double u) const { return std::log((*this)(u)); }

const RhoEvaluator& RhoEvaluator::shared() {
  static const RhoEvaluator instance;
  return instance;
}

double rho(double u) { return RhoEvaluator::shared()(u); }

double rho_approx(double u) {
  if (!(u > 1.0)) throw std::domain_error("rho_approx requires u > 1");
  return std::pow(std::numbers::e / (u * std::log(u)), u);
}

double lambert_w0(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("lambert_w0 requires finite x > 0");
  double w = x > std::numbers::e ? std::log(x) - std::log(std::log(x)) : x;
  if (x < 1.0) w = std::log1p(x);  // closer seed near the origin
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::fabs(step) <= 1e-16 * std::fabs(w)) break;
  }
  return w;
}

double asymptotic_estimate(double bound, int m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  return m * std::numbers::e * std::pow(bound, 1.0 / m) / std::numbers::ln2;
}

EstimateResult estimate_optimal(std::uint64_t bound, int m, const RhoEvaluator& rho_eval) {
  if (bound < 20) throw std::invalid_argument("estimate_optimal requires B >= 20");
  if (m < 2) throw std::invalid_argument("estimate_optimal requires m >= 2");
  const double log_b = std::log(static_cast<double>(bound));
  const double bits_at_max_u = rho_eval.max_u() * log_b / std::numbers::ln2 * (1.0 - 1e-12);
  const double asym = asymptotic_estimate(static_cast<double>(bound), m);

  // Positive below the root (few, dense twins), negative above it.
  auto f = [&](double bits) {
    const double u = bits * std::numbers::ln2 / log_b;
    return m * rho_eval.log_rho(u) + bits * std::numbers::ln2;
  };

  double lo = 1.0;
  double hi = std::min(4.0 * asym, bits_at_max_u);
  while (f(hi) >= 0.0) {
    const double widened = std::min(2.0 * hi, 10.0 * asym);
    if (widened <= hi || widened > bits_at_max_u) {
      throw std::runtime_error("estimate_optimal: no bracket for B=" + std::to_string(bound) +
                               " within max_u=" + std::to_string(rho_eval.max_u()));
    }
    hi = widened;
  }

  EstimateResult out;
  out.bound = bound;
  out.m = m;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
    ++out.iterations;
  }
  out.log2_r = 0.5 * (lo + hi);
  out.u = out.log2_r * std::numbers::ln2 / log_b;
  return out;
}

double geometric_mean_logprimes(std::uint64_t x) {
  if (x < 3) throw std::invalid_argument("geometric_mean_logprimes requires x >= 3");
  const auto primes = primes_up_to(x);
  double sum = 0.0;
  for (std::uint64_t p : primes) sum += std::log(std::log(static_cast<double>(p)));
  return std::exp(sum / static_cast<double>(primes.size()));
}

}  // namespace smoothtwin
