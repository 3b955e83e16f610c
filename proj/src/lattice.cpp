#include "smoothtwin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smoothtwin/bigfloat.hpp"

namespace smoothtwin {

namespace {

constexpr long kMaxEntryBits = 1 << 14;

bool slot0_is_two(const FactorBase& fb) { return !fb.empty() && fb.primes[0] == 2; }

BigFloat weight_big(const FactorBase& fb, std::size_t i, const WeightScheme& w, mpfr_prec_t prec) {
  BigFloat g(fb.generator(i), prec);
  BigFloat lg = log(g);
  if (w.exponent != 1.0) {
    BigFloat e(w.exponent, prec);
    mpfr_pow(lg.get(), lg.get(), e.get(), MPFR_RNDN);
  }
  if (i == 0 && w.eta != 1.0 && slot0_is_two(fb)) lg /= BigFloat(w.eta, prec);
  return lg;
}

double weight_double(const FactorBase& fb, std::size_t i, const WeightScheme& w) {
  double a = std::pow(fb.log_generator(i), w.exponent);
  if (i == 0 && slot0_is_two(fb)) a /= w.eta;
  return a;
}

mpfr_prec_t working_precision(const LatticeInstance& inst) {
  const double top = std::max(inst.alpha_log2, 0.0) + inst.precision_bits + 96.0;
  return static_cast<mpfr_prec_t>(std::ceil(top));
}

// log2(2^t + 1) without overflow.
double log2_one_plus_exp2(double t) {
  if (t > 0) return t + std::log2(1.0 + std::exp2(-t));
  return std::log1p(std::exp2(t)) / std::numbers::ln2;
}

double sum_sq_log_over_weight(const FactorBase& fb, const WeightScheme& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < fb.size(); ++i) {
    const double q = fb.log_generator(i) / weight_double(fb, i, w);
    s += q * q;
  }
  return s;
}

double sum_log2_weights(const FactorBase& fb, const WeightScheme& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < fb.size(); ++i) s += std::log2(weight_double(fb, i, w));
  return s;
}

double beta2_of(const SignedFactorization& x, const FactorBase& fb, const WeightScheme& w) {
  const auto c = slot_coordinates(x, fb);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = static_cast<double>(c[i]) * weight_double(fb, i, w);
    s += t * t;
  }
  return s;
}

double volume_log2_raw(const FactorBase& fb, const WeightScheme& w, double alpha_log2) {
  const double s = sum_sq_log_over_weight(fb, w);
  return 0.5 * log2_one_plus_exp2(2.0 * alpha_log2 + std::log2(s)) + sum_log2_weights(fb, w);
}

}  // namespace

std::vector<double> LatticeInstance::weight_values() const {
  std::vector<double> out(fb.size());
  for (std::size_t i = 0; i < fb.size(); ++i) out[i] = weight_double(fb, i, weights);
  return out;
}

void LatticeInstance::validate() const {
  if (fb.empty()) throw std::invalid_argument("lattice: empty factor base");
  if (!std::isfinite(alpha_log2)) throw std::invalid_argument("lattice: alpha must be positive and finite");
  if (precision_bits < 32) throw std::invalid_argument("lattice: precision_bits must be >= 32");
  if (!(weights.eta >= 1.0)) throw std::invalid_argument("lattice: eta must be >= 1");
  if (!std::isfinite(weights.exponent)) throw std::invalid_argument("lattice: bad weight exponent");
  for (std::size_t i = 1; i < fb.size(); ++i) {
    if (fb.primes[i] <= fb.primes[i - 1]) throw std::invalid_argument("lattice: primes not increasing");
  }
  for (std::size_t i = 0; i < fb.size(); ++i) {
    if (!(weight_double(fb, i, weights) > 0.0)) {
      throw std::invalid_argument("lattice: weight for " + std::to_string(fb.primes[i]) + " is not positive");
    }
  }
}

IntMatrix basis_rows(const LatticeInstance& inst) {
  inst.validate();
  const std::size_t n = inst.rank();
  const mpfr_prec_t prec = working_precision(inst);
  const BigFloat alpha = BigFloat::exp2(inst.alpha_log2, prec);
  const long scale = inst.precision_bits;

  IntMatrix rows(n, IntVector(n + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    BigFloat lg = log(BigFloat(inst.fb.generator(i), prec));
    BigFloat top = ldexp(alpha * lg, scale);
    if (top.log2_abs() > kMaxEntryBits) {
      throw PrecisionError("lattice: scaled entry exceeds " + std::to_string(kMaxEntryBits) + " bits");
    }
    rows[i][0] = top.round_to_integer();
    rows[i][i + 1] = ldexp(weight_big(inst.fb, i, inst.weights, prec), scale).round_to_integer();
    if (rows[i][i + 1] == 0) throw PrecisionError("lattice: diagonal weight rounds to zero");
  }
  return rows;
}

IntMatrix build_basis(const LatticeInstance& inst) {
  const IntMatrix rows = basis_rows(inst);
  const std::size_t n = rows.size();
  IntMatrix cols(n + 1, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) cols[j][i] = rows[i][j];
  }
  return cols;
}

std::vector<std::int64_t> slot_coordinates(const SignedFactorization& x, const FactorBase& fb) {
  std::vector<std::int64_t> c(fb.size(), 0);
  for (const auto& [p, e] : x.entries()) {
    if (!fb.contains(p)) {
      throw std::invalid_argument("encode: prime " + std::to_string(p) + " not in factor base");
    }
    const std::size_t i = fb.index_of(p);
    const int m = fb.multiplicity(i);
    if (e % m != 0) {
      throw std::invalid_argument("encode: exponent of 2 not a multiple of f=" + std::to_string(m));
    }
    c[i] = e / m;
  }
  return c;
}

IntVector encode(const SignedFactorization& x, const LatticeInstance& inst) {
  const auto c = slot_coordinates(x, inst.fb);
  const IntMatrix rows = basis_rows(inst);
  IntVector v(inst.rank() + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    const BigInt k = static_cast<long>(c[i]);
    v[0] += k * rows[i][0];
    v[i + 1] = k * rows[i][i + 1];
  }
  return v;
}

SignedFactorization decode(std::span<const std::int64_t> coords, const FactorBase& fb, bool normalize) {
  if (coords.size() != fb.size()) throw std::invalid_argument("decode: coordinate length mismatch");
  std::vector<SignedFactorization::Entry> entries;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] != 0) entries.emplace_back(fb.primes[i], coords[i] * fb.multiplicity(i));
  }
  SignedFactorization x(std::move(entries));
  if (normalize && !x.empty() && x.numerator() < x.denominator()) return x.negated();
  return x;
}

double abs_log_ratio(const BigInt& a, const BigInt& b) {
  if (a <= 0 || b <= 0) throw std::domain_error("abs_log_ratio: a and b must be positive");
  if (a == b) return 0.0;
  const BigInt& hi = a > b ? a : b;
  const BigInt& lo = a > b ? b : a;
  const BigInt diff = hi - lo;
  const mpfr_prec_t prec = std::max<mpfr_prec_t>(256, static_cast<mpfr_prec_t>(mpz_sizeinbase(lo.get_mpz_t(), 2)) + 64);
  BigFloat q = BigFloat(diff, prec) / BigFloat(lo, prec);
  return log1p(q).to_double();
}

double vector_norm_sq(const SignedFactorization& x, const LatticeInstance& inst) {
  if (x.empty()) return 0.0;
  const double l = abs_log_ratio(x.numerator(), x.denominator());
  const double head = std::exp2(2.0 * inst.alpha_log2) * l * l;
  return head + beta2_of(x, inst.fb, inst.weights);
}

double volume_log2(const LatticeInstance& inst) {
  inst.validate();
  return volume_log2_raw(inst.fb, inst.weights, inst.alpha_log2);
}

double unit_ball_volume_log2(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return (h * std::log(std::numbers::pi) - std::lgamma(h + 1.0)) / std::numbers::ln2;
}

double gaussian_heuristic_from_volume(double vol_log2, std::size_t n) {
  if (n == 0) throw std::invalid_argument("gaussian heuristic: rank 0");
  return std::exp2((vol_log2 - unit_ball_volume_log2(n)) / static_cast<double>(n));
}

double gaussian_heuristic_stirling(double vol_log2, std::size_t n) {
  if (n == 0) throw std::invalid_argument("gaussian heuristic: rank 0");
  const double nd = static_cast<double>(n);
  return std::sqrt(nd / (2.0 * std::numbers::pi * std::numbers::e)) * std::exp2(vol_log2 / nd);
}

double gaussian_heuristic(const LatticeInstance& inst) {
  return gaussian_heuristic_from_volume(volume_log2(inst), inst.rank());
}

AlphaOpt alpha_opt(const SignedFactorization& x, const FactorBase& fb, const WeightScheme& weights) {
  const std::size_t n = fb.size();
  if (n < 2) throw std::domain_error("alpha_opt: needs at least two primes");
  const BigInt a = x.numerator();
  const BigInt b = x.denominator();
  if (a == b) throw std::domain_error("alpha_opt: rational equals 1");
  const double l = abs_log_ratio(a, b);
  const double beta2 = beta2_of(x, fb, weights);
  const double nm1 = static_cast<double>(n - 1);
  AlphaOpt out;
  out.log2 = 0.5 * (std::log2(beta2 / nm1) - 2.0 * std::log2(l));
  const BigInt diff = abs(BigInt(a - b));
  out.twin_shortcut_log2 = 0.5 * std::log2(beta2 / nm1) + log2_big(b) - log2_big(diff);
  return out;
}

double gamma_constant(const FactorBase& fb, const WeightScheme& weights) {
  const double n = static_cast<double>(fb.size());
  const double s = sum_sq_log_over_weight(fb, weights);
  const double inner_log2 = 0.5 * std::log2(s) + sum_log2_weights(fb, weights);
  return std::sqrt(n / (2.0 * std::numbers::pi * std::numbers::e)) * std::exp2(inner_log2 / n);
}

AnalysisReport gh_ratio(const SignedFactorization& x, const LatticeInstance& inst, bool use_alpha_opt) {
  inst.validate();
  const std::size_t n = inst.rank();
  if (x.empty()) throw std::domain_error("gh_ratio: rational equals 1");
  AnalysisReport rep;
  const double l = abs_log_ratio(x.numerator(), x.denominator());
  if (l == 0.0) throw std::domain_error("gh_ratio: rational equals 1");
  rep.beta1 = l * l;
  rep.beta2 = beta2_of(x, inst.fb, inst.weights);
  rep.gamma = gamma_constant(inst.fb, inst.weights);
  if (n >= 2) rep.alpha_opt_log2 = alpha_opt(x, inst.fb, inst.weights).log2;
  rep.alpha_log2 = use_alpha_opt ? alpha_opt(x, inst.fb, inst.weights).log2 : inst.alpha_log2;

  const double vol = volume_log2_raw(inst.fb, inst.weights, rep.alpha_log2);
  rep.gh = gaussian_heuristic_from_volume(vol, n);
  rep.vector_norm = std::sqrt(std::exp2(2.0 * rep.alpha_log2) * rep.beta1 + rep.beta2);
  rep.ratio = rep.vector_norm / rep.gh;
  rep.ratio_stirling = rep.vector_norm / gaussian_heuristic_stirling(vol, n);
  if (use_alpha_opt) {
    const double nd = static_cast<double>(n);
    rep.ratio_closed_form = std::pow(std::sqrt(rep.beta2 / (nd - 1.0)), 1.0 - 1.0 / nd) *
                            std::sqrt(nd * std::pow(rep.beta1, 1.0 / nd)) / rep.gamma;
  }
  return rep;
}

SignedFactorization twin_rational(const SmoothTwin& twin) { return twin.fac_r1 * twin.fac_r.negated(); }

AnalysisBounds analysis_bounds(const SmoothTwin& twin, const FactorBase& fb, const WeightScheme& weights) {
  if (weights.exponent != 1.0 || weights.eta != 1.0) {
    throw std::invalid_argument("analysis_bounds: only log weights (e=1, eta=1) are supported");
  }
  const auto x = twin_rational(twin);
  const auto c = slot_coordinates(x, fb);
  const double n = static_cast<double>(fb.size());
  AnalysisBounds out;
  double s1 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = static_cast<double>(c[i]) * fb.log_generator(i);
    s1 += std::fabs(t);
    out.beta2 += t * t;
  }
  out.beta2_hi = s1 * s1;
  out.beta2_lo = out.beta2_hi / n;
  const double slack = 1e-12 * out.beta2_hi;
  out.within_bracket = out.beta2 >= out.beta2_lo - slack && out.beta2 <= out.beta2_hi + slack;

  const double log_r = log2_big(twin.r) * std::numbers::ln2;
  const double inv_r = std::exp2(-log2_big(twin.r));
  out.lemma_lo = 4.0 * log_r * log_r / n;
  out.lemma_hi = 4.0 * (log_r + inv_r) * (log_r + inv_r);
  out.gamma_asym = std::sqrt(n / (2.0 * std::numbers::pi * std::numbers::e)) *
                   (std::log(n) + std::log(std::log(n)) - 1.0);
  out.gamma_exact = gamma_constant(fb, weights);
  return out;
}

}  // namespace smoothtwin
