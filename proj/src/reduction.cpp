#include "smoothtwin/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "smoothtwin/rng.hpp"

namespace smoothtwin {

namespace {

constexpr double kEta = 0.51;
constexpr int kMaxSizeReductionPasses = 200;

std::size_t max_bits(const IntMatrix& m) {
  std::size_t bits = 1;
  for (const auto& row : m) {
    for (const auto& v : row) bits = std::max(bits, mpz_sizeinbase(v.get_mpz_t(), 2));
  }
  return bits;
}

IntMatrix identity(std::size_t d) {
  IntMatrix u(d, IntVector(d, 0));
  for (std::size_t i = 0; i < d; ++i) u[i][i] = 1;
  return u;
}

BigInt dot(const IntVector& a, const IntVector& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return s;
}

// L^2-style LLL on exact integer rows with an exact Gram matrix and MPFR
// Gram-Schmidt coefficients. Rows of `u` track the unimodular transform.
class Engine {
 public:
  Engine(IntMatrix b, IntMatrix u, double delta) : b_(std::move(b)), u_(std::move(u)), delta_(delta) {
    d_ = b_.size();
    if (d_ == 0) throw std::invalid_argument("lll: empty basis");
    m_ = b_[0].size();
    for (const auto& row : b_) {
      if (row.size() != m_) throw std::invalid_argument("lll: ragged basis");
    }
    if (d_ > m_) throw RankDeficient("lll: more rows than columns");
    if (!(delta > 0.25 && delta < 1.0)) throw std::invalid_argument("lll: delta must be in (0.25, 1)");
    prec_ = static_cast<mpfr_prec_t>(std::max<std::size_t>(128, max_bits(b_) + 2 * d_ + 64));
    prec_ = (prec_ + 63) / 64 * 64;

    g_.assign(d_, IntVector(d_));
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) g_[i][j] = g_[j][i] = dot(b_[i], b_[j]);
    }
    r_.assign(d_, std::vector<BigFloat>());
    mu_.assign(d_, std::vector<BigFloat>());
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        r_[i].emplace_back(prec_);
        mu_[i].emplace_back(prec_);
      }
    }
    for (std::size_t i = 0; i <= d_; ++i) s_.emplace_back(prec_);
  }

  void reduce(std::size_t start) {
    start = std::min(start, d_);
    for (std::size_t i = 0; i < start; ++i) {
      compute_row(i);
      finish_row(i);
      mpfr_set(r_[i][i].get(), s_[i].get(), MPFR_RNDN);
    }
    if (start == 0) {
      if (g_[0][0] == 0) throw RankDeficient("lll: zero basis vector");
      mpfr_set_z(r_[0][0].get(), g_[0][0].get_mpz_t(), MPFR_RNDN);
      start = 1;
    }
    std::size_t kappa = start;
    BigFloat lhs(prec_);
    while (kappa < d_) {
      size_reduce(kappa);
      std::size_t kp = kappa;
      while (kp >= 1) {
        mpfr_mul_d(lhs.get(), r_[kp - 1][kp - 1].get(), delta_, MPFR_RNDN);
        if (!(lhs > s_[kp - 1])) break;
        --kp;
      }
      if (kp < kappa) {
        rotate_down(kp, kappa);
        for (std::size_t j = 0; j < kp; ++j) {
          mpfr_set(r_[kp][j].get(), r_[kappa][j].get(), MPFR_RNDN);
          mpfr_set(mu_[kp][j].get(), mu_[kappa][j].get(), MPFR_RNDN);
        }
        mpfr_set(r_[kp][kp].get(), s_[kp].get(), MPFR_RNDN);
        if (r_[kp][kp].sign() <= 0) throw RankDeficient("lll: basis is linearly dependent");
        kappa = kp + 1;
      } else {
        mpfr_set(r_[kappa][kappa].get(), s_[kappa].get(), MPFR_RNDN);
        if (r_[kappa][kappa].sign() <= 0) throw RankDeficient("lll: basis is linearly dependent");
        ++kappa;
      }
    }
  }

  /// Makes rows k..k+c.size()-1 start with sum c_i b_{k+i}; gcd(c) must be 1.
  void insert(std::size_t k, std::vector<std::int64_t> c) {
    const std::size_t beta = c.size();
    for (;;) {
      std::size_t piv = beta;
      for (std::size_t i = 0; i < beta; ++i) {
        if (c[i] != 0 && (piv == beta || std::llabs(c[i]) < std::llabs(c[piv]))) piv = i;
      }
      if (piv == beta) throw std::logic_error("bkz: zero insertion vector");
      if (piv != 0) {
        std::swap(c[0], c[piv]);
        swap_rows(k, k + piv);
      }
      bool done = true;
      for (std::size_t j = 1; j < beta; ++j) {
        if (c[j] == 0) continue;
        const std::int64_t q = c[j] / c[0];
        if (q != 0) {
          c[j] -= q * c[0];
          row_op(k, k + j, BigInt(static_cast<long>(-q)));
        }
        if (c[j] != 0) done = false;
      }
      if (done) break;
    }
    if (c[0] == -1) negate_row(k);
    if (std::llabs(c[0]) != 1) throw std::logic_error("bkz: insertion vector is not primitive");
  }

  ReducedBasis result() const {
    ReducedBasis rb;
    rb.basis = b_;
    rb.transform = u_;
    rb.mu.resize(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      rb.gso_sq.push_back(r_[i][i]);
      for (std::size_t j = 0; j < i; ++j) rb.mu[i].push_back(mu_[i][j]);
    }
    return rb;
  }

  GsoDouble gso() const { return gso_double(result()); }

  std::size_t rank() const { return d_; }
  const BigFloat& r(std::size_t i) const { return r_[i][i]; }

 private:
  void compute_row(std::size_t k) {
    BigFloat tmp(prec_);
    for (std::size_t j = 0; j < k; ++j) {
      mpfr_ptr rkj = r_[k][j].get();
      mpfr_set_z(rkj, g_[k][j].get_mpz_t(), MPFR_RNDN);
      for (std::size_t i = 0; i < j; ++i) {
        mpfr_mul(tmp.get(), mu_[j][i].get(), r_[k][i].get(), MPFR_RNDN);
        mpfr_sub(rkj, rkj, tmp.get(), MPFR_RNDN);
      }
      mpfr_div(mu_[k][j].get(), rkj, r_[j][j].get(), MPFR_RNDN);
    }
  }

  void finish_row(std::size_t k) {
    BigFloat tmp(prec_);
    mpfr_set_z(s_[0].get(), g_[k][k].get_mpz_t(), MPFR_RNDN);
    for (std::size_t j = 0; j < k; ++j) {
      mpfr_mul(tmp.get(), mu_[k][j].get(), r_[k][j].get(), MPFR_RNDN);
      mpfr_sub(s_[j + 1].get(), s_[j].get(), tmp.get(), MPFR_RNDN);
    }
  }

  void size_reduce(std::size_t k) {
    BigFloat xf(prec_), tmp(prec_);
    BigInt x;
    for (int pass = 0;; ++pass) {
      if (pass == kMaxSizeReductionPasses) {
        throw PrecisionError("lll: size reduction does not converge at " + std::to_string(prec_) + " bits");
      }
      compute_row(k);
      bool reduced = true;
      for (std::size_t j = 0; j < k; ++j) {
        if (mpfr_cmp_d(mu_[k][j].get(), kEta) > 0 || mpfr_cmp_d(mu_[k][j].get(), -kEta) < 0) {
          reduced = false;
          break;
        }
      }
      if (reduced) break;
      for (std::size_t j = k; j-- > 0;) {
        mpfr_round(xf.get(), mu_[k][j].get());
        if (mpfr_zero_p(xf.get())) continue;
        mpfr_get_z(x.get_mpz_t(), xf.get(), MPFR_RNDN);
        for (std::size_t i = 0; i < j; ++i) {
          mpfr_mul(tmp.get(), xf.get(), mu_[j][i].get(), MPFR_RNDN);
          mpfr_sub(mu_[k][i].get(), mu_[k][i].get(), tmp.get(), MPFR_RNDN);
        }
        mpfr_sub(mu_[k][j].get(), mu_[k][j].get(), xf.get(), MPFR_RNDN);
        row_op(k, j, x);
      }
    }
    if (g_[k][k] == 0) throw RankDeficient("lll: basis is linearly dependent");
    finish_row(k);
  }

  // b_k -= x b_j
  void row_op(std::size_t k, std::size_t j, const BigInt& x) {
    for (std::size_t t = 0; t < m_; ++t) mpz_submul(b_[k][t].get_mpz_t(), x.get_mpz_t(), b_[j][t].get_mpz_t());
    for (std::size_t t = 0; t < d_; ++t) mpz_submul(u_[k][t].get_mpz_t(), x.get_mpz_t(), u_[j][t].get_mpz_t());
    BigInt gkk = g_[k][k] - 2 * x * g_[k][j] + x * x * g_[j][j];
    for (std::size_t i = 0; i < d_; ++i) {
      if (i == k) continue;
      mpz_submul(g_[k][i].get_mpz_t(), x.get_mpz_t(), g_[j][i].get_mpz_t());
      g_[i][k] = g_[k][i];
    }
    g_[k][k] = std::move(gkk);
  }

  void swap_rows(std::size_t a, std::size_t c) {
    if (a == c) return;
    std::swap(b_[a], b_[c]);
    std::swap(u_[a], u_[c]);
    std::swap(g_[a], g_[c]);
    for (auto& row : g_) std::swap(row[a], row[c]);
  }

  void negate_row(std::size_t k) {
    for (auto& v : b_[k]) v = -v;
    for (auto& v : u_[k]) v = -v;
    for (std::size_t i = 0; i < d_; ++i) {
      if (i == k) continue;
      g_[k][i] = -g_[k][i];
      g_[i][k] = g_[k][i];
    }
  }

  // Moves row `to` down into position `from`, shifting rows from..to-1 up.
  void rotate_down(std::size_t from, std::size_t to) {
    auto rot = [&](auto& v) { std::rotate(v.begin() + from, v.begin() + to, v.begin() + to + 1); };
    rot(b_);
    rot(u_);
    rot(g_);
    for (auto& row : g_) rot(row);
  }

  IntMatrix b_, u_, g_;
  std::size_t d_ = 0, m_ = 0;
  double delta_;
  mpfr_prec_t prec_ = 128;
  std::vector<std::vector<BigFloat>> r_, mu_;
  std::vector<BigFloat> s_;
};

// Schnorr-Euchner enumeration over levels [lo, hi) of the Gram-Schmidt data.
// The first nonzero coefficient from the top is positive, so each +- pair is
// visited once. `on_leaf(x, dist)` may shrink `r2`. Returns false when the
// node budget ran out.
template <class OnLeaf>
bool enumerate_core(const GsoDouble& gso, std::size_t lo, std::size_t hi, double& r2, std::uint64_t budget,
                    std::uint64_t& nodes, OnLeaf&& on_leaf) {
  const std::size_t n = hi - lo;
  if (n == 0) return true;
  std::vector<double> x(n, 0.0), c(n, 0.0), w(n, 0.0), dist(n + 1, 0.0);
  std::vector<std::vector<double>> sig(n, std::vector<double>(n + 1, 0.0));
  std::vector<std::size_t> stale(n + 1, n - 1);
  auto rr = [&](std::size_t t) { return gso.r[lo + t]; };
  auto mm = [&](std::size_t a, std::size_t b) { return gso.mu[lo + a][lo + b]; };

  std::size_t k = 0;
  std::size_t last_nonzero = 0;
  x[0] = 1.0;
  auto sibling = [&](std::size_t lvl) {
    if (lvl >= last_nonzero) {
      last_nonzero = lvl;
      x[lvl] += 1.0;
    } else {
      x[lvl] += x[lvl] > c[lvl] ? -w[lvl] : w[lvl];
      w[lvl] += 1.0;
    }
  };
  for (;;) {
    if (++nodes > budget) return false;
    const double diff = x[k] - c[k];
    dist[k] = dist[k + 1] + diff * diff * rr(k);
    if (dist[k] <= r2) {
      if (k == 0) {
        on_leaf(x, dist[0]);
        sibling(0);
        continue;
      }
      --k;
      stale[k] = std::max(stale[k], stale[k + 1]);
      for (std::size_t j = stale[k]; j > k; --j) sig[k][j] = sig[k][j + 1] + x[j] * mm(j, k);
      c[k] = -sig[k][k + 1];
      x[k] = std::round(c[k]);
      w[k] = 1.0;
      continue;
    }
    ++k;
    if (k == n) return true;
    stale[k - 1] = k;
    sibling(k);
  }
}

ShortVector make_vector(const ReducedBasis& rb, std::vector<std::int64_t> y, double projected) {
  ShortVector sv;
  const std::size_t d = rb.rank();
  IntVector v(rb.ambient(), 0);
  std::vector<BigInt> coords(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (y[i] == 0) continue;
    const BigInt yi = static_cast<long>(y[i]);
    for (std::size_t t = 0; t < v.size(); ++t) mpz_addmul(v[t].get_mpz_t(), yi.get_mpz_t(), rb.basis[i][t].get_mpz_t());
    for (std::size_t t = 0; t < d; ++t) mpz_addmul(coords[t].get_mpz_t(), yi.get_mpz_t(), rb.transform[i][t].get_mpz_t());
  }
  sv.norm_sq = dot(v, v);
  sv.coords.resize(d);
  for (std::size_t t = 0; t < d; ++t) {
    if (!coords[t].fits_slong_p()) throw std::overflow_error("short vector coordinate exceeds 64 bits");
    sv.coords[t] = coords[t].get_si();
  }
  sv.reduced = std::move(y);
  sv.projected_norm_sq = projected;
  return sv;
}

bool norm_within(const BigInt& norm_sq, double radius, double slack) {
  BigFloat lhs(norm_sq, 128);
  BigFloat rad(radius * (1.0 + slack), 128);
  return lhs <= rad * rad;
}

void sort_vectors(std::vector<ShortVector>& v) {
  std::sort(v.begin(), v.end(), [](const ShortVector& a, const ShortVector& b) {
    const int c = cmp(a.norm_sq, b.norm_sq);
    if (c != 0) return c < 0;
    return a.coords < b.coords;
  });
}

// Canonical sign: the last nonzero reduced coefficient is positive.
void canonical_sign(ShortVector& sv) {
  for (std::size_t i = sv.reduced.size(); i-- > 0;) {
    if (sv.reduced[i] == 0) continue;
    if (sv.reduced[i] < 0) {
      for (auto& v : sv.reduced) v = -v;
      for (auto& v : sv.coords) v = -v;
    }
    return;
  }
}

}  // namespace

double GsoDouble::scale_sq(double norm_sq) const { return std::ldexp(norm_sq, static_cast<int>(-2 * shift)); }

GsoDouble gso_double(const ReducedBasis& rb) {
  GsoDouble g;
  const std::size_t d = rb.rank();
  double top = -1e300;
  for (const auto& r : rb.gso_sq) top = std::max(top, r.log2_abs());
  g.shift = static_cast<long>(std::floor(top / 2.0));
  g.r.resize(d);
  g.mu.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    g.r[i] = ldexp(rb.gso_sq[i], -2 * g.shift).to_double();
    for (std::size_t j = 0; j < i; ++j) g.mu[i][j] = rb.mu[i][j].to_double();
    g.mu[i][i] = 1.0;
  }
  return g;
}

double ReducedBasis::volume_log2() const {
  double s = 0.0;
  for (const auto& r : gso_sq) s += 0.5 * r.log2_abs();
  return s;
}

BigInt determinant(const IntMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  IntMatrix a = m;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size();
  const std::size_t cols = b.empty() ? 0 : b[0].size();
  IntMatrix out(a.size(), IntVector(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw std::invalid_argument("multiply: shape mismatch");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        mpz_addmul(out[i][j].get_mpz_t(), a[i][k].get_mpz_t(), b[k][j].get_mpz_t());
      }
    }
  }
  return out;
}

void check_certificate(const ReducedBasis& rb, const IntMatrix& original) {
  if (multiply(rb.transform, original) != rb.basis) {
    throw std::logic_error("reduction certificate: basis != transform * original");
  }
  if (abs(determinant(rb.transform)) != 1) throw std::logic_error("reduction certificate: transform not unimodular");
}

ReducedBasis lll(const IntMatrix& basis, double delta) {
  Engine e(basis, identity(basis.size()), delta);
  e.reduce(0);
  ReducedBasis rb = e.result();
  check_certificate(rb, basis);
  return rb;
}

ReducedBasis bkz(const IntMatrix& basis, int block, int tours, const BkzOptions& opts) {
  ReducedBasis rb = bkz(lll(basis, opts.delta), block, tours, opts);
  check_certificate(rb, basis);
  return rb;
}

ReducedBasis bkz(const ReducedBasis& start, int block, int tours, const BkzOptions& opts) {
  const std::size_t n = start.rank();
  std::vector<std::string> warnings = start.warnings;
  if (block < 2) throw std::invalid_argument("bkz: block size must be >= 2");
  if (static_cast<std::size_t>(block) > n) {
    warnings.push_back("bkz: block " + std::to_string(block) + " clamped to rank " + std::to_string(n));
    block = static_cast<int>(n);
  }
  Engine e(start.basis, start.transform, opts.delta);
  e.reduce(0);
  for (int tour = 0; tour < tours; ++tour) {
    bool changed = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t hi = std::min(n, k + static_cast<std::size_t>(block));
      const GsoDouble g = e.gso();
      double r2 = g.r[k] * opts.delta;
      std::vector<double> best;
      std::uint64_t nodes = 0;
      const bool complete = enumerate_core(g, k, hi, r2, opts.node_budget, nodes, [&](const std::vector<double>& x, double dist) {
        best = x;
        r2 = dist * (1.0 - 1e-12);
      });
      if (!complete) warnings.push_back("bkz: block enumeration hit the node budget at index " + std::to_string(k));
      if (best.empty()) continue;
      std::vector<std::int64_t> c(best.size());
      for (std::size_t i = 0; i < best.size(); ++i) c[i] = static_cast<std::int64_t>(best[i]);
      std::int64_t gcd = 0;
      for (auto v : c) gcd = std::gcd(gcd, v);
      if (gcd > 1) {
        for (auto& v : c) v /= gcd;
      }
      e.insert(k, c);
      e.reduce(k);
      changed = true;
    }
    if (!changed) break;
  }
  ReducedBasis rb = e.result();
  rb.warnings = std::move(warnings);
  if (abs(determinant(rb.transform)) != 1) throw std::logic_error("bkz: transform not unimodular");
  return rb;
}

ShortVectorSet enumerate_below(const ReducedBasis& rb, double radius, std::uint64_t node_budget, std::size_t level) {
  if (!(radius > 0.0)) throw std::invalid_argument("enumerate_below: radius must be positive");
  const std::size_t n = rb.rank();
  if (level >= n) throw std::invalid_argument("enumerate_below: projection level out of range");
  const GsoDouble g = gso_double(rb);
  double r2 = g.scale_sq(radius * radius) * (1.0 + 0x1.0p-19);
  ShortVectorSet out;
  out.radius = radius;
  out.mode = HarvestMode::enumeration;
  out.projection = level;
  std::vector<std::pair<std::vector<std::int64_t>, double>> raw;
  const bool complete = enumerate_core(g, level, n, r2, node_budget, out.nodes, [&](const std::vector<double>& x, double dist) {
    std::vector<std::int64_t> y(n, 0);
    for (std::size_t i = 0; i < x.size(); ++i) y[level + i] = static_cast<std::int64_t>(x[i]);
    raw.emplace_back(std::move(y), std::ldexp(dist, static_cast<int>(2 * g.shift)));
  });
  for (auto& [y, proj] : raw) {
    ShortVector sv = make_vector(rb, std::move(y), proj);
    if (level == 0 && !norm_within(sv.norm_sq, radius, 0x1.0p-20)) continue;
    out.vectors.push_back(std::move(sv));
  }
  if (level == 0) {
    sort_vectors(out.vectors);
  } else {
    std::sort(out.vectors.begin(), out.vectors.end(),
              [](const ShortVector& a, const ShortVector& b) { return a.projected_norm_sq < b.projected_norm_sq; });
  }
  if (!complete) throw BudgetExceeded("enumerate_below: node budget exceeded", std::move(out));
  return out;
}

ShortVector shortest_vector(const ReducedBasis& rb, std::uint64_t node_budget) {
  const GsoDouble g = gso_double(rb);
  const std::size_t n = rb.rank();
  double r2 = g.r[0] * (1.0 + 1e-9);
  std::vector<double> best;
  std::uint64_t nodes = 0;
  const bool complete = enumerate_core(g, 0, n, r2, node_budget, nodes, [&](const std::vector<double>& x, double dist) {
    best = x;
    r2 = dist * (1.0 - 1e-12);
  });
  std::vector<std::int64_t> y(n, 0);
  if (best.empty()) {
    y[0] = 1;
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<std::int64_t>(best[i]);
  }
  ShortVector sv = make_vector(rb, y, 0.0);
  sv.projected_norm_sq = BigFloat(sv.norm_sq, 64).to_double();
  if (!complete) {
    ShortVectorSet partial;
    partial.vectors.push_back(sv);
    partial.nodes = nodes;
    throw BudgetExceeded("shortest_vector: node budget exceeded", std::move(partial));
  }
  return sv;
}

double projected_gh(const ReducedBasis& rb, std::size_t level) {
  const std::size_t n = rb.rank();
  if (level >= n) throw std::invalid_argument("projected_gh: level out of range");
  double vol = 0.0;
  for (std::size_t i = level; i < n; ++i) vol += 0.5 * rb.gso_sq[i].log2_abs();
  return gaussian_heuristic_from_volume(vol, n - level);
}

namespace {

struct SieveVec {
  std::vector<std::int64_t> y;
  std::vector<double> f;
  double norm = 0.0;
};

class Sieve {
 public:
  Sieve(const ReducedBasis& rb, const SieveOptions& opts) : rb_(rb), opts_(opts), g_(gso_double(rb)), rng_(opts.seed) {
    n_ = rb.rank();
    lo_ = opts.level;
    sigma_ = 0.0;
    for (std::size_t i = lo_; i < n_; ++i) sigma_ = std::max(sigma_, std::sqrt(g_.r[i]));
    sigma_ *= 0.5;
  }

  void image(SieveVec& v) const {
    v.f.assign(n_ - lo_, 0.0);
    v.norm = 0.0;
    for (std::size_t j = lo_; j < n_; ++j) {
      double s = static_cast<double>(v.y[j]);
      for (std::size_t i = j + 1; i < n_; ++i) s += static_cast<double>(v.y[i]) * g_.mu[i][j];
      s *= std::sqrt(g_.r[j]);
      v.f[j - lo_] = s;
      v.norm += s * s;
    }
  }

  SieveVec sample() {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
      SieveVec v;
      v.y.assign(n_, 0);
      for (std::size_t i = n_; i-- > lo_;) {
        double c = 0.0;
        for (std::size_t j = i + 1; j < n_; ++j) c -= static_cast<double>(v.y[j]) * g_.mu[j][i];
        const double s = sigma_ / std::sqrt(g_.r[i]);
        v.y[i] = static_cast<std::int64_t>(std::llround(c + s * normal(rng_)));
      }
      image(v);
      if (v.norm > 0.0) return v;
    }
  }

  static double dotf(const SieveVec& a, const SieveVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.f.size(); ++i) s += a.f[i] * b.f[i];
    return s;
  }

  // a -= q b when that shortens a; returns true on change.
  bool reduce_by(SieveVec& a, const SieveVec& b) const {
    const double ip = dotf(a, b);
    if (2.0 * std::fabs(ip) <= b.norm * (1.0 + 1e-12)) return false;
    const double q = std::round(ip / b.norm);
    if (q == 0.0) return false;
    const auto qi = static_cast<std::int64_t>(q);
    for (std::size_t i = 0; i < n_; ++i) a.y[i] -= qi * b.y[i];
    image(a);
    return true;
  }

  ShortVectorSet run() {
    ShortVectorSet out;
    out.mode = HarvestMode::sieve;
    out.projection = lo_;
    const std::size_t dim = n_ - lo_;
    const double gh = projected_gh(rb_, lo_);
    const double gh2 = g_.scale_sq(gh * gh);
    out.radius = std::sqrt(4.0 / 3.0) * gh;
    if (opts_.saturation <= 0.0) {
      for (std::size_t i = lo_; i < n_; ++i) {
        SieveVec v;
        v.y.assign(n_, 0);
        v.y[i] = 1;
        image(v);
        list_.push_back(std::move(v));
      }
      return finish(std::move(out));
    }
    const double target = opts_.saturation * std::pow(4.0 / 3.0, 0.5 * static_cast<double>(dim));
    const std::size_t max_coll = opts_.max_collisions ? opts_.max_collisions : std::max<std::size_t>(500, 10 * dim);
    std::size_t collisions = 0;
    std::vector<SieveVec> stack;
    for (std::size_t i = lo_; i < n_; ++i) {
      SieveVec v;
      v.y.assign(n_, 0);
      v.y[i] = 1;
      image(v);
      stack.push_back(std::move(v));
    }
    for (;;) {
      SieveVec p;
      if (!stack.empty()) {
        p = std::move(stack.back());
        stack.pop_back();
      } else {
        p = sample();
      }
      bool changed = true;
      while (changed && p.norm > 0.0) {
        changed = false;
        for (const auto& w : list_) {
          if (w.norm <= p.norm && reduce_by(p, w)) {
            changed = true;
            if (p.norm <= 1e-9 * gh2) break;
          }
        }
      }
      if (p.norm <= 1e-9 * gh2) {
        ++collisions;
      } else {
        for (std::size_t i = 0; i < list_.size();) {
          if (list_[i].norm > p.norm && reduce_by(list_[i], p)) {
            stack.push_back(std::move(list_[i]));
            list_[i] = std::move(list_.back());
            list_.pop_back();
          } else {
            ++i;
          }
        }
        list_.push_back(std::move(p));
      }
      if (list_.size() > opts_.max_list) {
        out = finish(std::move(out));
        throw BudgetExceeded("gauss_sieve: list size cap exceeded", std::move(out));
      }
      std::size_t below = 0;
      for (const auto& w : list_) below += w.norm <= (4.0 / 3.0) * gh2 * (1.0 + 1e-9);
      if (static_cast<double>(below) >= target || collisions >= max_coll) break;
    }
    return finish(std::move(out));
  }

 private:
  ShortVectorSet finish(ShortVectorSet out) {
    for (auto& v : list_) {
      ShortVector sv = make_vector(rb_, v.y, std::ldexp(v.norm, static_cast<int>(2 * g_.shift)));
      canonical_sign(sv);
      out.vectors.push_back(std::move(sv));
    }
    std::sort(out.vectors.begin(), out.vectors.end(),
              [](const ShortVector& a, const ShortVector& b) { return a.projected_norm_sq < b.projected_norm_sq; });
    return out;
  }

  const ReducedBasis& rb_;
  SieveOptions opts_;
  GsoDouble g_;
  SplitMix64 rng_;
  std::size_t n_ = 0, lo_ = 0;
  double sigma_ = 0.0;
  std::vector<SieveVec> list_;
};

}  // namespace

ShortVectorSet gauss_sieve(const ReducedBasis& rb, const SieveOptions& opts) {
  if (opts.level >= rb.rank()) throw std::invalid_argument("gauss_sieve: projection level out of range");
  Sieve s(rb, opts);
  return s.run();
}

ShortVectorSet project_and_lift(const ReducedBasis& rb, std::size_t l, const ShortVectorSet& candidates,
                                double working_radius) {
  const std::size_t n = rb.rank();
  if (l + 2 > n && l != 0) throw std::invalid_argument("project_and_lift: l must be <= n - 2");
  ShortVectorSet out = candidates;
  out.projection = 0;
  if (l == 0) return out;
  out.vectors.clear();
  const GsoDouble g = gso_double(rb);
  std::map<std::vector<std::int64_t>, bool> seen;
  for (const auto& cand : candidates.vectors) {
    std::vector<std::int64_t> y = cand.reduced;
    if (y.size() != n) throw std::invalid_argument("project_and_lift: candidate rank mismatch");
    for (std::size_t i = l; i-- > 0;) {
      double c = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) c -= static_cast<double>(y[j]) * g.mu[j][i];
      y[i] = static_cast<std::int64_t>(std::llround(c));
    }
    ShortVector sv = make_vector(rb, std::move(y), cand.projected_norm_sq);
    if (sv.norm_sq == 0) continue;
    if (working_radius > 0.0 && !norm_within(sv.norm_sq, working_radius, 0x1.0p-20)) continue;
    canonical_sign(sv);
    if (!seen.emplace(sv.coords, true).second) continue;
    out.vectors.push_back(std::move(sv));
  }
  sort_vectors(out.vectors);
  if (working_radius > 0.0) out.radius = working_radius;
  return out;
}

}  // namespace smoothtwin
