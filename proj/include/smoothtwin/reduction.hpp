#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothtwin/bigfloat.hpp"
#include "smoothtwin/lattice.hpp"

namespace smoothtwin {

/// Basis rows after reduction together with the certificate
/// basis = transform * original (rows) and the Gram-Schmidt data.
struct ReducedBasis {
  IntMatrix basis;
  IntMatrix transform;
  /// |b*_i|^2 and mu_ij (j < i) in multi-precision.
  std::vector<BigFloat> gso_sq;
  std::vector<std::vector<BigFloat>> mu;
  std::vector<std::string> warnings;

  std::size_t rank() const { return basis.size(); }
  std::size_t ambient() const { return basis.empty() ? 0 : basis[0].size(); }
  /// log2 of the covolume from the Gram-Schmidt norms.
  double volume_log2() const;
};

/// Gram-Schmidt data rescaled by 2^(-2 shift) so that it fits doubles.
struct GsoDouble {
  std::vector<double> r;
  std::vector<std::vector<double>> mu;
  long shift = 0;
  double scale_sq(double norm_sq) const;  // norm_sq * 2^(-2 shift)
};
GsoDouble gso_double(const ReducedBasis& rb);

struct ShortVector {
  /// Coefficients on the original (input) basis.
  std::vector<std::int64_t> coords;
  /// Coefficients on the reduced basis.
  std::vector<std::int64_t> reduced;
  /// Exact squared norm of the full lattice vector.
  BigInt norm_sq;
  /// Squared norm of the projection that produced the candidate.
  double projected_norm_sq = 0.0;
};

enum class HarvestMode { enumeration, sieve };

struct ShortVectorSet {
  std::vector<ShortVector> vectors;
  double radius = 0.0;
  HarvestMode mode = HarvestMode::enumeration;
  /// Number of leading basis vectors projected away.
  std::size_t projection = 0;
  std::uint64_t nodes = 0;
};

/// Raised when a node, collision or memory budget runs out; carries what was found.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, ShortVectorSet partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const ShortVectorSet& partial() const { return partial_; }

 private:
  ShortVectorSet partial_;
};

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ReducedBasis lll(const IntMatrix& basis, double delta = 0.99);

struct BkzOptions {
  double delta = 0.99;
  std::uint64_t node_budget = 100'000'000;
};

ReducedBasis bkz(const IntMatrix& basis, int block, int tours, const BkzOptions& opts = {});
ReducedBasis bkz(const ReducedBasis& rb, int block, int tours, const BkzOptions& opts = {});

/// All nonzero vectors with |pi_level(v)| <= radius, one per +-pair, sorted by norm.
/// level 0 enumerates the full lattice.
ShortVectorSet enumerate_below(const ReducedBasis& rb, double radius,
                               std::uint64_t node_budget = 10'000'000'000ULL, std::size_t level = 0);

/// Vector of minimal norm (first found on ties); throws on the budget.
ShortVector shortest_vector(const ReducedBasis& rb, std::uint64_t node_budget = 10'000'000'000ULL);

struct SieveOptions {
  double saturation = 0.5;
  std::uint64_t seed = 1;
  std::size_t max_list = 1u << 20;
  std::size_t max_collisions = 0;  // 0 selects max(500, 10 n)
  /// Sieve in the lattice projected away from the first `level` vectors.
  std::size_t level = 0;
};

/// Pairwise Gauss sieve. Stops once saturation * (4/3)^(n/2) distinct pairs
/// lie within sqrt(4/3) gh, or on the collision cap.
ShortVectorSet gauss_sieve(const ReducedBasis& rb, const SieveOptions& opts = {});

/// Babai nearest-plane lift of projected candidates (their first `l` reduced
/// coefficients are recomputed). Vectors above `working_radius` are dropped;
/// a non-positive radius keeps everything.
ShortVectorSet project_and_lift(const ReducedBasis& rb, std::size_t l, const ShortVectorSet& candidates,
                                double working_radius = 0.0);

/// Gaussian heuristic of the lattice projected away from the first `level` vectors.
double projected_gh(const ReducedBasis& rb, std::size_t level);

/// Exact determinant by fraction-free elimination.
BigInt determinant(const IntMatrix& m);
/// rows(a) * b.
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

/// Throws std::logic_error unless basis == transform * original and |det transform| = 1.
void check_certificate(const ReducedBasis& rb, const IntMatrix& original);

}  // namespace smoothtwin
