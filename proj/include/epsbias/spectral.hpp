#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epsbias/biased_set.hpp"

namespace epsbias {

enum class SpectralMethod { automatic, dense, iterative };

struct SpectralOptions {
  std::uint64_t dense_cap = 4096;
  std::uint64_t iterative_cap = 65536;
  SpectralMethod method = SpectralMethod::automatic;
  /// Use the largest |eigenvalue| of (M + M^T)/2 instead of singular values.
  bool symmetrized = false;
  double tolerance = 1e-8;
  std::uint64_t max_matvecs = 400000;
};

struct SpectralReport {
  double bias = 0.0;
  std::string method;  // "dense-svd", "dense-symmetric", "iterative"
  double residual = 0.0;
  std::uint64_t matvecs = 0;
};

/// Averaging operator of a multiset: M[x][y] = #{s : y = s x} / |S|.
class WalkOperator {
 public:
  explicit WalkOperator(const BiasedSet& set);

  const FiniteGroup& group() const { return group_; }
  std::uint64_t dimension() const { return group_.order(); }

  Eigen::MatrixXd dense() const;
  /// (M f)[x] = E_s f(s x)
  void apply(const Eigen::VectorXd& f, Eigen::VectorXd& out) const;
  /// (M^T g)[y] = E_s g(s^-1 y)
  void apply_transpose(const Eigen::VectorXd& g, Eigen::VectorXd& out) const;

  /// Largest deviation of a row sum from 1.
  double row_sum_error() const;
  /// max |M R_h - R_h M| over entries, where (R_h f)(x) = f(x h).
  double right_translation_error(Elem h) const;

 private:
  Elem image(std::size_t generator, Elem x) const;

  FiniteGroup group_;
  std::vector<Elem> gens_;
  std::vector<double> weights_;
  std::vector<Elem> table_;  // table_[i * |G| + x] = gens_[i] * x, when cached
};

SpectralReport bias_spectral_report(const BiasedSet& set, const SpectralOptions& opts = {});
/// Largest singular value of the walk operator on the complement of constants,
/// which equals the maximum over nontrivial irreps of ||E_s rho(s)||.
double bias_spectral(const BiasedSet& set, const SpectralOptions& opts = {});

/// The multiset {g^t : g in G, t in Z_|G|}.
BiasedSet power_average_multiset(const FiniteGroup& g);
/// Norm of E_g Pi_g on the complement of constants, Pi_g = E_t R(g^t).
double lemma3_projection_norm(const FiniteGroup& g, const SpectralOptions& opts = {});

struct ReadOnceReport {
  double max_deviation = 0.0;
  std::vector<unsigned> worst_pattern;
  Elem worst_target = 0;
  std::uint64_t patterns_checked = 0;
};

/// For each nonzero b in {0,1}^n (all of them when 2^n - 1 <= samples or
/// samples == 0, otherwise `samples` random ones) the deviation from uniform
/// of the law of prod_i g_i^{b_i} over T, maximized over targets h.
ReadOnceReport mz_readonce_check(const FiniteGroup& g, unsigned n, const BiasedSet& t,
                                 std::uint64_t samples = 0, std::uint64_t seed = 1);

struct SampledSet {
  BiasedSet set;
  double bias = 1.0;
};

/// k i.i.d. uniform elements; bias measured spectrally.
SampledSet alon_roichman_sample(const FiniteGroup& g, std::uint64_t k, std::uint64_t seed,
                                const SpectralOptions& opts = {});

struct CayleyEdgeList {
  std::uint64_t order = 0;
  std::uint64_t set_size = 0;
  bool symmetrized = false;
  std::vector<std::pair<Elem, Elem>> edges;
};

/// Edges x -> s x for every x and every entry s (with repetition). The
/// symmetrized form adds x -> s^-1 x as well.
CayleyEdgeList cayley_edges(const BiasedSet& set, bool symmetrized = false);
void export_cayley(const BiasedSet& set, const std::string& path, bool symmetrized = false);
CayleyEdgeList import_cayley(const std::string& path);
/// Norm on the complement of constants of the operator whose (x, y) entry is
/// the fraction of x's out-edges landing on y.
double edge_operator_norm(const CayleyEdgeList& edges);

struct ProductCaseNorms {
  double left_trivial = 0.0;     // irreps trivial on the first block
  double right_trivial = 0.0;    // irreps trivial on the second block
  double both_nontrivial = 0.0;
  double overall = 0.0;
};

/// Splits a product group into its first `split` factors and the rest and
/// reports the walk-operator norm on each isotypic block.
ProductCaseNorms product_case_norms(const BiasedSet& set, std::size_t split);

/// Maximum over nontrivial irreps, built as tensor products of the factor
/// irreps, of ||E_s rho(s)||. Supports products whose factors are products
/// of cyclic groups or sym:3 (via its sign and 2-dimensional standard irreps).
double irrep_bias(const BiasedSet& set);

}  // namespace epsbias
