#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epsbias/expander.hpp"

namespace epsbias {

/// Outcome of a Monte-Carlo or exhaustive check of an inequality.
struct HarnessReport {
  std::string check;
  std::uint64_t trials = 0;
  /// Trials where lhs - rhs exceeded the tolerance (lemmas), or non-vacuous
  /// tail rows whose empirical frequency exceeded bound + 3 standard errors.
  std::uint64_t violations = 0;
  /// Largest lhs - rhs seen (negative when every trial had room to spare).
  double max_slack = -1e300;
  double tolerance = 1e-12;
  /// Tail experiments: frequency of the main event, its bound and whether
  /// that bound is vacuous (>= 1, so not asserted).
  double empirical_tail = 0.0;
  double bound = 1.0;
  bool vacuous = true;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json sweep = nlohmann::json::array();
  std::uint64_t seed = 0;

  bool passed() const { return violations == 0; }
  nlohmann::json to_json() const;
};

struct VectorCheckOptions {
  unsigned dim = 8;
  /// Every this-many trials uses the top singular pair (equality case); 0 disables.
  unsigned aligned_every = 10;
  unsigned threads = 1;
};

/// Both vector lemmas: mean-zero families against lambda E_s |x^s|^2 and
/// families with arbitrary side means against
/// lambda (E_s |x^s|^2 - eps_U^2/2 - eps_V^2/2) + eps_U eps_V.
/// Requires a graph certified by the exact eigensolver.
HarnessReport rayleigh_vector_check(const BipartiteExpander& graph, std::uint64_t trials, std::uint64_t seed,
                                    const VectorCheckOptions& opts = {});

struct OperatorCheckOptions {
  unsigned dim = 4;
  double scale = 0.9;
  bool tensor = true;
  unsigned threads = 1;
};

/// ||E_(u,v) X_u X_v|| <= lambda + (1 - lambda) eps_U eps_V for scaled random
/// unitaries, and the same for X_u (x) X_v. Trial 0 uses X_s = I (equality).
HarnessReport rayleigh_operator_check(const BipartiteExpander& graph, std::uint64_t trials, std::uint64_t seed,
                                      const OperatorCheckOptions& opts = {});

/// Diagonal of the fixed positive contraction: one entry 1 and the rest equal
/// so that the trace average is 1 - delta; all entries 1 - delta when that is
/// impossible.
std::vector<double> tail_diagonal(double delta, unsigned dim);

struct TailOptions {
  /// Shifts for the general form; empty means 0, 1, ..., ceil(k delta / 2) + 8
  /// together with k delta / 2.
  std::vector<double> shifts;
  unsigned threads = 1;
};

/// Products of k Haar-conjugated copies of the diagonal contraction. Main row:
/// threshold sqrt(dim) e^(-k delta/6), bound dim e^(-k delta^2/13). Sweep:
/// threshold sqrt(dim) e^(-k delta/2 + shift), bound dim e^(-shift^2/(2k ln 2)).
HarnessReport operator_product_tail(unsigned k, double delta, unsigned dim, std::uint64_t trials,
                                    std::uint64_t seed, const TailOptions& opts = {});

enum class AzumaMode { one_sided, symmetric };

/// Increments in [-alpha_i, alpha_i] with mean -eps_i. one_sided: 0 or
/// -alpha_i; symmetric: -eps_i +- (alpha_i - eps_i). For each lambda the
/// frequency of X_T - X_0 >= -sum eps + lambda is compared with
/// exp(-lambda^2 / (2 sum alpha)) (asserted when every alpha_i <= 1) and
/// exp(-lambda^2 / (2 sum alpha^2)).
HarnessReport azuma_supermartingale_check(const std::vector<double>& alphas, const std::vector<double>& epsilons,
                                          const std::vector<double>& lambdas, std::uint64_t trials,
                                          std::uint64_t seed, AzumaMode mode = AzumaMode::one_sided);

std::string to_string(AzumaMode mode);

}  // namespace epsbias
