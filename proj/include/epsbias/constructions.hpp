#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "epsbias/biased_set.hpp"
#include "epsbias/expander.hpp"

namespace epsbias {

/// Power set {(g^s1, ..., g^sn) : g in G, s in S} over G^n. The claim is the
/// reference value 1 - phi(|G|)/|G| + eps_S; only certification is binding.
BiasedSet mz_set(const FiniteGroup& g, unsigned n, const BiasedSet& s);

/// Reference ingredient 1 - phi(m)/m.
double mz_reference_term(std::uint64_t order);

/// Assignment of set entries to the vertices of one expander side. Vertex i
/// gets entry i mod |S|: full blocks are bijections onto S and the j-th
/// uncovered vertex gets S[j mod |S|].
struct TilingMap {
  char side = 'U';
  std::uint64_t vertices = 0;
  std::uint64_t set_size = 0;
  std::uint64_t uncovered_count = 0;

  std::uint64_t entry(std::uint64_t vertex) const { return vertex % set_size; }
  double uncovered_fraction() const {
    return vertices == 0 ? 0.0 : static_cast<double>(uncovered_count) / static_cast<double>(vertices);
  }
};

TilingMap tile(char side, std::uint64_t vertices, std::uint64_t set_size);

/// Bias used as the input of a combination step: the certificate when present
/// and the claim otherwise.
double effective_bias(const BiasedSet& s);

struct ConstructionOptions {
  CertifyOptions certify;
  std::uint64_t seed = 1;
  /// Random expander attempts per degree.
  std::uint64_t expander_budget = 4;
  /// Certify intermediate sets with the spectral verifier when the group is
  /// at most this large (0 disables).
  std::uint64_t verify_cap = 4096;
};

/// Derandomized squaring on an LPS graph with lambda <= eps^2 and side
/// >= |S| ceil(1/eps); output {S[u] S[v] : (u, v) edge}, claim 5 eps^2.
BiasedSet amplify_step(const BiasedSet& s, double eps, const ConstructionOptions& opts = {});

struct AmplificationStep {
  unsigned t = 0;
  double eps_in = 0.0;
  double eps_out = 0.0;
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  double side = 0.0;
  double size_in = 0.0;
  double size_out = 0.0;
  /// (size_out / size_in) * eps_in^5.
  double constant = 0.0;
};

struct AmplificationSchedule {
  double eps0 = 0.1;
  double target = 0.0;
  std::vector<AmplificationStep> steps;
  nlohmann::json to_json() const;
};

/// eps_t = 2^(-2^t)/5 for t >= 1.
double schedule_epsilon(unsigned t);
/// ceil(log2 log2(1/(5 target))), 0 when target >= 1/10.
unsigned amplification_steps(double target);
/// The step sequence with expander parameters and sizes for an input of the given size.
AmplificationSchedule plan_amplification(std::uint64_t input_size, double target);

/// Runs the schedule. target >= 1/10 returns S unchanged with a note.
BiasedSet amplify(const BiasedSet& s, double target, const ConstructionOptions& opts = {});

/// One round with slack alpha: LPS graph with lambda <= alpha and side
/// >= |S| ceil(1/alpha); claim (alpha + eps)^2 + lambda.
BiasedSet bridge_round(const BiasedSet& s, double eps, double alpha, const ConstructionOptions& opts = {});

/// Predicted biases eps_{i+1} = (alpha + eps_i)^2 + lambda down to 1/10.
/// Throws StructuralError when the recurrence does not contract at eps0.
std::vector<double> bridge_schedule(double eps0, double alpha, double lambda);

/// Rounds of bridge_round until the claim is at most 1/10.
BiasedSet bridge_constant_gap(const BiasedSet& s0, double alpha, const ConstructionOptions& opts = {});

struct Claim6Terms {
  double left = 0.0;    // eps2
  double right = 0.0;   // eps1 + r
  double mixed = 0.0;   // lambda + eps2 (eps1 + r)
  double bound() const;
};

Claim6Terms claim6_terms(double eps1, double eps2, double ratio, double lambda);
double claim6_bound(double eps1, double eps2, double ratio, double lambda);

/// Pairs (S1[u mod |S1|], S2[v]) over the edges of gamma, ordered by U
/// vertex. Requires |S1| <= |S2| = gamma.side and a certified gamma.
BiasedSet tensor_combine(const BiasedSet& s1, const BiasedSet& s2, const BipartiteExpander& gamma);

struct DirectProductResult {
  BiasedSet set;
  nlohmann::json ledger;
  std::uint32_t max_degree = 0;
};

/// Recursive halving over the factors with five-fold duplication of the
/// larger side and random expanders of lambda <= 1/8 at every merge.
DirectProductResult direct_product_set(const std::vector<FiniteGroup>& groups,
                                       const ConstructionOptions& opts = {});

struct SolvableResult {
  BiasedSet set;
  nlohmann::json ledger;
  bool ledger_ok = true;
};

/// Recursion on the derived series with claim at most 1/2.
SolvableResult solvable_set_base(const FiniteGroup& g, const ConstructionOptions& opts = {});
/// Base set followed by bridging and amplification down to target.
BiasedSet solvable_set(const FiniteGroup& g, double target, const ConstructionOptions& opts = {});

/// Biased set on an abelian group (any representation) via a surjection from
/// Z_e^t, e the exponent and t the size of a greedy generating set.
BiasedSet abelian_leaf(const FiniteGroup& g, double delta, const ConstructionOptions& opts = {});

}  // namespace epsbias
