#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace epsbias {

/// A (u, v) edge with multiplicity.
struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::uint32_t mult = 1;
  bool operator==(const WeightedEdge& other) const = default;
};

enum class CertMethod { none, exact_eigensolve, power_iteration };
std::string to_string(CertMethod m);

/// d-regular bipartite multigraph with `side` vertices on each side. Edges
/// are stored sorted by (u, v) with multiplicities merged.
struct BipartiteExpander {
  std::uint32_t side = 0;
  std::uint32_t degree = 0;
  std::vector<WeightedEdge> edges;
  double claimed_lambda = 1.0;
  double certified_lambda = 1.0;
  CertMethod certification = CertMethod::none;
  double residual = 0.0;
  nlohmann::json info = nlohmann::json::object();

  std::uint64_t edge_count() const { return static_cast<std::uint64_t>(side) * degree; }
};

/// Undirected d-regular multigraph stored as symmetric arcs (x -> y, mult).
struct RegularGraph {
  std::uint32_t vertices = 0;
  std::uint32_t degree = 0;
  std::vector<WeightedEdge> arcs;
};

/// Sorts and merges duplicate edges.
void normalize_edges(std::vector<WeightedEdge>& edges);

RegularGraph cycle_graph(std::uint32_t n);
BipartiteExpander complete_bipartite(std::uint32_t n);
/// Bipartite graph from a plain (u, v) list, one entry per edge.
BipartiteExpander bipartite_from_pairs(std::uint32_t side,
                                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs);

/// Integer solutions of a^2 + b^2 + c^2 + d^2 = q with a > 0 odd and b, c, d even.
std::vector<std::array<std::int64_t, 4>> lps_quaternions(std::uint64_t q);

/// Index of a matrix of PGL(2, p) in canonical form (first nonzero entry 1).
std::uint32_t pgl_index(std::uint64_t p, std::array<std::uint64_t, 4> m);
std::array<std::uint64_t, 4> pgl_matrix(std::uint64_t p, std::uint32_t index);

/// Cayley graph of PSL(2, p) under the LPS generators; requires (q|p) = +1.
RegularGraph lps_cayley_graph(std::uint64_t p, std::uint64_t q);

struct CertifyOptions {
  enum class Method { automatic, dense, iterative } method = Method::automatic;
  std::uint32_t dense_cap = 4096;
  double tolerance = 1e-8;
  std::uint64_t max_matvecs = 2000000;
  /// Iterative certification stops early once lambda is provably above this.
  double fail_above = 2.0;
};

struct CertifyResult {
  double lambda = 1.0;
  CertMethod method = CertMethod::none;
  double residual = 0.0;
  std::uint64_t matvecs = 0;
  bool exceeded = false;
};

/// LPS graph: PGL(2, p) split by determinant class when (q|p) = -1, double
/// cover of the PSL(2, p) Cayley graph when (q|p) = +1. Side p(p^2 - 1)/2,
/// degree q + 1, claimed lambda 2 sqrt(q)/(q + 1), then certified.
BipartiteExpander lps_graph(std::uint64_t p, std::uint64_t q, bool certify = true,
                            const CertifyOptions& opts = {});

bool is_bipartite(const RegularGraph& g);
bool is_connected(const RegularGraph& g);
bool is_connected(const BipartiteExpander& g);

/// Vertices copied to A and B; arc x -> y becomes (x_A, y_B).
BipartiteExpander double_cover(const RegularGraph& g);

/// Largest |mu| over eigenvalues of the normalized adjacency other than the top 1.
double certify_regular(const RegularGraph& g);

/// Second singular value of the normalized biadjacency matrix.
CertifyResult certify_lambda(const BipartiteExpander& g, const CertifyOptions& opts = {});
/// Runs certify_lambda and stores the result in the graph.
void certify(BipartiteExpander& g, const CertifyOptions& opts = {});

struct PrimePair {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
};

/// Side size of the LPS graph for p: p(p^2 - 1)/2.
std::uint64_t lps_side(std::uint64_t p);
/// Smallest q = 1 mod 4 with 2/sqrt(q) <= max_lambda, then the smallest p = 1
/// mod 4, p != q, with lps_side(p) >= min_side.
PrimePair find_primes(std::uint64_t min_side, double max_lambda,
                      std::uint64_t search_cap = std::uint64_t{1} << 40);

struct RandomExpanderResult {
  BipartiteExpander graph;
  bool success = false;
  std::uint64_t attempts = 0;
};

/// Union of d perfect matchings: floor(d/N) copies of K_{N,N} as cyclic
/// shifts plus d mod N uniformly random matchings. Resampled until the
/// certified lambda is at most target or the budget runs out.
RandomExpanderResult random_regular_bipartite(std::uint32_t side, std::uint32_t degree, double target_lambda,
                                              std::uint64_t seed, std::uint64_t budget = 20,
                                              const CertifyOptions& opts = {});

/// Smallest degree, searched upward from a spectral estimate, for which a
/// random bipartite graph certifies lambda <= target within the budget.
RandomExpanderResult smallest_degree_expander(std::uint32_t side, double target_lambda, std::uint64_t seed,
                                              std::uint64_t budget_per_degree = 4,
                                              const CertifyOptions& opts = {});

/// Header `bipartite N d lambda`, then one `u v` line per edge (multi-edges repeated).
void write_edge_list(const BipartiteExpander& g, const std::string& path);
BipartiteExpander read_edge_list(const std::string& path);

}  // namespace epsbias
