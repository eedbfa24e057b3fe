#include "epsbias/expander.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "epsbias/error.hpp"
#include "epsbias/linalg.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/rng.hpp"

namespace epsbias {

std::string to_string(CertMethod m) {
  switch (m) {
    case CertMethod::none: return "none";
    case CertMethod::exact_eigensolve: return "exact-eigensolve";
    case CertMethod::power_iteration: return "power-iteration";
  }
  return "none";
}

void normalize_edges(std::vector<WeightedEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<WeightedEdge> merged;
  merged.reserve(edges.size());
  for (const auto& e : edges) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      merged.back().mult += e.mult;
    } else {
      merged.push_back(e);
    }
  }
  edges = std::move(merged);
}

RegularGraph cycle_graph(std::uint32_t n) {
  if (n < 3) throw StructuralError("cycle_graph needs at least 3 vertices");
  RegularGraph g;
  g.vertices = n;
  g.degree = 2;
  for (std::uint32_t x = 0; x < n; ++x) {
    g.arcs.push_back({x, (x + 1) % n, 1});
    g.arcs.push_back({x, (x + n - 1) % n, 1});
  }
  normalize_edges(g.arcs);
  return g;
}

BipartiteExpander complete_bipartite(std::uint32_t n) {
  BipartiteExpander g;
  g.side = n;
  g.degree = n;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = 0; v < n; ++v) g.edges.push_back({u, v, 1});
  g.claimed_lambda = 0.0;
  g.info = {{"construction", "complete-bipartite"}};
  return g;
}

BipartiteExpander bipartite_from_pairs(std::uint32_t side,
                                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  if (side == 0) throw StructuralError("bipartite graph needs a positive side size");
  BipartiteExpander g;
  g.side = side;
  std::vector<std::uint32_t> du(side, 0), dv(side, 0);
  for (auto [u, v] : pairs) {
    if (u >= side || v >= side) throw StructuralError("edge endpoint out of range");
    g.edges.push_back({u, v, 1});
    ++du[u];
    ++dv[v];
  }
  const std::uint32_t d = du[0];
  for (std::uint32_t i = 0; i < side; ++i) {
    if (du[i] != d || dv[i] != d) throw StructuralError("edge list is not regular on both sides");
  }
  g.degree = d;
  normalize_edges(g.edges);
  return g;
}

std::vector<std::array<std::int64_t, 4>> lps_quaternions(std::uint64_t q) {
  std::vector<std::array<std::int64_t, 4>> out;
  const auto qq = static_cast<std::int64_t>(q);
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(q))) + 1;
  for (std::int64_t a = 1; a * a <= qq; a += 2) {
    for (std::int64_t b = -r - (r % 2); b <= r; b += 2) {
      const std::int64_t rest_b = qq - a * a - b * b;
      if (rest_b < 0) continue;
      for (std::int64_t c = -r - (r % 2); c <= r; c += 2) {
        const std::int64_t rest = rest_b - c * c;
        if (rest < 0) continue;
        auto d = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rest))));
        while (d * d > rest) --d;
        while ((d + 1) * (d + 1) <= rest) ++d;
        if (d * d != rest || d % 2 != 0) continue;
        out.push_back({a, b, c, d});
        if (d != 0) out.push_back({a, b, c, -d});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t pgl_index(std::uint64_t p, std::array<std::uint64_t, 4> m) {
  for (auto& x : m) x %= p;
  if (m[0] != 0) {
    const std::uint64_t inv = nt::invmod(m[0], p);
    const std::uint64_t b = m[1] * inv % p, c = m[2] * inv % p, d = m[3] * inv % p;
    const std::uint64_t bc = b * c % p;
    if (d == bc) throw StructuralError("pgl_index: singular matrix");
    return static_cast<std::uint32_t>((b * p + c) * (p - 1) + (d < bc ? d : d - 1));
  }
  if (m[1] == 0 || m[2] == 0) throw StructuralError("pgl_index: singular matrix");
  const std::uint64_t inv = nt::invmod(m[1], p);
  const std::uint64_t c = m[2] * inv % p, d = m[3] * inv % p;
  return static_cast<std::uint32_t>(p * p * (p - 1) + (c - 1) * p + d);
}

std::array<std::uint64_t, 4> pgl_matrix(std::uint64_t p, std::uint32_t index) {
  const std::uint64_t head = p * p * (p - 1);
  if (index < head) {
    std::uint64_t rest = index;
    std::uint64_t dslot = rest % (p - 1);
    rest /= (p - 1);
    std::uint64_t c = rest % p;
    std::uint64_t b = rest / p;
    std::uint64_t bc = b * c % p;
    std::uint64_t d = dslot < bc ? dslot : dslot + 1;
    return {1, b, c, d};
  }
  std::uint64_t rest = index - head;
  return {0, 1, rest / p + 1, rest % p};
}

namespace {

struct LpsSetup {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  bool bipartite = false;
  std::vector<std::uint32_t> side_index;  // PGL index -> position within its class
  std::vector<char> square_class;         // PGL index -> det is a square
  std::vector<std::uint32_t> u_members;   // PGL indices of the square class
  std::vector<std::pair<std::array<std::uint64_t, 4>, std::uint32_t>> gens;  // distinct, with multiplicity
};

LpsSetup lps_setup(std::uint64_t p, std::uint64_t q) {
  if (p % 4 != 1 || !nt::is_prime(p)) {
    throw StructuralError("lps_graph: p = " + std::to_string(p) + " must be a prime congruent to 1 mod 4");
  }
  if (q % 4 != 1 || !nt::is_prime(q)) {
    throw StructuralError("lps_graph: q = " + std::to_string(q) + " must be a prime congruent to 1 mod 4");
  }
  if (p == q) throw StructuralError("lps_graph: p and q must differ");
  if (p > 1000) throw ResourceError("lps_graph: p = " + std::to_string(p) + " exceeds the vertex cap");
  LpsSetup s;
  s.p = p;
  s.q = q;
  s.bipartite = nt::legendre(static_cast<std::int64_t>(q), p) == -1;
  const std::uint64_t i = nt::sqrt_minus_one(p);
  const std::uint64_t total = p * p * p - p;
  s.side_index.resize(total);
  s.square_class.resize(total);
  std::uint32_t nu = 0, nv = 0;
  for (std::uint32_t idx = 0; idx < total; ++idx) {
    auto m = pgl_matrix(p, idx);
    std::uint64_t det = (m[0] * m[3] % p + p * p - m[1] * m[2] % p) % p;
    bool sq = nt::legendre(static_cast<std::int64_t>(det), p) == 1;
    s.square_class[idx] = sq ? 1 : 0;
    if (sq) {
      s.side_index[idx] = nu++;
      s.u_members.push_back(idx);
    } else {
      s.side_index[idx] = nv++;
    }
  }
  auto quats = lps_quaternions(q);
  if (quats.size() != q + 1) throw std::logic_error("lps_graph: quaternion count differs from q + 1");
  std::map<std::uint32_t, std::uint32_t> hist;
  auto md = [p](std::int64_t x) { return static_cast<std::uint64_t>(((x % static_cast<std::int64_t>(p)) + p) % p); };
  for (const auto& qt : quats) {
    const std::uint64_t a = md(qt[0]), b = md(qt[1]), c = md(qt[2]), d = md(qt[3]);
    std::array<std::uint64_t, 4> m{(a + i * b) % p, (c + i * d) % p, (p - c + i * d % p) % p,
                                   (a + p - i * b % p) % p};
    ++hist[pgl_index(p, m)];
  }
  for (auto [idx, mult] : hist) s.gens.emplace_back(pgl_matrix(p, idx), mult);
  return s;
}

std::uint32_t pgl_product(std::uint64_t p, const std::array<std::uint64_t, 4>& x, const std::array<std::uint64_t, 4>& y) {
  return pgl_index(p, {(x[0] * y[0] + x[1] * y[2]) % p, (x[0] * y[1] + x[1] * y[3]) % p,
                       (x[2] * y[0] + x[3] * y[2]) % p, (x[2] * y[1] + x[3] * y[3]) % p});
}

// Arcs u -> g u for u in the square class.
std::vector<WeightedEdge> lps_arcs(const LpsSetup& s) {
  std::vector<WeightedEdge> arcs;
  arcs.reserve(s.u_members.size() * s.gens.size());
  for (std::uint32_t u = 0; u < s.u_members.size(); ++u) {
    auto mu = pgl_matrix(s.p, s.u_members[u]);
    for (const auto& [mg, mult] : s.gens) {
      std::uint32_t img = pgl_product(s.p, mg, mu);
      arcs.push_back({u, s.side_index[img], mult});
    }
  }
  normalize_edges(arcs);
  return arcs;
}

}  // namespace

RegularGraph lps_cayley_graph(std::uint64_t p, std::uint64_t q) {
  LpsSetup s = lps_setup(p, q);
  if (s.bipartite) {
    throw StructuralError("lps_cayley_graph: (q|p) = -1, the generators leave PSL(2,p); use lps_graph");
  }
  RegularGraph g;
  g.vertices = static_cast<std::uint32_t>(s.u_members.size());
  g.degree = static_cast<std::uint32_t>(q + 1);
  g.arcs = lps_arcs(s);
  return g;
}

std::uint64_t lps_side(std::uint64_t p) { return p * (p * p - 1) / 2; }

BipartiteExpander lps_graph(std::uint64_t p, std::uint64_t q, bool do_certify, const CertifyOptions& opts) {
  LpsSetup s = lps_setup(p, q);
  BipartiteExpander g;
  g.side = static_cast<std::uint32_t>(lps_side(p));
  g.degree = static_cast<std::uint32_t>(q + 1);
  if (s.bipartite) {
    g.edges = lps_arcs(s);
  } else {
    RegularGraph cayley;
    cayley.vertices = g.side;
    cayley.degree = g.degree;
    cayley.arcs = lps_arcs(s);
    g = double_cover(cayley);
  }
  g.claimed_lambda = 2.0 * std::sqrt(static_cast<double>(q)) / static_cast<double>(q + 1);
  g.info = {{"construction", "lps"},
            {"p", p},
            {"q", q},
            {"group", s.bipartite ? "PGL(2,p) split by determinant class" : "PSL(2,p) double cover"},
            {"legendre_q_p", s.bipartite ? -1 : 1},
            {"distinct_generators", s.gens.size()}};
  if (do_certify) certify(g, opts);
  return g;
}

namespace {

bool bfs_connected(std::uint32_t n, const std::vector<std::vector<std::uint32_t>>& adj) {
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::queue<std::uint32_t> todo;
  todo.push(0);
  seen[0] = 1;
  std::uint32_t count = 1;
  while (!todo.empty()) {
    auto x = todo.front();
    todo.pop();
    for (auto y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        todo.push(y);
      }
  }
  return count == n;
}

}  // namespace

bool is_bipartite(const RegularGraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.vertices);
  for (const auto& a : g.arcs) adj[a.u].push_back(a.v);
  std::vector<int> color(g.vertices, -1);
  for (std::uint32_t s = 0; s < g.vertices; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::queue<std::uint32_t> todo;
    todo.push(s);
    while (!todo.empty()) {
      auto x = todo.front();
      todo.pop();
      for (auto y : adj[x]) {
        if (color[y] < 0) {
          color[y] = 1 - color[x];
          todo.push(y);
        } else if (color[y] == color[x]) {
          return false;
        }
      }
    }
  }
  return true;
}

bool is_connected(const RegularGraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.vertices);
  for (const auto& a : g.arcs) {
    adj[a.u].push_back(a.v);
    adj[a.v].push_back(a.u);
  }
  return bfs_connected(g.vertices, adj);
}

bool is_connected(const BipartiteExpander& g) {
  std::vector<std::vector<std::uint32_t>> adj(2 * static_cast<std::size_t>(g.side));
  for (const auto& e : g.edges) {
    adj[e.u].push_back(g.side + e.v);
    adj[g.side + e.v].push_back(e.u);
  }
  return bfs_connected(2 * g.side, adj);
}

BipartiteExpander double_cover(const RegularGraph& g) {
  if (is_bipartite(g)) {
    throw StructuralError("double_cover: input is already bipartite (its double cover disconnects); use it directly");
  }
  if (!is_connected(g)) throw StructuralError("double_cover: input graph is disconnected");
  BipartiteExpander out;
  out.side = g.vertices;
  out.degree = g.degree;
  out.edges = g.arcs;
  normalize_edges(out.edges);
  out.info = {{"construction", "double-cover"}};
  return out;
}

double certify_regular(const RegularGraph& g) {
  if (g.vertices > 4096) throw ResourceError("certify_regular: graph exceeds the dense cap");
  const auto n = static_cast<Eigen::Index>(g.vertices);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.arcs) a(e.u, e.v) += static_cast<double>(e.mult) / g.degree;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) worst = std::max(worst, std::abs(ev[i]));
  return worst;
}

namespace {

void check_regular(const BipartiteExpander& g) {
  if (g.side == 0 || g.degree == 0) throw StructuralError("certify_lambda: empty graph");
  std::vector<std::uint64_t> du(g.side, 0), dv(g.side, 0);
  for (const auto& e : g.edges) {
    if (e.u >= g.side || e.v >= g.side) throw StructuralError("certify_lambda: edge endpoint out of range");
    du[e.u] += e.mult;
    dv[e.v] += e.mult;
  }
  for (std::uint32_t i = 0; i < g.side; ++i) {
    if (du[i] != g.degree || dv[i] != g.degree) {
      throw StructuralError("certify_lambda: graph is not " + std::to_string(g.degree) + "-regular");
    }
  }
}

}  // namespace

CertifyResult certify_lambda(const BipartiteExpander& g, const CertifyOptions& opts) {
  check_regular(g);
  if (!is_connected(g)) throw StructuralError("certify_lambda: graph is disconnected");
  CertifyResult res;
  const auto n = static_cast<Eigen::Index>(g.side);
  if (n == 1) {
    res.lambda = 0.0;
    res.method = CertMethod::exact_eigensolve;
    return res;
  }
  const double inv_d = 1.0 / static_cast<double>(g.degree);
  bool dense = opts.method == CertifyOptions::Method::dense ||
               (opts.method == CertifyOptions::Method::automatic && g.side <= opts.dense_cap);
  if (dense) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, -1.0 / static_cast<double>(n));
    for (const auto& e : g.edges) c(e.u, e.v) += e.mult * inv_d;
    res.lambda = top_singular_dense(c);
    res.method = CertMethod::exact_eigensolve;
    return res;
  }
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd z(n);
  SymOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    z.setZero();
    for (const auto& e : g.edges) z[e.u] += e.mult * inv_d * x[e.v];
    y.setZero(n);
    for (const auto& e : g.edges) y[e.v] += e.mult * inv_d * z[e.u];
  };
  const double fail = opts.fail_above < 1.0 ? opts.fail_above * opts.fail_above : 2.0;
  TopEigen top = top_eigen_iterative(n, op, {ones}, opts.tolerance, opts.max_matvecs, 7, fail);
  res.method = CertMethod::power_iteration;
  res.residual = top.residual;
  res.matvecs = top.matvecs;
  res.exceeded = top.exceeded;
  if (!top.converged && !top.exceeded) {
    throw ResourceError("certify_lambda: iterative solver did not reach residual " + std::to_string(opts.tolerance));
  }
  res.lambda = std::min(1.0, std::sqrt(std::max(0.0, top.value + top.residual)));
  return res;
}

void certify(BipartiteExpander& g, const CertifyOptions& opts) {
  CertifyResult r = certify_lambda(g, opts);
  g.certified_lambda = r.lambda;
  g.certification = r.method;
  g.residual = r.residual;
}

PrimePair find_primes(std::uint64_t min_side, double max_lambda, std::uint64_t search_cap) {
  if (min_side < 1) throw StructuralError("find_primes: min_side must be at least 1");
  if (!(max_lambda > 0.0 && max_lambda < 1.0)) throw StructuralError("find_primes: max_lambda must lie in (0,1)");
  PrimePair out;
  auto q = static_cast<std::uint64_t>(std::ceil(4.0 / (max_lambda * max_lambda)));
  while (q > 1 && 2.0 / std::sqrt(static_cast<double>(q - 1)) <= max_lambda) --q;
  q = nt::next_prime_1mod4(q);
  while (2.0 / std::sqrt(static_cast<double>(q)) > max_lambda) q = nt::next_prime_1mod4(q + 1);
  if (q > search_cap) throw ResourceError("find_primes: q exceeds the search cap");
  out.q = q;
  std::uint64_t p = 5;
  while (true) {
    if (p > search_cap || p > 3000000) throw ResourceError("find_primes: p exceeds the search cap");
    const long double side = static_cast<long double>(p) * (static_cast<long double>(p) * p - 1) / 2;
    if (p != q && side >= static_cast<long double>(min_side)) break;
    p = nt::next_prime_1mod4(p + 1);
  }
  out.p = p;
  return out;
}

RandomExpanderResult random_regular_bipartite(std::uint32_t side, std::uint32_t degree, double target_lambda,
                                              std::uint64_t seed, std::uint64_t budget,
                                              const CertifyOptions& opts) {
  if (side == 0 || degree == 0) throw StructuralError("random_regular_bipartite: side and degree must be positive");
  const std::uint32_t full = degree / side;
  const std::uint32_t extra = degree % side;
  RandomExpanderResult out;
  bool have = false;
  const std::uint64_t tries = extra == 0 ? 1 : std::max<std::uint64_t>(budget, 1);
  for (std::uint64_t attempt = 0; attempt < tries; ++attempt) {
    auto rng = stream_rng(seed, attempt);
    BipartiteExpander g;
    g.side = side;
    g.degree = degree;
    g.edges.reserve(static_cast<std::size_t>(side) * std::min(degree, side));
    for (std::uint32_t t = 0; t < side && full > 0; ++t)
      for (std::uint32_t u = 0; u < side; ++u) g.edges.push_back({u, (u + t) % side, full});
    std::vector<std::uint32_t> perm(side);
    for (std::uint32_t m = 0; m < extra; ++m) {
      std::iota(perm.begin(), perm.end(), 0U);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::uint32_t u = 0; u < side; ++u) g.edges.push_back({u, perm[u], 1});
    }
    normalize_edges(g.edges);
    g.claimed_lambda = target_lambda;
    g.info = {{"construction", "random-matchings"}, {"seed", seed}, {"attempt", attempt}};
    ++out.attempts;
    CertifyOptions o = opts;
    o.fail_above = target_lambda;
    try {
      auto r = certify_lambda(g, o);
      g.certified_lambda = r.lambda;
      g.certification = r.method;
      g.residual = r.residual;
      if (r.exceeded) g.certification = CertMethod::none;
    } catch (const StructuralError&) {
      g.certified_lambda = 1.0;  // disconnected sample
    }
    if (!have || g.certified_lambda < out.graph.certified_lambda) {
      out.graph = std::move(g);
      have = true;
    }
    if (out.graph.certification != CertMethod::none && out.graph.certified_lambda <= target_lambda) {
      out.success = true;
      break;
    }
  }
  return out;
}

RandomExpanderResult smallest_degree_expander(std::uint32_t side, double target_lambda, std::uint64_t seed,
                                              std::uint64_t budget_per_degree, const CertifyOptions& opts) {
  if (!(target_lambda > 0.0 && target_lambda < 1.0)) {
    throw StructuralError("smallest_degree_expander: target must lie in (0,1)");
  }
  // Spectral edge of a sum of d random matchings: about 2 sqrt((1 - d/N) / d).
  auto estimate = [side](std::uint32_t d) {
    double frac = 1.0 - static_cast<double>(d) / side;
    return 2.0 * std::sqrt(std::max(0.0, frac) / d);
  };
  std::uint32_t d = std::min<std::uint32_t>(side, 3);
  while (d < side && estimate(d) > 0.95 * target_lambda) ++d;
  std::uint64_t tried = 0;
  for (; d <= side; ++d) {
    auto r = random_regular_bipartite(side, d, target_lambda, splitmix64(seed + d), budget_per_degree, opts);
    tried += r.attempts;
    if (r.success) {
      r.graph.info["degree_search_start"] = d;
      r.attempts = tried;
      return r;
    }
  }
  throw std::logic_error("smallest_degree_expander: complete bipartite graph failed certification");
}

void write_edge_list(const BipartiteExpander& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "bipartite " << g.side << " " << g.degree << " " << g.certified_lambda << "\n";
  for (const auto& e : g.edges)
    for (std::uint32_t k = 0; k < e.mult; ++k) os << e.u << " " << e.v << "\n";
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

BipartiteExpander read_edge_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string tag;
  std::uint64_t n = 0, d = 0;
  double lambda = 1.0;
  if (!(is >> tag >> n >> d >> lambda) || tag != "bipartite") {
    throw StructuralError(path + ": missing 'bipartite <N> <d> <lambda>' header");
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::uint64_t u = 0, v = 0;
  while (is >> u >> v) pairs.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  BipartiteExpander g = bipartite_from_pairs(static_cast<std::uint32_t>(n), pairs);
  if (g.degree != d) throw StructuralError(path + ": header degree differs from the edge list");
  g.claimed_lambda = lambda;
  return g;
}

}  // namespace epsbias
