#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "epsbias/error.hpp"
#include "epsbias/expander.hpp"
#include "epsbias/number_theory.hpp"
#include "oracles.hpp"

using namespace epsbias;

namespace {

using Mat = std::array<std::int64_t, 4>;

Mat mat_mul(const Mat& x, const Mat& y, std::int64_t p) {
  return {(x[0] * y[0] + x[1] * y[2]) % p, (x[0] * y[1] + x[1] * y[3]) % p,
          (x[2] * y[0] + x[3] * y[2]) % p, (x[2] * y[1] + x[3] * y[3]) % p};
}

// Projective normal form: scale so the first nonzero entry is 1.
Mat projective(Mat m, std::int64_t p) {
  std::int64_t lead = 0;
  for (std::int64_t v : m) {
    if (v != 0) {
      lead = v;
      break;
    }
  }
  std::int64_t inv = 1;
  while ((inv * lead) % p != 1) ++inv;
  for (std::int64_t& v : m) v = (v * inv) % p;
  return m;
}

// Second singular value of the normalized biadjacency of the LPS Cayley graph
// on PGL(2, p), built from scratch: brute-force quaternions and i, closure of
// the identity under left multiplication, a 2-colouring for the sides and a
// dense eigensolve of B B^T.
struct LpsOracle {
  std::size_t vertices = 0;
  std::size_t generators = 0;
  bool bipartite = true;
  double lambda = 1.0;
};

LpsOracle lps_oracle(std::int64_t p, std::int64_t q) {
  std::int64_t i = 1;
  while ((i * i) % p != p - 1) ++i;
  std::vector<Mat> gens;
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(q))) + 1;
  auto md = [p](std::int64_t v) { return ((v % p) + p) % p; };
  for (std::int64_t a = 1; a <= r; a += 2) {
    for (std::int64_t b = -r; b <= r; ++b) {
      for (std::int64_t c = -r; c <= r; ++c) {
        for (std::int64_t d = -r; d <= r; ++d) {
          if (b % 2 != 0 || c % 2 != 0 || d % 2 != 0) continue;
          if (a * a + b * b + c * c + d * d != q) continue;
          gens.push_back(projective({md(a + i * b), md(c + i * d), md(-c + i * d), md(a - i * b)}, p));
        }
      }
    }
  }
  std::map<Mat, std::size_t> index{{Mat{1, 0, 0, 1}, 0}};
  std::vector<Mat> elems{{1, 0, 0, 1}};
  std::vector<std::vector<std::size_t>> adj;
  for (std::size_t k = 0; k < elems.size(); ++k) {
    std::vector<std::size_t> nb;
    for (const Mat& g : gens) {
      Mat y = projective(mat_mul(g, elems[k], p), p);
      auto [it, fresh] = index.emplace(y, elems.size());
      if (fresh) elems.push_back(y);
      nb.push_back(it->second);
    }
    adj.push_back(std::move(nb));
  }
  LpsOracle out;
  out.vertices = elems.size();
  out.generators = gens.size();
  std::vector<int> colour(elems.size(), -1);
  colour[0] = 0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : adj[x]) {
      if (colour[y] < 0) {
        colour[y] = 1 - colour[x];
        stack.push_back(y);
      } else if (colour[y] == colour[x]) {
        out.bipartite = false;
      }
    }
  }
  if (!out.bipartite) return out;
  std::vector<std::size_t> pos(elems.size());
  std::size_t nu = 0;
  std::size_t nv = 0;
  for (std::size_t x = 0; x < elems.size(); ++x) pos[x] = colour[x] == 0 ? nu++ : nv++;
  Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nv));
  const double w = 1.0 / static_cast<double>(gens.size());
  for (std::size_t x = 0; x < elems.size(); ++x) {
    if (colour[x] != 0) continue;
    for (std::size_t y : adj[x]) bmat(static_cast<Eigen::Index>(pos[x]), static_cast<Eigen::Index>(pos[y])) += w;
  }
  Eigen::MatrixXd gram = bmat * bmat.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  out.lambda = std::sqrt(std::max(0.0, ev(ev.size() - 2)));
  return out;
}

std::vector<std::uint32_t> degrees(const BipartiteExpander& g, bool u_side) {
  std::vector<std::uint32_t> deg(g.side, 0);
  for (const WeightedEdge& e : g.edges) deg[u_side ? e.u : e.v] += e.mult;
  return deg;
}

}  // namespace

TEST_CASE("quaternion generators number q + 1") {
  for (std::uint64_t q : {5ULL, 13ULL, 17ULL, 29ULL, 37ULL, 101ULL}) {
    auto sols = lps_quaternions(q);
    CHECK(sols.size() == q + 1);
    for (const auto& s : sols) {
      CHECK(s[0] > 0);
      CHECK(s[0] % 2 == 1);
      CHECK(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3] == static_cast<std::int64_t>(q));
    }
  }
}

TEST_CASE("projective index round trip") {
  const std::uint64_t p = 5;
  const std::uint32_t n = static_cast<std::uint32_t>(p * (p * p - 1));
  for (std::uint32_t k = 0; k < n; ++k) CHECK(pgl_index(p, pgl_matrix(p, k)) == k);
  CHECK(pgl_index(p, {2, 0, 0, 2}) == pgl_index(p, {1, 0, 0, 1}));
}

TEST_CASE("LPS graph p = 13, q = 5") {
  BipartiteExpander g = lps_graph(13, 5);
  CHECK(g.side == 1092);
  CHECK(2 * g.side == 13 * 168);
  CHECK(g.degree == 6);
  CHECK(nt::legendre(5, 13) == -1);
  for (std::uint32_t d : degrees(g, true)) CHECK(d == 6);
  for (std::uint32_t d : degrees(g, false)) CHECK(d == 6);
  CHECK(g.claimed_lambda == doctest::Approx(2.0 * std::sqrt(5.0) / 6.0));
  CHECK(g.certification == CertMethod::exact_eigensolve);
  CHECK(g.certified_lambda <= 2.0 * std::sqrt(5.0) / 6.0 + 1e-6);

  LpsOracle o = lps_oracle(13, 5);
  CHECK(o.vertices == 2184);
  CHECK(o.generators == 6);
  CHECK(o.bipartite);
  CHECK(g.certified_lambda == doctest::Approx(o.lambda).epsilon(1e-9));
  // Frozen from the oracle above.
  CHECK(g.certified_lambda == doctest::Approx(0.70828681).epsilon(1e-8));

  CertifyOptions iter;
  iter.method = CertifyOptions::Method::iterative;
  CertifyResult r = certify_lambda(g, iter);
  CHECK(r.method == CertMethod::power_iteration);
  CHECK(r.lambda >= g.certified_lambda - 1e-9);
  CHECK(r.lambda <= g.certified_lambda + 1e-6);
}

TEST_CASE("LPS graph in the residue case goes through the double cover") {
  CHECK(nt::legendre(29, 5) == 1);
  BipartiteExpander g = lps_graph(5, 29);
  CHECK(g.side == 60);
  CHECK(g.degree == 30);
  CHECK(g.info["legendre_q_p"] == 1);
  RegularGraph psl = lps_cayley_graph(5, 29);
  CHECK(psl.vertices == 60);
  CHECK_FALSE(is_bipartite(psl));
  CHECK(std::abs(certify_regular(psl) - g.certified_lambda) <= 1e-9);
  CHECK(g.certified_lambda <= 2.0 * std::sqrt(29.0) / 30.0 + 1e-6);
  LpsOracle o = lps_oracle(5, 29);
  CHECK(o.vertices == 60);  // generators stay inside PSL(2, 5)
  CHECK(o.generators == 30);
  CHECK_FALSE(o.bipartite);
  CHECK_THROWS_AS(lps_cayley_graph(5, 13), StructuralError);
}

TEST_CASE("LPS graph p = 5, q = 13 against the oracle") {
  BipartiteExpander g = lps_graph(5, 13);
  LpsOracle o = lps_oracle(5, 13);
  CHECK(o.vertices == 120);
  CHECK(o.bipartite);
  CHECK(g.side == 60);
  CHECK(g.certified_lambda == doctest::Approx(o.lambda).epsilon(1e-9));
}

TEST_CASE("Ramanujan bound across LPS graphs") {
  for (auto [p, q] : {std::pair{5ULL, 17ULL}, {13ULL, 17ULL}, {17ULL, 5ULL}, {5ULL, 29ULL}, {17ULL, 13ULL}}) {
    CAPTURE(p);
    CAPTURE(q);
    BipartiteExpander g = lps_graph(p, q);
    CHECK(g.side == p * (p * p - 1) / 2);
    CHECK(g.certified_lambda <= 2.0 * std::sqrt(static_cast<double>(q)) / static_cast<double>(q + 1) + 1e-6);
  }
}

TEST_CASE("LPS preconditions") {
  CHECK_THROWS_AS(lps_graph(7, 5), StructuralError);
  CHECK_THROWS_AS(lps_graph(13, 13), StructuralError);
  CHECK_THROWS_AS(lps_graph(13, 15), StructuralError);
  CHECK_THROWS_AS(lps_graph(3, 5), StructuralError);
}

TEST_CASE("double cover") {
  RegularGraph square = cycle_graph(4);
  CHECK(is_bipartite(square));
  CHECK_THROWS_AS(double_cover(square), StructuralError);

  RegularGraph tri = cycle_graph(3);
  CHECK(certify_regular(tri) == doctest::Approx(0.5).epsilon(1e-12));
  BipartiteExpander cover = double_cover(tri);
  CHECK(cover.side == 3);
  CHECK(cover.degree == 2);
  CHECK(certify_lambda(cover).lambda == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exact certification of small graphs") {
  CHECK(certify_lambda(complete_bipartite(7)).lambda <= 1e-9);
  // The 6-cycle as a bipartite graph: eigenvalues cos(2 pi k / 6).
  BipartiteExpander c6 = bipartite_from_pairs(3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}});
  const double expected = std::abs(std::cos(2.0 * std::numbers::pi / 6.0));
  CHECK(certify_lambda(c6).lambda == doctest::Approx(expected).epsilon(1e-9));

  BipartiteExpander split = bipartite_from_pairs(2, {{0, 0}, {1, 1}});
  CHECK_THROWS_AS(certify_lambda(split), StructuralError);
  CHECK_THROWS_AS(bipartite_from_pairs(2, {{0, 0}, {0, 1}}), StructuralError);
}

TEST_CASE("iterative bound dominates the exact value") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    RandomExpanderResult r = random_regular_bipartite(200, 5, 1.0, seed, 1);
    REQUIRE(r.success);
    CertifyOptions it;
    it.method = CertifyOptions::Method::iterative;
    const double exact = certify_lambda(r.graph).lambda;
    const double upper = certify_lambda(r.graph, it).lambda;
    CHECK(upper >= exact - 1e-9);
    CHECK(upper <= exact + 1e-6);
  }
}

TEST_CASE("prime search") {
  PrimePair a = find_primes(1, 0.9);
  CHECK(a.q == 5);
  CHECK(a.p == 13);  // 5 is excluded since p and q must differ
  CHECK(2.0 / std::sqrt(5.0) <= 0.9);

  PrimePair b = find_primes(1, 0.01);
  CHECK(b.q == oracle::prime_1mod4_from(40000));

  std::uint64_t last_p = 0;
  for (std::uint64_t side : {1ULL, 100ULL, 1000ULL, 1093ULL, 50000ULL, 1000000ULL}) {
    PrimePair c = find_primes(side, 0.5);
    CHECK(c.p >= last_p);
    CHECK(lps_side(c.p) >= side);
    CHECK(oracle::is_prime(c.p));
    CHECK(c.p % 4 == 1);
    last_p = c.p;
  }
}

TEST_CASE("random regular bipartite graphs") {
  RandomExpanderResult full = random_regular_bipartite(9, 9, 0.01, 1, 1);
  CHECK(full.success);
  CHECK(full.graph.certified_lambda <= 1e-9);

  RandomExpanderResult r = random_regular_bipartite(60, 8, 0.7, 7);
  CHECK(r.success);
  CHECK(r.graph.certified_lambda <= 0.7);
  for (std::uint32_t d : degrees(r.graph, true)) CHECK(d == 8);
  for (std::uint32_t d : degrees(r.graph, false)) CHECK(d == 8);

  RandomExpanderResult again = random_regular_bipartite(60, 8, 0.7, 7);
  CHECK(again.graph.edges == r.graph.edges);

  RandomExpanderResult hopeless = random_regular_bipartite(60, 3, 0.05, 1, 3);
  CHECK_FALSE(hopeless.success);
  CHECK(hopeless.attempts == 3);

  RandomExpanderResult small = smallest_degree_expander(100, 0.125, 5);
  CHECK(small.success);
  CHECK(small.graph.certified_lambda <= 0.125);
}

TEST_CASE("sixty vertices of degree eight reach 0.6 within the default budget") {
  RandomExpanderResult r = random_regular_bipartite(60, 8, 0.6, 7);
  CHECK(r.success);
  CHECK(r.graph.certified_lambda <= 0.6);
}

TEST_CASE("edge list round trip") {
  BipartiteExpander g = lps_graph(5, 13);
  const std::string path = (std::filesystem::temp_directory_path() / "epsbias_edges_test.txt").string();
  write_edge_list(g, path);
  BipartiteExpander back = read_edge_list(path);
  std::remove(path.c_str());
  CHECK(back.side == g.side);
  CHECK(back.degree == g.degree);
  CHECK(back.edges == g.edges);
  CHECK(back.claimed_lambda == doctest::Approx(g.certified_lambda).epsilon(1e-9));
}
