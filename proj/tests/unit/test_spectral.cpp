#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>

#include "epsbias/abelian.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/spectral.hpp"
#include "oracles.hpp"

using namespace epsbias;

namespace {

BiasedSet random_set(const FiniteGroup& g, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Elem> e(k);
  for (Elem& x : e) x = static_cast<Elem>(rng() % g.order());
  return BiasedSet::from_elements(g, e, 1.0);
}

}  // namespace

TEST_CASE("bias of the whole group and of the identity") {
  for (const char* d : {"sym:4", "cyclic:7", "ut:2:3"}) {
    FiniteGroup g = FiniteGroup::parse(d);
    CHECK(bias_spectral(BiasedSet::whole_group(g)) <= 1e-9);
    CHECK(bias_spectral(BiasedSet::from_elements(g, {0}, 1.0)) == doctest::Approx(1.0));
  }
  CHECK(bias_spectral(BiasedSet::whole_group(FiniteGroup::cyclic(1))) == 0.0);
}

TEST_CASE("Z3 with {1, 2}") {
  BiasedSet s = BiasedSet::from_elements(FiniteGroup::cyclic(3), {1, 2}, 1.0);
  CHECK(bias_spectral(s) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bias_spectral(s) == doctest::Approx(char_bias_exact(s)).epsilon(1e-12));
}

TEST_CASE("spectral bias matches a full SVD of the walk operator") {
  std::uint64_t seed = 1;
  for (const char* d : {"sym:3", "sym:4", "dihedral:5", "prod(cyclic:2,sym:3)", "ut:3:3"}) {
    FiniteGroup g = FiniteGroup::parse(d);
    for (std::size_t k : {1U, 3U, 10U}) {
      BiasedSet s = random_set(g, k, ++seed);
      CAPTURE(d);
      CAPTURE(k);
      CHECK(bias_spectral(s) == doctest::Approx(oracle::walk_bias(g, s.elements())).epsilon(1e-9));
    }
  }
}

TEST_CASE("iterative and dense paths agree") {
  FiniteGroup g = FiniteGroup::symmetric(5);
  BiasedSet s = random_set(g, 12, 5);
  SpectralOptions dense;
  dense.method = SpectralMethod::dense;
  SpectralOptions iter;
  iter.method = SpectralMethod::iterative;
  SpectralReport a = bias_spectral_report(s, dense);
  SpectralReport b = bias_spectral_report(s, iter);
  CHECK(a.method == "dense-svd");
  CHECK(b.method == "iterative");
  CHECK(b.bias >= a.bias - 1e-9);
  CHECK(b.bias == doctest::Approx(a.bias).epsilon(1e-6));

  SpectralOptions capped;
  capped.dense_cap = 10;
  capped.iterative_cap = 100;
  CHECK_THROWS_AS(bias_spectral(s, capped), ResourceError);
}

TEST_CASE("symmetrized mode uses eigenvalues of the symmetric part") {
  FiniteGroup z5 = FiniteGroup::cyclic(5);
  BiasedSet s = BiasedSet::from_elements(z5, {1}, 1.0);
  SpectralOptions sym;
  sym.symmetrized = true;
  // (M + M^T)/2 has eigenvalues cos(2 pi k / 5).
  CHECK(bias_spectral(s, sym) == doctest::Approx(std::cos(2.0 * std::numbers::pi * 2.0 / 5.0) * -1.0).epsilon(1e-9));
  CHECK(bias_spectral(s) == doctest::Approx(1.0));
}

TEST_CASE("walk operator invariants") {
  FiniteGroup g = FiniteGroup::symmetric(4);
  BiasedSet s = random_set(g, 7, 9);
  WalkOperator m(s);
  CHECK(m.row_sum_error() <= 1e-12);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) CHECK(m.right_translation_error(static_cast<Elem>(rng() % 24)) <= 1e-12);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(24);
  Eigen::VectorXd out;
  m.apply(ones, out);
  CHECK((out - ones).norm() <= 1e-12);
}

TEST_CASE("explicit irreps agree with the regular representation") {
  std::uint64_t seed = 40;
  for (const char* d : {"sym:3", "prod(sym:3,cyclic:2)", "prod(sym:3,sym:3)", "abelian:3:2", "prod(cyclic:4,cyclic:6)"}) {
    FiniteGroup g = FiniteGroup::parse(d);
    for (std::size_t k : {2U, 5U, 13U}) {
      BiasedSet s = random_set(g, k, ++seed);
      CAPTURE(d);
      CHECK(irrep_bias(s) == doctest::Approx(bias_spectral(s)).epsilon(1e-9));
    }
  }
}

TEST_CASE("projection average on Z2 is the equality case") {
  CHECK(lemma3_projection_norm(FiniteGroup::cyclic(2)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lemma3_projection_norm(FiniteGroup::cyclic(1)) == 0.0);
  BiasedSet avg = power_average_multiset(FiniteGroup::cyclic(2));
  CHECK(avg.size() == 4);
}

TEST_CASE("projection average bound over small groups") {
  for (const char* d : {"cyclic:6", "sym:3", "dihedral:4", "cyclic:8", "sym:4", "prod(cyclic:2,sym:3)",
                        "ut:2:3", "abelian:2:3", "dihedral:6", "cyclic:30", "ut:3:3", "prod(dihedral:4,sym:3)"}) {
    FiniteGroup g = FiniteGroup::parse(d);
    const double n = static_cast<double>(g.order());
    CAPTURE(d);
    CHECK(lemma3_projection_norm(g) <= 1.0 - static_cast<double>(nt::totient(g.order())) / n + 1e-9);
  }
}

TEST_CASE("read-once deviation") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  FiniteGroup cube = FiniteGroup::power(s3, 2);
  CHECK(mz_readonce_check(s3, 2, BiasedSet::whole_group(cube)).max_deviation <= 1e-12);

  // A single coordinate of {(g^s1, g^s2)} is the law of g^s1 for uniform g and
  // s1 drawn from S; enumerate it directly.
  std::vector<Elem> entries;
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> exps = {{1, 2}, {5, 0}, {3, 3}};
  for (Elem g = 0; g < 6; ++g) {
    for (auto [a, b] : exps) entries.push_back(cube.join({s3.pow(g, a), s3.pow(g, b)}));
  }
  BiasedSet t = BiasedSet::from_elements(cube, entries, 1.0);
  std::map<Elem, double> law;
  for (Elem g = 0; g < 6; ++g) {
    for (auto [a, b] : exps) law[s3.pow(g, a)] += 1.0 / 18.0;
  }
  double worst_single = 0.0;
  for (Elem h = 0; h < 6; ++h) worst_single = std::max(worst_single, std::abs(law[h] - 1.0 / 6.0));
  ReadOnceReport r = mz_readonce_check(s3, 2, t);
  CHECK(r.patterns_checked == 3);
  CHECK(r.max_deviation >= worst_single - 1e-12);
  CHECK(r.max_deviation <= 1.0 - 1.0 / 6.0 + 1e-12);
}

TEST_CASE("random baseline") {
  FiniteGroup g = FiniteGroup::symmetric(4);
  SampledSet one = alon_roichman_sample(g, 1, 3);
  CHECK(one.bias == doctest::Approx(1.0));
  SampledSet full = alon_roichman_sample(g, 24, 3);
  CHECK(full.bias < 1.0);
  CHECK(full.set.size() == 24);
  SampledSet again = alon_roichman_sample(g, 24, 3);
  CHECK(again.set.elements() == full.set.elements());
}

TEST_CASE("cayley export round trip") {
  FiniteGroup g = FiniteGroup::parse("dihedral:5");
  BiasedSet s = random_set(g, 6, 17);
  CayleyEdgeList edges = cayley_edges(s);
  CHECK(edges.edges.size() == g.order() * s.size());

  const std::string path = (std::filesystem::temp_directory_path() / "epsbias_cayley_test.txt").string();
  export_cayley(s, path);
  CayleyEdgeList back = import_cayley(path);
  std::remove(path.c_str());
  CHECK(back.edges == edges.edges);
  CHECK(edge_operator_norm(back) == doctest::Approx(bias_spectral(s)).epsilon(1e-9));

  // Inverse-closed sets: the symmetrized list is the directed one twice.
  BiasedSet sym = BiasedSet::from_elements(g, {1, 4, 5}, 1.0);
  CayleyEdgeList d = cayley_edges(sym);
  CayleyEdgeList both = cayley_edges(sym, true);
  CHECK(both.edges.size() == 2 * d.edges.size());
  auto a = d.edges;
  auto b = both.edges;
  a.insert(a.end(), d.edges.begin(), d.edges.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("abelian oracle agreement") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 12; ++i) {
    const std::uint64_t m = 2 + rng() % 9;
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3);
    FiniteGroup g = FiniteGroup::abelian(m, n);
    BiasedSet s = random_set(g, 1 + rng() % 40, rng());
    CHECK(std::abs(bias_spectral(s) - char_bias_exact(s)) <= 1e-9);
  }
}
