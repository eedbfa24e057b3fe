#include <doctest.h>

#include <cmath>

#include "epsbias/abelian.hpp"
#include "epsbias/spectral.hpp"
#include "oracles.hpp"

using namespace epsbias;

namespace {

std::vector<std::vector<std::uint64_t>> points(const BiasedSet& s) {
  std::vector<std::vector<std::uint64_t>> out;
  for (Elem x : s.elements()) out.push_back(s.group().coordinates(x));
  return out;
}

double oracle_bias(const BiasedSet& s) { return oracle::char_bias(points(s), s.group().abelian_moduli()); }

}  // namespace

TEST_CASE("powering construction with n = 1 is unbiased") {
  for (std::uint64_t q : {2ULL, 4ULL, 8ULL}) {
    BiasedSet s = aghp_construct_q(2, 1, q);
    CHECK(s.claimed_bias() == 0.0);
    CHECK(char_bias_exact(s) <= 1e-12);
  }
}

TEST_CASE("powering construction over Z_2^10 with q = 32") {
  BiasedSet s = aghp_construct_q(2, 10, 32);
  CHECK(s.size() == 1024);
  CHECK(s.claimed_bias() == doctest::Approx(9.0 / 32.0));
  const double exact = char_bias_exact(s);
  CHECK(exact <= 9.0 / 32.0 + 1e-12);
  // Frozen from the direct character-sum oracle.
  CHECK(exact == doctest::Approx(0.21875).epsilon(1e-12));
  CHECK(oracle_bias(s) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("powering construction over Z_3^4 with q = 9") {
  BiasedSet s = aghp_construct_q(3, 4, 9);
  CHECK(s.size() == 81);
  CHECK(s.claimed_bias() == doctest::Approx(1.0 / 3.0));
  const double exact = char_bias_exact(s);
  CHECK(exact <= 1.0 / 3.0 + 1e-12);
  CHECK(oracle_bias(s) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("powering construction soundness across parameters") {
  struct Case {
    std::uint64_t p;
    unsigned n;
    std::uint64_t q;
  };
  for (Case c : {Case{2, 6, 16}, Case{2, 4, 8}, Case{3, 3, 27}, Case{5, 3, 25}, Case{7, 2, 7}, Case{2, 8, 64}}) {
    CAPTURE(c.p);
    CAPTURE(c.n);
    CAPTURE(c.q);
    BiasedSet s = aghp_construct_q(c.p, c.n, c.q);
    CHECK(s.size() == c.q * c.q);
    CHECK(char_bias_exact(s) <= static_cast<double>(c.n - 1) / static_cast<double>(c.q) + 1e-12);
  }
}

TEST_CASE("powering construction picks the smallest adequate field") {
  BiasedSet s = aghp_construct(2, 10, 0.3);  // n / delta = 33.3
  CHECK(s.size() == 64 * 64);
  CHECK(s.claimed_bias() == doctest::Approx(9.0 / 64.0));
  CHECK_THROWS_AS(aghp_construct(2, 10, 0.001, 4096), ResourceError);
  CHECK_THROWS_AS(aghp_construct_q(2, 3, 12), StructuralError);
  CHECK_THROWS_AS(aghp_construct(4, 3, 0.5), StructuralError);
}

TEST_CASE("crt product") {
  BiasedSet s1 = aghp_construct_q(2, 2, 4);
  BiasedSet full3 = BiasedSet::whole_group(FiniteGroup::abelian(3, 2));
  BiasedSet a = crt_product(s1, full3);
  CHECK(a.claimed_bias() == s1.claimed_bias());
  CHECK(a.size() == s1.size() * 9);

  BiasedSet s2 = aghp_construct_q(3, 2, 3);
  BiasedSet b = crt_product(s1, s2);
  CHECK(b.group().abelian_moduli() == std::vector<std::uint64_t>{6, 6});
  const double cert = char_bias_exact(b);
  CHECK(cert <= std::max(char_bias_exact(s1), char_bias_exact(s2)) + 1e-9);
  CHECK(oracle_bias(b) == doctest::Approx(cert).epsilon(1e-12));

  BiasedSet p1 = BiasedSet::from_elements(FiniteGroup::abelian(2, 2), {0}, 1.0);
  BiasedSet p2 = BiasedSet::from_elements(FiniteGroup::abelian(3, 2), {0}, 1.0);
  CHECK(char_bias_exact(crt_product(p1, p2)) == doctest::Approx(1.0));

  BiasedSet s4 = BiasedSet::whole_group(FiniteGroup::abelian(4, 2));
  CHECK_THROWS_AS(crt_product(s1, s4), StructuralError);
}

TEST_CASE("quotient modulo a divisor") {
  BiasedSet s = aghp_construct_q(2, 2, 4);
  BiasedSet same = quotient_mod(s, 2);
  CHECK(same.elements() == s.elements());

  BiasedSet z6 = BiasedSet::whole_group(FiniteGroup::cyclic(6));
  BiasedSet z3 = quotient_mod(z6, 3);
  CHECK(z3.histogram() == std::vector<std::uint64_t>{2, 2, 2});
  CHECK(char_bias_exact(z3) <= 1e-12);

  BiasedSet crt = crt_product(aghp_construct_q(2, 2, 4), aghp_construct_q(3, 2, 3));
  for (std::uint64_t d : {2ULL, 3ULL}) {
    BiasedSet r = quotient_mod(crt, d);
    CHECK(r.size() == crt.size());
    CHECK(r.claimed_bias() == crt.claimed_bias());
    CHECK(char_bias_exact(r) <= char_bias_exact(crt) + 1e-9);
  }
  CHECK_THROWS_AS(quotient_mod(crt, 4), StructuralError);
}

TEST_CASE("exact character bias") {
  CHECK(char_bias_exact(BiasedSet::whole_group(FiniteGroup::abelian(3, 3))) <= 1e-12);
  FiniteGroup z3 = FiniteGroup::cyclic(3);
  CHECK(char_bias_exact(BiasedSet::from_elements(z3, {1, 2}, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(char_bias_exact(BiasedSet::whole_group(FiniteGroup::cyclic(2))) <= 1e-12);
  CharacterBias r = char_bias_report(BiasedSet::from_elements(z3, {1}, 1.0));
  CHECK(r.bias == doctest::Approx(1.0));
  CHECK(r.worst_character.size() == 1);
  CHECK_THROWS_AS(char_bias_exact(BiasedSet::whole_group(FiniteGroup::abelian(2, 12)), 1024), ResourceError);
  CHECK_THROWS_AS(char_bias_exact(BiasedSet::whole_group(FiniteGroup::symmetric(3))), StructuralError);
}

TEST_CASE("character bias agrees with the direct oracle on random multisets") {
  std::mt19937_64 rng(11);
  for (auto [m, n] : {std::pair{4ULL, 2U}, {6ULL, 2U}, {5ULL, 3U}, {12ULL, 1U}, {2ULL, 6U}}) {
    FiniteGroup g = FiniteGroup::abelian(m, n);
    std::vector<Elem> e(23);
    for (Elem& x : e) x = static_cast<Elem>(rng() % g.order());
    BiasedSet s = BiasedSet::from_elements(g, e, 1.0);
    CHECK(char_bias_exact(s) == doctest::Approx(oracle_bias(s)).epsilon(1e-12));
  }
}

TEST_CASE("random biased search") {
  SearchResult one = random_biased_search(7, 2, 1.0, 10, 1);
  CHECK(one.success);
  CHECK(one.best.size() == 1);

  SearchResult r = random_biased_search(4, 3, 0.5, 50, 3);
  REQUIRE(r.success);
  CHECK(char_bias_exact(r.best) <= 0.5);
  CHECK(r.best.seed().has_value());

  SearchResult small = random_biased_search(2, 1, 0.1, 10, 1);
  CHECK(small.success);
  CHECK(small.best.elements() == std::vector<Elem>{0, 1});
  CHECK(char_bias_exact(small.best) <= 1e-12);
}

TEST_CASE("composite moduli") {
  for (auto [m, n, delta] : {std::tuple{6ULL, 2U, 0.3}, {4ULL, 2U, 0.3}, {12ULL, 1U, 0.25}, {30ULL, 1U, 0.2}}) {
    CAPTURE(m);
    BiasedSet s = abelian_biased_set(m, n, delta);
    CHECK(s.group().abelian_moduli() == std::vector<std::uint64_t>(n, m));
    CHECK(s.claimed_bias() <= delta + 1e-12);
    CHECK(char_bias_exact(s) <= s.claimed_bias() + 1e-9);
  }
}
