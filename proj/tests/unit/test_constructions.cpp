#include <doctest.h>

#include <cmath>

#include "epsbias/abelian.hpp"
#include "epsbias/constructions.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/spectral.hpp"
#include "oracles.hpp"

using namespace epsbias;

namespace {

double oracle_char_bias(const BiasedSet& s) {
  std::vector<std::vector<std::uint64_t>> pts;
  for (Elem x : s.elements()) pts.push_back(s.group().coordinates(x));
  return oracle::char_bias(pts, s.group().abelian_moduli());
}

// Smallest admissible (p, q) by direct search: 2/sqrt(q) <= lambda and
// p(p^2 - 1)/2 >= side with p != q, both primes = 1 mod 4.
std::pair<std::uint64_t, std::uint64_t> search_primes(double side, double lambda) {
  std::uint64_t q = std::max<std::uint64_t>(5, static_cast<std::uint64_t>(4.0 / (lambda * lambda)) - 2);
  while (!(q % 4 == 1 && oracle::is_prime(q) && 2.0 / std::sqrt(static_cast<double>(q)) <= lambda)) ++q;
  std::uint64_t p = std::max<std::uint64_t>(5, static_cast<std::uint64_t>(std::cbrt(2.0 * side)) - 2);
  while (!(p % 4 == 1 && p != q && oracle::is_prime(p) &&
           static_cast<double>(p) * static_cast<double>(p * p - 1) / 2.0 >= side)) {
    ++p;
  }
  return {p, q};
}

}  // namespace

TEST_CASE("power sets") {
  FiniteGroup z2 = FiniteGroup::cyclic(2);
  BiasedSet s = BiasedSet::whole_group(z2);
  BiasedSet t = mz_set(z2, 1, s);
  CHECK(t.size() == 4);
  CHECK(t.histogram() == std::vector<std::uint64_t>{3, 1});
  CHECK(oracle_char_bias(t) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bias_spectral(t) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.claim_kind() == ClaimKind::reference);

  CHECK(mz_reference_term(6) == doctest::Approx(2.0 / 3.0));
  CHECK(mz_reference_term(2) == doctest::Approx(0.5));

  FiniteGroup s3 = FiniteGroup::symmetric(3);
  BiasedSet e = abelian_biased_set(6, 2, 0.3);
  BiasedSet u = mz_set(s3, 2, e);
  CHECK(u.size() == 6 * e.size());
  CHECK(u.group().order() == 36);
  CHECK(bias_spectral(u) < 1.0 - 1e-3);

  CHECK_THROWS_AS(mz_set(s3, 2, aghp_construct_q(2, 2, 4)), StructuralError);
  CHECK_THROWS_AS(mz_set(s3, 3, e), StructuralError);
}

TEST_CASE("tiling map") {
  TilingMap m = tile('U', 10, 3);
  CHECK(m.uncovered_count == 1);
  CHECK(m.uncovered_fraction() == doctest::Approx(0.1));
  for (std::uint64_t block = 0; block < 3; ++block) {
    std::vector<bool> hit(3, false);
    for (std::uint64_t i = 0; i < 3; ++i) hit[m.entry(3 * block + i)] = true;
    CHECK(std::count(hit.begin(), hit.end(), true) == 3);
  }
  CHECK(m.entry(9) == 0);
  CHECK(tile('V', 12, 4).uncovered_count == 0);
  CHECK(tile('U', 2, 3).uncovered_count == 2);
}

TEST_CASE("one amplification step on an abelian group") {
  BiasedSet s = BiasedSet::whole_group(FiniteGroup::cyclic(4));
  BiasedSet out = amplify_step(s, 0.3);
  auto [p, q] = search_primes(4.0 * 4.0, 0.09);
  CHECK(q == 509);
  CHECK(p == 5);
  CHECK(out.claimed_bias() == doctest::Approx(5.0 * 0.09));
  CHECK(out.size() == lps_side(p) * (q + 1));
  const double cert = char_bias_exact(out);
  CHECK(cert <= 0.45 + 1e-9);
  CHECK(cert == doctest::Approx(oracle_char_bias(out)).epsilon(1e-9));
  CHECK(out.provenance().back().operation == "amplify_step");
}

TEST_CASE("amplification schedule") {
  CHECK(schedule_epsilon(1) == doctest::Approx(0.05));
  CHECK(schedule_epsilon(2) == doctest::Approx(0.0125));
  CHECK(schedule_epsilon(3) == doctest::Approx(std::pow(2.0, -8.0) / 5.0));
  CHECK(amplification_steps(0.1) == 0);
  CHECK(amplification_steps(0.05) == 1);
  CHECK(amplification_steps(0.002) == 3);

  AmplificationSchedule plan = plan_amplification(200, 0.002);
  REQUIRE(plan.steps.size() == 3);
  double size = 200.0;
  double eps = 0.1;
  for (const AmplificationStep& st : plan.steps) {
    auto [p, q] = search_primes(size * std::ceil(1.0 / eps - 1e-12), eps * eps);
    CHECK(st.p == p);
    CHECK(st.q == q);
    CHECK(st.eps_in == doctest::Approx(eps));
    const double side = static_cast<double>(p) * static_cast<double>(p * p - 1) / 2.0;
    CHECK(st.size_out == doctest::Approx(side * static_cast<double>(q + 1)));
    CHECK(st.constant == doctest::Approx(st.size_out / size * std::pow(eps, 5)));
    size = st.size_out;
    eps = schedule_epsilon(st.t);
    CHECK(st.eps_out == doctest::Approx(eps));
  }
  // Frozen from the direct search above.
  CHECK(plan.steps[0].p == 17);
  CHECK(plan.steps[0].q == 40009);
  CHECK(plan.steps[2].q == 163840049);
}

TEST_CASE("amplify leaves sets alone at or above one tenth") {
  BiasedSet s = BiasedSet::whole_group(FiniteGroup::cyclic(3));
  BiasedSet out = amplify(s, 0.2);
  CHECK(out.elements() == s.elements());
  CHECK(out.provenance().back().params["note"].get<std::string>().find("unchanged") != std::string::npos);
  BiasedSet loud = BiasedSet::from_elements(FiniteGroup::cyclic(3), {1}, 1.0);
  CHECK_THROWS_AS(amplify(loud, 0.05), StructuralError);
}

TEST_CASE("bridging recurrence") {
  auto a = bridge_schedule(0.5, 0.05, 0.05);
  REQUIRE(a.size() >= 2);
  CHECK(a[1] == doctest::Approx(0.3525));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] < a[i - 1]);
  CHECK(a.back() <= 0.1);

  auto b = bridge_schedule(0.9, 0.01, 0.01);
  CHECK(b[1] == doctest::Approx(0.8381));
  CHECK(b.back() <= 0.1);

  CHECK_THROWS_AS(bridge_schedule(0.95, 0.05, 0.05), StructuralError);
  CHECK(bridge_schedule(0.05, 0.1, 0.1).size() == 1);
}

TEST_CASE("claim six terms") {
  Claim6Terms t = claim6_terms(0.25, 0.25, 0.2, 0.125);
  CHECK(t.left == doctest::Approx(0.25));
  CHECK(t.right == doctest::Approx(0.45));
  CHECK(t.mixed == doctest::Approx(0.2375));
  CHECK(t.bound() == doctest::Approx(0.45));
  CHECK(claim6_bound(0.0, 0.0, 0.2, 0.125) == doctest::Approx(0.2));
  CHECK(claim6_bound(0.0, 0.0, 0.1, 0.125) == doctest::Approx(0.125));
}

TEST_CASE("tensor stitching is sound against the exact oracle") {
  FiniteGroup z3 = FiniteGroup::cyclic(3);
  FiniteGroup z4 = FiniteGroup::cyclic(4);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SampledSet a = alon_roichman_sample(z3, 2 + seed % 3, seed);
    SampledSet b = alon_roichman_sample(z4, 12 + seed, 100 + seed);
    a.set.set_claim(a.bias, ClaimKind::bound);
    b.set.set_claim(b.bias, ClaimKind::bound);
    RandomExpanderResult g = random_regular_bipartite(static_cast<std::uint32_t>(b.set.size()), 4, 0.99, seed, 8);
    CAPTURE(seed);
    CAPTURE(g.graph.certified_lambda);
    REQUIRE(g.success);
    BiasedSet out = tensor_combine(a.set, b.set, g.graph);
    CHECK(out.size() == g.graph.degree * b.set.size());
    const double ratio = static_cast<double>(a.set.size()) / static_cast<double>(b.set.size());
    const double bound = claim6_bound(a.bias, b.bias, ratio, g.graph.certified_lambda);
    CHECK(out.claimed_bias() == doctest::Approx(std::min(1.0, bound)));
    CHECK(oracle_char_bias(out) <= bound + 1e-9);
    CHECK(char_bias_exact(out) == doctest::Approx(oracle_char_bias(out)).epsilon(1e-9));
  }
}

TEST_CASE("tensor stitching preconditions") {
  BiasedSet small = BiasedSet::whole_group(FiniteGroup::cyclic(2));
  BiasedSet large = BiasedSet::whole_group(FiniteGroup::cyclic(5));
  BipartiteExpander k5 = complete_bipartite(5);
  certify(k5);
  CHECK_THROWS_AS(tensor_combine(large, small, k5), StructuralError);
  BipartiteExpander k4 = complete_bipartite(4);
  certify(k4);
  CHECK_THROWS_AS(tensor_combine(small, large, k4), StructuralError);
  BipartiteExpander raw = complete_bipartite(5);
  CHECK_THROWS_AS(tensor_combine(small, large, raw), StructuralError);
  BiasedSet zero = tensor_combine(small, large, k5);
  CHECK(zero.claimed_bias() == doctest::Approx(0.4));
  // U side reads 0, 1, 0, 1, 0: the Z2 character averages (3 - 2)/5.
  CHECK(char_bias_exact(zero) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(oracle_char_bias(zero) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("direct products") {
  FiniteGroup s3 = FiniteGroup::symmetric(3);
  DirectProductResult one = direct_product_set({s3});
  CHECK(one.set.size() == 6);
  CHECK(one.set.claimed_bias() == 0.0);

  DirectProductResult two = direct_product_set({FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)});
  CHECK(two.set.group().order() == 6);
  CHECK(two.set.claimed_bias() <= 0.5);
  REQUIRE(two.set.certified_bias().has_value());
  CHECK(*two.set.certified_bias() <= two.set.claimed_bias() + 1e-9);
  CHECK(oracle_char_bias(two.set) <= 0.5);
  CHECK(static_cast<double>(two.set.size()) <= 5.0 * two.max_degree * 3.0);
  CHECK(two.ledger["merges"].size() == 1);

  DirectProductResult again = direct_product_set({FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)});
  CHECK(again.set.to_json().dump() == two.set.to_json().dump());

  DirectProductResult three = direct_product_set({FiniteGroup::cyclic(2), s3, FiniteGroup::cyclic(2)});
  REQUIRE(three.set.certified_bias().has_value());
  CHECK(*three.set.certified_bias() <= 0.5);
  CHECK(*three.set.certified_bias() <= three.set.claimed_bias() + 1e-9);
  CHECK(three.ledger["size_bound"].get<double>() >= static_cast<double>(three.set.size()));
  CHECK_THROWS_AS(direct_product_set({}), StructuralError);
}

TEST_CASE("abelian leaves through a surjection") {
  FiniteGroup klein = FiniteGroup::parse("quot(dihedral:4;2)");
  REQUIRE(klein.is_abelian());
  BiasedSet s = abelian_leaf(klein, 0.2);
  CHECK(s.group().same_group(klein));
  CHECK(bias_spectral(s) <= s.claimed_bias() + 1e-9);
  CHECK(s.claimed_bias() <= 0.2);
  CHECK_THROWS_AS(abelian_leaf(FiniteGroup::symmetric(3), 0.2), StructuralError);
}

TEST_CASE("solvable recursion") {
  SolvableResult d4 = solvable_set_base(FiniteGroup::dihedral(4));
  CHECK(d4.ledger_ok);
  CHECK(d4.ledger["derived_length"] == 2);
  REQUIRE(d4.set.certified_bias().has_value());
  CHECK(*d4.set.certified_bias() <= 0.5);
  CHECK(d4.set.claimed_bias() <= 0.5);
  for (const auto& level : d4.ledger["levels"]) {
    CHECK(level["ok"].get<bool>());
    CHECK(level["certified"].get<double>() <= level["eps_children"].get<double>() + 2.0 * level["alpha"].get<double>() + 1e-9);
    CHECK(level["alpha"].get<double>() < level["alpha_limit"].get<double>());
  }

  SolvableResult ab = solvable_set_base(FiniteGroup::abelian(3, 2));
  CHECK(ab.ledger["derived_length"] == 1);
  CHECK(ab.ledger["levels"].empty());

  CHECK_THROWS_AS(solvable_set_base(FiniteGroup::symmetric(5)), StructuralError);

  BiasedSet direct = solvable_set(FiniteGroup::abelian(6, 2), 0.3);
  CHECK(char_bias_exact(direct) <= 0.3 + 1e-9);
  BiasedSet kept = solvable_set(FiniteGroup::dihedral(4), 0.5);
  CHECK(kept.claimed_bias() <= 0.5);
}

TEST_CASE("effective bias prefers the certificate") {
  BiasedSet s = BiasedSet::whole_group(FiniteGroup::cyclic(3));
  s.set_claim(0.4, ClaimKind::bound);
  CHECK(effective_bias(s) == doctest::Approx(0.4));
  s.set_certified(0.1);
  CHECK(effective_bias(s) == doctest::Approx(0.1));
}
