#include <doctest.h>

#include <cmath>

#include "epsbias/error.hpp"
#include "epsbias/expander.hpp"
#include "epsbias/harness.hpp"

using namespace epsbias;

TEST_CASE("vector lemmas on a small LPS graph") {
  BipartiteExpander g = lps_graph(5, 13);
  HarnessReport r = rayleigh_vector_check(g, 200, 3);
  CHECK(r.passed());
  CHECK(r.trials == 200);
  // Aligned trials sit on the equality case.
  CHECK(r.max_slack <= r.tolerance);
  CHECK(r.max_slack >= -1e-9);
  CHECK(r.parameters["lambda"].get<double>() == doctest::Approx(g.certified_lambda));

  VectorCheckOptions two;
  two.threads = 2;
  CHECK(rayleigh_vector_check(g, 200, 3, two).to_json().dump() == r.to_json().dump());
}

TEST_CASE("operator lemma with the identity equality case") {
  RandomExpanderResult g = random_regular_bipartite(40, 6, 0.9, 2, 4);
  REQUIRE(g.success);
  HarnessReport r = rayleigh_operator_check(g.graph, 100, 5);
  CHECK(r.passed());
  CHECK(r.max_slack >= -1e-12);  // X_s = I gives 1 <= lambda + (1 - lambda)
  CHECK(r.max_slack <= r.tolerance);
}

TEST_CASE("lemma checks need an exact certificate") {
  BipartiteExpander g = lps_graph(5, 13);
  g.certification = CertMethod::power_iteration;
  CHECK_THROWS_AS(rayleigh_vector_check(g, 10, 1), StructuralError);
  CHECK_THROWS_AS(rayleigh_operator_check(g, 10, 1), StructuralError);
}

TEST_CASE("tail sampler diagonal") {
  auto d = tail_diagonal(0.3, 4);
  double mean = 0.0;
  for (double x : d) mean += x / 4.0;
  CHECK(mean == doctest::Approx(0.7));
  CHECK(*std::max_element(d.begin(), d.end()) == doctest::Approx(1.0));
  CHECK(*std::min_element(d.begin(), d.end()) >= 0.0);
  CHECK(tail_diagonal(0.3, 1) == std::vector<double>{0.7});
  // 1 - delta below 1/dim: no room for a unit entry.
  CHECK(tail_diagonal(0.9, 4) == std::vector<double>(4, 1.0 - 0.9));
  CHECK_THROWS_AS(tail_diagonal(0.0, 4), StructuralError);
}

TEST_CASE("scalar products never reach the threshold") {
  HarnessReport r = operator_product_tail(20, 0.3, 1, 50, 1);
  CHECK(r.empirical_tail == 0.0);
  CHECK(r.parameters["max_product_norm"].get<double>() == doctest::Approx(std::pow(0.7, 20)).epsilon(1e-9));
  CHECK(r.passed());
}

TEST_CASE("tail report rows") {
  HarnessReport r = operator_product_tail(30, 0.3, 2, 500, 9);
  CHECK(r.passed());
  CHECK(r.bound == doctest::Approx(2.0 * std::exp(-30 * 0.09 / 13.0)));
  CHECK(r.vacuous);
  // Main row, shifts 0..13 and the k delta / 2 = 4.5 row.
  CHECK(r.sweep.size() == 1 + 14 + 1);
  for (const auto& row : r.sweep) CHECK(row["ok"].get<bool>());

  TailOptions custom;
  custom.shifts = {3.0};
  HarnessReport c = operator_product_tail(30, 0.3, 2, 500, 9, custom);
  CHECK(c.sweep.size() == 2);
  CHECK(c.empirical_tail == r.empirical_tail);

  TailOptions threaded;
  threaded.threads = 3;
  CHECK(operator_product_tail(30, 0.3, 2, 500, 9, threaded).to_json().dump() == r.to_json().dump());
}

TEST_CASE("azuma cases") {
  std::vector<double> alpha(20, 0.5);
  // eps = alpha forces every step to -alpha: the event never happens.
  HarnessReport det = azuma_supermartingale_check(alpha, alpha, {0.5, 1.0}, 200, 1);
  CHECK(det.passed());
  CHECK(det.sweep[0]["empirical"].get<double>() == 0.0);

  HarnessReport zero = azuma_supermartingale_check(alpha, std::vector<double>(20, 0.0), {0.0}, 200, 1);
  CHECK(zero.sweep[0]["bound"].get<double>() == doctest::Approx(1.0));
  CHECK(zero.passed());

  HarnessReport sym = azuma_supermartingale_check(std::vector<double>(100, 0.5), std::vector<double>(100, 0.0),
                                                  {1.0, 3.0, 5.0, 8.0}, 4000, 2, AzumaMode::symmetric);
  CHECK(sym.passed());

  CHECK_THROWS_AS(azuma_supermartingale_check({0.1}, {0.2}, {1.0}, 10, 1), StructuralError);
  CHECK_THROWS_AS(azuma_supermartingale_check({0.1, 0.1}, {0.0}, {1.0}, 10, 1), StructuralError);
  CHECK_THROWS_AS(azuma_supermartingale_check({0.1}, {0.0}, {-1.0}, 10, 1), StructuralError);
}
