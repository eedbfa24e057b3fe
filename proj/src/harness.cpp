#include "epsbias/harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "epsbias/error.hpp"
#include "epsbias/rng.hpp"

namespace epsbias {

namespace {

using cd = std::complex<double>;

// Runs body(trial) for every trial; each worker takes a contiguous block so
// results only depend on the trial index.
template <typename Body>
void for_trials(std::uint64_t trials, unsigned threads, Body body) {
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(trials, 64))));
  if (workers == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t block = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([=, &body] {
      for (std::uint64_t t = w * block; t < std::min(trials, (w + 1) * block); ++t) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

Eigen::MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cd(n(rng), n(rng));
  return m;
}

Eigen::MatrixXcd haar_unitary(unsigned dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian(dim, dim, rng));
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (unsigned j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

double op_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void require_exact(const BipartiteExpander& g, const char* who) {
  if (g.certification != CertMethod::exact_eigensolve) {
    throw StructuralError(std::string(who) + ": graph needs a lambda certified by the exact eigensolver");
  }
}

// |E_(u,v) <x^u, x^v>| with rows 0..N-1 the U side and N..2N-1 the V side.
double edge_inner(const BipartiteExpander& g, const Eigen::MatrixXcd& x) {
  cd sum = 0.0;
  for (const auto& e : g.edges) sum += static_cast<double>(e.mult) * x.row(e.u).dot(x.row(g.side + e.v));
  return std::abs(sum) / static_cast<double>(g.edge_count());
}

struct TrialOutcome {
  double slack = -1e300;
  bool violated = false;
};

void fold(HarnessReport& r, const std::vector<TrialOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    r.max_slack = std::max(r.max_slack, o.slack);
    if (o.violated) ++r.violations;
  }
}

}  // namespace

nlohmann::json HarnessReport::to_json() const {
  return {{"check", check},
          {"trials", trials},
          {"violations", violations},
          {"max_slack", max_slack},
          {"tolerance", tolerance},
          {"empirical_tail", empirical_tail},
          {"bound", bound},
          {"vacuous", vacuous},
          {"parameters", parameters},
          {"sweep", sweep},
          {"seed", seed},
          {"passed", passed()}};
}

HarnessReport rayleigh_vector_check(const BipartiteExpander& graph, std::uint64_t trials, std::uint64_t seed,
                                    const VectorCheckOptions& opts) {
  require_exact(graph, "rayleigh_vector_check");
  const double lambda = graph.certified_lambda;
  const auto n = static_cast<Eigen::Index>(graph.side);
  const unsigned dim = std::max(1U, opts.dim);

  // Top singular pair of the normalized biadjacency on the complement of constants.
  Eigen::VectorXd top_u, top_v;
  if (opts.aligned_every > 0 && n > 1) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, -1.0 / static_cast<double>(n));
    for (const auto& e : graph.edges) c(e.u, e.v) += static_cast<double>(e.mult) / graph.degree;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.selfadjointView<Eigen::Lower>());
    const double sigma = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
    if (sigma > 1e-12) {
      top_v = es.eigenvectors().col(n - 1);
      top_u = c * top_v / sigma;
    }
  }

  std::vector<TrialOutcome> outcomes(trials);
  for_trials(trials, opts.threads, [&](std::uint64_t t) {
    auto rng = stream_rng(seed, t);
    Eigen::MatrixXcd x(2 * n, dim);
    const bool aligned = top_u.size() > 0 && opts.aligned_every > 0 && t % opts.aligned_every == 0;
    if (aligned) {
      Eigen::MatrixXcd w = gaussian(1, dim, rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        x.row(i) = top_u(i) * w;
        x.row(n + i) = top_v(i) * w;
      }
    } else {
      x = gaussian(2 * n, dim, rng);
      const Eigen::RowVectorXcd mu = x.topRows(n).colwise().mean();
      const Eigen::RowVectorXcd mv = x.bottomRows(n).colwise().mean();
      x.topRows(n).rowwise() -= mu;
      x.bottomRows(n).rowwise() -= mv;
    }
    TrialOutcome o;
    const double energy = x.squaredNorm() / static_cast<double>(2 * n);
    const double lhs1 = edge_inner(graph, x);
    const double rhs1 = lambda * energy;
    o.slack = lhs1 - rhs1;
    o.violated = lhs1 - rhs1 > 1e-12 * (1.0 + rhs1);

    // Arbitrary side means.
    std::uniform_real_distribution<double> scale(0.0, 2.0);
    Eigen::MatrixXcd y = x;
    y.topRows(n).rowwise() += scale(rng) * gaussian(1, dim, rng).row(0);
    y.bottomRows(n).rowwise() += scale(rng) * gaussian(1, dim, rng).row(0);
    const double eps_u = y.topRows(n).colwise().mean().norm();
    const double eps_v = y.bottomRows(n).colwise().mean().norm();
    const double lhs2 = edge_inner(graph, y);
    const double rhs2 =
        lambda * (y.squaredNorm() / static_cast<double>(2 * n) - eps_u * eps_u / 2 - eps_v * eps_v / 2) + eps_u * eps_v;
    o.slack = std::max(o.slack, lhs2 - rhs2);
    o.violated = o.violated || lhs2 - rhs2 > 1e-12 * (1.0 + rhs2);
    outcomes[t] = o;
  });

  HarnessReport r;
  r.check = "rayleigh-vector";
  r.trials = trials;
  r.seed = seed;
  r.parameters = {{"lambda", lambda},
                  {"side", graph.side},
                  {"degree", graph.degree},
                  {"dim", dim},
                  {"aligned_every", top_u.size() > 0 ? opts.aligned_every : 0}};
  fold(r, outcomes);
  return r;
}

HarnessReport rayleigh_operator_check(const BipartiteExpander& graph, std::uint64_t trials, std::uint64_t seed,
                                      const OperatorCheckOptions& opts) {
  require_exact(graph, "rayleigh_operator_check");
  const double lambda = graph.certified_lambda;
  const std::uint32_t n = graph.side;
  const unsigned dim = std::max(1U, opts.dim);
  const double count = static_cast<double>(graph.edge_count());

  std::vector<TrialOutcome> outcomes(trials);
  for_trials(trials, opts.threads, [&](std::uint64_t t) {
    auto rng = stream_rng(seed, t);
    std::vector<Eigen::MatrixXcd> xs(2 * static_cast<std::size_t>(n));
    for (auto& m : xs) m = t == 0 ? Eigen::MatrixXcd::Identity(dim, dim) : Eigen::MatrixXcd(opts.scale * haar_unitary(dim, rng));
    Eigen::MatrixXcd mean_u = Eigen::MatrixXcd::Zero(dim, dim), mean_v = mean_u;
    for (std::uint32_t i = 0; i < n; ++i) {
      mean_u += xs[i];
      mean_v += xs[n + i];
    }
    const double eps_u = op_norm(mean_u / n);
    const double eps_v = op_norm(mean_v / n);
    const double rhs = lambda + (1.0 - lambda) * eps_u * eps_v;

    // Group edges by u: sum_v mult X_v, then pair with X_u.
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd tens = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
    std::size_t k = 0;
    while (k < graph.edges.size()) {
      const std::uint32_t u = graph.edges[k].u;
      Eigen::MatrixXcd nb = Eigen::MatrixXcd::Zero(dim, dim);
      for (; k < graph.edges.size() && graph.edges[k].u == u; ++k) nb += static_cast<double>(graph.edges[k].mult) * xs[n + graph.edges[k].v];
      prod += xs[u] * nb;
      if (opts.tensor) tens += kron(xs[u], nb);
    }
    TrialOutcome o;
    const double lhs = op_norm(prod / count);
    o.slack = lhs - rhs;
    o.violated = lhs - rhs > 1e-12 * (1.0 + rhs);
    if (opts.tensor) {
      const double lhs_t = op_norm(tens / count);
      o.slack = std::max(o.slack, lhs_t - rhs);
      o.violated = o.violated || lhs_t - rhs > 1e-12 * (1.0 + rhs);
    }
    outcomes[t] = o;
  });

  HarnessReport r;
  r.check = "rayleigh-operator";
  r.trials = trials;
  r.seed = seed;
  r.parameters = {{"lambda", lambda}, {"side", n},          {"degree", graph.degree},
                  {"dim", dim},       {"scale", opts.scale}, {"tensor", opts.tensor}};
  fold(r, outcomes);
  return r;
}

std::vector<double> tail_diagonal(double delta, unsigned dim) {
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("tail sampler: delta must lie in (0,1)");
  if (dim == 0) throw StructuralError("tail sampler: dim must be positive");
  if (dim == 1) return {1.0 - delta};
  const double rest = ((1.0 - delta) * dim - 1.0) / (dim - 1.0);
  if (rest < 0.0) return std::vector<double>(dim, 1.0 - delta);
  std::vector<double> d(dim, rest);
  d[0] = 1.0;
  return d;
}

HarnessReport operator_product_tail(unsigned k, double delta, unsigned dim, std::uint64_t trials,
                                    std::uint64_t seed, const TailOptions& opts) {
  if (k == 0) throw StructuralError("operator_product_tail: k must be positive");
  if (trials == 0) throw StructuralError("operator_product_tail: need at least one trial");
  const std::vector<double> diag = tail_diagonal(delta, dim);
  double mean_diag = 0.0;
  for (double x : diag) mean_diag += x / dim;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  for (unsigned i = 0; i < dim; ++i) d(i, i) = diag[i];

  std::vector<double> norms(trials);
  for_trials(trials, opts.threads, [&](std::uint64_t t) {
    auto rng = stream_rng(seed, t);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (unsigned i = 0; i < k; ++i) {
      Eigen::MatrixXcd u = haar_unitary(dim, rng);
      p = (u * d * u.adjoint()) * p;
    }
    norms[t] = op_norm(p);
  });

  const double sdim = std::sqrt(static_cast<double>(dim));
  auto frequency = [&](double threshold) {
    std::uint64_t hits = 0;
    for (double x : norms) hits += x >= threshold ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(trials);
  };
  HarnessReport r;
  r.check = "operator-product-tail";
  r.trials = trials;
  r.seed = seed;
  auto row = [&](const char* form, double shift, double threshold, double bound) {
    const double freq = frequency(threshold);
    const bool vacuous = bound >= 1.0;
    const double se = vacuous ? 0.0 : std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
    const bool ok = vacuous || freq <= bound + 3.0 * se;
    if (!ok) ++r.violations;
    r.max_slack = std::max(r.max_slack, vacuous ? r.max_slack : freq - bound - 3.0 * se);
    nlohmann::json j = {{"form", form}, {"threshold", threshold}, {"bound", bound}, {"empirical", freq},
                        {"vacuous", vacuous}, {"standard_error", se}, {"ok", ok}};
    if (shift >= 0) j["shift"] = shift;
    return j;
  };
  const double kd = static_cast<double>(k) * delta;
  const double main_threshold = sdim * std::exp(-kd / 6.0);
  const double main_bound = dim * std::exp(-kd * delta / 13.0);
  nlohmann::json main_row = row("k delta / 6", -1.0, main_threshold, main_bound);
  r.empirical_tail = main_row["empirical"];
  r.bound = main_bound;
  r.vacuous = main_bound >= 1.0;

  std::vector<double> shifts = opts.shifts;
  if (shifts.empty()) {
    const int top = static_cast<int>(std::ceil(kd / 2.0)) + 8;
    for (int s = 0; s <= top; ++s) shifts.push_back(s);
    shifts.push_back(kd / 2.0);
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  }
  r.sweep.push_back(main_row);
  for (double s : shifts) {
    const double threshold = sdim * std::exp(-kd / 2.0 + s);
    const double bound = dim * std::exp(-s * s / (2.0 * k * std::log(2.0)));
    r.sweep.push_back(row("k delta / 2 - shift", s, threshold, bound));
  }
  double mean_norm = 0.0, max_norm = 0.0;
  for (double x : norms) {
    mean_norm += x / static_cast<double>(trials);
    max_norm = std::max(max_norm, x);
  }
  r.parameters = {{"k", k},
                  {"delta", delta},
                  {"dim", dim},
                  {"diagonal", diag},
                  {"expected_factor_norm", mean_diag},
                  {"mean_product_norm", mean_norm},
                  {"max_product_norm", max_norm}};
  return r;
}

std::string to_string(AzumaMode mode) { return mode == AzumaMode::one_sided ? "one-sided" : "symmetric"; }

HarnessReport azuma_supermartingale_check(const std::vector<double>& alphas, const std::vector<double>& epsilons,
                                          const std::vector<double>& lambdas, std::uint64_t trials,
                                          std::uint64_t seed, AzumaMode mode) {
  if (alphas.empty() || alphas.size() != epsilons.size()) {
    throw StructuralError("azuma: alphas and epsilons must be nonempty and of equal length");
  }
  if (trials == 0) throw StructuralError("azuma: need at least one trial");
  double sum_alpha = 0.0, sum_alpha_sq = 0.0, sum_eps = 0.0;
  bool small_steps = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw StructuralError("azuma: alpha_" + std::to_string(i) + " must be positive");
    if (!(epsilons[i] >= 0.0 && epsilons[i] <= alphas[i])) {
      throw StructuralError("azuma: need 0 <= eps_i <= alpha_i, violated at i = " + std::to_string(i));
    }
    sum_alpha += alphas[i];
    sum_alpha_sq += alphas[i] * alphas[i];
    sum_eps += epsilons[i];
    small_steps = small_steps && alphas[i] <= 1.0;
  }
  for (double l : lambdas)
    if (!(l >= 0.0)) throw StructuralError("azuma: lambda must be nonnegative");

  std::vector<double> excess(trials);  // X_T - X_0 + sum eps
  for_trials(trials, 1, [&](std::uint64_t t) {
    auto rng = stream_rng(seed, t);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double x = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double a = alphas[i], e = epsilons[i];
      if (mode == AzumaMode::one_sided) {
        x += unif(rng) < e / a ? -a : 0.0;
      } else {
        x += -e + (unif(rng) < 0.5 ? 1.0 : -1.0) * (a - e);
      }
    }
    excess[t] = x + sum_eps;
  });

  HarnessReport r;
  r.check = "azuma";
  r.trials = trials;
  r.seed = seed;
  r.parameters = {{"steps", alphas.size()}, {"sum_alpha", sum_alpha}, {"sum_alpha_sq", sum_alpha_sq},
                  {"sum_eps", sum_eps},     {"mode", to_string(mode)}, {"linear_form_valid", small_steps}};
  bool first = true;
  for (double l : lambdas) {
    std::uint64_t hits = 0;
    for (double v : excess) hits += v >= l ? 1 : 0;
    const double freq = static_cast<double>(hits) / static_cast<double>(trials);
    const double bound = std::exp(-l * l / (2.0 * sum_alpha));
    const double bound_sq = std::exp(-l * l / (2.0 * sum_alpha_sq));
    auto check = [&](double b, bool assert_it) {
      if (!assert_it || b >= 1.0) return true;
      return freq <= b + 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
    };
    const bool ok_linear = check(bound, small_steps);
    const bool ok_sq = check(bound_sq, true);
    if (!ok_linear || !ok_sq) ++r.violations;
    r.sweep.push_back({{"lambda", l},
                       {"empirical", freq},
                       {"bound", bound},
                       {"bound_sq", bound_sq},
                       {"linear_asserted", small_steps && bound < 1.0},
                       {"ok", ok_linear && ok_sq}});
    if (first) {
      r.empirical_tail = freq;
      r.bound = bound;
      r.vacuous = bound >= 1.0;
      first = false;
    }
  }
  return r;
}

}  // namespace epsbias
