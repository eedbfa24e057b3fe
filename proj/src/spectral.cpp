#include "epsbias/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "epsbias/linalg.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/rng.hpp"

namespace epsbias {

namespace {
constexpr std::uint64_t kCachedProducts = std::uint64_t{1} << 24;
}

WalkOperator::WalkOperator(const BiasedSet& set) : group_(set.group()) {
  auto hist = set.histogram();
  const auto total = static_cast<double>(set.size());
  for (Elem x = 0; x < hist.size(); ++x) {
    if (hist[x] == 0) continue;
    gens_.push_back(x);
    weights_.push_back(static_cast<double>(hist[x]) / total);
  }
  const std::uint64_t n = group_.order();
  if (gens_.size() * n <= kCachedProducts) {
    table_.resize(gens_.size() * n);
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (Elem x = 0; x < n; ++x) table_[i * n + x] = group_.mul(gens_[i], x);
  }
}

Elem WalkOperator::image(std::size_t i, Elem x) const {
  if (!table_.empty()) return table_[i * group_.order() + x];
  return group_.mul(gens_[i], x);
}

Eigen::MatrixXd WalkOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(group_.order());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (Elem x = 0; x < static_cast<Elem>(n); ++x) m(x, image(i, x)) += weights_[i];
  return m;
}

void WalkOperator::apply(const Eigen::VectorXd& f, Eigen::VectorXd& out) const {
  const auto n = static_cast<Elem>(group_.order());
  out.setZero(n);
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    const double w = weights_[i];
    for (Elem x = 0; x < n; ++x) out[x] += w * f[image(i, x)];
  }
}

void WalkOperator::apply_transpose(const Eigen::VectorXd& g, Eigen::VectorXd& out) const {
  const auto n = static_cast<Elem>(group_.order());
  out.setZero(n);
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    const double w = weights_[i];
    for (Elem x = 0; x < n; ++x) out[image(i, x)] += w * g[x];
  }
}

double WalkOperator::row_sum_error() const {
  double total = 0;
  for (double w : weights_) total += w;
  return std::abs(total - 1.0);
}

double WalkOperator::right_translation_error(Elem h) const {
  const auto n = static_cast<Elem>(group_.order());
  // (M R_h f)(x) = E_s f(s x h) and (R_h M f)(x) = E_s f(s x h): compare the
  // operators entrywise through their action on point masses.
  double worst = 0;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n), a(n), b(n), rh(n);
  for (Elem y = 0; y < n; ++y) {
    e.setZero();
    e[y] = 1.0;
    for (Elem x = 0; x < n; ++x) rh[x] = e[group_.mul(x, h)];
    apply(rh, a);
    apply(e, b);
    for (Elem x = 0; x < n; ++x) worst = std::max(worst, std::abs(a[x] - b[group_.mul(x, h)]));
    if (y >= 64) break;  // sampled columns are enough for large groups
  }
  return worst;
}

SpectralReport bias_spectral_report(const BiasedSet& set, const SpectralOptions& opts) {
  const std::uint64_t n = set.group().order();
  SpectralReport rep;
  if (n == 1) {
    rep.method = "trivial";
    return rep;
  }
  bool dense = false;
  switch (opts.method) {
    case SpectralMethod::automatic:
      dense = n <= opts.dense_cap;
      break;
    case SpectralMethod::dense:
      dense = true;
      break;
    case SpectralMethod::iterative:
      dense = false;
      break;
  }
  if (dense && n > opts.dense_cap) {
    throw ResourceError("bias_spectral: order " + std::to_string(n) + " exceeds the dense cap " +
                        std::to_string(opts.dense_cap));
  }
  if (!dense && n > opts.iterative_cap) {
    throw ResourceError("bias_spectral: order " + std::to_string(n) + " exceeds the iterative cap " +
                        std::to_string(opts.iterative_cap));
  }
  WalkOperator walk(set);
  if (dense) {
    Eigen::MatrixXd c = walk.dense();
    c.array() -= 1.0 / static_cast<double>(n);
    if (opts.symmetrized) {
      Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
      rep.bias = std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
      rep.method = "dense-symmetric";
    } else {
      rep.bias = top_singular_dense(c);
      rep.method = "dense-svd";
    }
    rep.bias = std::min(rep.bias, 1.0);
    return rep;
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd tmp(dim), tmp2(dim);
  SymOperator op;
  if (opts.symmetrized) {
    op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      // ((M + M^T)/2)^2 x
      walk.apply(x, tmp);
      walk.apply_transpose(x, tmp2);
      Eigen::VectorXd h = 0.5 * (tmp + tmp2);
      walk.apply(h, tmp);
      walk.apply_transpose(h, tmp2);
      y = 0.5 * (tmp + tmp2);
    };
  } else {
    op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      walk.apply(x, tmp);
      walk.apply_transpose(tmp, y);
    };
  }
  TopEigen top = top_eigen_iterative(dim, op, {ones}, opts.tolerance, opts.max_matvecs);
  if (!top.converged) {
    throw ResourceError("bias_spectral: iterative solver did not reach residual " +
                        std::to_string(opts.tolerance));
  }
  rep.bias = std::min(1.0, std::sqrt(std::max(0.0, top.value + top.residual)));
  rep.residual = top.residual;
  rep.matvecs = top.matvecs;
  rep.method = "iterative";
  return rep;
}

double bias_spectral(const BiasedSet& set, const SpectralOptions& opts) {
  return bias_spectral_report(set, opts).bias;
}

BiasedSet power_average_multiset(const FiniteGroup& g) {
  const std::uint64_t n = g.order();
  std::vector<std::uint64_t> counts(n, 0);
  for (Elem x = 0; x < n; ++x) {
    Elem cur = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
      ++counts[cur];
      cur = g.mul(cur, x);
    }
  }
  const double bound = 1.0 - static_cast<double>(nt::totient(n)) / static_cast<double>(n);
  BiasedSet s = BiasedSet::from_histogram(g, counts, bound);
  s.add_provenance({"power_average_multiset", {{"group", g.descriptor()}}, {}});
  return s;
}

double lemma3_projection_norm(const FiniteGroup& g, const SpectralOptions& opts) {
  if (g.order() == 1) return 0.0;
  if (g.order() > opts.dense_cap) {
    throw ResourceError("lemma3_projection_norm: order exceeds the dense cap");
  }
  return bias_spectral(power_average_multiset(g), opts);
}

ReadOnceReport mz_readonce_check(const FiniteGroup& g, unsigned n, const BiasedSet& t,
                                 std::uint64_t samples, std::uint64_t seed) {
  const auto& fs = t.group().factors();
  bool shape_ok = (n == 1 && t.group().same_group(g)) || fs.size() == n;
  if (fs.size() == n)
    for (const auto& f : fs) shape_ok = shape_ok && f.same_group(g);
  if (!shape_ok) {
    throw StructuralError("mz_readonce_check: set does not live on " + g.descriptor() + "^" + std::to_string(n));
  }
  std::vector<std::vector<Elem>> parts;
  std::vector<double> weights;
  const auto total = static_cast<double>(t.size());
  for (const auto& r : t.runs()) {
    parts.push_back(n == 1 && fs.empty() ? std::vector<Elem>{r.element} : t.group().split(r.element));
    weights.push_back(static_cast<double>(r.count) / total);
  }
  const std::uint64_t order = g.order();
  ReadOnceReport rep;
  std::vector<double> dist(order);
  auto check = [&](const std::vector<unsigned>& b) {
    std::fill(dist.begin(), dist.end(), 0.0);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      Elem prod = 0;
      for (unsigned i = 0; i < n; ++i)
        if (b[i]) prod = g.mul(prod, parts[j][i]);
      dist[prod] += weights[j];
    }
    for (Elem h = 0; h < order; ++h) {
      double dev = std::abs(dist[h] - 1.0 / static_cast<double>(order));
      if (dev > rep.max_deviation || rep.worst_pattern.empty()) {
        rep.max_deviation = dev;
        rep.worst_pattern = b;
        rep.worst_target = h;
      }
    }
    ++rep.patterns_checked;
  };
  const bool exhaustive = n <= 20 && (samples == 0 || (std::uint64_t{1} << n) - 1 <= samples);
  std::vector<unsigned> b(n);
  if (exhaustive) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      for (unsigned i = 0; i < n; ++i) b[i] = (mask >> i) & 1U;
      check(b);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (std::uint64_t s = 0; s < samples; ++s) {
      bool any = false;
      for (unsigned i = 0; i < n; ++i) any = (b[i] = coin(rng) ? 1U : 0U) || any;
      if (!any) b[rng() % n] = 1;
      check(b);
    }
  }
  return rep;
}

SampledSet alon_roichman_sample(const FiniteGroup& g, std::uint64_t k, std::uint64_t seed,
                                const SpectralOptions& opts) {
  if (k == 0) throw StructuralError("alon_roichman_sample: k must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, g.order() - 1);
  std::vector<Elem> elems(k);
  for (auto& e : elems) e = static_cast<Elem>(pick(rng));
  BiasedSet s = BiasedSet::from_elements(g, elems, 1.0);
  double b = bias_spectral(s, opts);
  s.set_claim(std::min(1.0, b), ClaimKind::bound);
  s.set_certified(b);
  s.set_seed(seed);
  s.add_provenance({"alon_roichman_sample", {{"group", g.descriptor()}, {"k", k}}, {}});
  return {std::move(s), b};
}

CayleyEdgeList cayley_edges(const BiasedSet& set, bool symmetrized) {
  CayleyEdgeList out;
  const FiniteGroup& g = set.group();
  out.order = g.order();
  out.set_size = set.size();
  out.symmetrized = symmetrized;
  auto entries = set.elements();
  out.edges.reserve(out.order * entries.size() * (symmetrized ? 2 : 1));
  for (Elem x = 0; x < out.order; ++x) {
    for (Elem s : entries) out.edges.emplace_back(x, g.mul(s, x));
    if (symmetrized)
      for (Elem s : entries) out.edges.emplace_back(x, g.mul(g.inv(s), x));
  }
  return out;
}

void export_cayley(const BiasedSet& set, const std::string& path, bool symmetrized) {
  CayleyEdgeList e = cayley_edges(set, symmetrized);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "cayley " << e.order << " " << e.set_size << " " << (symmetrized ? "symmetrized" : "directed") << "\n";
  for (auto [x, y] : e.edges) os << x << " " << y << "\n";
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

CayleyEdgeList import_cayley(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  CayleyEdgeList out;
  std::string tag, mode;
  if (!(is >> tag >> out.order >> out.set_size >> mode) || tag != "cayley") {
    throw StructuralError(path + ": missing 'cayley <order> <size> <mode>' header");
  }
  out.symmetrized = mode == "symmetrized";
  std::uint64_t x = 0, y = 0;
  while (is >> x >> y) {
    if (x >= out.order || y >= out.order) throw StructuralError(path + ": vertex out of range");
    out.edges.emplace_back(static_cast<Elem>(x), static_cast<Elem>(y));
  }
  return out;
}

double edge_operator_norm(const CayleyEdgeList& edges) {
  const auto n = static_cast<Eigen::Index>(edges.order);
  if (n > 4096) throw ResourceError("edge_operator_norm: order exceeds the dense cap");
  std::vector<double> outdeg(n, 0.0);
  for (auto [x, y] : edges.edges) outdeg[x] += 1.0;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (auto [x, y] : edges.edges) k(x, y) += 1.0 / outdeg[x];
  k.array() -= 1.0 / static_cast<double>(n);
  return top_singular_dense(k);
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

ProductCaseNorms product_case_norms(const BiasedSet& set, std::size_t split) {
  const auto& fs = set.group().factors();
  if (fs.size() < 2 || split == 0 || split >= fs.size()) {
    throw StructuralError("product_case_norms: need a product group and 0 < split < factor count");
  }
  if (set.group().order() > 4096) throw ResourceError("product_case_norms: order exceeds the dense cap");
  std::uint64_t n1 = 1, n2 = 1;
  for (std::size_t i = 0; i < fs.size(); ++i) (i < split ? n1 : n2) *= fs[i].order();
  auto proj = [](std::uint64_t n, bool constant) {
    const auto d = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd j = Eigen::MatrixXd::Constant(d, d, 1.0 / static_cast<double>(n));
    return constant ? j : Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d) - j);
  };
  Eigen::MatrixXd m = WalkOperator(set).dense();
  ProductCaseNorms out;
  out.left_trivial = n2 > 1 ? top_singular_dense(m * kron(proj(n1, true), proj(n2, false))) : 0.0;
  out.right_trivial = n1 > 1 ? top_singular_dense(m * kron(proj(n1, false), proj(n2, true))) : 0.0;
  out.both_nontrivial =
      (n1 > 1 && n2 > 1) ? top_singular_dense(m * kron(proj(n1, false), proj(n2, false))) : 0.0;
  out.overall = std::max({out.left_trivial, out.right_trivial, out.both_nontrivial});
  return out;
}

namespace {

using CMat = Eigen::MatrixXcd;

// irreps[r][x] = matrix of irrep r at element x; irrep 0 is trivial.
std::vector<std::vector<CMat>> factor_irreps(const FiniteGroup& g) {
  const std::uint64_t n = g.order();
  std::vector<std::vector<CMat>> out;
  if (n == 1) {
    out.push_back({CMat::Ones(1, 1)});
    return out;
  }
  auto moduli = g.abelian_moduli();
  if (!moduli.empty()) {
    for (Elem k = 0; k < n; ++k) {
      auto kc = g.coordinates(k);
      std::vector<CMat> rep(n);
      for (Elem x = 0; x < n; ++x) {
        auto xc = g.coordinates(x);
        double phase = 0;
        for (std::size_t i = 0; i < moduli.size(); ++i)
          phase += static_cast<double>((kc[i] * xc[i]) % moduli[i]) / static_cast<double>(moduli[i]);
        rep[x] = CMat::Constant(1, 1, std::polar(1.0, 2.0 * std::numbers::pi * phase));
      }
      out.push_back(std::move(rep));
    }
    return out;
  }
  if (g.kind() == GroupKind::symmetric && n == 6) {
    Eigen::MatrixXd basis(3, 2);
    basis << 1 / std::sqrt(2.0), 1 / std::sqrt(6.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0), 0,
        -2 / std::sqrt(6.0);
    std::vector<CMat> triv(n), sign(n), standard(n);
    for (Elem x = 0; x < n; ++x) {
      auto perm = g.permutation(x);
      Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
      for (unsigned i = 0; i < 3; ++i) p(perm[i], i) = 1.0;
      triv[x] = CMat::Ones(1, 1);
      sign[x] = CMat::Constant(1, 1, p.determinant());
      standard[x] = (basis.transpose() * p * basis).cast<std::complex<double>>();
    }
    out.push_back(std::move(triv));
    out.push_back(std::move(sign));
    out.push_back(std::move(standard));
    return out;
  }
  throw StructuralError("irrep_bias: no explicit irreps for factor " + g.descriptor());
}

CMat ckron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

double irrep_bias(const BiasedSet& set) {
  const FiniteGroup& g = set.group();
  std::vector<FiniteGroup> fs = g.factors();
  if (fs.empty()) fs = {g};
  std::vector<std::vector<std::vector<CMat>>> irreps;
  for (const auto& f : fs) irreps.push_back(factor_irreps(f));
  auto hist = set.histogram();
  std::vector<std::pair<std::vector<Elem>, double>> entries;
  for (Elem x = 0; x < hist.size(); ++x) {
    if (hist[x] == 0) continue;
    entries.emplace_back(g.factors().empty() ? std::vector<Elem>{x} : g.split(x),
                         static_cast<double>(hist[x]) / static_cast<double>(set.size()));
  }
  std::uint64_t tuples = 1;
  for (const auto& r : irreps) tuples *= r.size();
  double worst = 0.0;
  std::vector<std::size_t> idx(fs.size());
  for (std::uint64_t t = 1; t < tuples; ++t) {
    std::uint64_t rest = t;
    for (std::size_t i = fs.size(); i-- > 0;) {
      idx[i] = rest % irreps[i].size();
      rest /= irreps[i].size();
    }
    CMat avg;
    for (const auto& [parts, w] : entries) {
      CMat m = irreps[0][idx[0]][parts[0]];
      for (std::size_t i = 1; i < fs.size(); ++i) m = ckron(m, irreps[i][idx[i]][parts[i]]);
      if (avg.size() == 0) avg = CMat::Zero(m.rows(), m.cols());
      avg += w * m;
    }
    Eigen::JacobiSVD<CMat> svd(avg);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

}  // namespace epsbias
