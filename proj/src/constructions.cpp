#include "epsbias/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "epsbias/abelian.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/rng.hpp"
#include "epsbias/spectral.hpp"

namespace epsbias {

namespace {

constexpr double kLeafDelta = 0.1;
constexpr double kMergeLambda = 1.0 / 8.0;
constexpr std::uint64_t kDuplication = 5;

std::vector<ProvenanceEntry> merged_provenance(std::initializer_list<const BiasedSet*> inputs) {
  std::vector<ProvenanceEntry> out;
  for (const BiasedSet* s : inputs) out.insert(out.end(), s->provenance().begin(), s->provenance().end());
  return out;
}

std::uint64_t ceil_inverse(double eps) {
  return static_cast<std::uint64_t>(std::ceil(1.0 / eps - 1e-9));
}

std::uint64_t checked_min_side(double size, double factor) {
  long double v = static_cast<long double>(size) * factor;
  if (v > 9.0e18L) throw ResourceError("required expander side exceeds 64-bit range");
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9L));
}

// Counts of group elements, sorted by element on output.
class Tally {
 public:
  explicit Tally(std::uint64_t order) {
    if (order > (std::uint64_t{1} << 24)) throw ResourceError("group too large for an element tally");
    counts_.assign(order, 0);
  }
  void add(Elem x, std::uint64_t c) { counts_[x] += c; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  std::vector<std::uint64_t> counts_;
};

void maybe_certify(BiasedSet& s, const ConstructionOptions& opts) {
  if (opts.verify_cap > 0 && s.group().order() <= opts.verify_cap) s.set_certified(bias_spectral(s));
}

json expander_json(const BipartiteExpander& g) {
  return {{"side", g.side},
          {"degree", g.degree},
          {"lambda_claimed", g.claimed_lambda},
          {"lambda_certified", g.certified_lambda},
          {"certification", to_string(g.certification)},
          {"info", g.info}};
}

// {left[u] * right[v] : (u, v) edge} with both sides tiled.
BiasedSet edge_products(const BiasedSet& left, const BiasedSet& right, const BipartiteExpander& gamma,
                        double claim) {
  const FiniteGroup& g = left.group();
  const auto lu = left.elements();
  const auto rv = right.elements();
  Tally tally(g.order());
  for (const auto& e : gamma.edges) tally.add(g.mul(lu[e.u % lu.size()], rv[e.v % rv.size()]), e.mult);
  return BiasedSet::from_histogram(g, tally.counts(), claim);
}

}  // namespace

double mz_reference_term(std::uint64_t order) {
  return 1.0 - static_cast<double>(nt::totient(order)) / static_cast<double>(order);
}

BiasedSet mz_set(const FiniteGroup& g, unsigned n, const BiasedSet& s) {
  if (n == 0) throw StructuralError("mz_set: n must be positive");
  const std::uint64_t m = g.order();
  const auto moduli = s.group().abelian_moduli();
  if (moduli != std::vector<std::uint64_t>(n, m)) {
    throw StructuralError("mz_set: exponent set must live over Z_" + std::to_string(m) + "^" + std::to_string(n) +
                          ", got " + s.group().descriptor());
  }
  FiniteGroup out_group = FiniteGroup::power(g, n);
  std::vector<std::vector<std::uint64_t>> coords;
  coords.reserve(s.runs().size());
  for (const auto& r : s.runs()) coords.push_back(s.group().coordinates(r.element));
  std::vector<Run> runs;
  std::vector<Elem> parts(n);
  for (Elem x = 0; x < m; ++x) {
    for (std::size_t j = 0; j < s.runs().size(); ++j) {
      for (unsigned i = 0; i < n; ++i) parts[i] = g.pow(x, static_cast<std::int64_t>(coords[j][i]));
      append_run(runs, out_group.join(parts), s.runs()[j].count);
    }
  }
  const double eps_s = effective_bias(s);
  BiasedSet out(out_group, std::move(runs), std::min(1.0, mz_reference_term(m) + eps_s), ClaimKind::reference);
  out.set_provenance(s.provenance());
  out.add_provenance({"mz_set",
                      {{"n", n},
                       {"group", g.descriptor()},
                       {"eps_s", eps_s},
                       {"reference_term", mz_reference_term(m)},
                       {"note", "theorem constant not explicit; claim is a reference value and the spectral "
                                "certificate is authoritative"}},
                      {s.content_digest()}});
  return out;
}

TilingMap tile(char side, std::uint64_t vertices, std::uint64_t set_size) {
  if (set_size == 0) throw StructuralError("tile: empty set");
  TilingMap t;
  t.side = side;
  t.vertices = vertices;
  t.set_size = set_size;
  t.uncovered_count = vertices % set_size;
  return t;
}

double effective_bias(const BiasedSet& s) {
  if (s.certified_bias()) return std::min(*s.certified_bias(), s.claimed_bias());
  return s.claimed_bias();
}

BiasedSet amplify_step(const BiasedSet& s, double eps, const ConstructionOptions& opts) {
  if (!(eps > 0.0 && eps < 1.0)) throw StructuralError("amplify_step: eps must lie in (0,1)");
  const std::uint64_t min_side = checked_min_side(static_cast<double>(s.size()), static_cast<double>(ceil_inverse(eps)));
  const PrimePair pq = find_primes(min_side, eps * eps);
  BipartiteExpander gamma = lps_graph(pq.p, pq.q, true, opts.certify);
  if (gamma.certified_lambda > eps * eps + kCertificationTolerance) {
    throw CertificationError("amplify_step: expander lambda " + std::to_string(gamma.certified_lambda) +
                             " exceeds eps^2");
  }
  const TilingMap tiling = tile('U', gamma.side, s.size());
  BiasedSet out = edge_products(s, s, gamma, std::min(1.0, 5.0 * eps * eps));
  const double ratio = static_cast<double>(out.size()) / static_cast<double>(s.size());
  out.set_provenance(s.provenance());
  out.add_provenance({"amplify_step",
                      {{"eps", eps},
                       {"p", pq.p},
                       {"q", pq.q},
                       {"expander", expander_json(gamma)},
                       {"uncovered_per_side", tiling.uncovered_count},
                       {"uncovered_fraction", tiling.uncovered_fraction()},
                       {"size_in", s.size()},
                       {"size_out", out.size()},
                       {"growth_constant", ratio * std::pow(eps, 5)}},
                      {s.content_digest()}});
  return out;
}

double schedule_epsilon(unsigned t) { return std::exp2(-std::exp2(static_cast<double>(t))) / 5.0; }

unsigned amplification_steps(double target) {
  if (!(target > 0.0)) throw StructuralError("amplification target must be positive");
  if (target >= 0.1) return 0;
  unsigned t = 1;
  while (schedule_epsilon(t) > target) ++t;
  return t;
}

json AmplificationSchedule::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    steps_json.push_back({{"t", s.t},
                          {"eps_in", s.eps_in},
                          {"eps_out", s.eps_out},
                          {"p", s.p},
                          {"q", s.q},
                          {"side", s.side},
                          {"size_in", s.size_in},
                          {"size_out", s.size_out},
                          {"constant", s.constant}});
  }
  return {{"eps0", eps0}, {"target", target}, {"steps", steps_json}};
}

AmplificationSchedule plan_amplification(std::uint64_t input_size, double target) {
  AmplificationSchedule plan;
  plan.target = target;
  const unsigned steps = amplification_steps(target);
  double size = static_cast<double>(input_size);
  for (unsigned t = 1; t <= steps; ++t) {
    AmplificationStep st;
    st.t = t;
    st.eps_in = schedule_epsilon(t - 1);
    st.eps_out = schedule_epsilon(t);
    const std::uint64_t min_side = checked_min_side(size, static_cast<double>(ceil_inverse(st.eps_in)));
    const PrimePair pq = find_primes(min_side, st.eps_in * st.eps_in);
    st.p = pq.p;
    st.q = pq.q;
    const double p = static_cast<double>(pq.p);
    st.side = p * (p * p - 1.0) / 2.0;
    st.size_in = size;
    st.size_out = st.side * static_cast<double>(pq.q + 1);
    st.constant = st.size_out / st.size_in * std::pow(st.eps_in, 5);
    size = st.size_out;
    plan.steps.push_back(st);
  }
  return plan;
}

BiasedSet amplify(const BiasedSet& s, double target, const ConstructionOptions& opts) {
  if (target >= 0.1) {
    BiasedSet out = s;
    out.add_provenance({"amplify", {{"target", target}, {"steps", 0}, {"note", "target at or above 1/10; unchanged"}},
                        {s.content_digest()}});
    return out;
  }
  const double eps = effective_bias(s);
  if (eps > 0.1 + kCertificationTolerance) {
    throw StructuralError("amplify: input bias " + std::to_string(eps) + " exceeds 1/10");
  }
  const unsigned steps = amplification_steps(target);
  BiasedSet cur = s;
  for (unsigned t = 1; t <= steps; ++t) {
    cur = amplify_step(cur, schedule_epsilon(t - 1), opts);
    cur.set_claim(schedule_epsilon(t), ClaimKind::bound);
  }
  cur.add_provenance({"amplify", {{"target", target}, {"steps", steps}}, {s.content_digest()}});
  return cur;
}

BiasedSet bridge_round(const BiasedSet& s, double eps, double alpha, const ConstructionOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw StructuralError("bridge_round: alpha must lie in (0,1)");
  const std::uint64_t min_side =
      checked_min_side(static_cast<double>(s.size()), static_cast<double>(ceil_inverse(alpha)));
  const PrimePair pq = find_primes(min_side, alpha);
  BipartiteExpander gamma = lps_graph(pq.p, pq.q, true, opts.certify);
  const double claim = std::min(1.0, (alpha + eps) * (alpha + eps) + gamma.certified_lambda);
  const TilingMap tiling = tile('U', gamma.side, s.size());
  BiasedSet out = edge_products(s, s, gamma, claim);
  out.set_provenance(s.provenance());
  out.add_provenance({"bridge_round",
                      {{"eps", eps},
                       {"alpha", alpha},
                       {"p", pq.p},
                       {"q", pq.q},
                       {"expander", expander_json(gamma)},
                       {"uncovered_fraction", tiling.uncovered_fraction()}},
                      {s.content_digest()}});
  return out;
}

std::vector<double> bridge_schedule(double eps0, double alpha, double lambda) {
  if (!(eps0 >= 0.0 && eps0 < 1.0)) throw StructuralError("bridge_schedule: eps0 must lie in [0,1)");
  std::vector<double> seq{eps0};
  while (seq.back() > 0.1) {
    const double e = seq.back();
    const double next = (alpha + e) * (alpha + e) + lambda;
    if (next >= e) {
      throw StructuralError("bridge_schedule: no contraction at eps = " + std::to_string(e) +
                            " with alpha = " + std::to_string(alpha));
    }
    seq.push_back(next);
    if (seq.size() > 100000) throw ResourceError("bridge_schedule: too many rounds");
  }
  return seq;
}

BiasedSet bridge_constant_gap(const BiasedSet& s0, double alpha, const ConstructionOptions& opts) {
  double eps = effective_bias(s0);
  const auto predicted = bridge_schedule(eps, alpha, alpha);
  BiasedSet cur = s0;
  for (std::size_t round = 1; eps > 0.1; ++round) {
    if (round > predicted.size() + 4) throw std::logic_error("bridge_constant_gap: schedule overrun");
    cur = bridge_round(cur, eps, alpha, opts);
    eps = cur.claimed_bias();
  }
  return cur;
}

double Claim6Terms::bound() const { return std::max({left, right, mixed}); }

Claim6Terms claim6_terms(double eps1, double eps2, double ratio, double lambda) {
  return {eps2, eps1 + ratio, lambda + eps2 * (eps1 + ratio)};
}

double claim6_bound(double eps1, double eps2, double ratio, double lambda) {
  return claim6_terms(eps1, eps2, ratio, lambda).bound();
}

BiasedSet tensor_combine(const BiasedSet& s1, const BiasedSet& s2, const BipartiteExpander& gamma) {
  if (s1.size() > s2.size()) throw StructuralError("tensor_combine: |S1| > |S2|, swap the inputs");
  if (gamma.side != s2.size()) {
    throw StructuralError("tensor_combine: expander side " + std::to_string(gamma.side) + " differs from |S2| = " +
                          std::to_string(s2.size()));
  }
  if (gamma.certification == CertMethod::none) throw StructuralError("tensor_combine: expander is not certified");
  FiniteGroup out_group = FiniteGroup::direct_product({s1.group(), s2.group()});
  const auto a = s1.elements();
  const auto b = s2.elements();
  std::vector<Run> runs;
  runs.reserve(gamma.edges.size());
  for (const auto& e : gamma.edges) append_run(runs, out_group.join({a[e.u % a.size()], b[e.v]}), e.mult);
  const double eps1 = effective_bias(s1);
  const double eps2 = effective_bias(s2);
  const double ratio = static_cast<double>(s1.size()) / static_cast<double>(s2.size());
  const Claim6Terms terms = claim6_terms(eps1, eps2, ratio, gamma.certified_lambda);
  const bool bound = s1.claim_kind() == ClaimKind::bound && s2.claim_kind() == ClaimKind::bound;
  BiasedSet out(out_group, std::move(runs), std::min(1.0, terms.bound()),
                bound ? ClaimKind::bound : ClaimKind::reference);
  out.set_provenance(merged_provenance({&s1, &s2}));
  out.add_provenance({"tensor_combine",
                      {{"eps1", eps1},
                       {"eps2", eps2},
                       {"ratio", ratio},
                       {"terms", {terms.left, terms.right, terms.mixed}},
                       {"uncovered_u", tile('U', gamma.side, s1.size()).uncovered_count},
                       {"expander", expander_json(gamma)}},
                      {s1.content_digest(), s2.content_digest()}});
  return out;
}

namespace {

FiniteGroup product_of(const std::vector<FiniteGroup>& groups, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return groups[begin];
  return FiniteGroup::direct_product(std::vector<FiniteGroup>(groups.begin() + begin, groups.begin() + end));
}

struct DirectBuilder {
  const std::vector<FiniteGroup>& groups;
  const ConstructionOptions& opts;
  json ledger = json::array();
  std::uint32_t max_degree = 0;

  BiasedSet build(std::size_t begin, std::size_t end, unsigned depth) {
    if (end - begin == 1) return BiasedSet::whole_group(groups[begin]);
    const std::size_t mid = begin + (end - begin + 1) / 2;
    BiasedSet a = build(begin, mid, depth + 1);
    BiasedSet b = build(mid, end, depth + 1);
    const bool swapped = a.size() > b.size();
    const BiasedSet& small = swapped ? b : a;
    const BiasedSet large = (swapped ? a : b).repeated(kDuplication);
    const std::uint64_t seed = splitmix64(opts.seed ^ (begin * 0x10001ULL + end));
    RandomExpanderResult gamma = smallest_degree_expander(static_cast<std::uint32_t>(large.size()), kMergeLambda,
                                                          seed, opts.expander_budget, opts.certify);
    max_degree = std::max(max_degree, gamma.graph.degree);
    BiasedSet comb = tensor_combine(small, large, gamma.graph);

    // Back to A x B order on the flattened product.
    FiniteGroup flat = product_of(groups, begin, end);
    const std::uint64_t order_b = b.group().order();
    const std::uint64_t order_large = large.group().order();
    std::vector<Run> runs;
    runs.reserve(comb.runs().size());
    for (const auto& r : comb.runs()) {
      const std::uint64_t x = r.element / order_large;  // small side
      const std::uint64_t y = r.element % order_large;  // large side
      const std::uint64_t ea = swapped ? y : x;
      const std::uint64_t eb = swapped ? x : y;
      append_run(runs, static_cast<Elem>(ea * order_b + eb), r.count);
    }
    const double ratio = static_cast<double>(small.size()) / static_cast<double>(large.size());
    const Claim6Terms terms = claim6_terms(effective_bias(small), effective_bias(large), ratio,
                                           gamma.graph.certified_lambda);
    const double claim = std::min(terms.bound(), 0.5);
    BiasedSet out(flat, std::move(runs), claim, ClaimKind::bound);
    out.set_provenance(comb.provenance());
    maybe_certify(out, opts);
    const char* which = terms.bound() == terms.left ? "left" : (terms.bound() == terms.right ? "right" : "mixed");
    json entry = {{"factors", {begin, end}},
                  {"depth", depth},
                  {"swapped", swapped},
                  {"small_size", small.size()},
                  {"large_size", large.size()},
                  {"ratio", ratio},
                  {"eps_small", effective_bias(small)},
                  {"eps_large", effective_bias(large)},
                  {"lambda", gamma.graph.certified_lambda},
                  {"degree", gamma.graph.degree},
                  {"expander_attempts", gamma.attempts},
                  {"terms", {terms.left, terms.right, terms.mixed}},
                  {"dominant_term", which},
                  {"claim6", terms.bound()},
                  {"claim", claim},
                  {"size", out.size()}};
    if (out.certified_bias()) entry["certified"] = *out.certified_bias();
    ledger.push_back(entry);
    out.add_provenance({"direct_product_merge", entry, {a.content_digest(), b.content_digest()}});
    return out;
  }
};

}  // namespace

DirectProductResult direct_product_set(const std::vector<FiniteGroup>& groups, const ConstructionOptions& opts) {
  if (groups.empty()) throw StructuralError("direct_product_set: need at least one group");
  DirectBuilder builder{groups, opts};
  BiasedSet set = builder.build(0, groups.size(), 0);
  std::uint64_t max_order = 0;
  for (const auto& g : groups) max_order = std::max(max_order, g.order());
  const unsigned levels = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(groups.size()))));
  const double size_bound = std::pow(5.0 * builder.max_degree, levels) * static_cast<double>(max_order);
  json ledger = {{"merges", builder.ledger},
                 {"levels", levels},
                 {"max_degree", builder.max_degree},
                 {"size", set.size()},
                 {"size_bound", groups.size() == 1 ? static_cast<double>(max_order) : size_bound},
                 {"geometric_series", "1/5 + (1/5)^2 + ... = 1/4"},
                 {"tiling_rule", "vertex i takes entry i mod |S|; earlier-stage blocks come first"}};
  if (!builder.ledger.empty()) ledger["root_case"] = builder.ledger.back()["dominant_term"];
  set.add_provenance({"direct_product_set", ledger, {}});
  if (groups.size() == 1) maybe_certify(set, opts);
  return {std::move(set), std::move(ledger), builder.max_degree};
}

BiasedSet abelian_leaf(const FiniteGroup& g, double delta, const ConstructionOptions& opts) {
  if (!g.is_abelian()) throw StructuralError("abelian_leaf: factor " + g.descriptor() + " is not abelian");
  if (g.order() == 1) {
    BiasedSet s = BiasedSet::from_elements(g, {0}, 0.0);
    s.add_provenance({"abelian_leaf", {{"note", "trivial group"}}, {}});
    return s;
  }
  Subgroup all(g.order());
  std::iota(all.begin(), all.end(), Elem{0});
  const std::vector<Elem> gens = generating_set(g, all);
  std::uint64_t e = 1;
  for (Elem x : gens) e = std::lcm(e, g.element_order(x));
  const auto t = static_cast<unsigned>(gens.size());
  BiasedSet base = nt::is_prime(e) ? aghp_construct(e, t, delta, kDefaultFieldCap)
                                   : abelian_biased_set(e, t, delta, opts.seed);
  std::vector<Run> runs;
  runs.reserve(base.runs().size());
  for (const auto& r : base.runs()) {
    const auto c = base.group().coordinates(r.element);
    Elem x = 0;
    for (unsigned i = 0; i < t; ++i) x = g.mul(x, g.pow(gens[i], static_cast<std::int64_t>(c[i])));
    append_run(runs, x, r.count);
  }
  BiasedSet out(g, std::move(runs), base.claimed_bias(), base.claim_kind());
  out.set_provenance(base.provenance());
  out.add_provenance({"abelian_leaf",
                      {{"group", g.descriptor()}, {"exponent", e}, {"rank", t}, {"generators", gens}, {"delta", delta}},
                      {base.content_digest()}});
  return out;
}

namespace {

struct Segment {
  FiniteGroup sub;    // G^(i) as a group
  FiniteGroup group;  // G^(i) / G^(j)
};

struct SolvableBuilder {
  const FiniteGroup& g;
  const ConstructionOptions& opts;
  SubgroupChain chain;
  double alpha = 0.0;
  double alpha_limit = 0.0;
  std::map<std::pair<unsigned, unsigned>, Segment> cache;
  json ledger = json::array();
  bool ok = true;

  const Segment& segment(unsigned i, unsigned j) {
    auto it = cache.find({i, j});
    if (it != cache.end()) return it->second;
    FiniteGroup sub = subgroup_group(g, chain.members[i]);
    Subgroup inner;
    inner.reserve(chain.members[j].size());
    for (Elem x : chain.members[j]) inner.push_back(sub.from_parent(x));
    std::sort(inner.begin(), inner.end());
    FiniteGroup quot = quotient_group(sub, inner);
    return cache.emplace(std::make_pair(i, j), Segment{sub, quot}).first->second;
  }

  Elem to_g(const Segment& s, Elem x) const { return s.sub.to_parent(s.group.to_parent(x)); }
  Elem from_g(const Segment& s, Elem x) const { return s.group.from_parent(s.sub.from_parent(x)); }

  BiasedSet build(unsigned i, unsigned j) {
    const Segment& seg = segment(i, j);
    if (j - i == 1) return abelian_leaf(seg.group, kLeafDelta, opts);
    const unsigned mid = i + (j - i + 1) / 2;
    BiasedSet minus = build(mid, j);
    BiasedSet plus = build(i, mid);
    const Segment& seg_minus = segment(mid, j);
    const Segment& seg_plus = segment(i, mid);
    const Segment& here = segment(i, j);
    std::vector<Elem> lo, hi;
    lo.reserve(minus.size());
    for (Elem x : minus.elements()) lo.push_back(from_g(here, to_g(seg_minus, x)));
    hi.reserve(plus.size());
    for (Elem y : plus.elements()) hi.push_back(from_g(here, to_g(seg_plus, y)));

    const double larger = static_cast<double>(std::max(minus.size(), plus.size()));
    const std::uint64_t min_side = checked_min_side(larger, 1.0 / alpha);
    const PrimePair pq = find_primes(min_side, alpha);
    BipartiteExpander gamma = lps_graph(pq.p, pq.q, true, opts.certify);
    Tally tally(here.group.order());
    for (const auto& e : gamma.edges) tally.add(here.group.mul(lo[e.u % lo.size()], hi[e.v % hi.size()]), e.mult);

    const double eps_children = std::max(minus.claimed_bias(), plus.claimed_bias());
    const double claim = std::min(1.0, eps_children + 2.0 * alpha);
    BiasedSet out = BiasedSet::from_histogram(here.group, tally.counts(), claim);
    out.set_provenance(merged_provenance({&minus, &plus}));
    maybe_certify(out, opts);

    json entry = {{"segment", {i, j}},
                  {"split", mid},
                  {"alpha", alpha},
                  {"alpha_limit", alpha_limit},
                  {"p", pq.p},
                  {"q", pq.q},
                  {"lambda", gamma.certified_lambda},
                  {"side", gamma.side},
                  {"minus_size", minus.size()},
                  {"plus_size", plus.size()},
                  {"uncovered_u", tile('U', gamma.side, minus.size()).uncovered_fraction()},
                  {"uncovered_v", tile('V', gamma.side, plus.size()).uncovered_fraction()},
                  {"eps_minus", minus.claimed_bias()},
                  {"eps_plus", plus.claimed_bias()},
                  {"eps_children", eps_children},
                  {"claim", claim},
                  {"size", out.size()}};
    bool level_ok = alpha < alpha_limit && gamma.certified_lambda <= alpha + kCertificationTolerance;
    if (out.certified_bias()) {
      entry["certified"] = *out.certified_bias();
      level_ok = level_ok && *out.certified_bias() <= eps_children + 2.0 * alpha + kCertificationTolerance;
    }
    entry["ok"] = level_ok;
    ok = ok && level_ok;
    ledger.push_back(entry);
    out.add_provenance({"solvable_merge", entry, {minus.content_digest(), plus.content_digest()}});
    return out;
  }
};

}  // namespace

SolvableResult solvable_set_base(const FiniteGroup& g, const ConstructionOptions& opts) {
  SolvableBuilder b{g, opts, derived_series(g), 0.0, 0.0, {}, json::array(), true};
  if (!b.chain.solvable) throw StructuralError("solvable_set: " + g.descriptor() + " is not solvable");
  const unsigned ell = b.chain.length;
  const double log_ell = std::max(1.0, std::ceil(std::log2(std::max(1.0, static_cast<double>(ell)))));
  b.alpha = 1.0 / (5.0 * log_ell);
  b.alpha_limit = 1.0 / (4.0 * log_ell);
  BiasedSet set = BiasedSet::from_elements(g, {0}, 0.0);
  if (ell == 1) {
    set = abelian_leaf(g, kLeafDelta, opts);
  } else if (ell >= 2) {
    BiasedSet root = b.build(0, ell);
    const Segment& top = b.segment(0, ell);
    Tally tally(g.order());
    for (const auto& r : root.runs()) tally.add(b.to_g(top, r.element), r.count);
    set = BiasedSet::from_histogram(g, tally.counts(), root.claimed_bias());
    set.set_provenance(root.provenance());
  }
  if (set.claimed_bias() > 0.5 + 1e-12) throw std::logic_error("solvable_set_base: claim above 1/2");
  maybe_certify(set, opts);
  json ledger = {{"derived_length", ell},
                 {"alpha", b.alpha},
                 {"alpha_limit", b.alpha_limit},
                 {"leaf_delta", kLeafDelta},
                 {"levels", b.ledger},
                 {"ok", b.ok}};
  set.add_provenance({"solvable_set_base", {{"derived_length", ell}, {"alpha", b.alpha}, {"ok", b.ok}}, {}});
  return {std::move(set), std::move(ledger), b.ok};
}

BiasedSet solvable_set(const FiniteGroup& g, double target, const ConstructionOptions& opts) {
  if (!(target > 0.0)) throw StructuralError("solvable_set: target must be positive");
  if (g.is_abelian()) return abelian_leaf(g, std::min(target, 1.0), opts);
  BiasedSet cur = solvable_set_base(g, opts).set;
  if (target >= effective_bias(cur)) return cur;
  if (effective_bias(cur) > 0.1) {
    const double eps = effective_bias(cur);
    double alpha = 0.0;
    for (double a : {0.05, 0.02, 0.01, 0.005, 0.002}) {
      if ((a + eps) * (a + eps) + a < eps) {
        alpha = a;
        break;
      }
    }
    if (alpha == 0.0) throw StructuralError("solvable_set: no contraction available at bias " + std::to_string(eps));
    cur = bridge_constant_gap(cur, alpha, opts);
  }
  return amplify(cur, target, opts);
}

}  // namespace epsbias
