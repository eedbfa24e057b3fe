#include "epsbias/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "epsbias/finite_field.hpp"
#include "epsbias/number_theory.hpp"
#include "epsbias/rng.hpp"

namespace epsbias {

namespace {

// Moduli of a set's group, required to be n copies of one modulus.
std::uint64_t uniform_modulus(const BiasedSet& s, unsigned& n, const char* op) {
  auto mod = s.group().abelian_moduli();
  if (mod.empty()) throw StructuralError(std::string(op) + ": " + s.group().descriptor() + " is not Z_m^n");
  for (auto m : mod)
    if (m != mod[0]) throw StructuralError(std::string(op) + ": " + s.group().descriptor() + " is not Z_m^n");
  n = static_cast<unsigned>(mod.size());
  return mod[0];
}

FiniteGroup vector_group(std::uint64_t m, unsigned n, bool cyclic_kind) {
  if (cyclic_kind && n == 1) return FiniteGroup::cyclic(m);
  return FiniteGroup::abelian(m, n);
}

// Complex Kahan accumulator.
struct KahanComplex {
  double re = 0, im = 0, cre = 0, cim = 0;
  void add(double x, double y) {
    double yr = x - cre;
    double tr = re + yr;
    cre = (tr - re) - yr;
    re = tr;
    double yi = y - cim;
    double ti = im + yi;
    cim = (ti - im) - yi;
    im = ti;
  }
};

}  // namespace

BiasedSet aghp_construct_q(std::uint64_t p, unsigned n, std::uint64_t q, std::uint64_t field_cap) {
  if (!nt::is_prime(p)) throw StructuralError("aghp: p = " + std::to_string(p) + " is not prime");
  if (n == 0) throw StructuralError("aghp: dimension must be at least 1");
  if (q > field_cap) {
    throw ResourceError("aghp: field size " + std::to_string(q) + " exceeds the cap " + std::to_string(field_cap));
  }
  unsigned k = 0;
  std::uint64_t t = 1;
  while (t < q) {
    t *= p;
    ++k;
  }
  if (t != q || k == 0) throw StructuralError("aghp: q = " + std::to_string(q) + " is not a power of p");
  GaloisField field(p, k);
  FiniteGroup g = FiniteGroup::abelian(p, n);

  std::vector<Run> runs;
  runs.reserve(q * q);
  std::vector<std::uint64_t> coords(n);
  for (std::uint64_t x = 0; x < q; ++x) {
    for (std::uint64_t y = 0; y < q; ++y) {
      std::uint64_t idx = 0;
      for (unsigned i = 0; i < n; ++i) {
        std::uint32_t v;
        if (y == 0) {
          v = 0;
        } else if (x == 0) {
          v = i == 0 ? static_cast<std::uint32_t>(y) : 0;
        } else {
          v = field.exp(static_cast<std::uint64_t>(field.log(static_cast<std::uint32_t>(x))) * i +
                        field.log(static_cast<std::uint32_t>(y)));
        }
        idx = idx * p + field.trace(v);
      }
      append_run(runs, static_cast<Elem>(idx), 1);
    }
  }
  double claimed = static_cast<double>(n - 1) / static_cast<double>(q);
  BiasedSet s(g, std::move(runs), claimed);
  s.add_provenance({"aghp_construct",
                    {{"p", p}, {"n", n}, {"q", q}, {"field_modulus", field.modulus()},
                     {"note", "powering construction, size q^2 rather than O(n)"}},
                    {}});
  return s;
}

BiasedSet aghp_construct(std::uint64_t p, unsigned n, double delta, std::uint64_t field_cap) {
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("aghp: delta must lie in (0,1)");
  if (!nt::is_prime(p)) throw StructuralError("aghp: p = " + std::to_string(p) + " is not prime");
  const double need = static_cast<double>(n) / delta;
  std::uint64_t q = p;
  while (static_cast<double>(q) < need) {
    if (q > field_cap / p) {
      throw ResourceError("aghp: field size needed for n/delta = " + std::to_string(need) +
                          " exceeds the cap " + std::to_string(field_cap));
    }
    q *= p;
  }
  BiasedSet s = aghp_construct_q(p, n, q, field_cap);
  auto prov = s.provenance();
  prov.back().params["delta"] = delta;
  s.set_provenance(prov);
  return s;
}

BiasedSet crt_product(const BiasedSet& s1, const BiasedSet& s2) {
  unsigned n1 = 0, n2 = 0;
  const std::uint64_t m1 = uniform_modulus(s1, n1, "crt_product");
  const std::uint64_t m2 = uniform_modulus(s2, n2, "crt_product");
  if (n1 != n2) throw StructuralError("crt_product: dimensions differ");
  if (nt::gcd(m1, m2) != 1) {
    throw StructuralError("crt_product: moduli " + std::to_string(m1) + " and " + std::to_string(m2) +
                          " are not coprime");
  }
  const bool cyc = s1.group().kind() == GroupKind::cyclic && s2.group().kind() == GroupKind::cyclic;
  FiniteGroup g = vector_group(m1 * m2, n1, cyc);
  std::vector<std::vector<std::uint64_t>> c2;
  c2.reserve(s2.runs().size());
  for (const auto& r : s2.runs()) c2.push_back(s2.group().coordinates(r.element));
  std::vector<Run> runs;
  std::vector<std::uint64_t> c(n1);
  for (const auto& a : s1.runs()) {
    auto ca = s1.group().coordinates(a.element);
    for (std::size_t j = 0; j < s2.runs().size(); ++j) {
      for (unsigned i = 0; i < n1; ++i) c[i] = nt::crt(ca[i], m1, c2[j][i], m2);
      append_run(runs, g.from_coordinates(c), a.count * s2.runs()[j].count);
    }
  }
  BiasedSet out(g, std::move(runs), std::max(s1.claimed_bias(), s2.claimed_bias()));
  out.add_provenance({"crt_product", {{"m1", m1}, {"m2", m2}, {"n", n1}},
                      {s1.content_digest(), s2.content_digest()}});
  return out;
}

BiasedSet quotient_mod(const BiasedSet& s, std::uint64_t d) {
  unsigned n = 0;
  const std::uint64_t m = uniform_modulus(s, n, "quotient_mod");
  if (d == 0 || m % d != 0) {
    throw StructuralError("quotient_mod: " + std::to_string(d) + " does not divide " + std::to_string(m));
  }
  FiniteGroup g = vector_group(d, n, s.group().kind() == GroupKind::cyclic);
  std::vector<Run> runs;
  for (const auto& r : s.runs()) {
    auto c = s.group().coordinates(r.element);
    for (auto& v : c) v %= d;
    append_run(runs, g.from_coordinates(c), r.count);
  }
  BiasedSet out(g, std::move(runs), s.claimed_bias(), s.claim_kind());
  out.add_provenance({"quotient_mod", {{"m", m}, {"d", d}}, {s.content_digest()}});
  return out;
}

CharacterBias char_bias_report(const BiasedSet& s, std::uint64_t character_cap) {
  const auto moduli = s.group().abelian_moduli();
  const std::uint64_t order = s.group().order();
  if (moduli.empty() && order > 1) {
    throw StructuralError("char_bias_exact: " + s.group().descriptor() + " is not a product of cyclic groups");
  }
  if (order > character_cap) {
    throw ResourceError("char_bias_exact: " + std::to_string(order) +
                        " characters exceed the enumeration cap; use the spectral verifier instead");
  }
  long double work = 0;
  for (auto m : moduli) work += static_cast<long double>(order) * static_cast<long double>(m);
  if (work > 4.0e9L) throw ResourceError("char_bias_exact: transform work exceeds the cap");
  CharacterBias out;
  if (order == 1) return out;

  std::vector<std::complex<double>> data(order);
  for (const auto& r : s.runs()) data[r.element] += static_cast<double>(r.count);
  std::vector<std::complex<double>> line;
  std::uint64_t stride = order;
  for (auto m : moduli) {
    stride /= m;
    std::vector<std::complex<double>> roots(m);
    for (std::uint64_t j = 0; j < m; ++j) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      roots[j] = {std::cos(ang), std::sin(ang)};
    }
    line.assign(m, {});
    const std::uint64_t block = stride * m;
    for (std::uint64_t base = 0; base < order; base += block) {
      for (std::uint64_t off = 0; off < stride; ++off) {
        for (std::uint64_t j = 0; j < m; ++j) line[j] = data[base + off + j * stride];
        for (std::uint64_t k = 0; k < m; ++k) {
          KahanComplex acc;
          std::uint64_t e = 0;
          for (std::uint64_t j = 0; j < m; ++j) {
            auto v = line[j] * roots[e];
            acc.add(v.real(), v.imag());
            e += k;
            if (e >= m) e -= m;
          }
          data[base + off + k * stride] = {acc.re, acc.im};
        }
      }
    }
  }
  const double total = static_cast<double>(s.size());
  Elem worst = 1;
  double best = -1.0;
  for (Elem x = 1; x < order; ++x) {
    double v = std::abs(data[x]) / total;
    if (v > best) {
      best = v;
      worst = x;
    }
  }
  out.bias = std::min(1.0, best);
  out.worst_character = s.group().coordinates(worst);
  return out;
}

double char_bias_exact(const BiasedSet& s, std::uint64_t character_cap) {
  return char_bias_report(s, character_cap).bias;
}

SearchResult random_biased_search(std::uint64_t m, unsigned n, double eps, std::uint64_t budget,
                                  std::uint64_t seed) {
  if (!(eps > 0.0)) throw StructuralError("random_biased_search: eps must be positive");
  if (m == 0 || n == 0) throw StructuralError("random_biased_search: need m >= 1 and n >= 1");
  FiniteGroup g = FiniteGroup::abelian(m, n);
  const double log_order = static_cast<double>(n) * std::log(static_cast<double>(m));
  const double raw = std::ceil(8.0 * log_order / (eps * eps));
  const auto sample = static_cast<std::uint64_t>(std::max(1.0, raw));
  auto finish = [&](BiasedSet s, double bias, std::uint64_t attempts, const char* how) {
    s.set_certified(bias);
    s.set_seed(seed);
    s.add_provenance({"random_biased_search",
                      {{"m", m}, {"n", n}, {"eps", eps}, {"budget", budget}, {"attempts", attempts},
                       {"sample_size", sample}, {"path", how}},
                      {}});
    return SearchResult{std::move(s), bias, bias <= eps + kCertificationTolerance, attempts, sample};
  };
  if (eps >= 1.0) {
    return finish(BiasedSet(g, {{0, 1}}, 1.0), g.order() == 1 ? 0.0 : 1.0, 0, "singleton");
  }
  if (static_cast<double>(g.order()) <= raw) {
    BiasedSet whole(g, [&] {
      std::vector<Run> r;
      for (Elem x = 0; x < g.order(); ++x) r.push_back({x, 1});
      return r;
    }(), eps);
    return finish(std::move(whole), 0.0, 0, "whole-group");
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, g.order() - 1);
  std::optional<BiasedSet> best;
  double best_bias = 2.0;
  std::uint64_t attempts = 0;
  while (attempts < std::max<std::uint64_t>(budget, 1)) {
    auto rng = stream_rng(seed, attempts);
    ++attempts;
    std::vector<Elem> elems(sample);
    for (auto& e : elems) e = static_cast<Elem>(pick(rng));
    BiasedSet cand = BiasedSet::from_elements(g, elems, eps);
    double b = char_bias_exact(cand);
    if (b < best_bias) {
      best_bias = b;
      best = std::move(cand);
    }
    if (best_bias <= eps) break;
  }
  return finish(std::move(*best), best_bias, attempts, "sampled");
}

BiasedSet abelian_biased_set(std::uint64_t m, unsigned n, double delta, std::uint64_t seed,
                             std::uint64_t budget, std::uint64_t field_cap) {
  if (!(delta > 0.0 && delta < 1.0)) throw StructuralError("abelian_biased_set: delta must lie in (0,1)");
  if (m == 0 || n == 0) throw StructuralError("abelian_biased_set: need m >= 1 and n >= 1");
  if (m == 1) return BiasedSet(FiniteGroup::abelian(1, n), {{0, 1}}, 0.0);
  std::optional<BiasedSet> acc;
  for (auto [p, e] : nt::factorize(m)) {
    std::optional<BiasedSet> part;
    if (e == 1) {
      part = aghp_construct(p, n, delta, field_cap);
    } else {
      std::uint64_t pe = 1;
      for (unsigned i = 0; i < e; ++i) pe *= p;
      auto found = random_biased_search(pe, n, delta, budget, splitmix64(seed + pe));
      if (!found.success) {
        throw ResourceError("abelian_biased_set: no " + std::to_string(delta) + "-biased set over Z_" +
                            std::to_string(pe) + "^" + std::to_string(n) + " within budget (best " +
                            std::to_string(found.best_bias) + ")");
      }
      part = std::move(found.best);
      part->set_claim(std::min(1.0, delta), ClaimKind::bound);
    }
    acc = acc ? crt_product(*acc, *part) : std::move(*part);
  }
  return std::move(*acc);
}

}  // namespace epsbias
