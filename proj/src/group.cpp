#include "epsbias/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "epsbias/error.hpp"
#include "epsbias/number_theory.hpp"

namespace epsbias {

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::cyclic: return "cyclic";
    case GroupKind::abelian_vector: return "abelian-vector";
    case GroupKind::direct_product: return "direct-product";
    case GroupKind::symmetric: return "symmetric";
    case GroupKind::dihedral: return "dihedral";
    case GroupKind::unitriangular: return "unitriangular";
    case GroupKind::quotient: return "quotient";
    case GroupKind::subgroup: return "subgroup";
  }
  return "unknown";
}

namespace detail {

struct GroupImpl {
  GroupKind kind = GroupKind::cyclic;
  std::uint64_t order = 1;
  std::string descriptor;
  bool abelian = false;
  std::vector<std::uint64_t> moduli;
  std::vector<FiniteGroup> factors;
  std::vector<Elem> table;
  std::vector<Elem> inverse;

  virtual ~GroupImpl() = default;
  virtual Elem mul_raw(Elem a, Elem b) const = 0;
  virtual Elem inv_raw(Elem a) const = 0;
  virtual std::string label(Elem x) const { return std::to_string(x); }
  virtual const FiniteGroup* parent() const { return nullptr; }
  virtual Elem to_parent(Elem) const {
    throw StructuralError("group " + descriptor + " has no parent group");
  }
  virtual Elem from_parent(Elem) const {
    throw StructuralError("group " + descriptor + " has no parent group");
  }

  Elem mul(Elem a, Elem b) const {
    if (!table.empty()) return table[static_cast<std::size_t>(a) * order + b];
    return mul_raw(a, b);
  }
  Elem inv(Elem a) const {
    if (!inverse.empty()) return inverse[a];
    return inv_raw(a);
  }

  void finalize() {
    if (order > kTableOrder) return;
    const auto n = static_cast<Elem>(order);
    std::vector<Elem> t(static_cast<std::size_t>(n) * n);
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b) t[static_cast<std::size_t>(a) * n + b] = mul_raw(a, b);
    std::vector<Elem> iv(n);
    for (Elem a = 0; a < n; ++a) iv[a] = inv_raw(a);
    table = std::move(t);
    inverse = std::move(iv);
  }
};

namespace {

void check_order(long double order, const std::string& what) {
  if (order >= static_cast<long double>(std::numeric_limits<Elem>::max())) {
    throw ResourceError(what + ": group order exceeds the 2^32 index range");
  }
}

// Mixed-radix abelian group: cyclic(m), abelian(m, n) and friends.
struct AbelianImpl : GroupImpl {
  Elem mul_raw(Elem a, Elem b) const override {
    std::uint64_t result = 0;
    std::uint64_t place = 1;
    for (std::size_t i = moduli.size(); i-- > 0;) {
      const std::uint64_t m = moduli[i];
      std::uint64_t da = (a / place) % m;
      std::uint64_t db = (b / place) % m;
      result += ((da + db) % m) * place;
      place *= m;
    }
    return static_cast<Elem>(result);
  }
  Elem inv_raw(Elem a) const override {
    std::uint64_t result = 0;
    std::uint64_t place = 1;
    for (std::size_t i = moduli.size(); i-- > 0;) {
      const std::uint64_t m = moduli[i];
      std::uint64_t da = (a / place) % m;
      result += ((m - da) % m) * place;
      place *= m;
    }
    return static_cast<Elem>(result);
  }
  std::string label(Elem x) const override {
    if (moduli.size() == 1) return std::to_string(x);
    std::string out = "(";
    std::uint64_t place = order;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      place /= moduli[i];
      if (i) out += ",";
      out += std::to_string((x / place) % moduli[i]);
    }
    return out + ")";
  }
};

struct ProductImpl : GroupImpl {
  std::vector<std::uint64_t> places;  // place value of each factor

  Elem mul_raw(Elem a, Elem b) const override {
    std::uint64_t result = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const std::uint64_t m = factors[i].order();
      auto da = static_cast<Elem>((a / places[i]) % m);
      auto db = static_cast<Elem>((b / places[i]) % m);
      result += factors[i].mul(da, db) * places[i];
    }
    return static_cast<Elem>(result);
  }
  Elem inv_raw(Elem a) const override {
    std::uint64_t result = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const std::uint64_t m = factors[i].order();
      auto da = static_cast<Elem>((a / places[i]) % m);
      result += factors[i].inv(da) * places[i];
    }
    return static_cast<Elem>(result);
  }
  std::string label(Elem x) const override {
    std::string out = "(";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += ",";
      out += factors[i].label(static_cast<Elem>((x / places[i]) % factors[i].order()));
    }
    return out + ")";
  }
};

struct SymmetricImpl : GroupImpl {
  unsigned k = 0;
  std::vector<std::uint64_t> fact;

  std::vector<unsigned> unrank(Elem r) const {
    std::vector<unsigned> avail(k);
    std::iota(avail.begin(), avail.end(), 0U);
    std::vector<unsigned> perm(k);
    std::uint64_t rest = r;
    for (unsigned i = 0; i < k; ++i) {
      std::uint64_t f = fact[k - 1 - i];
      std::uint64_t pos = rest / f;
      rest %= f;
      perm[i] = avail[pos];
      avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return perm;
  }
  Elem rank(const std::vector<unsigned>& perm) const {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < k; ++i) {
      unsigned smaller = 0;
      for (unsigned j = i + 1; j < k; ++j)
        if (perm[j] < perm[i]) ++smaller;
      r += smaller * fact[k - 1 - i];
    }
    return static_cast<Elem>(r);
  }
  Elem mul_raw(Elem a, Elem b) const override {
    auto f = unrank(a);
    auto g = unrank(b);
    std::vector<unsigned> h(k);
    for (unsigned x = 0; x < k; ++x) h[x] = f[g[x]];
    return rank(h);
  }
  Elem inv_raw(Elem a) const override {
    auto f = unrank(a);
    std::vector<unsigned> h(k);
    for (unsigned x = 0; x < k; ++x) h[f[x]] = x;
    return rank(h);
  }
  std::string label(Elem x) const override {
    auto f = unrank(x);
    std::string out = "[";
    for (unsigned i = 0; i < k; ++i) {
      if (i) out += " ";
      out += std::to_string(f[i]);
    }
    return out + "]";
  }
};

struct DihedralImpl : GroupImpl {
  std::uint64_t k = 1;
  Elem mul_raw(Elem x, Elem y) const override {
    std::uint64_t a = x % k, b = x / k, c = y % k, d = y / k;
    std::uint64_t rot = b == 0 ? (a + c) % k : (a + k - c) % k;
    return static_cast<Elem>(rot + k * ((b + d) % 2));
  }
  Elem inv_raw(Elem x) const override {
    std::uint64_t a = x % k, b = x / k;
    if (b == 1) return x;
    return static_cast<Elem>((k - a) % k);
  }
  std::string label(Elem x) const override {
    std::uint64_t a = x % k, b = x / k;
    return "r^" + std::to_string(a) + (b ? " s" : "");
  }
};

struct UnitriangularImpl : GroupImpl {
  std::uint64_t p = 2;
  unsigned n = 1;
  std::vector<std::pair<unsigned, unsigned>> slots;  // above-diagonal positions

  std::vector<std::uint64_t> decode(Elem x) const {
    std::vector<std::uint64_t> m(static_cast<std::size_t>(n) * n, 0);
    for (unsigned i = 0; i < n; ++i) m[i * n + i] = 1;
    std::uint64_t rest = x;
    for (std::size_t s = slots.size(); s-- > 0;) {
      m[slots[s].first * n + slots[s].second] = rest % p;
      rest /= p;
    }
    return m;
  }
  Elem encode(const std::vector<std::uint64_t>& m) const {
    std::uint64_t r = 0;
    for (auto [i, j] : slots) r = r * p + m[i * n + j];
    return static_cast<Elem>(r);
  }
  Elem mul_raw(Elem x, Elem y) const override {
    auto a = decode(x);
    auto b = decode(y);
    std::vector<std::uint64_t> c(static_cast<std::size_t>(n) * n, 0);
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = i; j < n; ++j) {
        std::uint64_t s = 0;
        for (unsigned t = i; t <= j; ++t) s += a[i * n + t] * b[t * n + j];
        c[i * n + j] = s % p;
      }
    return encode(c);
  }
  Elem inv_raw(Elem x) const override {
    auto a = decode(x);
    std::vector<std::uint64_t> r(static_cast<std::size_t>(n) * n, 0);
    for (unsigned i = 0; i < n; ++i) r[i * n + i] = 1;
    for (unsigned i = n; i-- > 0;)
      for (unsigned j = i + 1; j < n; ++j) {
        std::uint64_t s = a[i * n + j];
        for (unsigned t = i + 1; t < j; ++t) s += a[i * n + t] * r[t * n + j];
        r[i * n + j] = (p - s % p) % p;
      }
    return encode(r);
  }
  std::string label(Elem x) const override {
    auto m = decode(x);
    std::string out = "[";
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (s) out += " ";
      out += std::to_string(m[slots[s].first * n + slots[s].second]);
    }
    return out + "]";
  }
};

struct QuotientImpl : GroupImpl {
  FiniteGroup par;
  std::vector<Elem> reps;
  std::vector<Elem> coset_of;
  explicit QuotientImpl(FiniteGroup p) : par(std::move(p)) {}

  Elem mul_raw(Elem a, Elem b) const override { return coset_of[par.mul(reps[a], reps[b])]; }
  Elem inv_raw(Elem a) const override { return coset_of[par.inv(reps[a])]; }
  std::string label(Elem x) const override { return par.label(reps[x]) + "N"; }
  const FiniteGroup* parent() const override { return &par; }
  Elem to_parent(Elem x) const override { return reps[x]; }
  Elem from_parent(Elem x) const override { return coset_of.at(x); }
};

struct SubgroupImpl : GroupImpl {
  static constexpr Elem kAbsent = std::numeric_limits<Elem>::max();
  FiniteGroup par;
  std::vector<Elem> members;
  std::vector<Elem> local;
  explicit SubgroupImpl(FiniteGroup p) : par(std::move(p)) {}

  Elem mul_raw(Elem a, Elem b) const override { return local[par.mul(members[a], members[b])]; }
  Elem inv_raw(Elem a) const override { return local[par.inv(members[a])]; }
  std::string label(Elem x) const override { return par.label(members[x]); }
  const FiniteGroup* parent() const override { return &par; }
  Elem to_parent(Elem x) const override { return members[x]; }
  Elem from_parent(Elem x) const override {
    Elem r = x < local.size() ? local[x] : kAbsent;
    if (r == kAbsent) {
      throw StructuralError("element " + std::to_string(x) + " is not in subgroup " + descriptor);
    }
    return r;
  }
};

bool brute_abelian(const FiniteGroup& g) {
  auto gens = generating_set(g, [&] {
    Subgroup all(g.order());
    std::iota(all.begin(), all.end(), Elem{0});
    return all;
  }());
  for (Elem a : gens)
    for (Elem b : gens)
      if (g.mul(a, b) != g.mul(b, a)) return false;
  return true;
}

std::string join_indices(const std::vector<Elem>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace
}  // namespace detail

using detail::GroupImpl;

FiniteGroup::FiniteGroup(std::shared_ptr<const GroupImpl> impl) : impl_(std::move(impl)) {}

namespace {

FiniteGroup make_abelian(std::vector<std::uint64_t> moduli, GroupKind kind, std::string desc) {
  long double order = 1;
  for (auto m : moduli) {
    if (m == 0) throw StructuralError("cyclic modulus must be positive");
    order *= static_cast<long double>(m);
  }
  detail::check_order(order, desc);
  auto impl = std::make_shared<detail::AbelianImpl>();
  impl->kind = kind;
  impl->order = static_cast<std::uint64_t>(order);
  impl->descriptor = std::move(desc);
  impl->abelian = true;
  impl->moduli = std::move(moduli);
  impl->finalize();
  return FiniteGroup(impl);
}

}  // namespace

FiniteGroup FiniteGroup::cyclic(std::uint64_t m) {
  return make_abelian({m}, GroupKind::cyclic, "cyclic:" + std::to_string(m));
}

FiniteGroup FiniteGroup::abelian(std::uint64_t m, unsigned n) {
  if (n == 0) throw StructuralError("abelian:m:n needs n >= 1");
  return make_abelian(std::vector<std::uint64_t>(n, m), GroupKind::abelian_vector,
                      "abelian:" + std::to_string(m) + ":" + std::to_string(n));
}

FiniteGroup FiniteGroup::symmetric(unsigned k) {
  if (k == 0) throw StructuralError("sym:k needs k >= 1");
  if (k > 12) throw ResourceError("sym:" + std::to_string(k) + " is too large to enumerate");
  auto impl = std::make_shared<detail::SymmetricImpl>();
  impl->kind = GroupKind::symmetric;
  impl->k = k;
  impl->fact.assign(k + 1, 1);
  for (unsigned i = 1; i <= k; ++i) impl->fact[i] = impl->fact[i - 1] * i;
  impl->order = impl->fact[k];
  impl->descriptor = "sym:" + std::to_string(k);
  impl->abelian = k <= 2;
  impl->finalize();
  return FiniteGroup(impl);
}

FiniteGroup FiniteGroup::dihedral(std::uint64_t k) {
  if (k == 0) throw StructuralError("dihedral:k needs k >= 1");
  detail::check_order(2.0L * k, "dihedral");
  auto impl = std::make_shared<detail::DihedralImpl>();
  impl->kind = GroupKind::dihedral;
  impl->k = k;
  impl->order = 2 * k;
  impl->descriptor = "dihedral:" + std::to_string(k);
  impl->abelian = k <= 2;
  impl->finalize();
  return FiniteGroup(impl);
}

FiniteGroup FiniteGroup::unitriangular(std::uint64_t p, unsigned n) {
  if (!nt::is_prime(p)) throw StructuralError("ut:p:n needs a prime p, got " + std::to_string(p));
  if (n == 0) throw StructuralError("ut:p:n needs n >= 1");
  auto impl = std::make_shared<detail::UnitriangularImpl>();
  impl->kind = GroupKind::unitriangular;
  impl->p = p;
  impl->n = n;
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = i + 1; j < n; ++j) impl->slots.emplace_back(i, j);
  long double order = std::pow(static_cast<long double>(p), impl->slots.size());
  detail::check_order(order, "unitriangular");
  impl->order = static_cast<std::uint64_t>(std::llround(order));
  impl->descriptor = "ut:" + std::to_string(p) + ":" + std::to_string(n);
  impl->abelian = n <= 2;
  impl->finalize();
  return FiniteGroup(impl);
}

namespace {

FiniteGroup make_product(const std::vector<FiniteGroup>& factors, std::string desc) {
  if (factors.empty()) throw StructuralError("direct product needs at least one factor");
  long double order = 1;
  for (const auto& f : factors) order *= static_cast<long double>(f.order());
  detail::check_order(order, desc);
  auto impl = std::make_shared<detail::ProductImpl>();
  impl->kind = GroupKind::direct_product;
  impl->order = static_cast<std::uint64_t>(order);
  impl->descriptor = std::move(desc);
  impl->factors = factors;
  impl->places.assign(factors.size(), 1);
  for (std::size_t i = factors.size() - 1; i-- > 0;)
    impl->places[i] = impl->places[i + 1] * factors[i + 1].order();
  impl->abelian = std::all_of(factors.begin(), factors.end(),
                              [](const FiniteGroup& f) { return f.is_abelian(); });
  bool coords = true;
  for (const auto& f : factors) {
    auto m = f.abelian_moduli();
    if (m.empty() && f.order() > 1) {
      coords = false;
      break;
    }
    impl->moduli.insert(impl->moduli.end(), m.begin(), m.end());
  }
  if (!coords) impl->moduli.clear();
  impl->finalize();
  return FiniteGroup(impl);
}

}  // namespace

FiniteGroup FiniteGroup::direct_product(const std::vector<FiniteGroup>& factors) {
  std::string desc = "prod(";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) desc += ",";
    desc += factors[i].descriptor();
  }
  return make_product(factors, desc + ")");
}

FiniteGroup FiniteGroup::power(const FiniteGroup& g, unsigned n) {
  if (n == 0) throw StructuralError("pow(G,n) needs n >= 1");
  return make_product(std::vector<FiniteGroup>(n, g),
                      "pow(" + g.descriptor() + "," + std::to_string(n) + ")");
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::uint64_t parse_uint(const std::string& s, const std::string& ctx) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw StructuralError("bad integer '" + s + "' in group descriptor " + ctx);
  }
  return std::stoull(s);
}

std::vector<Elem> parse_index_list(const std::string& s, const std::string& ctx) {
  std::vector<Elem> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split_top(s, ',')) out.push_back(static_cast<Elem>(parse_uint(part, ctx)));
  return out;
}

}  // namespace

FiniteGroup FiniteGroup::parse(const std::string& text) {
  const std::string d = trim(text);
  auto open = d.find('(');
  if (open != std::string::npos) {
    if (d.back() != ')') throw StructuralError("unbalanced group descriptor: " + d);
    const std::string head = d.substr(0, open);
    const std::string body = d.substr(open + 1, d.size() - open - 2);
    if (head == "prod") {
      std::vector<FiniteGroup> fs;
      for (const auto& part : split_top(body, ',')) fs.push_back(parse(part));
      return direct_product(fs);
    }
    if (head == "pow") {
      auto parts = split_top(body, ',');
      if (parts.size() != 2) throw StructuralError("pow(G,n) expects two arguments: " + d);
      return power(parse(parts[0]), static_cast<unsigned>(parse_uint(parts[1], d)));
    }
    if (head == "quot" || head == "sub") {
      auto parts = split_top(body, ';');
      if (parts.size() != 2) throw StructuralError(head + "(G;gens) expects G;gens: " + d);
      FiniteGroup g = parse(parts[0]);
      auto gens = parse_index_list(parts[1], d);
      for (Elem x : gens)
        if (x >= g.order()) throw StructuralError("generator index out of range in " + d);
      Subgroup h = generated_subgroup(g, gens);
      return head == "quot" ? quotient_group(g, h) : subgroup_group(g, h);
    }
    throw StructuralError("unknown group constructor '" + head + "'");
  }
  auto parts = split_top(d, ':');
  const std::string& name = parts[0];
  auto arg = [&](std::size_t i) {
    if (parts.size() <= i) throw StructuralError("missing parameter in group descriptor " + d);
    return parse_uint(parts[i], d);
  };
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) throw StructuralError("wrong parameter count in group descriptor " + d);
  };
  if (name == "cyclic") {
    expect(2);
    return cyclic(arg(1));
  }
  if (name == "abelian") {
    expect(3);
    return abelian(arg(1), static_cast<unsigned>(arg(2)));
  }
  if (name == "sym") {
    expect(2);
    return symmetric(static_cast<unsigned>(arg(1)));
  }
  if (name == "dihedral") {
    expect(2);
    return dihedral(arg(1));
  }
  if (name == "ut") {
    expect(3);
    return unitriangular(arg(1), static_cast<unsigned>(arg(2)));
  }
  throw StructuralError("unknown group family '" + name + "' in descriptor " + d);
}

std::uint64_t FiniteGroup::order() const { return impl_->order; }
GroupKind FiniteGroup::kind() const { return impl_->kind; }
const std::string& FiniteGroup::descriptor() const { return impl_->descriptor; }

Elem FiniteGroup::mul(Elem a, Elem b) const { return impl_->mul(a, b); }
Elem FiniteGroup::inv(Elem a) const { return impl_->inv(a); }

Elem FiniteGroup::pow(Elem g, std::int64_t e) const {
  const auto n = static_cast<std::int64_t>(order());
  std::int64_t r = e % n;
  if (r < 0) r += n;
  auto ex = static_cast<std::uint64_t>(r);
  Elem result = 0;
  Elem base = g;
  while (ex > 0) {
    if (ex & 1U) result = mul(result, base);
    base = mul(base, base);
    ex >>= 1U;
  }
  return result;
}

std::uint64_t FiniteGroup::element_order(Elem g) const {
  std::uint64_t k = 1;
  Elem x = g;
  while (x != 0) {
    x = mul(x, g);
    ++k;
  }
  return k;
}

bool FiniteGroup::is_abelian() const { return impl_->abelian; }

std::vector<std::uint64_t> FiniteGroup::abelian_moduli() const { return impl_->moduli; }

std::vector<std::uint64_t> FiniteGroup::coordinates(Elem x) const {
  const auto& m = impl_->moduli;
  if (m.empty()) throw StructuralError(descriptor() + " has no cyclic coordinates");
  std::vector<std::uint64_t> c(m.size());
  std::uint64_t rest = x;
  for (std::size_t i = m.size(); i-- > 0;) {
    c[i] = rest % m[i];
    rest /= m[i];
  }
  return c;
}

Elem FiniteGroup::from_coordinates(const std::vector<std::uint64_t>& coords) const {
  const auto& m = impl_->moduli;
  if (m.empty() || coords.size() != m.size()) {
    throw StructuralError("coordinate vector does not match " + descriptor());
  }
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < m.size(); ++i) r = r * m[i] + coords[i] % m[i];
  return static_cast<Elem>(r);
}

const std::vector<FiniteGroup>& FiniteGroup::factors() const { return impl_->factors; }

std::vector<Elem> FiniteGroup::split(Elem x) const {
  const auto& f = impl_->factors;
  if (f.empty()) return {x};
  std::vector<Elem> parts(f.size());
  std::uint64_t rest = x;
  for (std::size_t i = f.size(); i-- > 0;) {
    parts[i] = static_cast<Elem>(rest % f[i].order());
    rest /= f[i].order();
  }
  return parts;
}

Elem FiniteGroup::join(const std::vector<Elem>& parts) const {
  const auto& f = impl_->factors;
  if (f.empty()) {
    if (parts.size() != 1) throw StructuralError("join: expected one component");
    return parts[0];
  }
  if (parts.size() != f.size()) throw StructuralError("join: component count mismatch");
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < f.size(); ++i) r = r * f[i].order() + parts[i];
  return static_cast<Elem>(r);
}

const FiniteGroup* FiniteGroup::parent() const { return impl_->parent(); }
Elem FiniteGroup::to_parent(Elem x) const { return impl_->to_parent(x); }
Elem FiniteGroup::from_parent(Elem x) const { return impl_->from_parent(x); }

std::string FiniteGroup::label(Elem x) const { return impl_->label(x); }

std::vector<unsigned> FiniteGroup::permutation(Elem x) const {
  auto* s = dynamic_cast<const detail::SymmetricImpl*>(impl_.get());
  if (s == nullptr) throw StructuralError(descriptor() + " is not a symmetric group");
  return s->unrank(x);
}

Elem FiniteGroup::from_permutation(const std::vector<unsigned>& perm) const {
  auto* s = dynamic_cast<const detail::SymmetricImpl*>(impl_.get());
  if (s == nullptr) throw StructuralError(descriptor() + " is not a symmetric group");
  if (perm.size() != s->k) throw StructuralError("permutation length mismatch");
  std::vector<bool> seen(s->k, false);
  for (unsigned v : perm) {
    if (v >= s->k || seen[v]) throw StructuralError("not a permutation");
    seen[v] = true;
  }
  return s->rank(perm);
}

bool FiniteGroup::has_table() const { return !impl_->table.empty(); }

bool FiniteGroup::same_group(const FiniteGroup& other) const {
  return impl_ == other.impl_ || impl_->descriptor == other.impl_->descriptor;
}

GroupElement FiniteGroup::element(Elem index) const { return GroupElement(*this, index); }

GroupElement::GroupElement(FiniteGroup group, Elem index) : group_(std::move(group)), index_(index) {
  if (index_ >= group_.order()) {
    throw StructuralError("element index " + std::to_string(index) + " out of range for " +
                          group_.descriptor());
  }
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (!group_.same_group(other.group_)) {
    throw StructuralError("cannot multiply elements of " + group_.descriptor() + " and " +
                          other.group_.descriptor());
  }
  return {group_, group_.mul(index_, other.index_)};
}

GroupElement GroupElement::inverse() const { return {group_, group_.inv(index_)}; }
GroupElement GroupElement::pow(std::int64_t e) const { return {group_, group_.pow(index_, e)}; }

bool GroupElement::operator==(const GroupElement& other) const {
  return group_.same_group(other.group_) && index_ == other.index_;
}

GroupElement mul(const GroupElement& a, const GroupElement& b) { return a * b; }
GroupElement pow(const GroupElement& g, std::int64_t e) { return g.pow(e); }

// ---------------------------------------------------------------------------
// Subgroup machinery

namespace {

void require_enumerable(const FiniteGroup& g) {
  if (g.order() > kMaxEnumeratedOrder) {
    throw ResourceError("group " + g.descriptor() + " of order " + std::to_string(g.order()) +
                        " exceeds the enumeration cap");
  }
}

}  // namespace

Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<Elem>& gens) {
  require_enumerable(g);
  std::vector<char> in(g.order(), 0);
  std::vector<Elem> members{0};
  in[0] = 1;
  std::vector<Elem> real_gens;
  for (Elem x : gens) {
    if (x >= g.order()) throw StructuralError("generator out of range for " + g.descriptor());
    if (x != 0) real_gens.push_back(x);
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (Elem s : real_gens) {
      Elem y = g.mul(s, members[i]);
      if (!in[y]) {
        in[y] = 1;
        members.push_back(y);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

bool is_subgroup(const FiniteGroup& g, const Subgroup& h) {
  if (h.empty() || !std::is_sorted(h.begin(), h.end())) return false;
  if (h.front() != 0 || h.back() >= g.order()) return false;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] == h[i - 1]) return false;
  if (g.order() % h.size() != 0) return false;
  std::vector<char> in(g.order(), 0);
  for (Elem x : h) in[x] = 1;
  for (Elem a : h)
    for (Elem b : generating_set(g, h))
      if (!in[g.mul(a, b)]) return false;
  return true;
}

std::vector<Elem> generating_set(const FiniteGroup& g, const Subgroup& h) {
  std::vector<Elem> gens;
  std::vector<char> in(g.order(), 0);
  in[0] = 1;
  std::vector<Elem> span{0};
  for (Elem x : h) {
    if (in[x]) continue;
    gens.push_back(x);
    for (std::size_t i = 0; i < span.size(); ++i) {
      for (Elem s : gens) {
        Elem y = g.mul(s, span[i]);
        if (!in[y]) {
          in[y] = 1;
          span.push_back(y);
        }
      }
    }
  }
  return gens;
}

Subgroup commutator_subgroup(const FiniteGroup& g, const Subgroup& h) {
  auto gens = generating_set(g, h);
  // [H,H] is the normal closure in H of commutators of generators.
  std::vector<Elem> comms;
  for (Elem a : gens)
    for (Elem b : gens) {
      Elem c = g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
      if (c != 0) comms.push_back(c);
    }
  std::sort(comms.begin(), comms.end());
  comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
  std::vector<Elem> closure_gens;
  for (Elem c : comms)
    for (Elem x : h) closure_gens.push_back(g.mul(g.mul(g.inv(x), c), x));
  std::sort(closure_gens.begin(), closure_gens.end());
  closure_gens.erase(std::unique(closure_gens.begin(), closure_gens.end()), closure_gens.end());
  return generated_subgroup(g, closure_gens);
}

bool is_normal(const FiniteGroup& g, const Subgroup& h) {
  if (!is_subgroup(g, h)) return false;
  std::vector<char> in(g.order(), 0);
  for (Elem x : h) in[x] = 1;
  auto ggens = generating_set(g, [&] {
    Subgroup all(g.order());
    std::iota(all.begin(), all.end(), Elem{0});
    return all;
  }());
  for (Elem x : ggens)
    for (Elem y : h)
      if (!in[g.mul(g.mul(x, y), g.inv(x))]) return false;
  return true;
}

bool is_abelian_subgroup(const FiniteGroup& g, const Subgroup& h) {
  auto gens = generating_set(g, h);
  for (Elem a : gens)
    for (Elem b : gens)
      if (g.mul(a, b) != g.mul(b, a)) return false;
  return true;
}

SubgroupChain derived_series(const FiniteGroup& g) {
  require_enumerable(g);
  SubgroupChain chain;
  Subgroup all(g.order());
  std::iota(all.begin(), all.end(), Elem{0});
  chain.members.push_back(all);
  while (chain.members.back().size() > 1) {
    Subgroup next = commutator_subgroup(g, chain.members.back());
    if (next.size() == chain.members.back().size()) break;
    chain.members.push_back(std::move(next));
  }
  chain.length = static_cast<unsigned>(chain.members.size() - 1);
  chain.solvable = chain.members.back().size() == 1;
  if (chain.solvable && g.order() > 1) {
    double c = std::log2(static_cast<double>(g.order()));
    chain.glasby_ok = chain.length <= 3.0 * std::log2(std::max(c, 1.0)) + 9.0;
  }
  return chain;
}

namespace {

void require_normal(const FiniteGroup& g, const Subgroup& n) {
  if (!is_subgroup(g, n)) {
    throw StructuralError("given element list is not a subgroup of " + g.descriptor());
  }
  if (!is_normal(g, n)) {
    throw StructuralError("subgroup is not normal in " + g.descriptor());
  }
}

// coset_of[x] = coset number, cosets numbered by lowest representative.
std::vector<Elem> coset_labels(const FiniteGroup& g, const Subgroup& n, std::vector<Elem>& reps) {
  constexpr Elem kUnset = std::numeric_limits<Elem>::max();
  std::vector<Elem> coset_of(g.order(), kUnset);
  reps.clear();
  for (Elem x = 0; x < g.order(); ++x) {
    if (coset_of[x] != kUnset) continue;
    auto id = static_cast<Elem>(reps.size());
    reps.push_back(x);
    for (Elem h : n) coset_of[g.mul(x, h)] = id;
  }
  return coset_of;
}

}  // namespace

std::vector<Elem> transversal(const FiniteGroup& g, const Subgroup& n) {
  require_enumerable(g);
  require_normal(g, n);
  std::vector<Elem> reps;
  coset_labels(g, n, reps);
  return reps;
}

FiniteGroup quotient_group(const FiniteGroup& g, const Subgroup& n) {
  require_enumerable(g);
  require_normal(g, n);
  auto impl = std::make_shared<detail::QuotientImpl>(g);
  impl->coset_of = coset_labels(g, n, impl->reps);
  impl->kind = GroupKind::quotient;
  impl->order = impl->reps.size();
  impl->descriptor = "quot(" + g.descriptor() + ";" + detail::join_indices(generating_set(g, n)) + ")";
  impl->finalize();
  impl->abelian = detail::brute_abelian(FiniteGroup(impl));
  return FiniteGroup(impl);
}

FiniteGroup subgroup_group(const FiniteGroup& g, const Subgroup& h) {
  require_enumerable(g);
  if (!is_subgroup(g, h)) {
    throw StructuralError("given element list is not a subgroup of " + g.descriptor());
  }
  auto impl = std::make_shared<detail::SubgroupImpl>(g);
  impl->members = h;
  impl->local.assign(g.order(), detail::SubgroupImpl::kAbsent);
  for (std::size_t i = 0; i < h.size(); ++i) impl->local[h[i]] = static_cast<Elem>(i);
  impl->kind = GroupKind::subgroup;
  impl->order = h.size();
  impl->descriptor = "sub(" + g.descriptor() + ";" + detail::join_indices(generating_set(g, h)) + ")";
  impl->finalize();
  impl->abelian = detail::brute_abelian(FiniteGroup(impl));
  return FiniteGroup(impl);
}

std::string check_axioms(const FiniteGroup& g, std::uint64_t samples, std::uint64_t seed) {
  const std::uint64_t n = g.order();
  auto describe = [&](const std::string& what, Elem a, Elem b, Elem c) {
    std::ostringstream os;
    os << g.descriptor() << ": " << what << " fails at (" << a << "," << b << "," << c << ")";
    return os.str();
  };
  for (Elem x = 0; x < n && x < 4096; ++x) {
    if (g.mul(0, x) != x || g.mul(x, 0) != x) return describe("identity", x, 0, 0);
    if (g.mul(x, g.inv(x)) != 0 || g.mul(g.inv(x), x) != 0) return describe("inverse", x, 0, 0);
    if (g.pow(x, static_cast<std::int64_t>(n)) != 0) return describe("Lagrange", x, 0, 0);
  }
  if (n <= 64) {
    for (Elem a = 0; a < n; ++a)
      for (Elem b = 0; b < n; ++b)
        for (Elem c = 0; c < n; ++c)
          if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) return describe("associativity", a, b, c);
    return {};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  for (std::uint64_t t = 0; t < samples; ++t) {
    auto a = static_cast<Elem>(pick(rng));
    auto b = static_cast<Elem>(pick(rng));
    auto c = static_cast<Elem>(pick(rng));
    if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) return describe("associativity", a, b, c);
    if (g.mul(a, g.inv(a)) != 0) return describe("inverse", a, 0, 0);
  }
  return {};
}

}  // namespace epsbias
