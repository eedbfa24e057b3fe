#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace epsbias {

using Elem = std::uint32_t;

enum class GroupKind {
  cyclic,
  abelian_vector,
  direct_product,
  symmetric,
  dihedral,
  unitriangular,
  quotient,
  subgroup,
};

std::string to_string(GroupKind kind);

namespace detail {
struct GroupImpl;
}

class GroupElement;

/// Enumerable finite group. Elements are the integers 0..order()-1 and 0 is
/// always the identity. Instances are immutable and cheap to copy.
///
/// Index conventions:
///   symmetric(k)       permutations of {0..k-1} in lexicographic order of
///                      their one-line notation; (f*g)(x) = f(g(x)).
///   dihedral(k)        i -> r^i, k+i -> r^i s, with s r s = r^-1.
///   unitriangular(p,n) above-diagonal entries read row by row, mixed radix,
///                      first entry most significant.
///   abelian / products mixed radix, first coordinate most significant.
///   quotient           cosets ordered by their lowest parent index.
///   subgroup           members sorted by parent index.
class FiniteGroup {
 public:
  static FiniteGroup cyclic(std::uint64_t m);
  static FiniteGroup abelian(std::uint64_t m, unsigned n);
  static FiniteGroup symmetric(unsigned k);
  static FiniteGroup dihedral(std::uint64_t k);
  static FiniteGroup unitriangular(std::uint64_t p, unsigned n);
  static FiniteGroup direct_product(const std::vector<FiniteGroup>& factors);
  static FiniteGroup power(const FiniteGroup& g, unsigned n);

  /// Parses `cyclic:6`, `abelian:3:4`, `sym:4`, `dihedral:4`, `ut:2:3`,
  /// `prod(G,H,...)`, `pow(G,n)`, `quot(G;i,j,...)` and `sub(G;i,j,...)`.
  /// The last two take generator indices of the normal subgroup or subgroup.
  static FiniteGroup parse(const std::string& descriptor);

  std::uint64_t order() const;
  GroupKind kind() const;
  const std::string& descriptor() const;

  Elem identity() const { return 0; }
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem pow(Elem g, std::int64_t e) const;
  std::uint64_t element_order(Elem g) const;
  bool is_abelian() const;

  /// Cyclic moduli when the group is a product of cyclic groups in its
  /// natural coordinates (cyclic, abelian, products of those); empty otherwise.
  std::vector<std::uint64_t> abelian_moduli() const;
  std::vector<std::uint64_t> coordinates(Elem x) const;
  Elem from_coordinates(const std::vector<std::uint64_t>& coords) const;

  /// Direct product factors (empty for non-products).
  const std::vector<FiniteGroup>& factors() const;
  std::vector<Elem> split(Elem x) const;
  Elem join(const std::vector<Elem>& parts) const;

  /// For quotient and subgroup kinds.
  const FiniteGroup* parent() const;
  /// Subgroup member -> parent index; quotient coset -> lowest representative.
  Elem to_parent(Elem x) const;
  /// Parent index -> subgroup member or its coset. Throws StructuralError when
  /// a parent element lies outside a subgroup.
  Elem from_parent(Elem parent_index) const;

  /// Human readable form, e.g. one-line notation for permutations.
  std::string label(Elem x) const;
  std::vector<unsigned> permutation(Elem x) const;  // symmetric only
  Elem from_permutation(const std::vector<unsigned>& perm) const;

  bool has_table() const;
  bool same_group(const FiniteGroup& other) const;

  GroupElement element(Elem index) const;

  explicit FiniteGroup(std::shared_ptr<const detail::GroupImpl> impl);

 private:
  std::shared_ptr<const detail::GroupImpl> impl_;
};

/// An element bound to its group. Operations across different groups throw
/// StructuralError.
class GroupElement {
 public:
  GroupElement(FiniteGroup group, Elem index);

  const FiniteGroup& group() const { return group_; }
  Elem index() const { return index_; }

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;
  GroupElement pow(std::int64_t e) const;
  bool operator==(const GroupElement& other) const;
  bool operator!=(const GroupElement& other) const { return !(*this == other); }

 private:
  FiniteGroup group_;
  Elem index_;
};

GroupElement mul(const GroupElement& a, const GroupElement& b);
GroupElement pow(const GroupElement& g, std::int64_t e);

/// A subgroup given by its sorted member list (parent indices).
using Subgroup = std::vector<Elem>;

Subgroup generated_subgroup(const FiniteGroup& g, const std::vector<Elem>& gens);
Subgroup commutator_subgroup(const FiniteGroup& g, const Subgroup& h);
bool is_subgroup(const FiniteGroup& g, const Subgroup& h);
bool is_normal(const FiniteGroup& g, const Subgroup& h);
bool is_abelian_subgroup(const FiniteGroup& g, const Subgroup& h);

/// Greedy generating set: repeatedly adds the lowest-index member not yet in
/// the span.
std::vector<Elem> generating_set(const FiniteGroup& g, const Subgroup& h);

struct SubgroupChain {
  std::vector<Subgroup> members;  // members[0] = all of G
  bool solvable = false;
  /// Number of steps G^(0) > ... > G^(l); for non-solvable groups the number
  /// of strict steps before the series stabilizes.
  unsigned length = 0;
  /// l <= 3 log2(c) + 9 with c = log2 |G|; only meaningful when solvable.
  bool glasby_ok = true;
};

SubgroupChain derived_series(const FiniteGroup& g);

/// Lowest-index representative of each coset of the normal subgroup n,
/// in increasing order (so the first entry is the identity).
std::vector<Elem> transversal(const FiniteGroup& g, const Subgroup& n);

FiniteGroup quotient_group(const FiniteGroup& g, const Subgroup& n);
FiniteGroup subgroup_group(const FiniteGroup& g, const Subgroup& h);

/// Checks group axioms exhaustively (order <= 64) or on `samples` random
/// triples. Returns an empty string on success, otherwise a description.
std::string check_axioms(const FiniteGroup& g, std::uint64_t samples = 20000,
                         std::uint64_t seed = 1);

// Enumeration cap for quotient/subgroup construction and closure.
inline constexpr std::uint64_t kMaxEnumeratedOrder = std::uint64_t{1} << 22;
// Full multiplication tables are materialized only up to this order.
inline constexpr std::uint64_t kTableOrder = 512;

}  // namespace epsbias
