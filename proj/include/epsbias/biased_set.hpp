#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epsbias/error.hpp"
#include "epsbias/group.hpp"

namespace epsbias {

using json = nlohmann::json;

/// A maximal stretch of identical consecutive entries of a multiset.
struct Run {
  Elem element = 0;
  std::uint64_t count = 0;
  bool operator==(const Run& other) const = default;
};

/// `bound`: the claimed bias is a proven upper bound and certification must
/// not exceed it. `reference`: an informational value only (no proven
/// constant), so it is reported but never enforced.
enum class ClaimKind { bound, reference };

struct ProvenanceEntry {
  std::string operation;
  json params = json::object();
  std::vector<std::string> input_digests;
};

/// Multiset of group elements with its bias claim and construction log.
/// Entries keep their stored order (tiling depends on it); consecutive equal
/// entries are merged into runs.
class BiasedSet {
 public:
  BiasedSet(FiniteGroup group, std::vector<Run> runs, double claimed_bias,
            ClaimKind kind = ClaimKind::bound);

  static BiasedSet from_elements(FiniteGroup group, const std::vector<Elem>& elements,
                                 double claimed_bias, ClaimKind kind = ClaimKind::bound);
  /// One entry per element of the group, in index order; bias 0.
  static BiasedSet whole_group(const FiniteGroup& group);
  /// Entries sorted by element with the given per-element counts.
  static BiasedSet from_histogram(FiniteGroup group, const std::vector<std::uint64_t>& counts,
                                  double claimed_bias, ClaimKind kind = ClaimKind::bound);

  const FiniteGroup& group() const { return group_; }
  const std::vector<Run>& runs() const { return runs_; }
  std::uint64_t size() const { return size_; }
  std::uint64_t distinct() const;
  /// The j-th entry in stored order.
  Elem at(std::uint64_t j) const;
  std::vector<Elem> elements() const;
  std::vector<std::uint64_t> histogram() const;

  double claimed_bias() const { return claimed_; }
  ClaimKind claim_kind() const { return kind_; }
  void set_claim(double claimed, ClaimKind kind);

  const std::optional<double>& certified_bias() const { return certified_; }
  void set_certified(double value) { certified_ = value; }

  /// True unless a bound-type claim is exceeded by the certificate.
  bool sound(double tolerance = kCertificationTolerance) const;

  const std::vector<ProvenanceEntry>& provenance() const { return provenance_; }
  void add_provenance(ProvenanceEntry entry) { provenance_.push_back(std::move(entry)); }
  void set_provenance(std::vector<ProvenanceEntry> p) { provenance_ = std::move(p); }

  const std::optional<std::uint64_t>& seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// Digest of the content only (group, entries, claim).
  std::string content_digest() const;

  /// Canonical certificate. Keys are sorted; `digest` covers every other field.
  json to_json(const json& run_config = json::object()) const;
  static BiasedSet from_json(const json& cert);

  /// The same multiset repeated `times` times back to back.
  BiasedSet repeated(std::uint64_t times) const;

 private:
  void rebuild_prefix();

  FiniteGroup group_;
  std::vector<Run> runs_;
  std::vector<std::uint64_t> prefix_;  // prefix_[i] = entries before run i
  std::uint64_t size_ = 0;
  double claimed_;
  ClaimKind kind_;
  std::optional<double> certified_;
  std::vector<ProvenanceEntry> provenance_;
  std::optional<std::uint64_t> seed_;
};

/// Appends runs, merging with the last run when the element repeats.
void append_run(std::vector<Run>& runs, Elem element, std::uint64_t count);

std::string to_string(ClaimKind kind);

}  // namespace epsbias
