#include "epsbias/biased_set.hpp"

#include <algorithm>

#include "epsbias/digest.hpp"

namespace epsbias {

std::string to_string(ClaimKind kind) { return kind == ClaimKind::bound ? "bound" : "reference"; }

void append_run(std::vector<Run>& runs, Elem element, std::uint64_t count) {
  if (count == 0) return;
  if (!runs.empty() && runs.back().element == element) {
    runs.back().count += count;
  } else {
    runs.push_back({element, count});
  }
}

namespace {

void check_claim(double claimed) {
  if (!(claimed >= 0.0 && claimed <= 1.0)) {
    throw StructuralError("claimed bias must lie in [0,1], got " + std::to_string(claimed));
  }
}

}  // namespace

BiasedSet::BiasedSet(FiniteGroup group, std::vector<Run> runs, double claimed_bias, ClaimKind kind)
    : group_(std::move(group)), claimed_(claimed_bias), kind_(kind) {
  for (const auto& r : runs) {
    if (r.element >= group_.order()) {
      throw StructuralError("element " + std::to_string(r.element) + " does not belong to " +
                            group_.descriptor());
    }
    append_run(runs_, r.element, r.count);
  }
  if (runs_.empty()) throw StructuralError("a biased set must be nonempty");
  check_claim(claimed_bias);
  rebuild_prefix();
}

void BiasedSet::rebuild_prefix() {
  prefix_.resize(runs_.size());
  size_ = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    prefix_[i] = size_;
    size_ += runs_[i].count;
  }
}

BiasedSet BiasedSet::from_elements(FiniteGroup group, const std::vector<Elem>& elements,
                                   double claimed_bias, ClaimKind kind) {
  std::vector<Run> runs;
  for (Elem e : elements) append_run(runs, e, 1);
  return {std::move(group), std::move(runs), claimed_bias, kind};
}

BiasedSet BiasedSet::whole_group(const FiniteGroup& group) {
  std::vector<Run> runs;
  runs.reserve(group.order());
  for (Elem x = 0; x < group.order(); ++x) runs.push_back({x, 1});
  BiasedSet s(group, std::move(runs), 0.0);
  s.add_provenance({"whole_group", {{"group", group.descriptor()}}, {}});
  return s;
}

BiasedSet BiasedSet::from_histogram(FiniteGroup group, const std::vector<std::uint64_t>& counts,
                                    double claimed_bias, ClaimKind kind) {
  if (counts.size() != group.order()) throw StructuralError("histogram length differs from group order");
  std::vector<Run> runs;
  for (Elem x = 0; x < counts.size(); ++x) append_run(runs, x, counts[x]);
  return {std::move(group), std::move(runs), claimed_bias, kind};
}

std::uint64_t BiasedSet::distinct() const {
  std::vector<Elem> e;
  e.reserve(runs_.size());
  for (const auto& r : runs_) e.push_back(r.element);
  std::sort(e.begin(), e.end());
  return static_cast<std::uint64_t>(std::unique(e.begin(), e.end()) - e.begin());
}

Elem BiasedSet::at(std::uint64_t j) const {
  if (j >= size_) throw std::out_of_range("biased set index out of range");
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), j);
  return runs_[static_cast<std::size_t>(it - prefix_.begin()) - 1].element;
}

std::vector<Elem> BiasedSet::elements() const {
  std::vector<Elem> out;
  out.reserve(size_);
  for (const auto& r : runs_) out.insert(out.end(), r.count, r.element);
  return out;
}

std::vector<std::uint64_t> BiasedSet::histogram() const {
  std::vector<std::uint64_t> h(group_.order(), 0);
  for (const auto& r : runs_) h[r.element] += r.count;
  return h;
}

void BiasedSet::set_claim(double claimed, ClaimKind kind) {
  check_claim(claimed);
  claimed_ = claimed;
  kind_ = kind;
}

bool BiasedSet::sound(double tolerance) const {
  if (!certified_ || kind_ == ClaimKind::reference) return true;
  return *certified_ <= claimed_ + tolerance;
}

namespace {

json content_json(const BiasedSet& s) {
  json elements = json::array();
  json counts = json::array();
  for (const auto& r : s.runs()) {
    elements.push_back(r.element);
    counts.push_back(r.count);
  }
  return json{{"group", s.group().descriptor()},
              {"elements", std::move(elements)},
              {"counts", std::move(counts)},
              {"claimed_bias", s.claimed_bias()},
              {"claim_kind", to_string(s.claim_kind())}};
}

}  // namespace

std::string BiasedSet::content_digest() const { return sha256_hex(content_json(*this).dump()); }

BiasedSet BiasedSet::repeated(std::uint64_t times) const {
  if (times == 0) throw StructuralError("repetition count must be positive");
  std::vector<Run> runs;
  runs.reserve(runs_.size() * times);
  for (std::uint64_t t = 0; t < times; ++t)
    for (const auto& r : runs_) append_run(runs, r.element, r.count);
  BiasedSet out(group_, std::move(runs), claimed_, kind_);
  out.certified_ = certified_;
  out.provenance_ = provenance_;
  out.add_provenance({"repeat", {{"times", times}}, {content_digest()}});
  return out;
}

json BiasedSet::to_json(const json& run_config) const {
  json cert = content_json(*this);
  cert["size"] = size_;
  cert["certified_bias"] = certified_ ? json(*certified_) : json(nullptr);
  cert["tolerance"] = kCertificationTolerance;
  json prov = json::array();
  for (const auto& p : provenance_) {
    prov.push_back({{"operation", p.operation}, {"params", p.params}, {"input_digests", p.input_digests}});
  }
  cert["provenance"] = std::move(prov);
  cert["seed"] = seed_ ? json(*seed_) : json(nullptr);
  cert["run_config"] = run_config;
  cert["digest"] = sha256_hex(cert.dump());
  return cert;
}

BiasedSet BiasedSet::from_json(const json& cert) {
  try {
    FiniteGroup g = FiniteGroup::parse(cert.at("group").get<std::string>());
    const auto& elements = cert.at("elements");
    const auto& counts = cert.at("counts");
    if (elements.size() != counts.size()) throw StructuralError("certificate elements/counts length mismatch");
    std::vector<Run> runs;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      auto e = elements[i].get<std::uint64_t>();
      if (e >= g.order()) throw StructuralError("certificate element out of range");
      runs.push_back({static_cast<Elem>(e), counts[i].get<std::uint64_t>()});
    }
    ClaimKind kind = ClaimKind::bound;
    if (cert.contains("claim_kind") && cert["claim_kind"] == "reference") kind = ClaimKind::reference;
    BiasedSet s(g, std::move(runs), cert.at("claimed_bias").get<double>(), kind);
    if (cert.contains("certified_bias") && !cert["certified_bias"].is_null()) {
      s.set_certified(cert["certified_bias"].get<double>());
    }
    if (cert.contains("seed") && !cert["seed"].is_null()) s.set_seed(cert["seed"].get<std::uint64_t>());
    if (cert.contains("provenance")) {
      for (const auto& p : cert["provenance"]) {
        ProvenanceEntry e;
        e.operation = p.at("operation").get<std::string>();
        e.params = p.value("params", json::object());
        e.input_digests = p.value("input_digests", std::vector<std::string>{});
        s.add_provenance(std::move(e));
      }
    }
    if (cert.contains("digest")) {
      json body = cert;
      body.erase("digest");
      if (sha256_hex(body.dump()) != cert["digest"].get<std::string>()) {
        throw StructuralError("certificate digest does not match its content");
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace epsbias
