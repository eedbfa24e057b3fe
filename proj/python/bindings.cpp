#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epsbias/abelian.hpp"
#include "epsbias/biased_set.hpp"
#include "epsbias/constructions.hpp"
#include "epsbias/expander.hpp"
#include "epsbias/group.hpp"
#include "epsbias/harness.hpp"
#include "epsbias/spectral.hpp"

namespace py = pybind11;
using namespace epsbias;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Epsilon-biased sets over finite groups";

  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);

  py::class_<FiniteGroup>(m, "FiniteGroup")
      .def_static("parse", &FiniteGroup::parse)
      .def_static("cyclic", &FiniteGroup::cyclic)
      .def_static("abelian", &FiniteGroup::abelian)
      .def_static("symmetric", &FiniteGroup::symmetric)
      .def_static("dihedral", &FiniteGroup::dihedral)
      .def_static("unitriangular", &FiniteGroup::unitriangular)
      .def_static("direct_product", &FiniteGroup::direct_product)
      .def_property_readonly("order", &FiniteGroup::order)
      .def_property_readonly("descriptor", &FiniteGroup::descriptor)
      .def("mul", &FiniteGroup::mul)
      .def("inv", &FiniteGroup::inv)
      .def("pow", &FiniteGroup::pow)
      .def("element_order", &FiniteGroup::element_order)
      .def("is_abelian", &FiniteGroup::is_abelian)
      .def("label", &FiniteGroup::label)
      .def("__repr__", [](const FiniteGroup& g) { return "FiniteGroup('" + g.descriptor() + "')"; });

  py::class_<BiasedSet>(m, "BiasedSet")
      .def_static("from_elements",
                  [](const FiniteGroup& g, const std::vector<Elem>& e, double claimed) {
                    return BiasedSet::from_elements(g, e, claimed);
                  })
      .def_static("whole_group", &BiasedSet::whole_group)
      .def_static("from_json", [](const std::string& text) { return BiasedSet::from_json(json::parse(text)); })
      .def_property_readonly("group", &BiasedSet::group)
      .def_property_readonly("size", &BiasedSet::size)
      .def_property_readonly("claimed_bias", &BiasedSet::claimed_bias)
      .def_property_readonly("claim_kind", [](const BiasedSet& s) { return to_string(s.claim_kind()); })
      .def_property_readonly("certified_bias", [](const BiasedSet& s) { return s.certified_bias(); })
      .def("set_certified", &BiasedSet::set_certified)
      .def("sound", &BiasedSet::sound, py::arg("tolerance") = kCertificationTolerance)
      .def("elements", &BiasedSet::elements)
      .def("histogram", &BiasedSet::histogram)
      .def("content_digest", &BiasedSet::content_digest)
      .def("to_json", [](const BiasedSet& s) { return s.to_json().dump(); });

  py::class_<BipartiteExpander>(m, "BipartiteExpander")
      .def_readonly("side", &BipartiteExpander::side)
      .def_readonly("degree", &BipartiteExpander::degree)
      .def_readonly("claimed_lambda", &BipartiteExpander::claimed_lambda)
      .def_readonly("certified_lambda", &BipartiteExpander::certified_lambda)
      .def_property_readonly("certification", [](const BipartiteExpander& g) { return to_string(g.certification); })
      .def("edge_count", &BipartiteExpander::edge_count);

  m.def("aghp_construct", &aghp_construct, py::arg("p"), py::arg("n"), py::arg("delta"),
        py::arg("field_cap") = kDefaultFieldCap);
  m.def("aghp_construct_q", &aghp_construct_q, py::arg("p"), py::arg("n"), py::arg("q"),
        py::arg("field_cap") = kDefaultFieldCap);
  m.def("abelian_biased_set", &abelian_biased_set, py::arg("m"), py::arg("n"), py::arg("delta"), py::arg("seed") = 1,
        py::arg("budget") = 200, py::arg("field_cap") = kDefaultFieldCap);
  m.def("char_bias_exact", [](const BiasedSet& s) { return char_bias_exact(s); });
  m.def("bias_spectral", [](const BiasedSet& s) { return bias_spectral(s); });
  m.def("lemma3_projection_norm", [](const FiniteGroup& g) { return lemma3_projection_norm(g); });
  m.def("alon_roichman_sample", [](const FiniteGroup& g, std::uint64_t k, std::uint64_t seed) {
    SampledSet s = alon_roichman_sample(g, k, seed);
    return py::make_tuple(s.set, s.bias);
  });

  m.def("lps_graph", [](std::uint64_t p, std::uint64_t q) { return lps_graph(p, q); });
  m.def("find_primes", [](std::uint64_t min_side, double max_lambda) {
    PrimePair pq = find_primes(min_side, max_lambda);
    return py::make_tuple(pq.p, pq.q);
  });

  m.def("mz_set", &mz_set);
  m.def("amplify_step", [](const BiasedSet& s, double eps) { return amplify_step(s, eps); });
  m.def("plan_amplification", [](std::uint64_t size, double target) {
    return to_py(plan_amplification(size, target).to_json());
  });
  m.def("claim6_bound", &claim6_bound);
  m.def("bridge_schedule", &bridge_schedule);
  m.def("direct_product_set", [](const std::vector<FiniteGroup>& groups, std::uint64_t seed) {
    ConstructionOptions o;
    o.seed = seed;
    DirectProductResult r = direct_product_set(groups, o);
    return py::make_tuple(r.set, to_py(r.ledger));
  }, py::arg("groups"), py::arg("seed") = 1);
  m.def("solvable_set_base", [](const FiniteGroup& g) {
    SolvableResult r = solvable_set_base(g);
    return py::make_tuple(r.set, to_py(r.ledger));
  });

  m.def("operator_product_tail", [](unsigned k, double delta, unsigned dim, std::uint64_t trials, std::uint64_t seed) {
    return to_py(operator_product_tail(k, delta, dim, trials, seed).to_json());
  });
  m.def("azuma_check", [](const std::vector<double>& alphas, const std::vector<double>& eps,
                          const std::vector<double>& lambdas, std::uint64_t trials, std::uint64_t seed) {
    return to_py(azuma_supermartingale_check(alphas, eps, lambdas, trials, seed).to_json());
  });
}
