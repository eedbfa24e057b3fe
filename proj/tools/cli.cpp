#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "epsbias/abelian.hpp"
#include "epsbias/biased_set.hpp"
#include "epsbias/constructions.hpp"
#include "epsbias/error.hpp"
#include "epsbias/expander.hpp"
#include "epsbias/harness.hpp"
#include "epsbias/spectral.hpp"

namespace epsbias::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

struct Globals {
  std::uint64_t seed = 1;
  bool json_mode = false;
  unsigned threads = 1;
  double tolerance = kCertificationTolerance;
  std::uint64_t dense_cap = 4096;
  std::uint64_t field_cap = kDefaultFieldCap;
  std::uint64_t expander_budget = 4;
  std::string output;
};

void env_override(const char* name, std::uint64_t& value) {
  if (const char* v = std::getenv(name)) {
    try {
      value = std::stoull(v);
    } catch (const std::exception&) {
      throw StructuralError(std::string("environment variable ") + name + " is not an integer");
    }
  }
}

json options_json(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_type_size() == 0) {
        j[name] = true;
      } else if (res.size() == 1) {
        j[name] = res[0];
      } else {
        j[name] = res;
      }
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  // Shared plumbing.
  json run_config(const std::string& command, const CLI::App* sub) const {
    return {{"command", command},
            {"options", options_json(sub)},
            {"seed", g_.seed},
            {"tolerance", g_.tolerance},
            {"threads", g_.threads},
            {"caps", {{"dense_verify", g_.dense_cap}, {"field", g_.field_cap}, {"expander_budget", g_.expander_budget}}},
            {"output", g_.output},
            {"version", kVersion}};
  }
  CertifyOptions certify_opts() const {
    CertifyOptions o;
    o.dense_cap = static_cast<std::uint32_t>(std::min<std::uint64_t>(g_.dense_cap, 1U << 20));
    return o;
  }
  SpectralOptions spectral_opts() const {
    SpectralOptions o;
    o.dense_cap = g_.dense_cap;
    return o;
  }
  ConstructionOptions construction_opts() const {
    ConstructionOptions o;
    o.certify = certify_opts();
    o.seed = g_.seed;
    o.expander_budget = g_.expander_budget;
    o.verify_cap = std::min<std::uint64_t>(g_.dense_cap, 4096);
    return o;
  }

  // Writes the certificate, prints the summary and maps soundness to an exit code.
  int emit_set(const std::string& command, const CLI::App* sub, const BiasedSet& s, json extra = json::object()) {
    json config = run_config(command, sub);
    if (!extra.empty()) config["report"] = extra;
    if (!g_.output.empty()) write_text(g_.output, s.to_json(config).dump(2) + "\n");
    const bool ok = s.sound(g_.tolerance);
    json summary = {{"command", command},
                    {"group", s.group().descriptor()},
                    {"size", s.size()},
                    {"claimed_bias", s.claimed_bias()},
                    {"claim_kind", to_string(s.claim_kind())},
                    {"sound", ok}};
    if (s.certified_bias()) summary["certified_bias"] = *s.certified_bias();
    if (!g_.output.empty()) summary["output"] = g_.output;
    if (!extra.empty()) summary["report"] = extra;
    if (g_.json_mode) {
      out_ << summary.dump() << "\n";
    } else {
      out_ << command << ": group " << s.group().descriptor() << ", size " << s.size() << ", claimed "
           << fmt(s.claimed_bias()) << " (" << to_string(s.claim_kind()) << ")";
      if (s.certified_bias()) out_ << ", certified " << fmt(*s.certified_bias());
      if (!g_.output.empty()) out_ << " -> " << g_.output;
      out_ << "\n";
    }
    if (!ok) {
      err_ << "certification failure: certified bias exceeds the claimed bound\n";
      return kExitCertification;
    }
    return kExitOk;
  }

  int emit_graph(const std::string& command, const CLI::App* sub, const BipartiteExpander& g, bool ok,
                 json extra = json::object()) {
    if (!g_.output.empty()) write_edge_list(g, g_.output);
    json summary = {{"command", command},
                    {"side", g.side},
                    {"degree", g.degree},
                    {"lambda_claimed", g.claimed_lambda},
                    {"lambda_certified", g.certified_lambda},
                    {"certification", to_string(g.certification)},
                    {"residual", g.residual},
                    {"info", g.info},
                    {"run_config", run_config(command, sub)}};
    for (auto& [k, v] : extra.items()) summary[k] = v;
    if (!g_.output.empty()) summary["output"] = g_.output;
    if (g_.json_mode) {
      out_ << summary.dump() << "\n";
    } else {
      out_ << command << ": side " << g.side << ", degree " << g.degree << ", lambda certified "
           << fmt(g.certified_lambda) << " (" << to_string(g.certification) << "), claimed " << fmt(g.claimed_lambda);
      if (!g_.output.empty()) out_ << " -> " << g_.output;
      out_ << "\n";
    }
    if (!ok) {
      err_ << "certification failure: lambda above its target\n";
      return kExitCertification;
    }
    return kExitOk;
  }

  int emit_report(const std::string& command, const CLI::App* sub, const HarnessReport& r) {
    json j = r.to_json();
    j["run_config"] = run_config(command, sub);
    if (!g_.output.empty()) write_text(g_.output, j.dump(2) + "\n");
    if (g_.json_mode) {
      out_ << j.dump() << "\n";
    } else {
      out_ << command << " [" << r.check << "]: trials " << r.trials << ", violations " << r.violations
           << ", max slack " << fmt(r.max_slack);
      if (r.check == "operator-product-tail" || r.check == "azuma") {
        out_ << ", empirical tail " << fmt(r.empirical_tail) << ", bound " << fmt(r.bound)
             << (r.vacuous ? " (vacuous)" : "");
      }
      out_ << "\n";
    }
    if (!r.passed()) {
      err_ << "harness reported violations\n";
      return kExitCertification;
    }
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  Globals g_;
};

int Runner::run(const std::vector<std::string>& args) {
  env_override("EPSBIAS_DENSE_CAP", g_.dense_cap);
  env_override("EPSBIAS_FIELD_CAP", g_.field_cap);
  env_override("EPSBIAS_EXPANDER_BUDGET", g_.expander_budget);

  CLI::App app{"Construct and certify epsilon-biased sets over finite groups", "epsbias"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--seed", g_.seed, "Master seed")->capture_default_str();
  app.add_flag("--json", g_.json_mode, "Machine readable output");
  app.add_option("--threads", g_.threads, "Worker cap")->capture_default_str();
  app.add_option("--tolerance", g_.tolerance, "Slack allowed between certified and claimed values")
      ->capture_default_str();
  app.add_option("--dense-cap", g_.dense_cap, "Largest group or side handled by dense linear algebra")
      ->capture_default_str();
  app.add_option("--field-cap", g_.field_cap, "Largest finite field for the powering construction")
      ->capture_default_str();
  app.add_option("--expander-budget", g_.expander_budget, "Random expander attempts per degree")
      ->capture_default_str();
  app.add_option("-o,--output", g_.output, "Output path");

  std::function<int()> action;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* sub = parent->add_subcommand(name, desc);
    sub->fallthrough();
    return sub;
  };

  // build
  CLI::App* build = app.add_subcommand("build", "Run a construction");
  build->fallthrough();
  build->require_subcommand(1);

  std::uint64_t a_p = 2, a_q = 0;
  unsigned a_n = 10;
  double a_delta = 0.1;
  CLI::App* b_aghp = leaf(build, "aghp", "Powering construction over Z_p^n");
  b_aghp->add_option("--p", a_p, "Prime")->required();
  b_aghp->add_option("--n", a_n, "Dimension")->required();
  b_aghp->add_option("--q", a_q, "Field size (a power of p); overrides --delta");
  b_aghp->add_option("--delta", a_delta, "Target bias when --q is absent")->capture_default_str();
  b_aghp->callback([&] {
    action = [&] {
      BiasedSet s = a_q > 0 ? aghp_construct_q(a_p, a_n, a_q, g_.field_cap) : aghp_construct(a_p, a_n, a_delta, g_.field_cap);
      return emit_set("build aghp", b_aghp, s);
    };
  });

  std::string m_group, m_input;
  unsigned m_n = 3;
  double m_delta = 0.3;
  CLI::App* b_mz = leaf(build, "mz", "Power set over G^n from an exponent set over Z_|G|^n");
  b_mz->add_option("--group", m_group, "Group descriptor")->required();
  b_mz->add_option("--n", m_n, "Number of coordinates")->capture_default_str();
  b_mz->add_option("--input", m_input, "Exponent set certificate (built from --delta when absent)");
  b_mz->add_option("--delta", m_delta, "Bias of the generated exponent set")->capture_default_str();
  b_mz->callback([&] {
    action = [&] {
      FiniteGroup g = FiniteGroup::parse(m_group);
      BiasedSet s = m_input.empty() ? abelian_biased_set(g.order(), m_n, m_delta, g_.seed, 200, g_.field_cap)
                                    : BiasedSet::from_json(read_json(m_input));
      return emit_set("build mz", b_mz, mz_set(g, m_n, s));
    };
  });

  std::string am_input;
  double am_target = 0.05, am_step = 0.0;
  bool am_plan = false;
  std::uint64_t am_size = 0;
  CLI::App* b_amp = leaf(build, "amplify", "Derandomized squaring down to a target bias");
  b_amp->add_option("--input", am_input, "Input certificate");
  b_amp->add_option("--target", am_target, "Target bias")->capture_default_str();
  b_amp->add_option("--step-eps", am_step, "Run a single step at this input bias instead of the schedule");
  b_amp->add_flag("--plan", am_plan, "Print the schedule without building");
  b_amp->add_option("--size", am_size, "Input size for --plan when no input is given");
  b_amp->callback([&] {
    action = [&]() -> int {
      if (am_plan) {
        std::uint64_t size = am_size;
        if (!am_input.empty()) size = BiasedSet::from_json(read_json(am_input)).size();
        if (size == 0) throw StructuralError("--plan needs --input or --size");
        json plan = plan_amplification(size, am_target).to_json();
        plan["run_config"] = run_config("build amplify", b_amp);
        if (!g_.output.empty()) write_text(g_.output, plan.dump(2) + "\n");
        out_ << (g_.json_mode ? plan.dump() : plan.dump(2)) << "\n";
        return kExitOk;
      }
      if (am_input.empty()) throw StructuralError("build amplify needs --input");
      BiasedSet s = BiasedSet::from_json(read_json(am_input));
      BiasedSet outset = am_step > 0.0 ? amplify_step(s, am_step, construction_opts())
                                       : amplify(s, am_target, construction_opts());
      return emit_set("build amplify", b_amp, outset);
    };
  });

  std::string t_left, t_right, t_graph;
  CLI::App* b_tensor = leaf(build, "tensor", "Combine sets on G1 and G2 along an expander");
  b_tensor->add_option("--left", t_left, "Certificate of the smaller set S1")->required();
  b_tensor->add_option("--right", t_right, "Certificate of the larger set S2")->required();
  b_tensor->add_option("--graph", t_graph, "Edge list with side |S2|")->required();
  b_tensor->callback([&] {
    action = [&] {
      BiasedSet s1 = BiasedSet::from_json(read_json(t_left));
      BiasedSet s2 = BiasedSet::from_json(read_json(t_right));
      BipartiteExpander gamma = read_edge_list(t_graph);
      certify(gamma, certify_opts());
      return emit_set("build tensor", b_tensor, tensor_combine(s1, s2, gamma));
    };
  });

  std::vector<std::string> d_groups;
  CLI::App* b_direct = leaf(build, "direct", "Set on a direct product G1 x ... x Gn with bias at most 1/2");
  b_direct->add_option("--group", d_groups, "Factor descriptor (repeat for each factor)")->required();
  b_direct->callback([&] {
    action = [&] {
      std::vector<FiniteGroup> groups;
      for (const auto& d : d_groups) groups.push_back(FiniteGroup::parse(d));
      DirectProductResult r = direct_product_set(groups, construction_opts());
      return emit_set("build direct", b_direct, r.set, r.ledger);
    };
  });

  std::string s_group;
  double s_target = 0.5;
  CLI::App* b_solv = leaf(build, "solvable", "Set on a solvable group via its derived series");
  b_solv->add_option("--group", s_group, "Group descriptor")->required();
  b_solv->add_option("--target", s_target, "Target bias (0.5 keeps the base set)")->capture_default_str();
  b_solv->callback([&] {
    action = [&] {
      FiniteGroup g = FiniteGroup::parse(s_group);
      if (s_target >= 0.5 && !g.is_abelian()) {
        SolvableResult r = solvable_set_base(g, construction_opts());
        int code = emit_set("build solvable", b_solv, r.set, r.ledger);
        return r.ledger_ok ? code : kExitCertification;
      }
      return emit_set("build solvable", b_solv, solvable_set(g, s_target, construction_opts()));
    };
  });

  // verify
  std::string v_input, v_method = "auto";
  bool v_sym = false;
  CLI::App* verify = leaf(&app, "verify", "Certify the bias of a set and write a new certificate");
  verify->add_option("--input", v_input, "Certificate")->required();
  verify->add_option("--method", v_method, "auto, dense or iterative")->capture_default_str()
      ->check(CLI::IsMember({"auto", "dense", "iterative"}));
  verify->add_flag("--symmetrized", v_sym, "Use eigenvalues of the symmetrized operator");
  verify->callback([&] {
    action = [&] {
      BiasedSet s = BiasedSet::from_json(read_json(v_input));
      SpectralOptions o = spectral_opts();
      o.symmetrized = v_sym;
      o.method = v_method == "dense" ? SpectralMethod::dense
                                     : (v_method == "iterative" ? SpectralMethod::iterative : SpectralMethod::automatic);
      SpectralReport rep = bias_spectral_report(s, o);
      s.set_certified(rep.bias);
      json extra = {{"method", rep.method}, {"residual", rep.residual}, {"matvecs", rep.matvecs},
                    {"input_digest", s.content_digest()}};
      if (!s.group().abelian_moduli().empty()) {
        try {
          extra["char_bias"] = char_bias_exact(s);
        } catch (const ResourceError&) {
        }
      }
      return emit_set("verify", verify, s, extra);
    };
  });

  // expander
  CLI::App* expander = app.add_subcommand("expander", "Build or certify bipartite expanders");
  expander->fallthrough();
  expander->require_subcommand(1);

  std::uint64_t e_p = 13, e_q = 5;
  std::string e_method = "auto";
  CLI::App* e_lps = leaf(expander, "lps", "LPS Ramanujan graph");
  e_lps->add_option("--p", e_p, "Prime = 1 mod 4 (vertex group)")->required();
  e_lps->add_option("--q", e_q, "Prime = 1 mod 4 (degree q + 1)")->required();
  e_lps->add_option("--method", e_method, "auto, dense or iterative")->capture_default_str()
      ->check(CLI::IsMember({"auto", "dense", "iterative"}));
  e_lps->callback([&] {
    action = [&] {
      CertifyOptions o = certify_opts();
      if (e_method == "dense") o.method = CertifyOptions::Method::dense;
      if (e_method == "iterative") o.method = CertifyOptions::Method::iterative;
      BipartiteExpander g = lps_graph(e_p, e_q, true, o);
      return emit_graph("expander lps", e_lps, g, g.certified_lambda <= g.claimed_lambda + 1e-6);
    };
  });

  std::uint32_t r_side = 64, r_degree = 8;
  double r_target = 0.9;
  CLI::App* e_rand = leaf(expander, "random", "Union of random perfect matchings, resampled until certified");
  e_rand->add_option("--side", r_side, "Vertices per side")->required();
  e_rand->add_option("--degree", r_degree, "Degree")->required();
  e_rand->add_option("--target", r_target, "Largest acceptable lambda")->capture_default_str();
  e_rand->callback([&] {
    action = [&] {
      RandomExpanderResult r =
          random_regular_bipartite(r_side, r_degree, r_target, g_.seed, std::max<std::uint64_t>(1, g_.expander_budget), certify_opts());
      return emit_graph("expander random", e_rand, r.graph, r.success, {{"attempts", r.attempts}});
    };
  });

  std::string c_input;
  CLI::App* e_cert = leaf(expander, "certify", "Recertify an edge list");
  e_cert->add_option("--input", c_input, "Edge list")->required();
  e_cert->callback([&] {
    action = [&] {
      BipartiteExpander g = read_edge_list(c_input);
      certify(g, certify_opts());
      return emit_graph("expander certify", e_cert, g, g.certified_lambda <= g.claimed_lambda + 1e-6);
    };
  });

  // export
  std::string x_input;
  bool x_sym = false;
  CLI::App* exp = leaf(&app, "export", "Write the Cayley graph of a set as an edge list");
  exp->add_option("--input", x_input, "Certificate")->required();
  exp->add_flag("--symmetrized", x_sym, "Also add x -> s^-1 x");
  exp->callback([&] {
    action = [&]() -> int {
      if (g_.output.empty()) throw StructuralError("export needs --output");
      BiasedSet s = BiasedSet::from_json(read_json(x_input));
      export_cayley(s, g_.output, x_sym);
      json summary = {{"command", "export"}, {"order", s.group().order()}, {"set_size", s.size()},
                      {"edges", s.group().order() * s.size() * (x_sym ? 2 : 1)}, {"output", g_.output}};
      out_ << (g_.json_mode ? summary.dump() : "export: " + std::to_string(summary["edges"].get<std::uint64_t>()) +
                                                    " edges -> " + g_.output)
           << "\n";
      return kExitOk;
    };
  });

  // harness
  CLI::App* harness = app.add_subcommand("harness", "Monte-Carlo checks of the expander and tail inequalities");
  harness->fallthrough();
  harness->require_subcommand(1);

  std::uint64_t h_p = 13, h_q = 5, h_trials = 1000;
  std::string h_graph;
  unsigned h_dim = 8, h_opdim = 4;
  CLI::App* h_ray = leaf(harness, "rayleigh", "Vector and operator expander lemmas");
  h_ray->add_option("--p", h_p, "LPS prime p")->capture_default_str();
  h_ray->add_option("--q", h_q, "LPS prime q")->capture_default_str();
  h_ray->add_option("--graph", h_graph, "Edge list instead of an LPS graph");
  h_ray->add_option("--trials", h_trials, "Trials per lemma")->capture_default_str();
  h_ray->add_option("--dim", h_dim, "Vector dimension")->capture_default_str();
  h_ray->add_option("--operator-dim", h_opdim, "Operator dimension")->capture_default_str();
  h_ray->callback([&] {
    action = [&] {
      CertifyOptions o = certify_opts();
      o.method = CertifyOptions::Method::dense;
      BipartiteExpander g = h_graph.empty() ? lps_graph(h_p, h_q, true, o) : read_edge_list(h_graph);
      if (!h_graph.empty()) certify(g, o);
      VectorCheckOptions vo;
      vo.dim = h_dim;
      vo.threads = g_.threads;
      OperatorCheckOptions oo;
      oo.dim = h_opdim;
      oo.threads = g_.threads;
      HarnessReport rv = rayleigh_vector_check(g, h_trials, g_.seed, vo);
      HarnessReport ro = rayleigh_operator_check(g, h_trials, g_.seed, oo);
      std::string out_path = g_.output;
      if (!out_path.empty()) {
        json both = {{"vector", rv.to_json()}, {"operator", ro.to_json()},
                     {"run_config", run_config("harness rayleigh", h_ray)}};
        write_text(out_path, both.dump(2) + "\n");
        g_.output.clear();
      }
      int a = emit_report("harness rayleigh", h_ray, rv);
      int b = emit_report("harness rayleigh", h_ray, ro);
      g_.output = out_path;
      return std::max(a, b);
    };
  });

  unsigned tl_k = 60, tl_dim = 4;
  double tl_delta = 0.3;
  std::uint64_t tl_trials = 10000;
  std::vector<double> tl_shifts;
  CLI::App* h_tail = leaf(harness, "tail", "Norm of products of random positive contractions");
  h_tail->add_option("--k", tl_k, "Number of factors")->capture_default_str();
  h_tail->add_option("--delta", tl_delta, "Spectral gap of the mean")->capture_default_str();
  h_tail->add_option("--dim", tl_dim, "Dimension")->capture_default_str();
  h_tail->add_option("--trials", tl_trials, "Trials")->capture_default_str();
  h_tail->add_option("--shift", tl_shifts, "Shift values for the general form (repeatable)");
  h_tail->callback([&] {
    action = [&] {
      TailOptions o;
      o.shifts = tl_shifts;
      o.threads = g_.threads;
      return emit_report("harness tail", h_tail, operator_product_tail(tl_k, tl_delta, tl_dim, tl_trials, g_.seed, o));
    };
  });

  unsigned az_steps = 100;
  double az_alpha = 0.5, az_eps = 0.0;
  std::vector<double> az_lambdas{0.0, 2.0, 5.0, 8.0};
  std::uint64_t az_trials = 20000;
  std::string az_mode = "one-sided";
  CLI::App* h_az = leaf(harness, "azuma", "Tail of a supermartingale with bounded increments");
  h_az->add_option("--steps", az_steps, "Number of increments")->capture_default_str();
  h_az->add_option("--alpha", az_alpha, "Increment bound")->capture_default_str();
  h_az->add_option("--eps", az_eps, "Drift per step")->capture_default_str();
  h_az->add_option("--lambda", az_lambdas, "Deviation values (repeatable)");
  h_az->add_option("--trials", az_trials, "Trials")->capture_default_str();
  h_az->add_option("--mode", az_mode, "one-sided or symmetric")->capture_default_str()
      ->check(CLI::IsMember({"one-sided", "symmetric"}));
  h_az->callback([&] {
    action = [&] {
      std::vector<double> alphas(az_steps, az_alpha), eps(az_steps, az_eps);
      return emit_report("harness azuma", h_az,
                         azuma_supermartingale_check(alphas, eps, az_lambdas, az_trials, g_.seed,
                                                     az_mode == "symmetric" ? AzumaMode::symmetric : AzumaMode::one_sided));
    };
  });

  // baseline
  CLI::App* baseline = app.add_subcommand("baseline", "Random baselines");
  baseline->fallthrough();
  baseline->require_subcommand(1);
  std::string ar_group;
  std::uint64_t ar_k = 0, ar_attempts = 100;
  double ar_until = 0.0;
  CLI::App* b_ar = leaf(baseline, "alon-roichman", "Uniform i.i.d. multiset with measured bias");
  b_ar->add_option("--group", ar_group, "Group descriptor")->required();
  b_ar->add_option("--k", ar_k, "Set size")->required();
  b_ar->add_option("--until", ar_until, "Resample until the measured bias is at most this");
  b_ar->add_option("--attempts", ar_attempts, "Sample cap for --until")->capture_default_str();
  b_ar->callback([&] {
    action = [&]() -> int {
      FiniteGroup g = FiniteGroup::parse(ar_group);
      const std::uint64_t tries = ar_until > 0.0 ? std::max<std::uint64_t>(1, ar_attempts) : 1;
      std::optional<SampledSet> best;
      std::uint64_t used = 0;
      for (std::uint64_t a = 0; a < tries; ++a) {
        ++used;
        SampledSet s = alon_roichman_sample(g, ar_k, g_.seed + a, spectral_opts());
        if (!best || s.bias < best->bias) best = std::move(s);
        if (ar_until > 0.0 && best->bias <= ar_until) break;
      }
      const bool reached = ar_until <= 0.0 || best->bias <= ar_until;
      int code = emit_set("baseline alon-roichman", b_ar, best->set, {{"attempts", used}, {"reached", reached}});
      if (!reached) {
        err_ << "no sample reached bias " << ar_until << " within " << used << " attempts\n";
        return kExitResource;
      }
      return code;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out_ << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "usage error: " << e.what() << "\n";
    return kExitStructural;
  }
  if (!action) {
    err_ << "usage error: no command given\n";
    return kExitStructural;
  }
  try {
    return action();
  } catch (const CertificationError& e) {
    err_ << "certification failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const ResourceError& e) {
    err_ << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const StructuralError& e) {
    err_ << "structural error: " << e.what() << "\n";
    return kExitStructural;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitStructural;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  return runner.run(args);
}

}  // namespace epsbias::cli
