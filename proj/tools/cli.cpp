#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "padsph/distributions.hpp"
#include "padsph/errors.hpp"
#include "padsph/haar.hpp"
#include "padsph/json_io.hpp"
#include "padsph/levy.hpp"
#include "padsph/spherical.hpp"
#include "verify.hpp"

#ifndef PADSPH_VERSION
#define PADSPH_VERSION "0.1.0"
#endif

namespace padsph::cli {

namespace {

using nlohmann::json;

struct Common {
  long p = 3;
  int n = 2;
  int precision = 8;
  std::string modulus;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output;
  unsigned threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--p", c.p, "odd prime p")->required();
  app->add_option("--n", c.n, "degree n of the unramified extension")->required()->check(CLI::PositiveNumber);
  app->add_option("--precision,-N", c.precision, "working precision N (digits mod p^N)")
      ->check(CLI::PositiveNumber);
  app->add_option("--modulus", c.modulus, "comma list c_0,...,c_(n-1) of a monic modulus (optional)");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "text"}));
  app->add_option("--output,-o", c.output, "write output to a file instead of stdout");
  app->add_option("--threads", c.threads, "worker threads (default: PADSPH_THREADS or all cores)");
}

std::optional<std::vector<long>> parse_modulus(const std::string& text, int n) {
  if (text.empty()) return std::nullopt;
  std::vector<long> coeffs;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      coeffs.push_back(std::stol(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--modulus", "not an integer: " + item);
    }
  }
  // a trailing leading coefficient 1 is allowed
  if (coeffs.size() == static_cast<std::size_t>(n) + 1 && coeffs.back() == 1) coeffs.pop_back();
  if (coeffs.size() != static_cast<std::size_t>(n))
    throw CLI::ValidationError("--modulus", "need " + std::to_string(n) + " coefficients c_0..c_(n-1)");
  return coeffs;
}

json load_json(const std::string& arg, const std::string& what) {
  std::string text = arg;
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError(what, std::string("not a JSON file or JSON text: ") + e.what());
  }
}

json provenance(const FieldContext& K, const Common& c) {
  return json{{"p", K.p()},
              {"n", K.n()},
              {"N", K.precision()},
              {"modulus", K.modulus_coefficients()},
              {"seed", c.seed},
              {"version", PADSPH_VERSION}};
}

// key: value lines, nested keys joined with '.'
void render_text(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  if (j.is_array()) {
    bool flat = true;
    for (const auto& v : j) flat = flat && !v.is_structured();
    if (!flat) {
      for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
      return;
    }
  }
  out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

void emit(const json& payload, const Common& c, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw CLI::ValidationError("--output", "cannot open " + c.output);
    sink = &file;
  }
  if (c.format == "text") render_text(payload, "", *sink);
  else *sink << payload.dump(2) << "\n";
}

FieldPtr make_field(const Common& c) {
  if (c.threads > 0) setenv("PADSPH_THREADS", std::to_string(c.threads).c_str(), 1);
  return FieldContext::create(c.p, c.n, c.precision, parse_modulus(c.modulus, c.n));
}

json field_info(const Common& c) {
  const FieldPtr K = make_field(c);
  json j = json_io::to_json(*K);
  j["q"] = to_string(K->q());
  j["frobenius_image_of_t"] = json_io::to_json(frobenius(K->generator()));
  j["canonical_basis"] = "theta_j = t^j (j = 1..n-1), theta_n = 1";
  j["spherical_coordinates_available"] = std::gcd(static_cast<long>(K->n()), K->p()) == 1;
  j["provenance"] = provenance(*K, c);
  return j;
}

Rational abs_power(const PadicScalar& r, int n) {
  Rational out = 1;
  for (int i = 0; i < n; ++i) out *= r.abs();
  return out;
}

json decompose_cmd(const Common& c, const std::string& x_arg) {
  const FieldPtr K = make_field(c);
  require_spherical(*K);
  const ExtElement x = json_io::element_from_json(K, load_json(x_arg, "--x"));
  const SphericalCoords sc = decompose(x);
  const ExtElement back = compose(sc);
  const ExtElement residual = back - x;
  json checks{{"omega_is_teichmuller", teichmuller_K(sc.omega) == sc.omega},
              {"xi_in_sigma", sigma_membership(sc.xi)},
              {"r_positive", is_positive(sc.r)},
              {"norm_identity", normalized_abs(x) == abs_power(sc.r, K->n())},
              {"roundtrip_residual_valuation", residual.is_zero() ? json("inf") : json(residual.valuation())},
              {"roundtrip_exact", back == x}};
  json j = json_io::to_json(sc);
  j["x"] = json_io::to_json(x);
  j["checks"] = checks;
  j["provenance"] = provenance(*K, c);
  return j;
}

json integrate_cmd(const Common& c, const std::string& f_arg, bool spherical) {
  const FieldPtr K = make_field(c);
  const CylinderFunction f = json_io::cylinder_from_json(K, load_json(f_arg, "--function"));
  const Rational lhs = integrate_K(f);
  json j{{"integral_K", to_string(lhs)}, {"level", f.level()}, {"support_exponent", f.support_exponent()}};
  if (spherical) {
    require_spherical(*K);
    const Rational rhs = spherical_integrate(f);
    j["spherical"] = to_string(rhs);
    j["difference"] = to_string(Rational(lhs - rhs));
  }
  j["provenance"] = provenance(*K, c);
  return j;
}

struct PairArgs {
  std::string s = "0";
  std::string s_imag;
  std::string theta = "trivial";
  std::string F;
  std::string phi;
};

UnitCharacter parse_theta(const std::string& text) {
  if (text == "trivial") return {};
  if (!text.empty() && text.front() == '{') return json_io::theta_from_json(json::parse(text));
  // level:exponent[:mu_exponent]
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3)
    throw CLI::ValidationError("--theta", "use trivial, level:exponent[:mu] or a JSON object");
  json j{{"level", std::stoi(parts[0])}, {"exponent", parts[1]}};
  if (parts.size() == 3) j["mu_exponent"] = std::stol(parts[2]);
  return json_io::theta_from_json(j);
}

json pair_cmd(const Common& c, const PairArgs& a) {
  const FieldPtr K = make_field(c);
  require_spherical(*K);
  const UnitCharacter theta = parse_theta(a.theta);
  Quasicharacter pi;
  if (a.s_imag.empty() || parse_rational(a.s_imag) == 0) {
    pi = Quasicharacter::real(parse_rational(a.s), theta);
  } else {
    pi = Quasicharacter::complex(Complex(parse_rational(a.s).get_d(), parse_rational(a.s_imag).get_d()), theta);
  }
  const json F_json = a.F.empty() ? json{{"level", 1}, {"constant", 1}} : load_json(a.F, "--F");
  const CylinderFunction phi = json_io::cylinder_from_json(K, load_json(a.phi, "--phi"));
  json j{{"quasicharacter", json_io::to_json(pi)}, {"exceptional", is_exceptional(pi, K->p(), K->n())}};
  const auto F = json_io::angular_from_json(K, F_json);
  try {
    if (pi.is_exact(K->p()) && json_io::angular_is_exact(F_json)) {
      const auto Fe = json_io::angular_exact_from_json(K, F_json);
      const auto r = pair(HomogeneousDistribution<Rational>{pi, Fe}, phi);
      j["exact"] = to_string(r.total);
      j["value"] = json_io::to_json(Complex(r.total.get_d(), 0));
      j["finite_part"] = to_string(r.finite_part);
      j["singular_part"] = to_string(r.singular_part);
    } else {
      const auto r = pair(HomogeneousDistribution<Complex>{pi, F}, phi);
      j["value"] = json_io::to_json(r.total);
      j["finite_part"] = json_io::to_json(r.finite_part);
      j["singular_part"] = json_io::to_json(r.singular_part);
    }
    j["pole"] = false;
  } catch (const PoleError& e) {
    j["pole"] = true;
    j["message"] = e.what();
    j["residue"] = json_io::to_json(residue_at_exceptional(F, phi));
    j["residue_without_orbit_factor"] = json_io::to_json(residue_formula_without_orbit_factor(F, phi));
  }
  j["provenance"] = provenance(*K, c);
  return j;
}

struct SimulateArgs {
  double alpha = 1.0;
  std::string shells = "-3..3";
  double rate = 1.0;
  std::size_t paths = 100000;
  double T = 1.0;
  std::string report;
  std::string x;
  bool adversarial = false;
  int digits = 2;
  int level = 2;
};

std::pair<long, long> parse_shells(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--shells", "use kmin..kmax");
  try {
    return {std::stol(text.substr(0, dots)), std::stol(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--shells", "use kmin..kmax");
  }
}

json simulate_cmd(const Common& c, const SimulateArgs& a) {
  const FieldPtr K = make_field(c);
  require_spherical(*K);
  LevyModel model;
  model.alpha = a.alpha;
  std::tie(model.k_min, model.k_max) = parse_shells(a.shells);
  model.total_rate = a.rate;
  model.rotation_invariant = !a.adversarial;
  model.validate();
  // default start on the shell carrying most of the jump rate
  const ExtElement x = a.x.empty() ? ExtElement::from_scalar(K, PadicScalar::from_unit(K->p(), K->precision(),
                                                                                      -model.k_min, 1))
                                   : json_io::element_from_json(K, load_json(a.x, "--x"));
  std::mt19937_64 rng(c.seed);
  const SphericalCoords g = decompose(sample_sphere_uniform(K, 0, rng));
  const ExtElement omega0 = teichmuller_K(K->generator() + K->one());

  const auto eq_omega = radial_kernel_check_eq21(model, K, x, omega0 * x, a.T, a.paths, c.seed, a.digits);
  const auto eq_xi = radial_kernel_check_eq21(model, K, x, g.xi * x, a.T, a.paths, c.seed + 1, a.digits);
  const auto markov =
      markov_diagnostic(model, K, x, a.T / 3, 2 * a.T / 3, a.T, a.paths, c.seed + 2, 50, a.digits);
  const auto angular =
      angular_increment_sample(model, K, x, g.omega * g.xi, a.T, a.paths, c.seed + 3, a.level);

  json j{{"model", json_io::to_json(model)},
         {"shell_rates", model.shell_rates(*K)},
         {"start", json_io::to_json(x)},
         {"T", a.T},
         {"paths", a.paths},
         {"radial_law",
          {{"omega_start", {{"omega0", json_io::to_json(omega0)}, {"report", json_io::to_json(eq_omega)}}},
           {"xi_start", {{"xi0", json_io::to_json(g.xi)}, {"report", json_io::to_json(eq_xi)}}}}},
         {"markov", json_io::to_json(markov)},
         {"markov_times", {a.T / 3, 2 * a.T / 3, a.T}},
         {"angular_increments", json_io::to_json(angular)},
         {"summary",
          {{"radial_law_passed", eq_omega.passed && eq_xi.passed},
           {"markov_radial_passed", markov.radial_passed},
           {"markov_angular_passed", markov.angular_passed},
           {"angular_increments_passed", angular.passed}}}};
  j["provenance"] = provenance(*K, c);
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw CLI::ValidationError("--report", "cannot open " + a.report);
    out << j.dump(2) << "\n";
  }
  return j;
}

json verify_cmd(const Common& c, VerifyConfig v, bool& passed) {
  const FieldPtr K = make_field(c);
  v.p = c.p;
  v.n = c.n;
  v.precision = c.precision;
  v.modulus = parse_modulus(c.modulus, c.n);
  v.seed = c.seed;
  const auto results = run_verify(v);
  passed = true;
  json suites = json::array();
  for (const auto& r : results) {
    passed = passed && r.passed;
    suites.push_back(json{{"suite", r.name}, {"passed", r.passed}, {"details", r.details}});
  }
  return json{{"passed", passed}, {"suites", suites}, {"provenance", provenance(*K, c)}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"padsph: spherical coordinates, Haar integration and homogeneous distributions on unramified "
               "extensions of Q_p"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PADSPH_VERSION);

  Common common;
  std::string x_arg, f_arg;
  bool spherical = false;
  PairArgs pair_args;
  SimulateArgs sim;
  VerifyConfig verify;

  auto* info = app.add_subcommand("field-info", "print the modulus, q and the Frobenius image of t");
  add_common(info, common);

  auto* dec = app.add_subcommand("decompose", "spherical coordinates x = omega xi r");
  add_common(dec, common);
  dec->add_option("--x", x_arg, "element: JSON array of canonical coordinates, or a file")->required();

  auto* integ = app.add_subcommand("integrate", "Haar integral of a cylinder function");
  add_common(integ, common);
  integ->add_option("--function", f_arg, "cylinder function JSON (file or text)")->required();
  integ->add_flag("--spherical", spherical, "also integrate in spherical coordinates and print the difference");

  auto* pr = app.add_subcommand("pair", "pair pi(r)F with a test function");
  add_common(pr, common);
  pr->add_option("--s", pair_args.s, "real part of s (integer, decimal or a/b)")->required();
  pr->add_option("--s-imag", pair_args.s_imag, "imaginary part of s");
  pr->add_option("--theta", pair_args.theta, "trivial | level:exponent[:mu] | JSON object");
  pr->add_option("--F", pair_args.F, "angular table JSON (default: constant 1 at level 1)");
  pr->add_option("--phi", pair_args.phi, "cylinder function JSON (file or text)")->required();

  auto* simc = app.add_subcommand("simulate", "simulate jump processes and run the radial/angular checks");
  add_common(simc, common);
  simc->add_option("--alpha", sim.alpha, "stability index");
  simc->add_option("--shells", sim.shells, "shell range kmin..kmax (jump sizes q^k)");
  simc->add_option("--rate", sim.rate, "total jump rate");
  simc->add_option("--paths", sim.paths, "paths per start")->check(CLI::PositiveNumber);
  simc->add_option("--T", sim.T, "time horizon")->check(CLI::PositiveNumber);
  simc->add_option("--report", sim.report, "also write the report JSON to this file");
  simc->add_option("--x", sim.x, "start (default p^(-kmin))");
  simc->add_option("--digits", sim.digits, "digits of r used for radial bins")->check(CLI::PositiveNumber);
  simc->add_option("--level", sim.level, "level of the angular increment cells")->check(CLI::PositiveNumber);
  simc->add_flag("--adversarial", sim.adversarial, "use the non rotation invariant control model");

  auto* ver = app.add_subcommand("verify", "run the oracle suites; exit 1 on any failure");
  add_common(ver, common);
  ver->add_option("--elements", verify.elements, "random elements for the decomposition checks");
  ver->add_option("--functions", verify.functions, "random cylinder functions for the integration identity");
  ver->add_option("--paths", verify.paths, "paths per start for the radial law check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    json payload;
    int code = kOk;
    if (*info) payload = field_info(common);
    else if (*dec) payload = decompose_cmd(common, x_arg);
    else if (*integ) payload = integrate_cmd(common, f_arg, spherical);
    else if (*pr) payload = pair_cmd(common, pair_args);
    else if (*simc) payload = simulate_cmd(common, sim);
    else if (*ver) {
      bool passed = false;
      payload = verify_cmd(common, verify, passed);
      code = passed ? kOk : kVerificationFailed;
    }
    emit(payload, common, out);
    return code;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "usage error: bad JSON input: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const PrecisionError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

}  // namespace padsph::cli
