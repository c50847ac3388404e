#include "padsph/json_io.hpp"

#include <cmath>

#include "padsph/errors.hpp"

namespace padsph::json_io {

namespace {

Int parse_int(const std::string& s) {
  Int v;
  if (v.set_str(s, 10) != 0) throw DomainError("json: not an integer: " + s);
  return v;
}

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(Int(std::to_string(j.get<long long>())));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw DomainError("json: expected an integer or a \"num/den\" string, got " + j.dump());
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
  throw DomainError("json: expected a number, got " + j.dump());
}

template <class V, class Parse>
FiniteLevelAngular<V> angular_from(const FieldPtr& field, const json& j, Parse parse) {
  if (!j.is_object() || !j.contains("level")) throw DomainError("json: angular table needs \"level\"");
  const int level = j.at("level").get<int>();
  if (level < 1) throw DomainError("json: angular level must be >= 1");
  auto quotient = UnitQuotient::get(field, level);
  if (j.contains("constant")) return FiniteLevelAngular<V>(quotient, parse(j.at("constant")));
  const json& entries = j.at("entries");
  FiniteLevelAngular<V> F(quotient, V{});
  if (!entries.is_array() || entries.size() != F.size())
    throw DomainError("json: angular table needs " + std::to_string(F.size()) + " entries");
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = parse(entries[i]);
  return F;
}

}  // namespace

json to_json(const PadicScalar& x) {
  json j{{"p", x.prime()}, {"N", x.precision()}};
  if (x.is_zero()) {
    j["nu"] = "inf";
    j["mantissa"] = "0";
  } else {
    j["nu"] = x.valuation();
    j["mantissa"] = to_string(x.unit());
  }
  return j;
}

PadicScalar scalar_from_json(const json& j) {
  const long p = j.at("p").get<long>();
  const int N = j.at("N").get<int>();
  if (N < 1) throw DomainError("json: precision N must be >= 1");
  const json& nu = j.at("nu");
  if (nu.is_string()) {
    if (nu.get<std::string>() != "inf") throw DomainError("json: nu must be an integer or \"inf\"");
    return PadicScalar::zero(p, N);
  }
  return PadicScalar::from_unit(p, N, nu.get<long>(), parse_int(j.at("mantissa").get<std::string>()));
}

PadicScalar scalar_from_value(long p, int precision, const json& j) {
  if (j.is_object()) {
    PadicScalar x = scalar_from_json(j);
    if (x.prime() != p) throw DomainError("json: scalar record has the wrong prime");
    return x;
  }
  return PadicScalar::from_rational(p, precision, rational_from(j));
}

json to_json(const FieldContext& field) {
  return json{{"p", field.p()}, {"n", field.n()}, {"N", field.precision()},
              {"modulus", field.modulus_coefficients()}};
}

json to_json(const ExtElement& x) {
  json out = json::array();
  for (const auto& c : x.canonical_coefficients()) out.push_back(to_json(c));
  return out;
}

ExtElement element_from_json(const FieldPtr& field, const json& j) {
  if (!j.is_array()) return ExtElement::from_scalar(field, scalar_from_value(field->p(), field->precision(), j));
  if (j.size() != static_cast<std::size_t>(field->n()))
    throw DomainError("json: element needs " + std::to_string(field->n()) + " canonical coordinates");
  std::vector<PadicScalar> coeffs;
  for (const auto& c : j) coeffs.push_back(scalar_from_value(field->p(), field->precision(), c));
  return ExtElement::from_canonical(field, coeffs);
}

json to_json(const SphericalCoords& c) {
  return json{{"omega", to_json(c.omega)}, {"xi", to_json(c.xi)}, {"r", to_json(c.r)}};
}

json to_json(const CylinderFunction& f) {
  json terms = json::array();
  for (const auto& b : f.terms())
    terms.push_back(json{{"center", to_json(b.center)}, {"k", b.k}, {"value", to_string(b.value)}});
  return json{{"terms", terms}};
}

CylinderFunction cylinder_from_json(const FieldPtr& field, const json& j) {
  CylinderFunction f(field);
  for (const auto& t : j.at("terms")) {
    const ExtElement center = t.contains("center") ? element_from_json(field, t.at("center")) : field->zero();
    f.add(center, t.at("k").get<long>(), rational_from(t.at("value")));
  }
  return f;
}

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw DomainError("json: complex numbers are [re, im]");
    return {number_from(j[0]), number_from(j[1])};
  }
  return {number_from(j), 0.0};
}

UnitCharacter theta_from_json(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "trivial")) return {};
  if (!j.is_object()) throw DomainError("json: theta must be \"trivial\" or {level, exponent, mu_exponent}");
  UnitCharacter theta;
  theta.level = j.value("level", 0);
  if (j.contains("exponent")) {
    const json& e = j.at("exponent");
    theta.exponent = e.is_string() ? parse_int(e.get<std::string>()) : Int(std::to_string(e.get<long long>()));
  }
  theta.mu_exponent = j.value("mu_exponent", 0L);
  if (theta.level < 0) throw DomainError("json: theta level must be >= 0");
  return theta;
}

json to_json(const Quasicharacter& pi) {
  json j;
  if (pi.s_exact) j["s"] = to_string(*pi.s_exact);
  else j["s"] = to_json(pi.s);
  if (pi.theta.level == 0 || pi.theta.exponent == 0) j["theta"] = "trivial";
  else
    j["theta"] = json{{"level", pi.theta.level}, {"exponent", to_string(pi.theta.exponent)},
                      {"mu_exponent", pi.theta.mu_exponent}};
  return j;
}

Quasicharacter quasicharacter_from_json(const json& j) {
  const UnitCharacter theta = theta_from_json(j.contains("theta") ? j.at("theta") : json());
  const json& s = j.at("s");
  if (s.is_string() || s.is_number_integer()) return Quasicharacter::real(rational_from(s), theta);
  return Quasicharacter::complex(complex_from_json(s), theta);
}

json to_json(const FiniteLevelAngular<Rational>& F) {
  json entries = json::array();
  for (const auto& v : F.values()) entries.push_back(to_string(v));
  return json{{"level", F.level()}, {"entries", entries}};
}

json to_json(const FiniteLevelAngular<Complex>& F) {
  json entries = json::array();
  for (const auto& v : F.values()) entries.push_back(to_json(v));
  return json{{"level", F.level()}, {"entries", entries}};
}

FiniteLevelAngular<Rational> angular_exact_from_json(const FieldPtr& field, const json& j) {
  return angular_from<Rational>(field, j, [](const json& v) { return rational_from(v); });
}

FiniteLevelAngular<Complex> angular_from_json(const FieldPtr& field, const json& j) {
  return angular_from<Complex>(field, j, [](const json& v) { return complex_from_json(v); });
}

bool angular_is_exact(const json& j) {
  auto exact = [](const json& v) { return v.is_number_integer() || v.is_string(); };
  if (j.contains("constant")) return exact(j.at("constant"));
  if (!j.contains("entries")) return false;
  for (const auto& v : j.at("entries"))
    if (!exact(v)) return false;
  return true;
}

json to_json(const ChiSquareResult& r) {
  json j{{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}};
  if (!r.groups.empty()) j["bin_plan"] = r.groups;
  return j;
}

json to_json(const HomogeneityReport& r) {
  return json{{"ok", r.ok}, {"max_error", r.max_error}, {"witness", r.witness}};
}

json to_json(const LevyModel& m) {
  return json{{"alpha", m.alpha},
              {"shells", json::array({m.k_min, m.k_max})},
              {"total_rate", m.total_rate},
              {"rotation_invariant", m.rotation_invariant}};
}

json to_json(const RadialLawReport& r) {
  return json{{"chi_square", to_json(r.chi)}, {"bins", r.bins},         {"counts_a", r.counts_a},
              {"counts_b", r.counts_b},       {"trials", r.trials},     {"discarded_a", r.discarded_a},
              {"discarded_b", r.discarded_b}, {"threshold", r.threshold}, {"passed", r.passed}};
}

json to_json(const MarkovReport& r) {
  auto strata = [](const std::vector<StratumTest>& tests) {
    json out = json::array();
    for (const auto& t : tests)
      out.push_back(json{{"stratum", t.stratum}, {"samples", t.samples}, {"chi_square", to_json(t.chi)}});
    return out;
  };
  return json{{"paths", r.paths},
              {"discarded", r.discarded},
              {"threshold", r.threshold},
              {"correction", "bonferroni"},
              {"radial", {{"strata", strata(r.radial)}, {"min_p", r.radial_min_p}, {"passed", r.radial_passed}}},
              {"angular",
               {{"strata", strata(r.angular)}, {"min_p", r.angular_min_p}, {"passed", r.angular_passed}}}};
}

json to_json(const AngularIncrementReport& r) {
  json tables = json::object();
  for (const auto& [stratum, cells] : r.tables) {
    json t = json::object();
    for (const auto& [cell, count] : cells) t[std::to_string(cell)] = count;
    tables[stratum] = t;
  }
  return json{{"paths", r.paths},
              {"discarded", r.discarded},
              {"level", r.level},
              {"tables", tables},
              {"left_invariance", to_json(r.left_invariance)},
              {"one_jump", to_json(r.one_jump)},
              {"zero_jump_samples", r.zero_jump_samples},
              {"zero_jump_violations", r.zero_jump_violations},
              {"threshold", r.threshold},
              {"passed", r.passed}};
}

}  // namespace padsph::json_io
