#pragma once

#include <nlohmann/json.hpp>

#include "padsph/distributions.hpp"
#include "padsph/field.hpp"
#include "padsph/haar.hpp"
#include "padsph/levy.hpp"
#include "padsph/spherical.hpp"
#include "padsph/stats.hpp"

namespace padsph::json_io {

using json = nlohmann::json;

/// {"p", "nu" (integer or "inf"), "mantissa" (decimal string), "N"}.
json to_json(const PadicScalar& x);
PadicScalar scalar_from_json(const json& j);
/// Accepts a scalar record, an integer, or a decimal "a" / "a/b" string.
PadicScalar scalar_from_value(long p, int precision, const json& j);

/// {"p", "n", "N", "modulus"} with the modulus low-to-high including the leading 1.
json to_json(const FieldContext& field);

/// Array of scalar records in the canonical basis theta_1..theta_n (theta_n = 1).
json to_json(const ExtElement& x);
/// An array of canonical coordinates (records, integers or "a/b" strings), or a
/// single such value for an element of Q_p.
ExtElement element_from_json(const FieldPtr& field, const json& j);

json to_json(const SphericalCoords& c);

/// {"terms": [{"center": element, "k": int, "value": "num/den"}]}.
json to_json(const CylinderFunction& f);
CylinderFunction cylinder_from_json(const FieldPtr& field, const json& j);

/// [re, im].
json to_json(const Complex& z);
Complex complex_from_json(const json& j);

/// {"s": number | "a/b" | [re, im], "theta": "trivial" | {"level", "exponent", "mu_exponent"}}.
json to_json(const Quasicharacter& pi);
Quasicharacter quasicharacter_from_json(const json& j);
UnitCharacter theta_from_json(const json& j);

/// {"level": m, "entries": [...]} in omega-major order, or {"level": m, "constant": v}.
/// Exact tables use "num/den" strings, complex ones numbers or [re, im].
json to_json(const FiniteLevelAngular<Rational>& F);
json to_json(const FiniteLevelAngular<Complex>& F);
FiniteLevelAngular<Rational> angular_exact_from_json(const FieldPtr& field, const json& j);
FiniteLevelAngular<Complex> angular_from_json(const FieldPtr& field, const json& j);
/// True when every entry is an integer or a "a/b" string.
bool angular_is_exact(const json& j);

json to_json(const ChiSquareResult& r);
json to_json(const HomogeneityReport& r);
json to_json(const LevyModel& m);
json to_json(const RadialLawReport& r);
json to_json(const MarkovReport& r);
json to_json(const AngularIncrementReport& r);

}  // namespace padsph::json_io
