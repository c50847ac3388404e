#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "padsph/field.hpp"

namespace padsph::cli {

struct VerifyConfig {
  long p = 3;
  int n = 2;
  int precision = 8;
  std::optional<std::vector<long>> modulus;
  std::uint64_t seed = 1;
  std::size_t elements = 1000;  // spherical coordinate roundtrip sample
  std::size_t functions = 50;   // random cylinder functions for the integration identity
  std::size_t paths = 20000;    // per start, for the radial law check
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  nlohmann::json details;
};

std::vector<SuiteResult> run_verify(const VerifyConfig& config);

/// p^v u with v uniform in [v_low, v_high] and u a Haar-random unit.
ExtElement random_element(const FieldPtr& field, std::mt19937_64& rng, long v_low, long v_high);

}  // namespace padsph::cli
