#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "padsph/field.hpp"

namespace padsph {

/// Largest q^m that the enumeration oracles accept.
inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

/// Position of a unit mod p^m in the finite quotients of mu_{q-1}, Sigma_n and
/// U_1(Q_p) at level m.
struct UnitRecord {
  std::uint32_t omega = 0;
  std::uint32_t coset = 0;
  std::uint32_t rho = 0;
};

/// The units of O modulo 1 + p^m O together with their spherical coordinates.
/// Vectors mod p^m are keyed by sum_j c_j P^j with P = p^m.
///
/// omega(i) is the Teichmuller lift of residue index i + 1; cosets of Sigma_n
/// are the distinct values of xi(u) mod p^m, ordered by key; rho(a) = 1 + p a.
class UnitQuotient {
 public:
  /// Built once per (field, level) and cached.
  static std::shared_ptr<const UnitQuotient> get(const FieldPtr& field, int level);

  const FieldPtr& field() const { return field_; }
  int level() const { return level_; }
  std::uint64_t key_count() const { return key_count_; }
  std::uint64_t unit_count() const { return unit_count_; }
  std::size_t omega_count() const { return omegas_.size(); }
  std::size_t coset_count() const { return coset_reps_.size(); }
  std::size_t rho_count() const { return rho_count_; }

  const ExtElement& omega(std::size_t i) const { return omegas_.at(i); }
  const ExtElement& coset_representative(std::size_t i) const { return coset_reps_.at(i); }
  std::uint64_t coset_key(std::size_t i) const { return coset_keys_.at(i); }
  Int rho(std::size_t a) const;

  std::uint64_t key(const std::vector<Int>& coeffs) const;
  std::vector<Int> coefficients(std::uint64_t key) const;
  bool is_unit_key(std::uint64_t key) const;
  const UnitRecord& record(std::uint64_t key) const;
  /// Keys of all units in increasing order.
  const std::vector<std::uint64_t>& unit_keys() const { return unit_keys_; }

  /// Classifies any unit of O known to at least p^m.
  UnitRecord classify(const ExtElement& unit) const;
  std::size_t omega_index(const ExtElement& omega) const;
  std::size_t coset_index(const ExtElement& xi) const;
  std::size_t rho_index(const PadicScalar& rho) const;

  /// The unit with the given coordinates, as a key.
  std::uint64_t unit_with(const UnitRecord& rec) const;

 private:
  UnitQuotient(FieldPtr field, int level);
  std::uint64_t pack(const UnitRecord& r) const;

  FieldPtr field_;
  int level_;
  Int modulus_;  // p^m
  std::uint64_t key_count_ = 0;
  std::uint64_t unit_count_ = 0;
  std::size_t rho_count_ = 0;
  std::vector<ExtElement> omegas_;
  std::vector<ExtElement> coset_reps_;
  std::vector<std::uint64_t> coset_keys_;
  std::unordered_map<std::uint64_t, std::uint32_t> coset_lookup_;
  std::vector<UnitRecord> records_;  // indexed by key; meaningful for unit keys
  std::vector<std::uint64_t> unit_keys_;
  std::unordered_map<std::uint64_t, std::uint64_t> inverse_;  // packed record -> key
};

/// Representatives of U / (1 + p^m O), each at precision m.
std::vector<ExtElement> enumerate_units(const FieldPtr& field, int level);

}  // namespace padsph
