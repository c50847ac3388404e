#include "padsph/levels.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "padsph/errors.hpp"
#include "padsph/parallel.hpp"
#include "padsph/spherical.hpp"

namespace padsph {

namespace {

std::uint64_t checked_key_count(const FieldContext& field, int level) {
  if (level < 1) throw DomainError("level must be at least 1");
  if (level > field.precision()) throw PrecisionError("level exceeds the field precision");
  Int count;
  mpz_pow_ui(count.get_mpz_t(), field.q().get_mpz_t(), static_cast<unsigned long>(level));
  if (count > kEnumerationBudget) throw BudgetError("q^m exceeds the enumeration budget");
  return to_u64(count);
}

}  // namespace

UnitQuotient::UnitQuotient(FieldPtr field, int level) : field_(std::move(field)), level_(level) {
  const FieldContext& f = *field_;
  require_spherical(f);
  key_count_ = checked_key_count(f, level);
  modulus_ = prime_power(f.p(), level);
  rho_count_ = to_u64(prime_power(f.p(), level - 1));
  const std::uint64_t q = to_u64(f.q());
  for (std::uint64_t i = 1; i < q; ++i) {
    omegas_.push_back(ExtElement::from_power_coefficients(field_, 0, f.teichmuller_of_residue(i), level));
  }

  records_.assign(key_count_, UnitRecord{});
  std::vector<std::uint64_t> xi_keys(key_count_, 0);
  std::vector<char> is_unit(key_count_, 0);
  parallel_for(key_count_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      if (!is_unit_key(k)) continue;
      const ExtElement u = ExtElement::from_power_coefficients(field_, 0, coefficients(k), level_);
      const SphericalCoords c = decompose(u);
      is_unit[k] = 1;
      records_[k].omega = static_cast<std::uint32_t>(u.residue_index() - 1);
      records_[k].rho = static_cast<std::uint32_t>(rho_index(c.r));
      xi_keys[k] = key(c.xi.integral_coefficients(level_));
    }
  });

  std::vector<std::uint64_t> distinct;
  for (std::uint64_t k = 0; k < key_count_; ++k) {
    if (!is_unit[k]) continue;
    unit_keys_.push_back(k);
    distinct.push_back(xi_keys[k]);
  }
  unit_count_ = unit_keys_.size();
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    coset_lookup_.emplace(distinct[i], static_cast<std::uint32_t>(i));
    coset_keys_.push_back(distinct[i]);
    coset_reps_.push_back(ExtElement::from_power_coefficients(field_, 0, coefficients(distinct[i]), level));
  }
  for (std::uint64_t k : unit_keys_) {
    records_[k].coset = coset_lookup_.at(xi_keys[k]);
    inverse_.emplace(pack(records_[k]), k);
  }
}

std::shared_ptr<const UnitQuotient> UnitQuotient::get(const FieldPtr& field, int level) {
  static std::mutex mutex;
  static std::map<std::pair<const FieldContext*, int>,
                  std::pair<std::weak_ptr<const FieldContext>, std::shared_ptr<const UnitQuotient>>>
      cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({field.get(), level});
    if (it != cache.end() && !it->second.first.expired()) return it->second.second;
  }
  // Build outside the lock; a concurrent duplicate build is harmless.
  std::shared_ptr<const UnitQuotient> built(new UnitQuotient(field, level));
  std::lock_guard lock(mutex);
  for (auto it = cache.begin(); it != cache.end();) {
    it = it->second.first.expired() ? cache.erase(it) : std::next(it);
  }
  cache[{field.get(), level}] = {field, built};
  return built;
}

std::uint64_t UnitQuotient::pack(const UnitRecord& r) const {
  return (static_cast<std::uint64_t>(r.omega) * coset_reps_.size() + r.coset) * rho_count_ + r.rho;
}

Int UnitQuotient::rho(std::size_t a) const { return 1 + Int(field_->p()) * static_cast<unsigned long>(a); }

std::uint64_t UnitQuotient::key(const std::vector<Int>& coeffs) const {
  const std::uint64_t base = to_u64(modulus_);
  std::uint64_t k = 0;
  for (std::size_t j = coeffs.size(); j-- > 0;) k = k * base + to_u64(mod(coeffs[j], modulus_));
  return k;
}

std::vector<Int> UnitQuotient::coefficients(std::uint64_t k) const {
  const std::uint64_t base = to_u64(modulus_);
  std::vector<Int> out(static_cast<std::size_t>(field_->n()));
  for (auto& c : out) {
    c = static_cast<unsigned long>(k % base);
    k /= base;
  }
  return out;
}

bool UnitQuotient::is_unit_key(std::uint64_t k) const {
  const std::uint64_t base = to_u64(modulus_);
  const auto p = static_cast<std::uint64_t>(field_->p());
  for (int j = 0; j < field_->n(); ++j) {
    if ((k % base) % p != 0) return true;
    k /= base;
  }
  return false;
}

const UnitRecord& UnitQuotient::record(std::uint64_t k) const {
  if (k >= key_count_ || !is_unit_key(k)) throw DomainError("record: key is not a unit");
  return records_[k];
}

UnitRecord UnitQuotient::classify(const ExtElement& unit) const {
  if (!unit.is_unit()) throw DomainError("classify: not a unit");
  return record(key(unit.integral_coefficients(level_)));
}

std::size_t UnitQuotient::omega_index(const ExtElement& omega) const {
  if (!omega.is_unit()) throw DomainError("omega_index: not a unit");
  return static_cast<std::size_t>(omega.residue_index() - 1);
}

std::size_t UnitQuotient::coset_index(const ExtElement& xi) const {
  auto it = coset_lookup_.find(key(xi.integral_coefficients(level_)));
  if (it == coset_lookup_.end()) throw DomainError("coset_index: element is not in Sigma_n");
  return it->second;
}

std::size_t UnitQuotient::rho_index(const PadicScalar& rho) const {
  const Int r = rho.residue(level_);
  if (mpz_fdiv_ui(r.get_mpz_t(), static_cast<unsigned long>(field_->p())) != 1) {
    throw DomainError("rho_index: not a principal unit");
  }
  Int a = (r - 1) / field_->p();
  return static_cast<std::size_t>(to_u64(a));
}

std::uint64_t UnitQuotient::unit_with(const UnitRecord& rec) const {
  auto it = inverse_.find(pack(rec));
  if (it == inverse_.end()) throw DomainError("unit_with: no unit has these coordinates");
  return it->second;
}

std::vector<ExtElement> enumerate_units(const FieldPtr& field, int level) {
  const std::uint64_t count = checked_key_count(*field, level);
  const Int& m = prime_power(field->p(), level);
  const std::uint64_t base = to_u64(m);
  const auto p = static_cast<std::uint64_t>(field->p());
  std::vector<ExtElement> out;
  for (std::uint64_t k = 0; k < count; ++k) {
    std::vector<Int> coeffs(static_cast<std::size_t>(field->n()));
    bool unit = false;
    std::uint64_t rest = k;
    for (auto& c : coeffs) {
      const std::uint64_t digit = rest % base;
      unit = unit || digit % p != 0;
      c = static_cast<unsigned long>(digit);
      rest /= base;
    }
    if (unit) out.push_back(ExtElement::from_power_coefficients(field, 0, std::move(coeffs), level));
  }
  return out;
}

}  // namespace padsph
