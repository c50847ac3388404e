#include "padsph/spherical.hpp"

#include <numeric>

#include "padsph/errors.hpp"

namespace padsph {

namespace {

// Solves A b = c modulo p^k where A mod p is invertible. Columns of A are
// the coefficient vectors in `columns`.
std::vector<Int> solve_mod_pk(const std::vector<std::vector<Int>>& columns, std::vector<Int> rhs, long p, int k) {
  const std::size_t n = rhs.size();
  const Int& m = prime_power(p, k);
  std::vector<std::vector<Int>> a(n, std::vector<Int>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = mod(columns[j][i], m);
    a[i][n] = mod(rhs[i], m);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] % p == 0) ++pivot;
    if (pivot == n) throw InternalError("singular system in principal unit coordinates");
    std::swap(a[col], a[pivot]);
    const Int inv = inverse_mod(a[col][col], m);
    for (auto& e : a[col]) e = mod(e * inv, m);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const Int f = a[i][col];
      for (std::size_t j = col; j <= n; ++j) a[i][j] = mod(a[i][j] - f * a[col][j], m);
    }
  }
  std::vector<Int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][n];
  return out;
}

ExtElement one_plus_p_times(const ExtElement& e) {
  const FieldPtr& field = e.field_ptr();
  const PadicScalar p = PadicScalar::from_integer(field->p(), field->precision(), field->p());
  return field->one() + e.scale(p);
}

}  // namespace

void require_spherical(const FieldContext& field) {
  if (std::gcd(static_cast<long>(field.n()), field.p()) != 1) {
    throw DomainError("spherical coordinates need gcd(n, p) = 1");
  }
}

SphericalCoords decompose(const ExtElement& x) {
  if (x.is_zero()) throw DomainError("decompose: x = 0 has no spherical coordinates");
  const FieldContext& field = x.field();
  require_spherical(field);
  const long p = field.p();
  SphericalCoords c;
  c.omega = teichmuller_K(x);
  // Unit part divided by omega is a principal unit.
  const ExtElement unit = ExtElement::from_power_coefficients(x.field_ptr(), 0, x.unit(), x.precision());
  const ExtElement principal = unit * c.omega.inverse();
  const PadicScalar root = nth_root_principal(norm(principal), field.n());
  c.r = PadicScalar::from_unit(p, root.precision(), x.valuation(), root.unit());
  c.xi = principal.scale(root.inverse());
  return c;
}

ExtElement compose(const SphericalCoords& c) {
  if (!c.omega.is_unit() || !(teichmuller_K(c.omega) == c.omega)) {
    throw DomainError("compose: omega is not a (q-1)-th root of unity");
  }
  if (!sigma_membership(c.xi)) throw DomainError("compose: xi is not in Sigma_n");
  if (c.r.is_zero() || !is_positive(c.r)) throw DomainError("compose: r is not in the positive group");
  return (c.omega * c.xi).scale(c.r);
}

bool sigma_membership(const ExtElement& y) {
  if (y.is_zero()) throw DomainError("sigma_membership: zero");
  if (!y.is_unit()) return false;
  const PadicScalar one = PadicScalar::from_integer(y.field().p(), y.precision(), 1);
  return norm(y) == one && teichmuller_K(y) == y.field().one();
}

int rank_mod_p(std::vector<std::vector<long>> rows, long p) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
    auto r = static_cast<std::size_t>(rank);
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][col] % p == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    long inv = 1;
    for (long e = p - 2, b = ((rows[r][col] % p) + p) % p; e > 0; e >>= 1, b = b * b % p) {
      if (e & 1) inv = inv * b % p;
    }
    for (auto& v : rows[r]) v = ((v % p) * inv % p + p) % p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const long f = ((rows[i][col] % p) + p) % p;
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) rows[i][j] = (((rows[i][j] - f * rows[r][j]) % p) + p) % p;
    }
    ++rank;
  }
  return rank;
}

SpecialBasis special_basis(const FieldPtr& field) {
  require_spherical(*field);
  const long p = field->p();
  const int n = field->n();
  const PadicScalar pp = PadicScalar::from_integer(p, field->precision(), p);
  SpecialBasis basis;
  std::vector<std::vector<long>> residues;
  for (int j = 1; j < n; ++j) {
    const ExtElement theta = field->basis_element(j);
    const ExtElement g = frobenius(theta);
    const ExtElement eps = (theta - g) / (field->one() + g.scale(pp));
    basis.epsilons.push_back(eps);
    std::vector<long> row;
    for (const auto& c : eps.integral_coefficients(1)) row.push_back(c.get_si());
    residues.push_back(row);
  }
  std::vector<long> one_row(static_cast<std::size_t>(n), 0);
  one_row[0] = 1;
  residues.push_back(one_row);
  if (rank_mod_p(residues, p) != n) throw InternalError("special basis residues are dependent");
  return basis;
}

std::vector<PadicScalar> principal_unit_coords(const ExtElement& x) {
  if (!x.is_principal_unit()) throw DomainError("principal_unit_coords: argument is not a principal unit");
  const FieldPtr& field = x.field_ptr();
  const long p = field->p();
  const int prec = x.precision();
  const SpecialBasis basis = special_basis(field);
  // log maps 1 + pO onto pO; divide by p and solve modulo p^(prec-1).
  const int k = prec - 1;
  std::vector<PadicScalar> out;
  if (k < 1) {
    for (int j = 0; j < field->n(); ++j) out.push_back(PadicScalar::zero(p, 1));
    return out;
  }
  auto scaled_log = [&](const ExtElement& u) {
    std::vector<Int> v = log_principal_K(u.with_precision(prec)).integral_coefficients(prec);
    for (auto& c : v) mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(p));
    return v;
  };
  std::vector<std::vector<Int>> columns;
  for (const auto& eps : basis.epsilons) columns.push_back(scaled_log(one_plus_p_times(eps)));
  columns.push_back(scaled_log(one_plus_p_times(field->one())));
  const std::vector<Int> b = solve_mod_pk(columns, scaled_log(x), p, k);
  for (const auto& v : b) out.push_back(PadicScalar::from_integer_abs(p, k, v));
  return out;
}

ExtElement recompose_principal_unit(const FieldPtr& field, const std::vector<PadicScalar>& coords) {
  if (static_cast<int>(coords.size()) != field->n()) throw DomainError("expected n exponents");
  const PadicScalar pp = PadicScalar::from_integer(field->p(), field->precision(), field->p());
  const SpecialBasis basis = special_basis(field);
  ExtElement acc = field->one();
  for (std::size_t j = 0; j < basis.epsilons.size(); ++j) {
    acc *= pow_zp_exponent_K(basis.epsilons[j].scale(pp), coords[j]);
  }
  acc *= pow_zp_exponent_K(ExtElement::from_scalar(field, pp), coords.back());
  return acc;
}

ExtElement xi_as_quotient(const FieldPtr& field, const std::vector<PadicScalar>& b) {
  if (static_cast<int>(b.size()) != field->n() - 1) throw DomainError("expected n-1 exponents");
  const PadicScalar pp = PadicScalar::from_integer(field->p(), field->precision(), field->p());
  const SpecialBasis basis = special_basis(field);
  ExtElement product = field->one();
  ExtElement y = field->one();
  for (std::size_t j = 0; j < b.size(); ++j) {
    product *= pow_zp_exponent_K(basis.epsilons[j].scale(pp), b[j]);
    y *= pow_zp_exponent_K(field->basis_element(static_cast<int>(j) + 1).scale(pp), b[j]);
  }
  const ExtElement quotient = y / frobenius(y);
  if (!(product == quotient)) throw InternalError("xi_as_quotient: product and quotient forms disagree");
  return product;
}

}  // namespace padsph
