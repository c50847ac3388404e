#pragma once

#include <vector>

#include "padsph/field.hpp"
#include "padsph/padic.hpp"

namespace padsph {

/// x = omega * xi * r with omega in mu_{q-1}, xi in Sigma_n and r in the
/// positive group p^Z (1 + pZ_p).
struct SphericalCoords {
  ExtElement omega;
  ExtElement xi;
  PadicScalar r;
};

struct SpecialBasis {
  /// eps_j = (theta_j - g(theta_j)) / (1 + g(theta_j) p), j = 1..n-1.
  std::vector<ExtElement> epsilons;
};

/// Throws DomainError unless gcd(n, p) = 1.
void require_spherical(const FieldContext& field);

SphericalCoords decompose(const ExtElement& x);
ExtElement compose(const SphericalCoords& c);

/// N(y) = 1 and omega(y) = 1.
bool sigma_membership(const ExtElement& y);

SpecialBasis special_basis(const FieldPtr& field);

/// Exponents (b_1, ..., b_n) with x = prod_j (1 + eps_j p)^{b_j} * (1 + p)^{b_n}.
/// The exponents are determined modulo p^(N-1), which fixes the product mod p^N.
std::vector<PadicScalar> principal_unit_coords(const ExtElement& x);
ExtElement recompose_principal_unit(const FieldPtr& field, const std::vector<PadicScalar>& coords);

/// prod_j (1 + eps_j p)^{b_j}, computed both as that product and as y / g(y)
/// with y = prod_j (1 + theta_j p)^{b_j}. The two must agree.
ExtElement xi_as_quotient(const FieldPtr& field, const std::vector<PadicScalar>& b);

/// Rank of a matrix over F_p (rows of residues).
int rank_mod_p(std::vector<std::vector<long>> rows, long p);

}  // namespace padsph
