#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace padsph {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition does not hold (p = 2, p | n, zero input,
/// argument outside the domain of a series, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The result would be known to fewer than one p-adic digit.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// An input exceeds an explicit work budget (enumeration size and the like).
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A check that the mathematics guarantees has failed. Seeing one means a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Raised when a pairing is evaluated exactly at the exceptional
/// quasicharacter; carries the residue of the pairing at that point.
class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, std::complex<double> residue)
      : DomainError(what), residue_(residue) {}
  std::complex<double> residue() const { return residue_; }

 private:
  std::complex<double> residue_;
};

}  // namespace padsph
