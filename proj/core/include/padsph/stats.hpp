#pragma once

#include <cstddef>
#include <vector>

namespace padsph {

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  /// Groups of original bins merged into one cell (the bin plan); empty for
  /// contingency tables.
  std::vector<std::vector<std::size_t>> groups;
};

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// Goodness of fit of counts against probabilities; adjacent bins are merged
/// until every expected count reaches min_expected.
ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probabilities,
                               double min_expected = 5);

/// Homogeneity of two histograms over the same bins.
ChiSquareResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                      double min_expected = 5);

/// Independence in an r x c contingency table; sparse rows and columns are
/// merged into their neighbours first.
ChiSquareResult chi_square_independence(std::vector<std::vector<double>> table, double min_expected = 5);

}  // namespace padsph
