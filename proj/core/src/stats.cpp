#include "padsph/stats.hpp"

#include <algorithm>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "padsph/errors.hpp"

namespace padsph {

namespace {

// Greedy left-to-right merge of bins until weight(group) >= threshold; a short
// tail is folded into the last group.
std::vector<std::vector<std::size_t>> merge_bins(const std::vector<double>& weight, double threshold) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double acc = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    current.push_back(i);
    acc += weight[i];
    if (acc >= threshold) {
      groups.push_back(std::move(current));
      current.clear();
      acc = 0;
    }
  }
  if (!current.empty()) {
    if (groups.empty()) {
      groups.push_back(std::move(current));
    } else {
      groups.back().insert(groups.back().end(), current.begin(), current.end());
    }
  }
  return groups;
}

double group_sum(const std::vector<double>& v, const std::vector<std::size_t>& group) {
  double s = 0;
  for (auto i : group) s += v[i];
  return s;
}

}  // namespace

double chi_square_sf(double x, double dof) {
  if (dof <= 0) return 1;
  if (x <= 0) return 1;
  return boost::math::gamma_q(dof / 2, x / 2);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probabilities,
                               double min_expected) {
  if (observed.size() != probabilities.size()) throw DomainError("chi_square_gof: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double mass = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  std::vector<double> expected(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) expected[i] = total * probabilities[i] / mass;
  ChiSquareResult out;
  out.groups = merge_bins(expected, min_expected);
  for (const auto& g : out.groups) {
    const double e = group_sum(expected, g);
    const double o = group_sum(observed, g);
    if (e > 0) out.statistic += (o - e) * (o - e) / e;
  }
  out.dof = static_cast<int>(out.groups.size()) - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

ChiSquareResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                      double min_expected) {
  if (a.size() != b.size()) throw DomainError("chi_square_two_sample: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  ChiSquareResult out;
  if (na == 0 || nb == 0) return out;
  // Expected count of the smaller sample in a cell is pooled * min(na, nb) / (na + nb).
  std::vector<double> pooled(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = (a[i] + b[i]) * std::min(na, nb) / (na + nb);
  out.groups = merge_bins(pooled, min_expected);
  for (const auto& g : out.groups) {
    const double ga = group_sum(a, g);
    const double gb = group_sum(b, g);
    const double pool = ga + gb;
    if (pool == 0) continue;
    const double ea = pool * na / (na + nb);
    const double eb = pool * nb / (na + nb);
    out.statistic += (ga - ea) * (ga - ea) / ea + (gb - eb) * (gb - eb) / eb;
  }
  out.dof = static_cast<int>(out.groups.size()) - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

ChiSquareResult chi_square_independence(std::vector<std::vector<double>> table, double min_expected) {
  ChiSquareResult out;
  if (table.empty() || table[0].empty()) return out;
  double total = 0;
  for (const auto& row : table) total += std::accumulate(row.begin(), row.end(), 0.0);
  if (total == 0) return out;

  // Merge the thinnest row or column into its thinner neighbour until every
  // expected count reaches min_expected (or one side is a single line).
  auto transpose = [](const std::vector<std::vector<double>>& t) {
    std::vector<std::vector<double>> tt(t[0].size(), std::vector<double>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t[0].size(); ++j) tt[j][i] = t[i][j];
    return tt;
  };
  auto drop_empty = [](std::vector<std::vector<double>>& t) {
    std::erase_if(t, [](const auto& row) { return std::accumulate(row.begin(), row.end(), 0.0) == 0; });
  };
  drop_empty(table);
  table = transpose(table);
  drop_empty(table);
  table = transpose(table);
  auto margins = [](const std::vector<std::vector<double>>& t) {
    std::vector<double> m;
    for (const auto& row : t) m.push_back(std::accumulate(row.begin(), row.end(), 0.0));
    return m;
  };
  auto merge_line = [](std::vector<std::vector<double>>& t, const std::vector<double>& m, std::size_t i) {
    std::size_t j;
    if (i == 0) j = 1;
    else if (i + 1 == t.size()) j = i - 1;
    else j = m[i - 1] <= m[i + 1] ? i - 1 : i + 1;
    for (std::size_t c = 0; c < t[i].size(); ++c) t[j][c] += t[i][c];
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
  };
  while (table.size() > 1 && table[0].size() > 1) {
    const auto rm = margins(table);
    auto tt = transpose(table);
    const auto cm = margins(tt);
    const auto ri = static_cast<std::size_t>(std::min_element(rm.begin(), rm.end()) - rm.begin());
    const auto ci = static_cast<std::size_t>(std::min_element(cm.begin(), cm.end()) - cm.begin());
    if (rm[ri] * cm[ci] / total >= min_expected) break;
    if (rm[ri] <= cm[ci]) {
      merge_line(table, rm, ri);
    } else {
      merge_line(tt, cm, ci);
      table = transpose(tt);
    }
  }
  std::vector<double> rows, columns(table[0].size(), 0);
  for (const auto& row : table) {
    rows.push_back(std::accumulate(row.begin(), row.end(), 0.0));
    for (std::size_t j = 0; j < row.size(); ++j) columns[j] += row[j];
  }
  std::size_t live_rows = 0, live_cols = 0;
  for (double r : rows) live_rows += r > 0;
  for (double c : columns) live_cols += c > 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const double e = rows[i] * columns[j] / total;
      if (e > 0) out.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  }
  out.dof = static_cast<int>((live_rows > 0 ? live_rows - 1 : 0) * (live_cols > 0 ? live_cols - 1 : 0));
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

}  // namespace padsph
