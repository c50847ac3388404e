#include "padsph/levy.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include "padsph/errors.hpp"
#include "padsph/levels.hpp"
#include "padsph/parallel.hpp"
#include "padsph/spherical.hpp"

namespace padsph {

namespace {

// Jump shell for the next jump from `state`.
long choose_shell(const LevyModel& model, const ExtElement& state, std::discrete_distribution<int>& shells,
                  std::mt19937_64& rng) {
  const long k = model.k_min + shells(rng);
  if (!model.rotation_invariant && !state.is_zero() && state.residue_index() == 1) return model.k_max;
  return k;
}

std::discrete_distribution<int> shell_distribution(const LevyModel& model, const FieldContext& field) {
  const std::vector<double> rates = model.shell_rates(field);
  return std::discrete_distribution<int>(rates.begin(), rates.end());
}

template <class Key>
void merge_counts(std::map<Key, double>& into, const std::map<Key, double>& from, std::mutex& mutex) {
  std::lock_guard lock(mutex);
  for (const auto& [k, v] : from) into[k] += v;
}

}  // namespace

void LevyModel::validate() const {
  if (!(alpha > 0)) throw DomainError("levy model: alpha must be positive");
  if (k_min > k_max) throw DomainError("levy model: empty shell range");
  if (!(total_rate > 0)) throw DomainError("levy model: total rate must be positive");
}

std::vector<double> LevyModel::shell_rates(const FieldContext& field) const {
  validate();
  const double q = Rational(field.q()).get_d();
  std::vector<double> rates;
  double sum = 0;
  for (long k = k_min; k <= k_max; ++k) {
    rates.push_back(std::pow(q, -alpha * static_cast<double>(k)));
    sum += rates.back();
  }
  for (auto& r : rates) r *= total_rate / sum;
  return rates;
}

std::size_t PathRecord::jumps_before(double t) const {
  return static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
}

const ExtElement& PathRecord::state_at(double t) const {
  return states[std::min(jumps_before(t), states.size() - 1)];
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ExtElement sample_sphere_uniform(const FieldPtr& field, long k, std::mt19937_64& rng) {
  const long p = field->p();
  const int N = field->precision();
  const std::uint64_t q = to_u64(field->q());
  std::uniform_int_distribution<std::uint64_t> residue(1, q - 1);
  std::uniform_int_distribution<long> digit(0, p - 1);
  std::uint64_t index = residue(rng);
  std::vector<Int> coeffs(static_cast<std::size_t>(field->n()));
  for (auto& c : coeffs) {
    c = static_cast<unsigned long>(index % static_cast<std::uint64_t>(p));
    index /= static_cast<std::uint64_t>(p);
  }
  for (auto& c : coeffs) {
    Int scale = p;
    for (int d = 1; d < N; ++d) {
      c += scale * digit(rng);
      scale *= p;
    }
  }
  return ExtElement::from_power_coefficients(field, -k, std::move(coeffs), N);
}

PathRecord simulate_path(const LevyModel& model, const FieldPtr& field, const ExtElement& x0, double T,
                         std::uint64_t seed) {
  model.validate();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> wait(model.total_rate);
  auto shells = shell_distribution(model, *field);
  PathRecord path;
  path.seed = seed;
  path.x0 = x0;
  path.states.push_back(x0);
  double t = 0;
  while (true) {
    t += wait(rng);
    if (t > T) break;
    const long k = choose_shell(model, path.states.back(), shells, rng);
    ExtElement y = sample_sphere_uniform(field, k, rng);
    ExtElement next = path.states.back() + y;
    path.jump_times.push_back(t);
    path.jumps.push_back(std::move(y));
    path.states.push_back(std::move(next));
    if (path.states.back().is_zero()) {
      path.absorbed = true;
      break;
    }
  }
  return path;
}

RadialBin radial_bin(const ExtElement& x, int digits) {
  RadialBin bin;
  if (x.is_zero()) {
    bin.zero = true;
    return bin;
  }
  if (x.precision() < digits) throw PrecisionError("radial_bin: state known to too few digits");
  const SphericalCoords c = decompose(x.with_precision(digits));
  bin.valuation = c.r.valuation();
  bin.rho = to_u64(mod(c.r.unit(), prime_power(x.field().p(), digits)));
  return bin;
}

std::string to_string(const RadialBin& bin) {
  if (bin.zero) return "zero";
  return "v=" + std::to_string(bin.valuation) + ",rho=" + std::to_string(bin.rho);
}

RadialLawReport radial_kernel_check_eq21(const LevyModel& model, const FieldPtr& field, const ExtElement& x,
                                    const ExtElement& x2, double t, std::size_t trials, std::uint64_t seed,
                                    int digits) {
  if (x.is_zero() || x2.is_zero()) throw DomainError("radial_kernel_check: starting points must be nonzero");
  if (!(decompose(x).r == decompose(x2).r)) throw DomainError("radial_kernel_check: r(x) != r(x')");
  RadialLawReport report;
  report.trials = trials;
  std::map<RadialBin, double> counts[2];
  std::size_t discarded[2] = {0, 0};
  std::mutex mutex;
  for (int side = 0; side < 2; ++side) {
    const ExtElement& start = side == 0 ? x : x2;
    parallel_for(trials, [&](std::size_t begin, std::size_t end) {
      std::map<RadialBin, double> local;
      std::size_t lost = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const PathRecord path = simulate_path(model, field, start, t, path_seed(seed, 2 * i + side));
        const ExtElement& state = path.states.back();
        if (path.absorbed) {
          ++lost;
          continue;
        }
        try {
          local[radial_bin(state, digits)] += 1;
        } catch (const PrecisionError&) {
          ++lost;
        }
      }
      merge_counts(counts[side], local, mutex);
      std::lock_guard lock(mutex);
      discarded[side] += lost;
    });
  }
  std::set<RadialBin> keys;
  for (const auto& c : counts)
    for (const auto& [k, v] : c) keys.insert(k);
  for (const auto& k : keys) {
    report.bins.push_back(to_string(k));
    report.counts_a.push_back(counts[0].count(k) ? counts[0].at(k) : 0);
    report.counts_b.push_back(counts[1].count(k) ? counts[1].at(k) : 0);
  }
  report.discarded_a = discarded[0];
  report.discarded_b = discarded[1];
  report.chi = chi_square_two_sample(report.counts_a, report.counts_b);
  report.passed = report.chi.p_value > report.threshold;
  return report;
}

MarkovReport markov_diagnostic(const LevyModel& model, const FieldPtr& field, const ExtElement& x0, double t1,
                               double t2, double t3, std::size_t paths, std::uint64_t seed, double min_stratum,
                               int digits) {
  if (!(t1 < t2 && t2 < t3)) throw DomainError("markov_diagnostic: need t1 < t2 < t3");
  MarkovReport report;
  report.paths = paths;
  struct Sample {
    RadialBin b1, b2, b3;
    std::uint64_t omega2 = 0;
  };
  std::vector<Sample> samples(paths);
  std::vector<char> keep(paths, 0);
  parallel_for(paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const PathRecord path = simulate_path(model, field, x0, t3, path_seed(seed, i));
      const ExtElement& a = path.state_at(t1);
      const ExtElement& b = path.state_at(t2);
      const ExtElement& c = path.state_at(t3);
      if (path.absorbed || a.is_zero() || b.is_zero() || c.is_zero()) continue;
      try {
        samples[i] = Sample{radial_bin(a, digits), radial_bin(b, digits), radial_bin(c, digits), b.residue_index()};
        keep[i] = 1;
      } catch (const PrecisionError&) {
      }
    }
  });
  // stratum -> row -> column -> count
  std::map<RadialBin, std::map<RadialBin, std::map<RadialBin, double>>> radial;
  std::map<RadialBin, std::map<std::uint64_t, std::map<RadialBin, double>>> angular;
  std::set<RadialBin> columns;
  for (std::size_t i = 0; i < paths; ++i) {
    if (!keep[i]) {
      ++report.discarded;
      continue;
    }
    const Sample& s = samples[i];
    radial[s.b2][s.b1][s.b3] += 1;
    angular[s.b2][s.omega2][s.b3] += 1;
    columns.insert(s.b3);
  }
  auto run = [&](const auto& strata, std::vector<StratumTest>& out) {
    for (const auto& [b2, rows] : strata) {
      std::vector<std::vector<double>> table;
      double total = 0;
      for (const auto& [r, cols] : rows) {
        std::vector<double> row;
        for (const auto& b3 : columns) {
          auto it = cols.find(b3);
          row.push_back(it == cols.end() ? 0.0 : it->second);
          total += row.back();
        }
        table.push_back(std::move(row));
      }
      if (total < min_stratum) continue;
      StratumTest test{to_string(b2), total, chi_square_independence(table)};
      if (test.chi.dof > 0) out.push_back(std::move(test));
    }
  };
  run(radial, report.radial);
  run(angular, report.angular);
  auto verdict = [&](const std::vector<StratumTest>& tests, double& min_p) {
    min_p = 1;
    for (const auto& t : tests) min_p = std::min(min_p, t.chi.p_value);
    return min_p > report.threshold / static_cast<double>(std::max<std::size_t>(tests.size(), 1));
  };
  report.radial_passed = verdict(report.radial, report.radial_min_p);
  report.angular_passed = verdict(report.angular, report.angular_min_p);
  return report;
}

AngularIncrementReport angular_increment_sample(const LevyModel& model, const FieldPtr& field, const ExtElement& x0,
                                                const ExtElement& g, double T, std::size_t paths,
                                                std::uint64_t seed, int level) {
  if (x0.is_zero()) throw DomainError("angular_increment_sample: start must be nonzero");
  if (!g.is_unit() || !(normalized_abs(g) == 1)) throw DomainError("angular_increment_sample: g must lie in Z_n");
  const auto quotient = UnitQuotient::get(field, level);
  AngularIncrementReport report;
  report.paths = paths;
  report.level = level;

  const std::uint64_t cosets = quotient->coset_count();
  auto cell_of = [&](const SphericalCoords& from, const SphericalCoords& to) {
    const ExtElement inc = (from.omega.inverse() * to.omega) * (from.xi.inverse() * to.xi);
    const UnitRecord r = quotient->classify(inc.with_precision(level));
    return static_cast<std::uint64_t>(r.omega) * cosets + r.coset;
  };
  const std::uint64_t identity = [&] {
    const UnitRecord r = quotient->classify(field->one().with_precision(level));
    return static_cast<std::uint64_t>(r.omega) * cosets + r.coset;
  }();
  auto stratum = [](std::size_t jumps, long before, long after) {
    return "jumps=" + std::string(jumps == 0 ? "0" : jumps == 1 ? "1" : "2+") + "|v0=" + std::to_string(before) +
           "|vT=" + std::to_string(after);
  };

  // Joint (stratum, cell) histograms for the starts x0 and g x0, and one-jump cells by shell after.
  std::map<std::pair<std::string, std::uint64_t>, double> joint[2];
  std::map<std::pair<long, std::uint64_t>, double> one_jump_paths, one_jump_direct;
  std::size_t discarded = 0, zero_samples = 0, zero_violations = 0;
  std::mutex mutex;
  const ExtElement starts[2] = {x0, g * x0};
  for (int side = 0; side < 2; ++side) {
    const SphericalCoords z0 = decompose(starts[side]);
    parallel_for(paths, [&](std::size_t begin, std::size_t end) {
      std::map<std::pair<std::string, std::uint64_t>, double> local;
      std::map<std::pair<long, std::uint64_t>, double> local_one;
      std::map<std::string, std::map<std::uint64_t, double>> local_tables;
      std::size_t lost = 0, zeros = 0, violations = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const PathRecord path = simulate_path(model, field, starts[side], T, path_seed(seed, 2 * i + side));
        const ExtElement& xT = path.states.back();
        if (path.absorbed || xT.precision() < level) {
          ++lost;
          continue;
        }
        const std::uint64_t cell = cell_of(z0, decompose(xT));
        const std::string key = stratum(path.jumps.size(), starts[side].valuation(), xT.valuation());
        local[{key, cell}] += 1;
        if (side == 0) {
          local_tables[key][cell] += 1;
          if (path.jumps.empty()) {
            ++zeros;
            if (cell != identity) ++violations;
          }
          if (path.jumps.size() == 1) local_one[{xT.valuation(), cell}] += 1;
        }
      }
      std::lock_guard lock(mutex);
      for (const auto& [k, v] : local) joint[side][k] += v;
      for (const auto& [k, v] : local_one) one_jump_paths[k] += v;
      for (const auto& [s, t] : local_tables)
        for (const auto& [c, v] : t) report.tables[s][c] += v;
      if (side == 0) discarded += lost;
      zero_samples += zeros;
      zero_violations += violations;
    });
  }

  // Direct single-jump simulation from x0.
  {
    const SphericalCoords z0 = decompose(x0);
    parallel_for(paths, [&](std::size_t begin, std::size_t end) {
      std::map<std::pair<long, std::uint64_t>, double> local;
      auto shells = shell_distribution(model, *field);
      for (std::size_t i = begin; i < end; ++i) {
        std::mt19937_64 rng(path_seed(seed ^ 0xD1EC7ULL, i));
        const long k = choose_shell(model, x0, shells, rng);
        const ExtElement x1 = x0 + sample_sphere_uniform(field, k, rng);
        if (x1.is_zero() || x1.precision() < level) continue;
        local[{x1.valuation(), cell_of(z0, decompose(x1))}] += 1;
      }
      std::lock_guard lock(mutex);
      for (const auto& [k, v] : local) one_jump_direct[k] += v;
    });
  }

  auto two_sample = [](const auto& a, const auto& b) {
    std::vector<double> va, vb;
    std::set<typename std::decay_t<decltype(a)>::key_type> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    for (const auto& k : keys) {
      va.push_back(a.count(k) ? a.at(k) : 0);
      vb.push_back(b.count(k) ? b.at(k) : 0);
    }
    return chi_square_two_sample(va, vb);
  };
  report.discarded = discarded;
  report.left_invariance = two_sample(joint[0], joint[1]);
  report.one_jump = two_sample(one_jump_paths, one_jump_direct);
  report.zero_jump_samples = zero_samples;
  report.zero_jump_violations = zero_violations;
  report.passed = report.left_invariance.p_value > report.threshold && report.one_jump.p_value > report.threshold &&
                  zero_violations == 0;
  return report;
}

}  // namespace padsph
