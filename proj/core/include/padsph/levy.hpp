#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "padsph/field.hpp"
#include "padsph/stats.hpp"

namespace padsph {

/// Compound Poisson process on K: jumps arrive at total rate Lambda, the
/// jump lands on the sphere ||y|| = q^k with probability lambda_k / Lambda,
/// lambda_k proportional to q^(-alpha k), and is uniform on that sphere.
///
/// With rotation_invariant = false the process is the negative control: from
/// a state whose Teichmuller part is 1 the next jump always uses k_max.
struct LevyModel {
  double alpha = 1.0;
  long k_min = -3;
  long k_max = 3;
  double total_rate = 1.0;
  bool rotation_invariant = true;

  void validate() const;
  /// lambda_k for k = k_min..k_max.
  std::vector<double> shell_rates(const FieldContext& field) const;
};

struct PathRecord {
  std::uint64_t seed = 0;
  ExtElement x0;
  std::vector<double> jump_times;
  std::vector<ExtElement> jumps;
  /// states[i] is X after the first i jumps; states[0] = x0.
  std::vector<ExtElement> states;
  /// Some state is 0 to the working precision.
  bool absorbed = false;

  std::size_t jumps_before(double t) const;
  const ExtElement& state_at(double t) const;
};

/// Per-path stream seed: splitmix64 of (master, index).
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

/// Uniform (Haar) sample of {||y|| = q^k}: y = p^(-k) u, u a uniform unit mod p^N.
ExtElement sample_sphere_uniform(const FieldPtr& field, long k, std::mt19937_64& rng);

PathRecord simulate_path(const LevyModel& model, const FieldPtr& field, const ExtElement& x0, double T,
                         std::uint64_t seed);

/// Radial bin of a state: (valuation, r mod p^digits) or the zero bin.
struct RadialBin {
  bool zero = false;
  long valuation = 0;
  std::uint64_t rho = 0;
  auto operator<=>(const RadialBin&) const = default;
};
RadialBin radial_bin(const ExtElement& x, int digits);
std::string to_string(const RadialBin& bin);

struct RadialLawReport {
  ChiSquareResult chi;
  std::vector<std::string> bins;
  std::vector<double> counts_a, counts_b;
  std::size_t trials = 0;
  std::size_t discarded_a = 0, discarded_b = 0;
  double threshold = 0.001;
  bool passed = false;
};

/// Two-sample chi-square on the law of R_t started from x and from x'.
/// Requires r(x) = r(x').
RadialLawReport radial_kernel_check_eq21(const LevyModel& model, const FieldPtr& field, const ExtElement& x,
                                    const ExtElement& x2, double t, std::size_t trials, std::uint64_t seed,
                                    int digits = 2);

struct StratumTest {
  std::string stratum;  // radial bin of R_t2
  double samples = 0;
  ChiSquareResult chi;
};

struct MarkovReport {
  std::size_t paths = 0;
  std::size_t discarded = 0;
  double threshold = 0.001;
  /// bin(R_t1) independent of bin(R_t3) given bin(R_t2).
  std::vector<StratumTest> radial;
  double radial_min_p = 1;
  bool radial_passed = true;
  /// omega(X_t2) independent of bin(R_t3) given bin(R_t2).
  std::vector<StratumTest> angular;
  double angular_min_p = 1;
  bool angular_passed = true;
};

MarkovReport markov_diagnostic(const LevyModel& model, const FieldPtr& field, const ExtElement& x0,
                               double t1, double t2, double t3, std::size_t paths, std::uint64_t seed,
                               double min_stratum = 50, int digits = 2);

struct AngularIncrementReport {
  std::size_t paths = 0;
  std::size_t discarded = 0;
  int level = 2;
  /// (jump bucket, shell before, shell after) -> increment cell -> count.
  std::map<std::string, std::map<std::uint64_t, double>> tables;
  ChiSquareResult left_invariance;
  ChiSquareResult one_jump;
  std::size_t zero_jump_samples = 0;
  std::size_t zero_jump_violations = 0;
  double threshold = 0.001;
  bool passed = false;
};

/// Multiplicative angular increments z_0^(-1) z_T in mu_{q-1} x Sigma_n / level,
/// stratified by jump count and radial shells; compares starts x0 and g x0,
/// and the one-jump stratum with a direct single-jump simulation.
AngularIncrementReport angular_increment_sample(const LevyModel& model, const FieldPtr& field, const ExtElement& x0,
                                                const ExtElement& g, double T, std::size_t paths,
                                                std::uint64_t seed, int level = 2);

}  // namespace padsph
