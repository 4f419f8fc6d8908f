#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "macroml/common/linalg.hpp"

namespace macroml {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int bandwidth = 0;
  int reps = 0;
  std::vector<std::string> survivors;     // MCS only, in input order
  std::map<std::string, double> mcs_p;    // MCS only, monotonized
  std::vector<std::string> eliminated;    // MCS only, elimination order
};

/// Diebold-Mariano test on d = loss_a - loss_b with a Bartlett long-run
/// variance at truncation lag max(h-1, 0) and a two-sided normal p-value.
/// Throws ArgumentError when the sequences differ in length or T < 30, and
/// DomainError when the variance is zero but the mean differential is not.
TestResult dm_test(const std::vector<double>& loss_a, const std::vector<double>& loss_b, int h);

/// Stars for a two-sided p-value: "***" < 0.01, "**" < 0.05, "*" < 0.10.
std::string significance_stars(double p);

struct FluctuationResult {
  std::vector<double> path;  // one entry per window end, index window-1 .. T-1
  int window = 0;
  double mu = 0.0;           // window / T
  double critical_05 = 0.0;  // two-sided, 5%
  double critical_10 = 0.0;
  bool rejects_05 = false;
};

/// Rolling DM statistics sum_{window} d / (sqrt(window) sigma) with sigma the
/// full-sample long-run standard deviation. Critical values follow the
/// Giacomini-Rossi tabulation interpolated in mu.
FluctuationResult fluctuation_test(const std::vector<double>& loss_a, const std::vector<double>& loss_b, int window,
                                   int h);

/// Two-sided fluctuation critical value for window share mu in (0,1].
double fluctuation_critical_value(double mu, double level);

struct McsOptions {
  double alpha = 0.25;
  int reps = 999;
  int block_length = 12;
  std::uint64_t seed = 2011;
};

/// Bootstrap sample means (reps x M) of the loss columns under a moving-block
/// resample of the rows; replication b draws from derive_seed(seed, b).
Matrix mcs_bootstrap_means(const Matrix& losses, int reps, int block_length, std::uint64_t seed);
Matrix mcs_bootstrap_means_serial(const Matrix& losses, int reps, int block_length, std::uint64_t seed);

/// Model confidence set with the T_max statistic. `losses` is T x M, one
/// column per model (aligned dates).
TestResult model_confidence_set(const Matrix& losses, const std::vector<std::string>& models,
                                const McsOptions& opts = {});

}  // namespace macroml
