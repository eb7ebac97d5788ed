#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavelab/galerkin.hpp"
#include "wavelab/randomization.hpp"

namespace wavelab {

// ||g||_{L^q} for a standard normal g: sqrt(2) (Gamma((q+1)/2) / sqrt(pi))^{1/q}.
double gaussian_moment_norm(double q);

struct KpzRow {
  double q = 0.0;
  double ratio = 0.0;      // ||sum a_n X_n||_{L^q} / (sqrt(q) ||a||_2)
  double std_error = 0.0;  // delta-method standard error of the ratio
  double ci_low = 0.0;     // bootstrap percentile interval (95%)
  double ci_high = 0.0;
};

struct KpzReport {
  CoefficientDistribution distribution;
  std::size_t samples = 0;
  double l2_norm = 0.0;
  std::vector<KpzRow> rows;
  double max_ratio = 0.0;
};

// Requires M >= 10^4 and every q >= 1. X_n are unit-variance draws of the
// given family.
KpzReport kpz_check(const std::vector<double>& coefficients, const CoefficientDistribution& dist,
                    const std::vector<double>& q_list, std::size_t samples, std::uint64_t seed = 0x6b707a,
                    int bootstrap_replicates = 200);

enum class TailOperator { z, z_tilde };

struct TailConfig {
  double T = 1.0;
  double q1 = 2.0;  // time exponent; infinity selects the sup-in-time variant
  double q2 = 4.0;
  double r = 2.0;
  double s = 0.0;
  int time_nodes = 64;
  std::size_t samples = 2000;
  TailOperator op = TailOperator::z;
  int cutoff_j = -1;  // >= 0 applies P_j (z_n, z~_n)
  std::vector<double> lambda_grid;  // empty: lambda_points equispaced on [0, max norm]
  int lambda_points = 100;
  bool require_fit = true;
};

struct TailEstimate {
  std::vector<double> lambda_grid;
  std::vector<double> survival;
  std::vector<double> ci_low;  // Wilson 95% interval
  std::vector<double> ci_high;
  std::vector<std::size_t> hits;
  std::vector<double> norms;  // per-sample space-time norm
  std::size_t samples = 0;
  bool fit_ok = false;
  std::string fit_message;
  double fitted_c = 0.0;   // slope of -log S against lambda^2
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t fit_begin = 0;  // [begin, end) into lambda_grid
  std::size_t fit_end = 0;
};

// Space-time norm ||z||_{L^{q1}((0,T), B^s_{q2,r})} of one randomized sample.
double space_time_besov_norm(const WavePair& pair, const TailConfig& config);

// Survival curve and tail fit from precomputed norms. The fit uses the upper
// 20% (at least 5) of the lambda points with at least 10 exceedances; a
// smaller window throws when require_fit is set.
TailEstimate tail_from_norms(std::vector<double> norms, std::vector<double> lambda_grid, int lambda_points,
                             bool require_fit);

TailEstimate strichartz_tail(const RandomizationSpec& spec, const TailConfig& config);

// CSV {lambda, survival, ci_low, ci_high} and a trailing "# fit,..." summary.
void write_tail_csv(std::ostream& out, const TailEstimate& tail);

struct AprioriReport {
  std::vector<int> cutoffs;
  std::vector<std::vector<double>> sup_energy;  // [sample][cutoff] sup_t E_n
  std::vector<double> per_sample_sup;           // sup over cutoffs
  std::vector<double> per_cutoff_quantile;
  double eta = 0.1;
  double T = 0.0;
  double quantile = 0.0;  // (1 - eta) empirical quantile of per_sample_sup
};

// traces[m][k] is the E_n trace of sample m at cutoffs[k].
AprioriReport apriori_bound_report(const std::vector<std::vector<EnergyTrace>>& traces, const std::vector<int>& cutoffs,
                                   double T, double eta);
std::string apriori_report_to_json(const AprioriReport& report);

// Smallest order statistic x_(k) with k = ceil(level * n).
double empirical_quantile(std::vector<double> values, double level);

struct EnsembleRun {
  std::vector<std::vector<SolveResult>> runs;  // [sample][cutoff]
  std::size_t blowups = 0;
};

// solve_remainder for sample indices [first, first + count) at each cutoff,
// parallel over (sample, cutoff) pairs.
EnsembleRun run_remainder_ensemble(const GalerkinConfig& config, const RandomizationSpec& spec, std::uint64_t first,
                                   std::size_t count, const std::vector<int>& cutoffs);

}  // namespace wavelab
