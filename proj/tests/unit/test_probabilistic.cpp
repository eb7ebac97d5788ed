#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "json.hpp"
#include "wavelab/corpus.hpp"
#include "wavelab/error.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/probabilistic.hpp"

using namespace wavelab;
using std::numbers::pi;

namespace {

// ||X||_{L^q} of a unit-variance draw, from the known absolute moments.
double family_moment_norm(CoefficientFamily f, double q) {
  switch (f) {
    case CoefficientFamily::gaussian: return std::pow(std::pow(2.0, q / 2) * std::tgamma((q + 1) / 2) / std::sqrt(pi), 1 / q);
    case CoefficientFamily::rademacher: return 1.0;
    case CoefficientFamily::uniform_symmetric: return std::sqrt(3.0) * std::pow(q + 1, -1 / q);  // U(-sqrt3, sqrt3)
  }
  return 0.0;
}

EnergyTrace flat_trace(double sup) {
  EnergyTrace t;
  t.label = EnergyLabel::E_n;
  t.times = {0.0, 0.5, 1.0};
  t.kinetic = {0.0, sup, 0.5 * sup};
  t.gradient = {0.0, 0.0, 0.0};
  t.potential = {0.0, 0.0, 0.0};
  t.l2_v = {0.0, 0.0, 0.0};
  t.linf_u = {0.0, 0.0, 0.0};
  return t;
}

}  // namespace

TEST_CASE("gaussian moment norms") {
  CHECK(gaussian_moment_norm(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_moment_norm(1.0) == doctest::Approx(std::sqrt(2.0 / pi)).epsilon(1e-14));
  CHECK(gaussian_moment_norm(4.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK(gaussian_moment_norm(6.0) == doctest::Approx(std::pow(15.0, 1.0 / 6.0)).epsilon(1e-14));
  for (double q = 1.0; q < 30.0; q += 0.7) CHECK(gaussian_moment_norm(q) == doctest::Approx(family_moment_norm(CoefficientFamily::gaussian, q)));
  CHECK_THROWS_AS(gaussian_moment_norm(0.5), InvalidArgument);
}

TEST_CASE("kpz: one coefficient reproduces the family moments") {
  const std::vector<double> qs{1.0, 2.0, 4.0, 8.0};
  for (auto family : {CoefficientFamily::gaussian, CoefficientFamily::rademacher, CoefficientFamily::uniform_symmetric}) {
    INFO(to_string(family));
    const KpzReport r = kpz_check({1.0}, CoefficientDistribution::standard(family), qs, 20000);
    CHECK(r.samples == 20000);
    CHECK(r.l2_norm == doctest::Approx(1.0));
    REQUIRE(r.rows.size() == qs.size());
    for (const auto& row : r.rows) {
      const double oracle = family_moment_norm(family, row.q) / std::sqrt(row.q);
      CHECK(std::abs(row.ratio - oracle) <= 4.0 * row.std_error + 1e-12);
      CHECK(row.ci_low <= row.ratio + 1e-15);
      CHECK(row.ratio <= row.ci_high + 1e-15);
      if (row.q == 2.0) CHECK(row.ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
    }
  }
}

TEST_CASE("kpz: error bars shrink like 1/sqrt(M)") {
  const std::vector<double> a{0.5, -1.0, 0.25, 2.0};
  const auto d = CoefficientDistribution::standard(CoefficientFamily::gaussian);
  const KpzReport small = kpz_check(a, d, {3.0}, 20000, 5);
  const KpzReport large = kpz_check(a, d, {3.0}, 40000, 5);
  const double shrink = small.rows[0].std_error / large.rows[0].std_error;
  MESSAGE("std error ratio on doubling M: " << shrink);
  CHECK(shrink == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
  CHECK(large.rows[0].ci_high - large.rows[0].ci_low < small.rows[0].ci_high - small.rows[0].ci_low);
  CHECK(small.l2_norm == doctest::Approx(std::sqrt(0.25 + 1.0 + 0.0625 + 4.0)));

  CHECK_THROWS_AS(kpz_check(a, d, {3.0}, 9999), InvalidArgument);
  CHECK_THROWS_AS(kpz_check(a, d, {0.5}, 10000), InvalidArgument);
  CHECK_THROWS_AS(kpz_check({}, d, {2.0}, 10000), InvalidArgument);
  CHECK_THROWS_AS(kpz_check({0.0, 0.0}, d, {2.0}, 10000), InvalidArgument);
}

TEST_CASE("space-time norm of a single plateau mode") {
  // z = A cos(8x) cos(8t): block 3 has weight one at |n| = 8, so B^0_{2,2} is
  // L^2, and the trapezoid rule over whole periods in t is exact.
  const TorusGrid g(1, 64);
  const double A = 0.3;
  const WavePair pair{SpectralField::mode(g, {8, 0, 0}, A / 2), SpectralField(g)};
  TailConfig c;
  c.T = pi;
  c.q1 = 2.0;
  c.q2 = 2.0;
  c.r = 2.0;
  c.s = 0.0;
  c.time_nodes = 64;
  CHECK(space_time_besov_norm(pair, c) == doctest::Approx(A * pi / std::sqrt(2.0)).epsilon(1e-12));
  c.q1 = std::numeric_limits<double>::infinity();
  CHECK(space_time_besov_norm(pair, c) == doctest::Approx(A * std::sqrt(pi)).epsilon(1e-12));
  // P_2 removes |n| = 8 entirely.
  c.cutoff_j = 2;
  CHECK(space_time_besov_norm(pair, c) == 0.0);
}

TEST_CASE("tail of the zero pair vanishes") {
  const TorusGrid g(1, 32);
  RandomizationSpec spec{zero_pair(g), CoefficientDistribution::standard(CoefficientFamily::gaussian), 3};
  TailConfig c;
  c.samples = 100;
  c.require_fit = false;
  c.lambda_grid = {0.0, 0.5, 1.0};
  const TailEstimate t = strichartz_tail(spec, c);
  for (double n : t.norms) CHECK(n == 0.0);
  for (double s : t.survival) CHECK(s == 0.0);
  CHECK(!t.fit_ok);
  c.require_fit = true;
  CHECK_THROWS_AS(strichartz_tail(spec, c), InvalidArgument);
  c.time_nodes = 32;
  CHECK_THROWS_AS(strichartz_tail(spec, c), InvalidArgument);
}

TEST_CASE("rademacher on one mode gives a deterministic norm and a step survival curve") {
  const TorusGrid g(1, 64);
  RandomizationSpec spec{{SpectralField::mode(g, {3, 0, 0}, 0.5), SpectralField(g)},
                         CoefficientDistribution::standard(CoefficientFamily::rademacher), 8};
  TailConfig c;
  c.samples = 200;
  c.require_fit = false;
  c.lambda_points = 50;
  const TailEstimate t = strichartz_tail(spec, c);
  const double n0 = t.norms.front();
  CHECK(n0 > 0.0);
  for (double n : t.norms) CHECK(n == doctest::Approx(n0).epsilon(1e-12));
  // Every sample is A cos(3x + theta) cos(3t) for a random phase theta.
  for (std::size_t k = 0; k < t.lambda_grid.size(); ++k) {
    if (t.lambda_grid[k] < n0 * (1 - 1e-10)) CHECK(t.survival[k] == 1.0);
    if (t.lambda_grid[k] > n0 * (1 + 1e-10)) CHECK(t.survival[k] == 0.0);
  }
}

TEST_CASE("property: survival curve bookkeeping and scale covariance of the fit") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> norms(4000);
    for (double& x : norms) x = std::abs(normal(rng)) * (1.0 + trial);
    const TailEstimate t = tail_from_norms(norms, {}, 100, true);
    REQUIRE(t.fit_ok);
    CHECK(t.lambda_grid.front() == 0.0);
    CHECK(t.survival.front() == doctest::Approx(1.0));
    for (std::size_t k = 0; k < t.survival.size(); ++k) {
      CHECK(t.ci_low[k] <= t.survival[k]);
      CHECK(t.survival[k] <= t.ci_high[k]);
      CHECK(t.hits[k] == static_cast<std::size_t>(std::lround(t.survival[k] * 4000)));
      if (k > 0) CHECK(t.survival[k] <= t.survival[k - 1]);
    }
    CHECK(t.fit_end > t.fit_begin);
    CHECK(t.fit_end - t.fit_begin >= 5);
    for (std::size_t k = t.fit_begin; k < t.fit_end; ++k) CHECK(t.hits[k] >= 10);
    // |g| has -log P(|g| > l) ~ l^2 / 2; the upper window sees the
    // polynomial prefactor too, so the slope is only near 1/2.
    const double scale = 1.0 + trial;
    CHECK(t.fitted_c * scale * scale == doctest::Approx(0.5).epsilon(0.3));

    // Scaling the norms by a power of two moves the grid exactly with them.
    for (double k : {0.5, 4.0}) {
      std::vector<double> scaled = norms;
      for (double& x : scaled) x *= k;
      const TailEstimate u = tail_from_norms(scaled, {}, 100, true);
      CHECK(u.hits == t.hits);
      CHECK(u.fitted_c * k * k == doctest::Approx(t.fitted_c).epsilon(1e-12));
      CHECK(u.r_squared == doctest::Approx(t.r_squared).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(tail_from_norms({}, {}, 100, false), InvalidArgument);
  CHECK_THROWS_AS(tail_from_norms({1.0}, {1.0, 0.5}, 0, false), InvalidArgument);
}

TEST_CASE("tail CSV layout") {
  const TailEstimate t = tail_from_norms({0.1, 0.2, 0.3}, {0.0, 0.15, 0.25}, 0, false);
  std::ostringstream os;
  write_tail_csv(os, t);
  const std::string s = os.str();
  CHECK(s.rfind("lambda,survival,ci_low,ci_high\n0,1,", 0) == 0);
  CHECK(s.find("# fit,ok=0") != std::string::npos);
}

TEST_CASE("empirical quantile and a priori report") {
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.5) == 2);
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.75) == 3);
  CHECK(empirical_quantile({3, 1, 2, 4}, 1.0) == 4);
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.01) == 1);
  CHECK(empirical_quantile({3, 1, 2, 4}, 0.0) == 1);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(empirical_quantile({1}, 1.5), InvalidArgument);

  const std::vector<int> cutoffs{4, 5};
  const std::vector<std::vector<EnergyTrace>> traces{
      {flat_trace(1.0), flat_trace(2.0)}, {flat_trace(5.0), flat_trace(3.0)}, {flat_trace(0.5), flat_trace(0.25)}};
  const AprioriReport r = apriori_bound_report(traces, cutoffs, 1.0, 0.5);
  CHECK(r.per_sample_sup == std::vector<double>{2.0, 5.0, 0.5});
  CHECK(r.quantile == 2.0);  // ceil(1.5) = 2nd smallest
  CHECK(r.per_cutoff_quantile == std::vector<double>{1.0, 2.0});
  const auto j = nlohmann::json::parse(apriori_report_to_json(r));
  CHECK(j.at("quantile") == 2.0);
  CHECK(j.at("cutoffs") == nlohmann::json({4, 5}));
  CHECK(j.at("sup_energy").size() == 3);

  CHECK_THROWS_AS(apriori_bound_report(traces, cutoffs, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(apriori_bound_report({}, cutoffs, 1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(apriori_bound_report(traces, {4}, 1.0, 0.1), InvalidArgument);
}

TEST_CASE("ensemble runs match individual solves regardless of worker count") {
  GalerkinConfig c;
  c.p = 7.0;
  c.grid = TorusGrid(1, 32);
  c.dt = 0.01;
  c.T = 0.2;
  const RandomizationSpec spec{{power_law_field(c.grid, 1.4, 0.1), power_law_field(c.grid, 0.4, 0.1)},
                               CoefficientDistribution::standard(CoefficientFamily::gaussian), 77};
  const std::vector<int> cutoffs{1, 2, 3};
  set_worker_threads(1);
  const EnsembleRun serial = run_remainder_ensemble(c, spec, 4, 3, cutoffs);
  set_worker_threads(4);
  const EnsembleRun parallel = run_remainder_ensemble(c, spec, 4, 3, cutoffs);
  set_worker_threads(0);
  REQUIRE(serial.runs.size() == 3);
  CHECK(serial.blowups == 0);
  for (std::size_t m = 0; m < 3; ++m) {
    REQUIRE(serial.runs[m].size() == cutoffs.size());
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
      GalerkinConfig one = c;
      one.cutoff_j = cutoffs[k];
      const SolveResult direct = solve_remainder(one, spec, 4 + m);
      CHECK(serial.runs[m][k].trace.kinetic == direct.trace.kinetic);
      CHECK(serial.runs[m][k].trace.potential == direct.trace.potential);
      CHECK(parallel.runs[m][k].trace.kinetic == direct.trace.kinetic);
      CHECK(testgen::max_coefficient_gap(parallel.runs[m][k].final_state.v, direct.final_state.v) == 0.0);
    }
  }
  CHECK_THROWS_AS(run_remainder_ensemble(c, spec, 0, 1, {}), InvalidArgument);
}
