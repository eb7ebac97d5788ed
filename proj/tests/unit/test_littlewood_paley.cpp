#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "wavelab/error.hpp"
#include "wavelab/inequalities.hpp"
#include "wavelab/littlewood_paley.hpp"

using namespace wavelab;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent evaluation of the exp(-1/y) smooth step.
double phi_oracle(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - r));
  const double b = std::exp(-1.0 / (r - 1.0));
  return a / (a + b);
}

double w_oracle(double r, int j) {
  const double hi = phi_oracle(r / std::ldexp(1.0, j));
  const double lo = j == 0 ? 0.0 : phi_oracle(r / std::ldexp(1.0, j - 1));
  return hi - lo;
}

}  // namespace

TEST_CASE("bump profile shape") {
  const BumpProfile phi = BumpProfile::smooth_step();
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(1.0) == 1.0);
  CHECK(phi(2.0) == 0.0);
  CHECK(phi(7.5) == 0.0);
  CHECK(phi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = 1.0 + i / 1000.0;
    CHECK(phi(r) <= prev);
    CHECK(std::abs(phi(r) - phi_oracle(r)) < 1e-15);
    prev = phi(r);
  }
  for (int order = 1; order <= 3; ++order) {
    const BumpProfile poly = BumpProfile::polynomial(order);
    CHECK(poly(1.0) == 1.0);
    CHECK(poly(2.0) == 0.0);
    CHECK(poly(1.5) == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(BumpProfile::polynomial(0), InvalidArgument);
  CHECK(phi.smoothness_order() == std::numeric_limits<int>::max());
}

TEST_CASE("project_P examples") {
  const TorusGrid g(3, 16);
  const SpectralField e0 = SpectralField::constant(g, 1.0);
  for (int j = 0; j < 5; ++j) CHECK(testgen::max_coefficient_gap(project_P(e0, j), e0) == 0.0);

  const SpectralField e4 = SpectralField::mode(g, {4, 0, 0});
  CHECK(testgen::max_coefficient_gap(project_P(e4, 3), e4) == 0.0);
  CHECK(project_P(e4, 0).is_zero());
  CHECK(project_P(e4, -1).is_zero());
  CHECK_THROWS_AS(project_P(e4, -2), InvalidArgument);
}

TEST_CASE("block_delta examples") {
  const TorusGrid g(1, 32);
  const SpectralField e0 = SpectralField::constant(g, 1.0);
  CHECK(testgen::max_coefficient_gap(block_delta(e0, 0), e0) == 0.0);
  for (int j = 1; j < 6; ++j) CHECK(block_delta(e0, j).is_zero());

  const SpectralField e3 = SpectralField::mode(g, {3, 0, 0});
  for (int j = 0; j <= max_block_index(g); ++j) {
    const bool nonzero = !block_delta(e3, j).is_zero();
    CHECK(nonzero == (j == 1 || j == 2));
    CHECK(block_weight(3.0, j) == doctest::Approx(w_oracle(3.0, j)).epsilon(1e-14));
  }

  std::mt19937_64 rng(1);
  const SpectralField f = testgen::random_field(g, rng);
  for (int J = 0; J <= max_block_index(g); ++J) {
    SpectralField sum(g);
    for (int j = 0; j <= J; ++j) sum += block_delta(f, j);
    CHECK(testgen::max_coefficient_gap(sum, project_P(f, J)) <= 1e-15 * f.max_abs_coefficient());
  }
  CHECK_THROWS_AS(block_delta(f, -1), InvalidArgument);
}

TEST_CASE("property: partition of unity and almost orthogonality on every retained mode") {
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid g(d, d == 1 ? 1024 : (d == 2 ? 64 : 16));
    const int J = max_block_index(g);
    CHECK(J == static_cast<int>(std::ceil(std::log2(g.modes_per_axis()))) + 1);
    const auto& modes = g.modes();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.mode_count(); ++i) {
      double s = 0.0;
      for (int j = 0; j <= J; ++j) s += block_weight(modes.norm[i], j);
      worst = std::max(worst, std::abs(s - 1.0));
      for (int j = 0; j <= J; ++j) {
        for (int k = j + 2; k <= J; ++k) CHECK(block_weight(modes.norm[i], j) * block_weight(modes.norm[i], k) == 0.0);
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("reconstruct examples") {
  const TorusGrid g(2, 16);
  const SpectralField e5 = SpectralField::mode(g, {5, 0, 0}, Complex(0.3, -0.2));
  CHECK(testgen::max_coefficient_gap(reconstruct(decompose(e5)), e5) < 1e-16);

  std::mt19937_64 rng(4);
  const SpectralField f = testgen::random_field(g, rng);
  CHECK(testgen::max_coefficient_gap(reconstruct(decompose(f)), f) <= 1e-12 * f.max_abs_coefficient());

  CHECK(reconstruct(LPDecomposition{g, {}}).is_zero());

  LPDecomposition mixed{g, {}};
  mixed.blocks.emplace_back(0, SpectralField(TorusGrid(2, 8)));
  CHECK_THROWS_AS(reconstruct(mixed), InvalidArgument);
}

TEST_CASE("besov_norm examples") {
  const TorusGrid g(1, 64);
  CHECK(besov_norm(SpectralField(g), NormSpec::besov(1.0, 2.0, 2.0)) == 0.0);

  // Single mode e_n + e_{-n} = 2 cos(n x): closed form from the block weights.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testgen::uniform_int(rng, 1, 31);
    const double s = testgen::uniform(rng, -1.0, 2.0);
    const double p = testgen::uniform(rng, 1.0, 8.0);
    const double r = trial % 3 == 0 ? kInf : testgen::uniform(rng, 1.0, 4.0);
    const SpectralField e = SpectralField::mode(g, {n, 0, 0});
    const double lp = lebesgue_norm(e, p);
    double expect = 0.0;
    for (int j = 0; j <= max_block_index(g); ++j) {
      const double t = std::pow(2.0, j * s) * std::abs(w_oracle(n, j));
      expect = std::isinf(r) ? std::max(expect, t) : expect + std::pow(t, r);
    }
    if (!std::isinf(r)) expect = std::pow(expect, 1.0 / r);
    expect *= lp;
    CHECK(besov_norm(e, NormSpec::besov(s, p, r)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("B^s_{2,2} against H^s stays inside the single-mode bracket") {
  const TorusGrid g(1, 128);
  std::mt19937_64 rng(12);
  for (double s : {0.0, 0.5, 1.5}) {
    const auto [lo, hi] = besov_sobolev_bracket(g, s);
    CHECK(lo > 0.0);
    CHECK(hi >= lo);
    for (int trial = 0; trial < 100; ++trial) {
      const SpectralField f = testgen::random_field(g, rng, -1, testgen::uniform(rng, 0.0, 3.0));
      const double ratio = besov_norm(f, NormSpec::besov(s, 2.0, 2.0)) / sobolev_norm(f, s, 2.0);
      CHECK(ratio >= lo * (1 - 1e-12));
      CHECK(ratio <= hi * (1 + 1e-12));
    }
  }
}

TEST_CASE("sobolev_norm examples") {
  const TorusGrid g(3, 8);
  CHECK(sobolev_norm(SpectralField::constant(g, 1.0), 2.0, 2.0) == doctest::Approx(std::pow(2 * pi, 1.5)));

  const SpectralField e = SpectralField::mode(g, {0, 1, 0});
  CHECK(sobolev_norm(e, 1.0, 2.0) == doctest::Approx(std::sqrt(2.0) * lebesgue_norm(e, 2.0)).epsilon(1e-14));

  std::mt19937_64 rng(13);
  const SpectralField f = testgen::random_field(g, rng);
  for (double p : {1.0, 2.0, 3.5, kInf}) {
    CHECK(std::abs(sobolev_norm(f, 0.0, p) - lebesgue_norm(f, p)) <= 1e-12 * lebesgue_norm(f, p));
  }

  // Homogeneous variant drops the mean and reports it.
  const TorusGrid g1(1, 32);
  const SpectralField shifted = SpectralField::constant(g1, 3.0) + SpectralField::mode(g1, {2, 0, 0}, 0.5);
  const NormReport rep = norm_report(shifted, NormSpec::sobolev(1.0, 2.0, true));
  CHECK(rep.value == doctest::Approx(2.0 * std::sqrt(pi)).epsilon(1e-13));
  CHECK(rep.excluded_mean == doctest::Approx(3.0 * std::sqrt(2 * pi)));
}

TEST_CASE("homogeneous Besov norm flags ill-conditioned requests and reports the j range") {
  const TorusGrid g(1, 64);
  const SpectralField f = SpectralField::constant(g, 1.0) + SpectralField::mode(g, {6, 0, 0});
  const NormReport bad = norm_report(f, NormSpec::besov(-0.5, 2.0, 2.0, true));
  CHECK(bad.ill_conditioned);
  const NormReport ok = norm_report(f, NormSpec::besov(0.5, 2.0, 2.0, true));
  CHECK_FALSE(ok.ill_conditioned);
  CHECK(ok.j_min == 2);
  CHECK(ok.j_max == 3);
  CHECK_THROWS_AS(norm_report(f, NormSpec::besov(0.5, 0.5, 2.0)), InvalidArgument);
}

TEST_CASE("band-limited support check") {
  const TorusGrid g(1, 64);
  CHECK(is_band_limited(SpectralField::mode(g, {3, 0, 0}), 1));
  CHECK_FALSE(is_band_limited(SpectralField::mode(g, {4, 0, 0}), 1));
  std::mt19937_64 rng(2);
  CHECK(is_band_limited(project_P(testgen::random_field(g, rng), 3), 3));
}

TEST_CASE("square function at p = 2 equals the weight bracket exactly") {
  const TorusGrid g(1, 64);
  const auto [lo, hi] = square_function_bracket(g);
  CHECK(hi == doctest::Approx(1.0));
  CHECK(lo == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f = testgen::random_field(g, rng, -1, 1.0);
    const double ratio = square_function_norm(f, 2.0) / lebesgue_norm(f, 2.0);
    CHECK(ratio >= lo * (1 - 1e-10));
    CHECK(ratio <= hi * (1 + 1e-10));
  }
  // |n| in {0, 1, 2^j} carries weight exactly 1 in a single block, so fields
  // built from those modes satisfy the equality.
  SpectralField plateau(g);
  plateau.set_mode({0, 0, 0}, 1.0);
  plateau.set_mode({1, 0, 0}, 0.3);
  plateau.set_mode({4, 0, 0}, Complex(0.1, 0.2));
  plateau.set_mode({16, 0, 0}, -0.7);
  CHECK(square_function_norm(plateau, 2.0) == doctest::Approx(lebesgue_norm(plateau, 2.0)).epsilon(1e-10));
}

TEST_CASE("norm rows CSV") {
  const TorusGrid g(1, 16);
  const SpectralField e = SpectralField::mode(g, {2, 0, 0});
  const NormSpec spec = NormSpec::besov(0.5, kInf, 2.0);
  std::ostringstream os;
  write_norm_rows(os, {make_norm_row(spec.label(), spec, norm_report(e, spec))});
  const std::string out = os.str();
  CHECK(out.rfind("norm_label,s,p,r,value,j_min,j_max\n", 0) == 0);
  CHECK(out.find("\"B^0.5_inf,2\",0.5,inf,2,") != std::string::npos);
}
