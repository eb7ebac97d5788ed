#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "wavelab/error.hpp"
#include "wavelab/linear_waves.hpp"

using namespace wavelab;
using std::numbers::pi;

namespace {

double rel_gap(const SpectralField& a, const SpectralField& b) {
  const double scale = std::max(b.max_abs_coefficient(), 1e-300);
  return testgen::max_coefficient_gap(a, b) / scale;
}

WavePair random_pair(const TorusGrid& g, std::mt19937_64& rng, int radius = -1) {
  return {testgen::random_field(g, rng, radius, 1.0), testgen::random_field(g, rng, radius, 0.0)};
}

double linear_energy(const WavePair& pair, double t) {
  return l2_norm_squared(time_derivative(pair, t)) + gradient_norm_squared(evolve_linear(pair, t));
}

}  // namespace

TEST_CASE("evolve_linear examples") {
  const TorusGrid g(3, 8);
  const SpectralField ek = SpectralField::mode(g, {0, 0, 1});
  CHECK(rel_gap(evolve_linear({ek, SpectralField(g)}, pi), -1.0 * ek) < 1e-15);

  const SpectralField e0 = SpectralField::constant(g, 1.0);
  CHECK(rel_gap(evolve_linear({SpectralField(g), e0}, 3.0), 3.0 * e0) == 0.0);

  std::mt19937_64 rng(1);
  const WavePair pair = random_pair(g, rng);
  CHECK(testgen::max_coefficient_gap(evolve_linear(pair, 0.0), pair.u0) == 0.0);
}

TEST_CASE("single-mode closed forms at arbitrary times") {
  const TorusGrid g(2, 16);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Wavenumber k{testgen::uniform_int(rng, -7, 7), testgen::uniform_int(rng, -7, 7), 0};
    const double kn = std::hypot(k[0], k[1]);
    const double t = testgen::uniform(rng, -20.0, 20.0);
    const Complex a(testgen::uniform(rng, -1, 1), testgen::uniform(rng, -1, 1));
    const Complex b(testgen::uniform(rng, -1, 1), testgen::uniform(rng, -1, 1));
    WavePair pair{SpectralField(g), SpectralField(g)};
    if (kn == 0.0) {
      pair.u0.set_mode(k, a.real());
      pair.u1.set_mode(k, b.real());
    } else {
      pair.u0.set_mode(k, a);
      pair.u1.set_mode(k, b);
    }
    const Complex a0 = pair.u0.coefficient(k), b0 = pair.u1.coefficient(k);
    const double sinc = kn == 0.0 ? t : std::sin(t * kn) / kn;
    const double br = std::sqrt(1.0 + kn * kn);
    const Complex z = std::cos(t * kn) * a0 + sinc * b0;
    const Complex zt = (-kn * std::sin(t * kn) * a0 + std::cos(t * kn) * b0) / br;
    const Complex dz = -kn * std::sin(t * kn) * a0 + std::cos(t * kn) * b0;
    CHECK(std::abs(evolve_linear(pair, t).coefficient(k) - z) <= 1e-12);
    CHECK(std::abs(evolve_tilde(pair, t).coefficient(k) - zt) <= 1e-12);
    CHECK(std::abs(time_derivative(pair, t).coefficient(k) - dz) <= 1e-12);
  }
}

TEST_CASE("evolve_tilde examples") {
  const TorusGrid g(1, 32);
  const SpectralField e0 = SpectralField::constant(g, 1.0);
  for (double t : {0.0, 0.7, -4.0}) CHECK(evolve_tilde({e0, SpectralField(g)}, t).is_zero());
  CHECK(testgen::max_coefficient_gap(evolve_tilde({SpectralField(g), e0}, 0.0), e0) == 0.0);

  std::mt19937_64 rng(4);
  const WavePair pair = random_pair(g, rng, 10);
  const double h = 1e-4;
  for (double t : {0.3, 1.7, 5.0}) {
    const SpectralField fd = (1.0 / (2 * h)) * (evolve_linear(pair, t + h) - evolve_linear(pair, t - h));
    const SpectralField exact = apply_multiplier(evolve_tilde(pair, t), symbols::bracket(1.0));
    CHECK(rel_gap(fd, exact) <= 1e-6);
  }
}

TEST_CASE("evolve_truncated examples") {
  const TorusGrid g(1, 32);
  std::mt19937_64 rng(5);
  const WavePair pair = random_pair(g, rng);
  // max |n| = 16 = 2^4: P_4 is the identity on the grid.
  const auto full = evolve_truncated(pair, 1.3, 4);
  CHECK(testgen::max_coefficient_gap(full.z, evolve_linear(pair, 1.3)) == 0.0);
  CHECK(testgen::max_coefficient_gap(full.z_tilde, evolve_tilde(pair, 1.3)) == 0.0);
  CHECK(full.t == 1.3);

  const WavePair four{SpectralField::mode(g, {4, 0, 0}), SpectralField::mode(g, {-4, 0, 0}, 2.0)};
  const auto zero = evolve_truncated(four, 0.4, 0);
  CHECK(zero.z.is_zero());
  CHECK(zero.z_tilde.is_zero());

  for (int j = 0; j <= 4; ++j) {
    const WavePair projected{project_P(pair.u0, j), project_P(pair.u1, j)};
    for (double t : {0.5, 2.0}) {
      const auto a = evolve_truncated(pair, t, j);
      CHECK(rel_gap(a.z, evolve_linear(projected, t)) <= 1e-12);
      CHECK(rel_gap(a.z_tilde, evolve_tilde(projected, t)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(evolve_truncated(pair, 0.1, -1), InvalidArgument);
}

TEST_CASE("property: linear energy is time independent") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = testgen::uniform_int(rng, 1, 3);
    const TorusGrid g(d, d == 1 ? 64 : 8);
    const WavePair pair = random_pair(g, rng);
    const double e0 = linear_energy(pair, 0.0);
    for (int k = 0; k < 5; ++k) {
      const double t = testgen::uniform(rng, -50, 50);
      CHECK(std::abs(linear_energy(pair, t) - e0) <= 1e-12 * e0);
    }
  }
}

TEST_CASE("property: group law and reversibility") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = testgen::uniform_int(rng, 1, 3);
    const TorusGrid g(d, d == 1 ? 64 : 8);
    const WavePair pair = random_pair(g, rng);
    const double t1 = testgen::uniform(rng, -5, 5);
    const double t2 = testgen::uniform(rng, -5, 5);
    const WavePair mid = evolve_pair(pair, t1);
    const WavePair composed = evolve_pair(mid, t2);
    const WavePair direct = evolve_pair(pair, t1 + t2);
    CHECK(rel_gap(composed.u0, direct.u0) <= 1e-10);
    CHECK(rel_gap(composed.u1, direct.u1) <= 1e-10);

    const WavePair back = evolve_pair(mid, -t1);
    CHECK(rel_gap(back.u0, pair.u0) <= 1e-12);
    CHECK(rel_gap(back.u1, pair.u1) <= 1e-12);
  }
}

TEST_CASE("property: truncation error is monotone and vanishes above the data band") {
  const TorusGrid g(1, 128);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const int kmax = testgen::uniform_int(rng, 5, 40);
    const WavePair pair = random_pair(g, rng, kmax);
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 6; ++j) {
      auto gap = [&](double t) {
        return lebesgue_norm(evolve_truncated(pair, t, j).z - evolve_linear(pair, t), 4.0);
      };
      const double err = time_lebesgue_norm(gap, 1.0, 2.0, 16);
      CHECK(err <= prev * (1 + 1e-12));
      if (std::ldexp(1.0, j - 1) > kmax) CHECK(err == 0.0);
      prev = err;
    }
  }
}

TEST_CASE("time quadrature") {
  CHECK(time_lebesgue_norm([](double) { return 3.0; }, 2.0, 2.0, 5) == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(time_lebesgue_norm([](double t) { return t; }, 4.0, std::numeric_limits<double>::infinity(), 9) == 4.0);
  // Trapezoid rule is exact on linear integrands: int_0^1 t dt = 1/2.
  CHECK(time_lebesgue_norm([](double t) { return t; }, 1.0, 1.0, 3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(time_lebesgue_norm([](double) { return 1.0; }, 1.0, 2.0, 1), InvalidArgument);
}
