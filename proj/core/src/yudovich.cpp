#include "wavelab/yudovich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavelab/error.hpp"
#include "wavelab/linear_waves.hpp"
#include "wavelab/littlewood_paley.hpp"

namespace wavelab {

namespace {

void require_subquintic(double p, const char* what) {
  if (!(p > 3.0 && p < 5.0)) throw InvalidArgument(std::string(what) + ": p must lie in (3, 5)");
}

}  // namespace

double critical_regularity(double p) {
  if (!(p > 1.0)) throw InvalidArgument("critical_regularity: p must exceed 1");
  return (p - 3.0) / (p - 1.0);
}

double beta_p(double p) {
  if (!(p > 1.0 && p < 5.0)) throw InvalidArgument("beta_p: p must lie in (1, 5)");
  return 3.0 * (p - 1.0) / (5.0 - p);
}

int alpha_p(double p) { return static_cast<int>(std::ceil((p - 3.0) / 2.0)); }

double holder_q_k(double p, int k) {
  if (k < 1) throw InvalidArgument("holder_q_k: k must be >= 1");
  return (p + 1.0) / k;
}

double holder_r_p(double p) {
  const double inv_r = 0.5 - (p - alpha_p(p) - 1.0) / (p + 1.0);
  if (inv_r < -1e-15) throw InvalidArgument("holder_r_p: no admissible exponent for this p");
  return inv_r <= 1e-15 ? std::numeric_limits<double>::infinity() : 1.0 / inv_r;
}

YudovichParams make_yudovich_params(double p, double lambda0, double C, double q0) {
  require_subquintic(p, "yudovich");
  if (!(lambda0 > 1.0)) throw InvalidArgument("yudovich: lambda0 must exceed 1");
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("yudovich: C must be positive");
  const double beta = beta_p(p);
  if (!(q0 > beta)) throw InvalidArgument("yudovich: q0 must exceed beta_p = " + std::to_string(beta));
  YudovichParams y{p, lambda0, C, q0, 0.0};
  const double budget = (q0 / beta - 1.0) * std::log(lambda0) / lambda0;
  auto g = [C](double a) { return a + 4.0 * C * std::sqrt(a); };
  double lo = 0.0;
  double hi = std::max(1.0, budget);
  while (g(hi) <= budget) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) <= budget ? lo : hi) = mid;
  }
  y.alpha = lo;
  return y;
}

double gronwall_envelope(const YudovichParams& y, double q, double t) {
  if (!(q >= y.q0)) throw InvalidArgument("gronwall_envelope: q must be >= q0");
  if (!(t >= 0.0)) throw InvalidArgument("gronwall_envelope: t must be >= 0");
  return y.lambda0 * std::exp(y.lambda0 * t + 4.0 * y.C * y.lambda0 * std::sqrt(q * t));
}

double yudovich_time(const YudovichParams& y, double q) {
  if (!(q >= y.q0)) throw InvalidArgument("yudovich_time: q must be >= q0");
  return y.alpha * q;
}

YudovichDerivation derive_yudovich_params(const WavePair& pair, int cutoff_j, double p, double T, double q0,
                                         const std::vector<double>& q_grid, int time_nodes) {
  require_subquintic(p, "derive_yudovich_params");
  if (q_grid.empty()) throw InvalidArgument("derive_yudovich_params: empty q grid");
  // C only enters the envelope for q >= q0.
  for (double q : q_grid) {
    if (!(q >= q0) || std::isinf(q)) throw InvalidArgument("derive_yudovich_params: q grid entries must lie in [q0, inf)");
  }
  const auto w = cutoff_weights(pair.u0.grid(), cutoff_j);
  const WavePair pn{apply_weights(pair.u0, w), apply_weights(pair.u1, w)};
  const double m = 4.0 * (p + 1.0) / (5.0 - p);
  const double sp = critical_regularity(p);

  std::vector<SpectralField> z;
  std::vector<SpectralField> zt;
  const double h = T / (time_nodes - 1);
  for (int k = 0; k < time_nodes; ++k) {
    z.push_back(evolve_linear(pn, k * h));
    zt.push_back(evolve_tilde(pn, k * h));
  }
  auto over_time = [&](const std::vector<SpectralField>& f, double q, auto&& spatial) {
    return time_lebesgue_norm([&](double t) { return spatial(f[static_cast<std::size_t>(std::lround(t / h))]); }, T, q,
                              time_nodes);
  };
  const double inf = std::numeric_limits<double>::infinity();
  auto lebesgue = [](double e) { return [e](const SpectralField& f) { return lebesgue_norm(f, e); }; };
  // L^r_{T,x} over the space-time cylinder: the time norm of the L^r_x norm.
  const double z2p = over_time(z, 2.0 * p, lebesgue(2.0 * p));
  const double zp1 = over_time(z, p + 1.0, lebesgue(p + 1.0));
  const double zm = over_time(z, inf, lebesgue(m));

  YudovichDerivation d;
  d.b = zm * zm;
  d.a = std::pow(z2p, 2.0 * p) + std::pow(zp1, p + 1.0) + d.b;
  d.q_grid = q_grid;
  double C = 0.0;
  for (double q : q_grid) {
    const double nrm = over_time(zt, 2.0, [&](const SpectralField& f) { return sobolev_norm(f, sp, q); });
    d.c_over_q.push_back(nrm / (2.0 * std::sqrt(q)));
    C = std::max(C, d.c_over_q.back());
  }
  const double lambda0 = std::max(2.0, 1.0 + d.a + d.b);
  d.params = make_yudovich_params(p, lambda0, C > 0.0 ? C : std::numeric_limits<double>::min(), q0);
  return d;
}

}  // namespace wavelab
