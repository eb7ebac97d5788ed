#include "wavelab/linear_waves.hpp"

#include <algorithm>
#include <cmath>

#include "wavelab/error.hpp"

namespace wavelab {

namespace {

void require_same_grid(const WavePair& pair) {
  if (!pair.u0.grid().same_modes(pair.u1.grid())) throw InvalidArgument("linear flow: u0 and u1 live on different grids");
}

// out_n = a(|n|) u0_n + b(|n|) u1_n for real symbols a, b depending only on |n|.
template <class Symbols>
SpectralField combine(const WavePair& pair, Symbols&& ab) {
  require_same_grid(pair);
  SpectralField out(pair.u0.grid());
  const ModeTable& modes = pair.u0.grid().modes();
  const auto c0 = pair.u0.coefficients();
  const auto c1 = pair.u1.coefficients();
  auto c = out.mutable_coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c0[i] == Complex{} && c1[i] == Complex{}) continue;
    const auto [a, b] = ab(modes.norm[i]);
    c[i] = a * c0[i] + b * c1[i];
  }
  return out;
}

double sinc_t(double t, double k) { return k == 0.0 ? t : std::sin(t * k) / k; }

}  // namespace

SpectralField evolve_linear(const WavePair& pair, double t) {
  return combine(pair, [t](double k) { return std::pair{std::cos(t * k), sinc_t(t, k)}; });
}

SpectralField evolve_tilde(const WavePair& pair, double t) {
  return combine(pair, [t](double k) {
    const double br = std::sqrt(1.0 + k * k);
    return std::pair{-k * std::sin(t * k) / br, std::cos(t * k) / br};
  });
}

SpectralField time_derivative(const WavePair& pair, double t) {
  return combine(pair, [t](double k) { return std::pair{-k * std::sin(t * k), std::cos(t * k)}; });
}

WavePair evolve_pair(const WavePair& pair, double t) { return {evolve_linear(pair, t), time_derivative(pair, t)}; }

LinearFlowOutput evolve_both(const WavePair& pair, double t) {
  return {evolve_linear(pair, t), evolve_tilde(pair, t), t};
}

LinearFlowOutput evolve_truncated(const WavePair& pair, double t, int cutoff_j, const BumpProfile& phi) {
  if (cutoff_j < 0) throw InvalidArgument("evolve_truncated: cutoff index must be >= 0");
  const auto w = cutoff_weights(pair.u0.grid(), cutoff_j, phi);
  return {apply_weights(evolve_linear(pair, t), w), apply_weights(evolve_tilde(pair, t), w), t};
}

double time_lebesgue_norm(const std::function<double(double)>& spatial, double T, double q, int nodes) {
  if (nodes < 2) throw InvalidArgument("time_lebesgue_norm: at least two nodes required");
  if (!(T > 0.0)) throw InvalidArgument("time_lebesgue_norm: horizon must be positive");
  if (!(q >= 1.0)) throw InvalidArgument("time_lebesgue_norm: exponent must be >= 1");
  std::vector<double> values(nodes);
  const double h = T / (nodes - 1);
  for (int k = 0; k < nodes; ++k) values[k] = spatial(k * h);
  const double peak = *std::max_element(values.begin(), values.end());
  if (std::isinf(q) || peak == 0.0) return peak;
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double w = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
    sum += w * std::pow(values[k] / peak, q);
  }
  return peak * std::pow(sum * h, 1.0 / q);
}

}  // namespace wavelab
