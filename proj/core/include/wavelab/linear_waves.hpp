#pragma once

#include <functional>

#include "wavelab/littlewood_paley.hpp"
#include "wavelab/spectral.hpp"

namespace wavelab {

struct LinearFlowOutput {
  SpectralField z;
  SpectralField z_tilde;
  double t = 0.0;
};

// z(t) = cos(t|D|) u0 + sin(t|D|)/|D| u1, evaluated by exact multipliers.
SpectralField evolve_linear(const WavePair& pair, double t);

// z~(t) = -|D| sin(t|D|)/<D> u0 + cos(t|D|)/<D> u1, so that dz/dt = <D> z~.
SpectralField evolve_tilde(const WavePair& pair, double t);

// dz/dt = -|D| sin(t|D|) u0 + cos(t|D|) u1.
SpectralField time_derivative(const WavePair& pair, double t);

// (z(t), dz/dt(t)), the state needed to restart the flow at time t.
WavePair evolve_pair(const WavePair& pair, double t);

// (P_j z(t), P_j z~(t)).
LinearFlowOutput evolve_truncated(const WavePair& pair, double t, int cutoff_j,
                                  const BumpProfile& phi = BumpProfile::smooth_step());

// Both propagators at once, untruncated.
LinearFlowOutput evolve_both(const WavePair& pair, double t);

// Time quadrature on [0, T] with `nodes` equispaced points (trapezoid rule):
// || spatial(z(t)) ||_{L^q_t}, q = infinity giving the max over nodes.
// Requires nodes >= 2.
double time_lebesgue_norm(const std::function<double(double t)>& spatial, double T, double q, int nodes);

}  // namespace wavelab
