#pragma once

#include <vector>

#include "wavelab/spectral.hpp"

namespace wavelab {

// (p - 3)/(p - 1).
double critical_regularity(double p);
// 3(p - 1)/(5 - p); requires p < 5.
double beta_p(double p);
// ceil((p - 3)/2).
int alpha_p(double p);
// Hoelder exponent with 1/q_k + (p - k + 1)/(p + 1) = 1, i.e. (p + 1)/k.
double holder_q_k(double p, int k);
// r_p with 1/2 + (p - alpha_p - 1)/(p + 1) + 1/r_p = 1 (infinity when 1/r_p = 0).
double holder_r_p(double p);

struct YudovichParams {
  double p = 4.0;
  double lambda0 = 2.0;
  double C = 1.0;
  double q0 = 10.0;
  double alpha = 0.0;  // admissible time rate

  double s_p() const { return critical_regularity(p); }
  double beta() const { return beta_p(p); }
};

// Validates p in (3, 5), lambda0 > 1, C > 0 and q0 > beta_p, then solves
// alpha + 4 C sqrt(alpha) <= (q0/beta_p - 1) log(lambda0)/lambda0 for the
// largest alpha by bisection.
YudovichParams make_yudovich_params(double p, double lambda0, double C, double q0);

// lambda0 exp(lambda0 t + 4 C lambda0 sqrt(q t)); requires q >= q0, t >= 0.
double gronwall_envelope(const YudovichParams& params, double q, double t);
// alpha q; requires q >= q0.
double yudovich_time(const YudovichParams& params, double q);

struct YudovichDerivation {
  YudovichParams params;
  double a = 0.0;  // ||z||_{L^{2p}}^{2p} + ||z||_{L^{p+1}}^{p+1} + ||z||_{L^inf_t L^m}^2
  double b = 0.0;  // ||z||_{L^inf_t L^m}^2, m = 4(p + 1)/(5 - p)
  std::vector<double> q_grid;
  std::vector<double> c_over_q;  // ||z~||_{L^2_T W^{s_p,q}} / (2 sqrt q)
};

// Desk-scale values from a sample: lambda0 = max(2, 1 + a + b) and
// C = max over q_grid of ||z~_j||_{L^2_T W^{s_p,q}} / (2 sqrt q), all unit
// implicit constants, with z_j = P_j S(t)(u0, u1) on `time_nodes` nodes.
YudovichDerivation derive_yudovich_params(const WavePair& pair, int cutoff_j, double p, double T, double q0,
                                         const std::vector<double>& q_grid, int time_nodes = 64);

}  // namespace wavelab
