#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wavelab/spectral.hpp"

namespace wavelab {

// Radial cutoff phi with phi = 1 on [0, 1], phi = 0 on [2, inf) and a
// monotone transition in between.
class BumpProfile {
 public:
  enum class Kind {
    smooth_step,  // exp(-1/x) gluing, C-infinity
    polynomial,   // smoothstep polynomial, C^order
  };

  static BumpProfile smooth_step() { return BumpProfile(Kind::smooth_step, 0); }
  // order 1: cubic, order 2: quintic, order 3: septic.
  static BumpProfile polynomial(int order);

  double operator()(double r) const noexcept;

  Kind kind() const noexcept { return kind_; }
  // Continuity order of the profile; INT_MAX for the C-infinity step.
  int smoothness_order() const noexcept {
    return kind_ == Kind::smooth_step ? std::numeric_limits<int>::max() : order_;
  }
  std::string label() const;

 private:
  BumpProfile(Kind kind, int order) : kind_(kind), order_(order) {}
  Kind kind_;
  int order_;
};

// phi(2^{-j} r) for j >= 0; zero for j = -1.
double cutoff_weight(double r, int j, const BumpProfile& phi = BumpProfile::smooth_step());
// phi(2^{-j} r) - phi(2^{-(j-1)} r), with P_{-1} = 0.
double block_weight(double r, int j, const BumpProfile& phi = BumpProfile::smooth_step());

// Number of the last block needed on a grid: ceil(log2 N) + 1.
int max_block_index(const TorusGrid& grid);

std::vector<double> cutoff_weights(const TorusGrid& grid, int j, const BumpProfile& phi = BumpProfile::smooth_step());
std::vector<double> block_weights(const TorusGrid& grid, int j, const BumpProfile& phi = BumpProfile::smooth_step());

SpectralField project_P(const SpectralField& field, int j, const BumpProfile& phi = BumpProfile::smooth_step());
SpectralField block_delta(const SpectralField& field, int j, const BumpProfile& phi = BumpProfile::smooth_step());

struct LPDecomposition {
  TorusGrid source_grid;
  std::vector<std::pair<int, SpectralField>> blocks;
};

LPDecomposition decompose(const SpectralField& field, const BumpProfile& phi = BumpProfile::smooth_step());
// Sum of the blocks; the empty list yields the zero field on source_grid.
SpectralField reconstruct(const LPDecomposition& decomposition);

// True when every coefficient outside the support of phi(2^{-j} |n|) is zero.
bool is_band_limited(const SpectralField& field, int j, const BumpProfile& phi = BumpProfile::smooth_step());

enum class NormKind { besov, sobolev };

struct NormSpec {
  NormKind kind = NormKind::besov;
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;  // ignored by Sobolev norms
  bool homogeneous = false;

  static NormSpec besov(double s, double p, double r, bool homogeneous = false) {
    return {NormKind::besov, s, p, r, homogeneous};
  }
  static NormSpec sobolev(double s, double p, bool homogeneous = false) {
    return {NormKind::sobolev, s, p, 2.0, homogeneous};
  }
  std::string label() const;
};

struct NormReport {
  double value = 0.0;
  // Range of block indices holding nonzero blocks (-1, -1 when none).
  int j_min = -1;
  int j_max = -1;
  // |c_0| (2pi)^{d/p} of the mean mode, excluded by homogeneous norms.
  double excluded_mean = 0.0;
  // Homogeneous norm of a field with nonzero mean at s <= 0.
  bool ill_conditioned = false;
};

NormReport norm_report(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi = BumpProfile::smooth_step());

double besov_norm(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi = BumpProfile::smooth_step());
// || <D>^s u ||_{L^p}, or || |D|^s u ||_{L^p} with the mean removed when homogeneous.
double sobolev_norm(const SpectralField& field, double s, double p, bool homogeneous = false);
double norm_value(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi = BumpProfile::smooth_step());

// Physical samples of (sum_j |Delta_j f|^2)^{1/2}.
std::vector<double> square_function_samples(const SpectralField& field, const BumpProfile& phi = BumpProfile::smooth_step());
double square_function_norm(const SpectralField& field, double p, const BumpProfile& phi = BumpProfile::smooth_step());

struct NormRow {
  std::string label;
  double s;
  double p;
  double r;
  double value;
  int j_min;
  int j_max;
};

NormRow make_norm_row(const std::string& label, const NormSpec& spec, const NormReport& report);
// CSV header norm_label,s,p,r,value,j_min,j_max; infinite exponents print "inf"
// and labels containing commas are quoted.
void write_norm_rows(std::ostream& out, const std::vector<NormRow>& rows);

}  // namespace wavelab
