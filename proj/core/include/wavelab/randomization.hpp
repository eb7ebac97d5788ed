#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wavelab/spectral.hpp"

namespace wavelab {

enum class CoefficientFamily { gaussian, rademacher, uniform_symmetric };

std::string to_string(CoefficientFamily family);
CoefficientFamily parse_family(std::string_view name);

// A mean-zero base variable X with E[e^{gamma X}] <= e^{c gamma^2}:
// standard normal (c = 1/2), +-1 (c = 1/2), uniform on [-1, 1] (c = 1/6).
struct CoefficientDistribution {
  CoefficientFamily family = CoefficientFamily::gaussian;
  double subgaussian_constant = 0.5;

  static CoefficientDistribution standard(CoefficientFamily family);
  double variance() const noexcept;
};

// Stream tags keep independent uses of one seed apart.
enum class StreamTag : std::uint8_t { initial_data = 1, kpz = 2, mgf = 3, corpus = 4 };

// Two independent draws of the base variable, a pure function of the key
// material. `slot` distinguishes unrelated draws inside one stream.
std::array<double, 2> draw_base_pair(const CoefficientDistribution& dist, std::uint64_t seed, std::uint64_t sample,
                                     std::uint32_t slot, std::uint32_t tag_and_component) noexcept;

// Unit-variance coefficient X_n for wavenumber n and component i of the pair:
// real for n = 0, independent real and imaginary parts of variance 1/2 for
// n != 0. Depends only on (seed, sample, n, component), not on the grid.
Complex unit_coefficient(const CoefficientDistribution& dist, std::uint64_t seed, std::uint64_t sample,
                         const Wavenumber& n, int component) noexcept;

struct RandomizationSpec {
  WavePair base;
  CoefficientDistribution distribution;
  std::uint64_t base_seed = 0;
};

// (sum X_n^(0) u_{0,n} e_n, sum X_n^(1) u_{1,n} e_n) with X_{-n} = conj(X_n).
WavePair sample_randomized_pair(const RandomizationSpec& spec, std::uint64_t sample_index);

struct MgfRow {
  double gamma;
  double estimate;    // empirical E[e^{gamma X}]
  double std_error;
  double ci_low;      // estimate -/+ 3 standard errors
  double ci_high;
  double bound;       // e^{c gamma^2}
  double log_ratio;   // log(estimate) / gamma^2; 0 at gamma = 0
  bool violated;      // ci_low above the bound
};

struct MgfReport {
  CoefficientDistribution distribution;
  std::size_t samples = 0;
  std::vector<MgfRow> rows;
  double max_log_ratio = 0.0;
  bool violated = false;
};

// Requires M >= 10^4; gaussian grids with |gamma| > 10 are rejected.
MgfReport verify_subgaussian_mgf(const CoefficientDistribution& dist, const std::vector<double>& gamma_grid,
                                 std::size_t samples, std::uint64_t seed = 0x5eed);

// JSON {family, c, base_seed, u0_ref, u1_ref}.
std::string randomization_spec_to_json(const RandomizationSpec& spec, const std::string& u0_ref,
                                       const std::string& u1_ref);
struct RandomizationRecord {
  CoefficientDistribution distribution;
  std::uint64_t base_seed = 0;
  std::string u0_ref;
  std::string u1_ref;
};
RandomizationRecord randomization_record_from_json(std::string_view text);

}  // namespace wavelab
