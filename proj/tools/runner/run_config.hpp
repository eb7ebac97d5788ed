#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavelab/galerkin.hpp"
#include "wavelab/littlewood_paley.hpp"
#include "wavelab/probabilistic.hpp"

namespace wavelab::runner {

enum class Mode { simulate, remainder, ensemble, inequalities, tails, report };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

// Any problem with the configuration document or an override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSection {
  int dim = 1;
  int N = 256;
  int rho = 4;
};

struct GalerkinSection {
  double p = 7.0;
  int cutoff_j = 4;
  double dt = 1e-3;
  double T = 1.0;
  double blowup_guard = 0.1;
  int snapshot_stride = 0;
  // Write the final (u, du/dt) as binary field checkpoints.
  bool checkpoint = false;
};

// Deterministic base pair. "mode": u0 = amplitude cos(k.x), u1 =
// velocity_amplitude cos(k.x); "power_law": u0 = amplitude <n>^-sigma, u1 =
// amplitude <n>^-(sigma1), sigma1 defaulting to sigma - 1; "files": fields
// loaded from disk; "zero".
struct DataSection {
  std::string kind = "mode";
  double amplitude = 0.1;
  double velocity_amplitude = 0.0;
  std::array<int, 3> wavenumber{1, 0, 0};
  double sigma = 1.2;
  std::optional<double> sigma1;
  std::string u0_file;
  std::string u1_file;
};

struct RandomizationSection {
  std::string family = "gaussian";
  std::optional<double> c;  // sub-Gaussian constant, family default when unset
  std::size_t samples = 50;
  std::uint64_t first_sample = 0;
};

struct EnsembleSection {
  std::vector<int> cutoffs{4, 5, 6};
  double eta = 0.1;
};

struct TailsSection {
  double T = 1.0;
  double q1 = 2.0;
  double q2 = 4.0;
  double r = 2.0;
  double s = 0.0;
  int time_nodes = 64;
  std::size_t samples = 2000;
  std::string op = "z";
  int cutoff_j = -1;
  int lambda_points = 100;
};

struct InequalitiesSection {
  std::size_t corpus_size = 200;
  std::size_t adversarial = 20;
  int extent = 0;
  double p = 7.0;
};

struct NormEntry {
  std::string kind = "besov";
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;
  bool homogeneous = false;
};

struct YudovichSection {
  double p = 4.0;
  double q0 = 20.0;
  std::vector<double> q_grid{20.0, 40.0, 80.0};
  int cutoff_j = 5;
  double T = 1.0;
};

struct ReportSection {
  std::vector<double> p_values{3.0, 4.0, 5.0, 7.0};
  std::vector<NormEntry> norms{{"besov", 0.5, 2.0, 2.0, false}, {"sobolev", 0.5, 2.0, 2.0, false}};
  std::optional<YudovichSection> yudovich;
};

struct RunConfig {
  Mode mode = Mode::simulate;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output_dir = "wavelab_out";
  GridSection grid;
  GalerkinSection galerkin;
  DataSection data;
  RandomizationSection randomization;
  EnsembleSection ensemble;
  TailsSection tails;
  InequalitiesSection inequalities;
  ReportSection report;

  TorusGrid torus() const;
  GalerkinConfig galerkin_config() const;
  TailConfig tail_config() const;
  CoefficientDistribution distribution() const;
};

// Strict parse: unknown keys, wrong types and malformed values are errors.
// Missing keys keep their defaults. Exponents accept the string "inf".
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& config);

// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
// possible and taken as a plain string otherwise.
std::string apply_override(const std::string& json_text, const std::string& assignment);

// Applies the overrides in order, then binds the command-line mode: a "mode"
// key in the document must agree with it.
RunConfig load_config(const std::string& json_text, Mode mode, const std::vector<std::string>& overrides);

// Checks everything the chosen mode needs before any compute.
void validate(const RunConfig& config);

}  // namespace wavelab::runner
