#include "wavelab/randomization.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "wavelab/error.hpp"
#include "wavelab/philox.hpp"

namespace wavelab {

namespace {

std::uint32_t pack_low(int n) { return static_cast<std::uint32_t>(n); }

std::uint32_t pack_high(int n1, int n2, int component, StreamTag tag) {
  return static_cast<std::uint32_t>(tag) | (static_cast<std::uint32_t>(component & 0x3) << 8) |
         ((static_cast<std::uint32_t>(n1) & 0x7ffu) << 10) | ((static_cast<std::uint32_t>(n2) & 0x7ffu) << 21);
}

}  // namespace

std::string to_string(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::gaussian: return "gaussian";
    case CoefficientFamily::rademacher: return "rademacher";
    case CoefficientFamily::uniform_symmetric: return "uniform_symmetric";
  }
  return "unknown";
}

CoefficientFamily parse_family(std::string_view name) {
  if (name == "gaussian") return CoefficientFamily::gaussian;
  if (name == "rademacher") return CoefficientFamily::rademacher;
  if (name == "uniform_symmetric" || name == "uniform") return CoefficientFamily::uniform_symmetric;
  throw InvalidArgument("unknown coefficient family '" + std::string(name) + "'");
}

CoefficientDistribution CoefficientDistribution::standard(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::gaussian: return {family, 0.5};
    case CoefficientFamily::rademacher: return {family, 0.5};
    case CoefficientFamily::uniform_symmetric: return {family, 1.0 / 6.0};
  }
  throw InvalidArgument("unknown coefficient family");
}

double CoefficientDistribution::variance() const noexcept {
  return family == CoefficientFamily::uniform_symmetric ? 1.0 / 3.0 : 1.0;
}

std::array<double, 2> draw_base_pair(const CoefficientDistribution& dist, std::uint64_t seed, std::uint64_t sample,
                                     std::uint32_t slot, std::uint32_t tag_and_component) noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32), slot,
                                tag_and_component};
  const auto out = Philox4x32::generate(ctr, Philox4x32::key_from_seed(seed));
  const double ua = open_unit_interval(out[0], out[1]);
  const double ub = open_unit_interval(out[2], out[3]);
  switch (dist.family) {
    case CoefficientFamily::gaussian: {
      const double radius = std::sqrt(-2.0 * std::log(ua));
      const double angle = 2.0 * std::numbers::pi * ub;
      return {radius * std::cos(angle), radius * std::sin(angle)};
    }
    case CoefficientFamily::rademacher:
      return {(out[0] >> 31) ? 1.0 : -1.0, (out[2] >> 31) ? 1.0 : -1.0};
    case CoefficientFamily::uniform_symmetric:
      return {2.0 * ua - 1.0, 2.0 * ub - 1.0};
  }
  return {0.0, 0.0};
}

Complex unit_coefficient(const CoefficientDistribution& dist, std::uint64_t seed, std::uint64_t sample,
                         const Wavenumber& n, int component) noexcept {
  const auto pair = draw_base_pair(dist, seed, sample, pack_low(n[0]),
                                   pack_high(n[1], n[2], component, StreamTag::initial_data));
  const double sd = std::sqrt(dist.variance());
  if (n[0] == 0 && n[1] == 0 && n[2] == 0) return pair[0] / sd;
  const double scale = 1.0 / (sd * std::numbers::sqrt2);
  return {pair[0] * scale, pair[1] * scale};
}

WavePair sample_randomized_pair(const RandomizationSpec& spec, std::uint64_t sample_index) {
  const TorusGrid& grid = spec.base.u0.grid();
  if (!spec.base.u1.grid().same_modes(grid)) throw InvalidArgument("randomization: base pair grids differ");
  WavePair out = zero_pair(grid);
  const ModeTable& modes = grid.modes();
  const SpectralField* base[2] = {&spec.base.u0, &spec.base.u1};
  SpectralField* target[2] = {&out.u0, &out.u1};
  for (int component = 0; component < 2; ++component) {
    const auto in = base[component]->coefficients();
    auto c = target[component]->mutable_coefficients();
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!modes.active[i]) continue;
      const bool zero_mode = modes.mirror[i] == i;
      if (!zero_mode && !modes.canonical[i]) continue;
      if (in[i] == Complex{}) continue;
      const Complex x = unit_coefficient(spec.distribution, spec.base_seed, sample_index, modes.wavenumber[i], component);
      if (zero_mode) {
        c[i] = (x * in[i]).real();
      } else {
        c[i] = x * in[i];
        c[modes.mirror[i]] = std::conj(c[i]);
      }
    }
  }
  return out;
}

MgfReport verify_subgaussian_mgf(const CoefficientDistribution& dist, const std::vector<double>& gamma_grid,
                                 std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw InvalidArgument("verify_subgaussian_mgf: at least 10^4 samples required");
  for (double g : gamma_grid) {
    if (!std::isfinite(g)) throw InvalidArgument("verify_subgaussian_mgf: non-finite gamma");
    if (dist.family == CoefficientFamily::gaussian && std::abs(g) > 10.0) {
      throw InvalidArgument("verify_subgaussian_mgf: |gamma| > 10 overflows the gaussian estimator");
    }
  }
  std::vector<double> x(samples);
  const std::uint32_t tag = static_cast<std::uint32_t>(StreamTag::mgf);
  for (std::size_t m = 0; m < samples; ++m) x[m] = draw_base_pair(dist, seed, m, 0, tag)[0];

  MgfReport report{dist, samples, {}, 0.0, false};
  for (double gamma : gamma_grid) {
    MgfRow row{};
    row.gamma = gamma;
    row.bound = std::exp(dist.subgaussian_constant * gamma * gamma);
    if (gamma == 0.0) {
      row.estimate = 1.0;
      row.ci_low = row.ci_high = 1.0;
    } else {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (double xi : x) {
        const double e = std::exp(gamma * xi);
        sum += e;
        sum_sq += e * e;
      }
      const double n = static_cast<double>(samples);
      row.estimate = sum / n;
      const double var = std::max(0.0, (sum_sq / n - row.estimate * row.estimate) * n / (n - 1.0));
      row.std_error = std::sqrt(var / n);
      row.ci_low = row.estimate - 3.0 * row.std_error;
      row.ci_high = row.estimate + 3.0 * row.std_error;
      row.log_ratio = std::log(row.estimate) / (gamma * gamma);
      report.max_log_ratio = std::max(report.max_log_ratio, row.log_ratio);
    }
    row.violated = row.ci_low > row.bound;
    report.violated = report.violated || row.violated;
    report.rows.push_back(row);
  }
  return report;
}

std::string randomization_spec_to_json(const RandomizationSpec& spec, const std::string& u0_ref,
                                       const std::string& u1_ref) {
  nlohmann::json j = {{"family", to_string(spec.distribution.family)},
                      {"c", spec.distribution.subgaussian_constant},
                      {"base_seed", spec.base_seed},
                      {"u0_ref", u0_ref},
                      {"u1_ref", u1_ref}};
  return j.dump(2);
}

RandomizationRecord randomization_record_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RandomizationRecord r;
    r.distribution.family = parse_family(j.at("family").get<std::string>());
    r.distribution.subgaussian_constant = j.at("c").get<double>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.u0_ref = j.at("u0_ref").get<std::string>();
    r.u1_ref = j.at("u1_ref").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("randomization spec JSON: ") + e.what());
  }
}

}  // namespace wavelab
