#include "wavelab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavelab/error.hpp"
#include "wavelab/randomization.hpp"

namespace wavelab {

namespace {

constexpr CoefficientDistribution kUniform{CoefficientFamily::uniform_symmetric, 1.0 / 6.0};

std::uint32_t corpus_tag(const Wavenumber& n, int component) {
  return static_cast<std::uint32_t>(StreamTag::corpus) | (static_cast<std::uint32_t>(component) << 8) |
         ((static_cast<std::uint32_t>(n[1]) & 0x7ffu) << 10) | ((static_cast<std::uint32_t>(n[2]) & 0x7ffu) << 21);
}

// Uniform in [0, 1) from the corpus stream.
double corpus_uniform(std::uint64_t seed, std::uint64_t entry, const Wavenumber& n, int component) {
  const auto x = draw_base_pair(kUniform, seed, entry, static_cast<std::uint32_t>(n[0]), corpus_tag(n, component));
  return 0.5 * (x[0] + 1.0);
}

int sup_norm(const Wavenumber& n) { return std::max({std::abs(n[0]), std::abs(n[1]), std::abs(n[2])}); }

SpectralField power_law_entry(const TorusGrid& grid, int extent, double sigma, std::uint64_t seed, std::uint64_t entry) {
  SpectralField f(grid);
  const ModeTable& modes = grid.modes();
  auto c = f.mutable_coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!modes.canonical[i]) continue;
    const int m = sup_norm(modes.wavenumber[i]);
    if (m < 1 || m > extent) continue;
    const double theta = 2.0 * std::numbers::pi * corpus_uniform(seed, entry, modes.wavenumber[i], 0);
    c[i] = std::polar(std::pow(modes.norm[i], -sigma), theta);
    c[modes.mirror[i]] = std::conj(c[i]);
  }
  return f;
}

Wavenumber adversarial_mode(int dim, int k, int variant) {
  if (dim == 1 || variant % 2 == 0) return {k, 0, 0};
  if (dim == 2) return {k, std::max(1, k / 2), 0};
  return {k, std::max(1, k / 2), std::max(1, k / 3)};
}

}  // namespace

int CorpusSpec::resolved_extent() const {
  const int e = extent > 0 ? extent : grid.modes_per_axis() / 4;
  if (e < 1 || e >= grid.modes_per_axis() / 2) {
    throw InvalidArgument("corpus: extent must lie in [1, N/2)");
  }
  return e;
}

std::vector<CorpusEntry> make_corpus(const CorpusSpec& spec) {
  if (!(spec.sigma_min <= spec.sigma_max)) throw InvalidArgument("corpus: empty slope range");
  const int extent = spec.resolved_extent();
  const TorusGrid& grid = spec.grid;
  std::vector<CorpusEntry> out;
  out.reserve(spec.power_law_count + spec.adversarial_count);
  for (std::size_t k = 0; k < spec.power_law_count; ++k) {
    const double u = corpus_uniform(spec.seed, k, {0, 0, 0}, 1);
    const double sigma = spec.sigma_min + (spec.sigma_max - spec.sigma_min) * u;
    out.push_back({"power_law", sigma, power_law_entry(grid, extent, sigma, spec.seed, k)});
  }
  // Half of the single modes sit at the top of a dyadic shell (2^m - 1), where
  // block-local ratios reach their extremes; the rest spread geometrically.
  const std::size_t singles = (spec.adversarial_count + 1) / 2;
  const std::size_t shell_tops = singles / 2;
  const std::size_t spread = singles - shell_tops;
  const int top_m = static_cast<int>(std::floor(std::log2(extent + 1.0)));
  auto geometric = [&](std::size_t i, std::size_t count) {
    const double frac = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    return std::clamp(static_cast<int>(std::lround(std::pow(static_cast<double>(extent), frac))), 1, extent);
  };
  for (std::size_t a = 0; a < spec.adversarial_count; ++a) {
    const bool single = a < singles;
    const std::size_t i = single ? a : a - singles;
    int k = 0;
    if (!single) {
      k = geometric(i, spec.adversarial_count - singles);
    } else if (i < spread) {
      k = geometric(i, spread);
    } else {
      k = std::max(1, (1 << std::max(1, top_m - static_cast<int>(i - spread))) - 1);
    }
    SpectralField f = SpectralField::mode(grid, adversarial_mode(grid.dim(), k, static_cast<int>(i)), 0.5);
    if (!single) {
      const int k2 = std::min(extent, 2 * k + 1);
      const double theta = 2.0 * std::numbers::pi * corpus_uniform(spec.seed, spec.power_law_count + a, {0, 0, 0}, 2);
      f += SpectralField::mode(grid, adversarial_mode(grid.dim(), k2, static_cast<int>(i) + 1), std::polar(0.5, theta));
    }
    out.push_back({single ? "single_mode" : "two_mode", 0.0, std::move(f)});
  }
  return out;
}

std::vector<std::pair<SpectralField, SpectralField>> make_pair_corpus(const CorpusSpec& spec) {
  CorpusSpec other = spec;
  other.seed = spec.seed + 1;
  auto first = make_corpus(spec);
  auto second = make_corpus(other);
  std::vector<std::pair<SpectralField, SpectralField>> out;
  out.reserve(first.size());
  for (std::size_t k = 0; k < first.size(); ++k) out.emplace_back(std::move(first[k].field), std::move(second[k].field));
  return out;
}

SpectralField power_law_field(const TorusGrid& grid, double sigma, double amplitude, bool include_mean) {
  SpectralField f(grid);
  const ModeTable& modes = grid.modes();
  auto c = f.mutable_coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!modes.active[i]) continue;
    if (modes.norm[i] == 0.0 && !include_mean) continue;
    c[i] = amplitude * std::pow(1.0 + modes.norm_squared[i], -0.5 * sigma);
  }
  return f;
}

std::vector<CorpusEntry> scaled(std::vector<CorpusEntry> corpus, double scale) {
  for (auto& e : corpus) e.field *= scale;
  return corpus;
}

}  // namespace wavelab
