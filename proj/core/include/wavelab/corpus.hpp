#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavelab/spectral.hpp"

namespace wavelab {

struct CorpusEntry {
  std::string kind;  // "power_law", "single_mode" or "two_mode"
  double sigma = 0.0;
  SpectralField field;
};

// Seeded test corpus: power-law fields c_n = |n|^{-sigma} e^{i theta_n} on
// 1 <= |n|_inf <= extent with sigma uniform in [sigma_min, sigma_max], plus
// single-mode and two-mode adversarial fields. Phases and slopes depend only on
// (seed, entry, n), so a fixed extent yields the same functions on any grid.
struct CorpusSpec {
  TorusGrid grid{1, 256};
  std::size_t power_law_count = 200;
  std::size_t adversarial_count = 20;
  double sigma_min = 0.6;
  double sigma_max = 3.0;
  // 0 selects N/4.
  int extent = 0;
  std::uint64_t seed = 20240601;

  int resolved_extent() const;
};

std::vector<CorpusEntry> make_corpus(const CorpusSpec& spec);

// Independent pairs (f, g) for bilinear checks: entry k of the corpus paired
// with entry k of a corpus drawn from seed + 1.
std::vector<std::pair<SpectralField, SpectralField>> make_pair_corpus(const CorpusSpec& spec);

// Power-law mode profile <n>^{-sigma}, no randomness, on 1 <= |n| and n = 0.
SpectralField power_law_field(const TorusGrid& grid, double sigma, double amplitude = 1.0, bool include_mean = false);

// Every corpus field multiplied by `scale`.
std::vector<CorpusEntry> scaled(std::vector<CorpusEntry> corpus, double scale);

}  // namespace wavelab
