#include "wavelab/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "json.hpp"
#include "wavelab/error.hpp"
#include "wavelab/linear_waves.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/philox.hpp"

namespace wavelab {

double gaussian_moment_norm(double q) {
  if (!(q >= 1.0)) throw InvalidArgument("gaussian_moment_norm: q must be >= 1");
  return std::numbers::sqrt2 * std::exp((std::lgamma(0.5 * (q + 1.0)) - 0.5 * std::log(std::numbers::pi)) / q);
}

KpzReport kpz_check(const std::vector<double>& a, const CoefficientDistribution& dist, const std::vector<double>& q_list,
                    std::size_t samples, std::uint64_t seed, int bootstrap_replicates) {
  if (samples < 10000) throw InvalidArgument("kpz_check: at least 10^4 samples required");
  if (a.empty()) throw InvalidArgument("kpz_check: empty coefficient sequence");
  for (double q : q_list) {
    if (!(q >= 1.0) || std::isinf(q)) throw InvalidArgument("kpz_check: every q must lie in [1, inf)");
  }
  double l2 = 0.0;
  for (double x : a) l2 += x * x;
  l2 = std::sqrt(l2);
  if (!(l2 > 0.0) || !std::isfinite(l2)) throw InvalidArgument("kpz_check: coefficient sequence must be nonzero and finite");

  const double scale = 1.0 / std::sqrt(dist.variance());
  const std::uint32_t tag = static_cast<std::uint32_t>(StreamTag::kpz);
  std::vector<double> sums(samples);
  parallel_for(samples, [&](std::size_t m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); k += 2) {
      const auto x = draw_base_pair(dist, seed, m, static_cast<std::uint32_t>(k / 2), tag);
      acc += a[k] * x[0] * scale;
      if (k + 1 < a.size()) acc += a[k + 1] * x[1] * scale;
    }
    sums[m] = std::abs(acc) / l2;  // normalized so that the ratio is ||S||_q / sqrt(q)
  });

  KpzReport report{dist, samples, l2, {}, 0.0};
  const double n = static_cast<double>(samples);
  std::vector<std::vector<double>> powers(q_list.size(), std::vector<double>(samples));
  for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
    const double q = q_list[iq];
    double mean = 0.0;
    for (std::size_t m = 0; m < samples; ++m) mean += (powers[iq][m] = std::pow(sums[m], q));
    mean /= n;
    double var = 0.0;
    for (double v : powers[iq]) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    KpzRow row;
    row.q = q;
    row.ratio = std::pow(mean, 1.0 / q) / std::sqrt(q);
    // d/dm m^{1/q} = m^{1/q - 1} / q.
    row.std_error = std::pow(mean, 1.0 / q - 1.0) / q * std::sqrt(var / n) / std::sqrt(q);
    report.rows.push_back(row);
    report.max_ratio = std::max(report.max_ratio, row.ratio);
  }

  if (bootstrap_replicates > 0) {
    std::vector<std::vector<double>> reps(q_list.size(), std::vector<double>(bootstrap_replicates));
    const auto key = Philox4x32::key_from_seed(seed ^ 0xb0075742ull);
    parallel_for(static_cast<std::size_t>(bootstrap_replicates), [&](std::size_t b) {
      std::vector<double> acc(q_list.size(), 0.0);
      for (std::size_t m = 0; m < samples; m += 4) {
        const auto words = Philox4x32::generate({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(m), 0, 0}, key);
        for (std::size_t w = 0; w < 4 && m + w < samples; ++w) {
          const std::size_t idx = static_cast<std::size_t>((static_cast<std::uint64_t>(words[w]) * samples) >> 32);
          for (std::size_t iq = 0; iq < q_list.size(); ++iq) acc[iq] += powers[iq][idx];
        }
      }
      for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
        reps[iq][b] = std::pow(acc[iq] / n, 1.0 / q_list[iq]) / std::sqrt(q_list[iq]);
      }
    });
    for (std::size_t iq = 0; iq < q_list.size(); ++iq) {
      report.rows[iq].ci_low = empirical_quantile(reps[iq], 0.025);
      report.rows[iq].ci_high = empirical_quantile(reps[iq], 0.975);
    }
  }
  return report;
}

double space_time_besov_norm(const WavePair& pair, const TailConfig& config) {
  const NormSpec spec = NormSpec::besov(config.s, config.q2, config.r);
  std::vector<double> weights;
  if (config.cutoff_j >= 0) weights = cutoff_weights(pair.u0.grid(), config.cutoff_j);
  auto spatial = [&](double t) {
    SpectralField z = config.op == TailOperator::z ? evolve_linear(pair, t) : evolve_tilde(pair, t);
    if (!weights.empty()) z = apply_weights(z, weights);
    return besov_norm(z, spec);
  };
  return time_lebesgue_norm(spatial, config.T, config.q1, config.time_nodes);
}

TailEstimate tail_from_norms(std::vector<double> norms, std::vector<double> grid, int lambda_points, bool require_fit) {
  if (norms.empty()) throw InvalidArgument("tail: no samples");
  TailEstimate tail;
  tail.samples = norms.size();
  if (grid.empty()) {
    if (lambda_points < 2) throw InvalidArgument("tail: at least two lambda points required");
    const double top = *std::max_element(norms.begin(), norms.end());
    grid.resize(lambda_points);
    for (int k = 0; k < lambda_points; ++k) grid[k] = top * k / (lambda_points - 1);
  }
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidArgument("tail: lambda grid must be ascending");
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double z = 1.96;
  for (double lambda : grid) {
    const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lambda));
    const double s = above / n;
    const double centre = (s + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z * std::sqrt(s * (1 - s) / n + z * z / (4 * n * n)) / (1 + z * z / n);
    tail.hits.push_back(above);
    tail.survival.push_back(s);
    // The Wilson interval contains s; clamp so rounding at s = 0 or 1 keeps it so.
    tail.ci_low.push_back(std::max(0.0, std::min(s, centre - half)));
    tail.ci_high.push_back(std::min(1.0, std::max(s, centre + half)));
  }
  tail.lambda_grid = std::move(grid);
  tail.norms = std::move(norms);

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < tail.lambda_grid.size(); ++k) {
    if (tail.lambda_grid[k] > 0.0 && tail.hits[k] >= 10) candidates.push_back(k);
  }
  const std::size_t window = std::max<std::size_t>(5, (candidates.size() + 4) / 5);
  if (candidates.size() < window) {
    tail.fit_message = "degenerate fit window: " + std::to_string(candidates.size()) +
                       " lambda points with >= 10 exceedances, need 5";
    if (require_fit) throw InvalidArgument("strichartz_tail: " + tail.fit_message);
    return tail;
  }
  tail.fit_begin = candidates[candidates.size() - window];
  tail.fit_end = candidates.back() + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(window);
  for (std::size_t c = candidates.size() - window; c < candidates.size(); ++c) {
    const std::size_t k = candidates[c];
    const double x = tail.lambda_grid[k] * tail.lambda_grid[k];
    const double y = -std::log(tail.survival[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  if (!(vx > 0.0)) {
    tail.fit_message = "degenerate fit window: lambda values coincide";
    if (require_fit) throw InvalidArgument("strichartz_tail: " + tail.fit_message);
    return tail;
  }
  tail.fitted_c = cxy / vx;
  tail.intercept = (sy - tail.fitted_c * sx) / m;
  tail.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  tail.fit_ok = true;
  return tail;
}

TailEstimate strichartz_tail(const RandomizationSpec& spec, const TailConfig& config) {
  if (config.time_nodes < 64) throw InvalidArgument("strichartz_tail: at least 64 time nodes required");
  if (!(config.T > 0.0)) throw InvalidArgument("strichartz_tail: T must be positive");
  if (config.samples == 0) throw InvalidArgument("strichartz_tail: no samples requested");
  std::vector<double> norms(config.samples);
  parallel_for(config.samples, [&](std::size_t m) {
    norms[m] = space_time_besov_norm(sample_randomized_pair(spec, m), config);
  });
  return tail_from_norms(std::move(norms), config.lambda_grid, config.lambda_points, config.require_fit);
}

void write_tail_csv(std::ostream& out, const TailEstimate& tail) {
  const auto old = out.precision(17);
  out << "lambda,survival,ci_low,ci_high\n";
  for (std::size_t k = 0; k < tail.lambda_grid.size(); ++k) {
    out << tail.lambda_grid[k] << ',' << tail.survival[k] << ',' << tail.ci_low[k] << ',' << tail.ci_high[k] << '\n';
  }
  out << "# fit,ok=" << (tail.fit_ok ? 1 : 0) << ",fitted_c=" << tail.fitted_c << ",intercept=" << tail.intercept
      << ",r_squared=" << tail.r_squared << ",window=" << tail.fit_begin << '-' << tail.fit_end << ",M=" << tail.samples
      << '\n';
  out.precision(old);
}

double empirical_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw InvalidArgument("empirical_quantile: no values");
  if (!(level >= 0.0 && level <= 1.0)) throw InvalidArgument("empirical_quantile: level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto k = static_cast<std::size_t>(std::ceil(level * values.size()));
  return values[std::clamp<std::size_t>(k, 1, values.size()) - 1];
}

AprioriReport apriori_bound_report(const std::vector<std::vector<EnergyTrace>>& traces, const std::vector<int>& cutoffs,
                                   double T, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("apriori_bound_report: eta must lie in (0, 1)");
  if (traces.empty()) throw InvalidArgument("apriori_bound_report: empty ensemble");
  AprioriReport r;
  r.cutoffs = cutoffs;
  r.eta = eta;
  r.T = T;
  for (const auto& per_sample : traces) {
    if (per_sample.size() != cutoffs.size()) throw InvalidArgument("apriori_bound_report: trace count != cutoff count");
    std::vector<double> sups;
    for (const auto& tr : per_sample) sups.push_back(tr.sup_total());
    r.per_sample_sup.push_back(*std::max_element(sups.begin(), sups.end()));
    r.sup_energy.push_back(std::move(sups));
  }
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    std::vector<double> column;
    for (const auto& row : r.sup_energy) column.push_back(row[k]);
    r.per_cutoff_quantile.push_back(empirical_quantile(std::move(column), 1.0 - eta));
  }
  r.quantile = empirical_quantile(r.per_sample_sup, 1.0 - eta);
  return r;
}

std::string apriori_report_to_json(const AprioriReport& r) {
  nlohmann::ordered_json j;
  j["name"] = "apriori_bound";
  j["T"] = r.T;
  j["eta"] = r.eta;
  j["cutoffs"] = r.cutoffs;
  j["quantile"] = r.quantile;
  j["per_cutoff_quantile"] = r.per_cutoff_quantile;
  j["per_sample_sup"] = r.per_sample_sup;
  j["sup_energy"] = r.sup_energy;
  return j.dump(2);
}

EnsembleRun run_remainder_ensemble(const GalerkinConfig& config, const RandomizationSpec& spec, std::uint64_t first,
                                   std::size_t count, const std::vector<int>& cutoffs) {
  if (cutoffs.empty()) throw InvalidArgument("ensemble: empty cutoff list");
  for (int j : cutoffs) {
    GalerkinConfig c = config;
    c.cutoff_j = j;
    c.validate();
  }
  std::vector<std::optional<SolveResult>> slots(count * cutoffs.size());
  parallel_for(slots.size(), [&](std::size_t task) {
    GalerkinConfig c = config;
    c.cutoff_j = cutoffs[task % cutoffs.size()];
    slots[task] = solve_remainder(c, sample_randomized_pair(spec, first + task / cutoffs.size()));
  });
  EnsembleRun out;
  out.runs.resize(count);
  for (std::size_t task = 0; task < slots.size(); ++task) {
    out.blowups += slots[task]->status == SolveStatus::blowup ? 1 : 0;
    out.runs[task / cutoffs.size()].push_back(std::move(*slots[task]));
  }
  return out;
}

}  // namespace wavelab
