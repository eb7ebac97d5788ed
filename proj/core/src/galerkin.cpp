#include "wavelab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "wavelab/error.hpp"
#include "wavelab/linear_waves.hpp"
#include "wavelab/parallel.hpp"

namespace wavelab {

namespace {

double potential_of_samples(const std::vector<double>& s, const TorusGrid& grid, double p) {
  double sum = 0.0;
  for (double x : s) sum += std::pow(std::abs(x), p + 1.0);
  return sum * grid.cell_volume() / (p + 1.0);
}

double l2_distance(const SpectralField& a, const SpectralField& b) { return std::sqrt(l2_norm_squared(a - b)); }

}  // namespace

void GalerkinConfig::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("galerkin: p must be a finite real > 1");
  if (cutoff_j < 0) throw InvalidArgument("galerkin: cutoff_j must be >= 0");
  if (cutoff_j > 28 || (2 << cutoff_j) > grid.modes_per_axis() / 2) {
    throw InvalidArgument("galerkin: 2^(cutoff_j+1) = " + std::to_string(2 << std::min(cutoff_j, 28)) +
                          " exceeds N/2 = " + std::to_string(grid.modes_per_axis() / 2));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("galerkin: dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("galerkin: T must be positive");
  if (dt > T) throw InvalidArgument("galerkin: dt exceeds the horizon T");
  if (!(blowup_guard > 0.0)) throw InvalidArgument("galerkin: blowup_guard must be positive");
  if (snapshot_stride < 0) throw InvalidArgument("galerkin: snapshot_stride must be >= 0");
}

int GalerkinConfig::alpha_p() const { return static_cast<int>(std::ceil((p - 3.0) / 2.0)); }

int GalerkinConfig::step_count() const { return static_cast<int>(std::ceil(T / dt - 1e-9)); }

std::string to_string(EnergyLabel label) { return label == EnergyLabel::E_reg ? "E_reg" : "E_n"; }

double EnergyTrace::sup_total() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, total(i));
  return m;
}

double EnergyTrace::relative_drift() const {
  if (size() == 0) return 0.0;
  const double e0 = total(0);
  if (e0 == 0.0) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(total(i) - e0));
  return m / e0;
}

EnergyParts energy_parts(const SpectralField& u, const SpectralField& ut, double p) {
  EnergyParts e;
  e.kinetic = 0.5 * l2_norm_squared(ut);
  e.gradient = 0.5 * gradient_norm_squared(u);
  e.potential = u.is_zero() ? 0.0 : potential_of_samples(synthesize(u), u.grid(), p);
  return e;
}

double energy_reg(const SpectralField& u, const SpectralField& ut, double p) { return energy_parts(u, ut, p).total(); }

double energy_nonlinear(const GalerkinState& state, double p) { return energy_reg(state.v, state.w, p); }

SplittingIntegrator::SplittingIntegrator(const GalerkinConfig& config, std::optional<WavePair> forcing)
    : config_(config), cache_force_(config.grid) {
  config_.validate();
  weights_ = cutoff_weights(config_.grid, config_.cutoff_j, config_.phi);
  const ModeTable& modes = config_.grid.modes();
  omega_.resize(weights_.size());
  for (std::size_t i = 0; i < omega_.size(); ++i) omega_[i] = modes.norm[i] * std::sqrt(weights_[i]);
  if (forcing) {
    if (!forcing->u0.grid().same_modes(config_.grid) || !forcing->u1.grid().same_modes(config_.grid)) {
      throw InvalidArgument("galerkin: forcing pair does not match the solver grid");
    }
    forcing_ = WavePair{apply_weights(forcing->u0, weights_), apply_weights(forcing->u1, weights_)};
  }
}

SpectralField SplittingIntegrator::forcing_at(double t) const {
  if (!forcing_) return SpectralField(config_.grid);
  return evolve_linear(*forcing_, t);
}

SpectralField SplittingIntegrator::force(const SpectralField& v, double t) {
  const auto vc = v.coefficients();
  if (cache_valid_ && cache_t_ == t && std::equal(vc.begin(), vc.end(), cache_v_.begin(), cache_v_.end())) {
    return cache_force_;
  }
  SpectralField f(config_.grid);
  if (config_.nonlinearity) {
    const SpectralField u = forcing_ ? forcing_at(t) + v : v;
    if (!u.is_zero()) f = apply_weights(pointwise_power(u, config_.p), weights_);
  }
  cache_valid_ = true;
  cache_t_ = t;
  cache_v_.assign(vc.begin(), vc.end());
  cache_force_ = f;
  return f;
}

bool SplittingIntegrator::shadow_matches(const GalerkinState& state) const {
  if (!shadow_valid_ || shadow_t_ != state.t) return false;
  const auto v = state.v.coefficients();
  const auto w = state.w.coefficients();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (Complex(static_cast<double>(hv_[i].real()), static_cast<double>(hv_[i].imag())) != v[i]) return false;
    if (Complex(static_cast<double>(hw_[i].real()), static_cast<double>(hw_[i].imag())) != w[i]) return false;
  }
  return true;
}

void SplittingIntegrator::load(const GalerkinState& state) {
  if (shadow_matches(state)) return;
  const auto v = state.v.coefficients();
  const auto w = state.w.coefficients();
  hv_.assign(v.begin(), v.end());
  hw_.assign(w.begin(), w.end());
  shadow_t_ = state.t;
  shadow_valid_ = true;
}

void SplittingIntegrator::store(GalerkinState& state) const {
  auto v = state.v.mutable_coefficients();
  auto w = state.w.mutable_coefficients();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = Complex(static_cast<double>(hv_[i].real()), static_cast<double>(hv_[i].imag()));
    w[i] = Complex(static_cast<double>(hw_[i].real()), static_cast<double>(hw_[i].imag()));
  }
}

void SplittingIntegrator::kick(const SpectralField& f, double h) {
  const auto fc = f.coefficients();
  const long double hl = h;
  for (std::size_t i = 0; i < hw_.size(); ++i) {
    if (fc[i] != Complex{}) hw_[i] -= hl * Extended(fc[i].real(), fc[i].imag());
  }
}

void SplittingIntegrator::drift(double h) {
  if (shear_a_.empty() || cached_h_ != h) {
    const long double pi = 3.141592653589793238462643383279502884L;
    shear_a_.resize(omega_.size());
    shear_b_.resize(omega_.size());
    flip_.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
      const long double om = omega_[i];
      if (om == 0.0L) {
        shear_a_[i] = 0.5L * h;
        shear_b_[i] = 0.0L;
        flip_[i] = 0;
        continue;
      }
      // Reduce the angle to [-pi/2, pi/2]; the remainder is an exact sign flip.
      long double theta = std::remainder(om * static_cast<long double>(h), 2.0L * pi);
      flip_[i] = std::fabs(theta) > 0.5L * pi;
      if (flip_[i]) theta -= std::copysign(pi, theta);
      shear_a_[i] = std::tan(0.5L * theta) / om;
      shear_b_[i] = -std::sin(theta) * om;
    }
    cached_h_ = h;
  }
  for (std::size_t i = 0; i < hv_.size(); ++i) {
    if (weights_[i] == 0.0) {
      hv_[i] = 0.0L;
      hw_[i] = 0.0L;
      continue;
    }
    Extended v = hv_[i];
    Extended w = hw_[i];
    v += shear_a_[i] * w;
    w += shear_b_[i] * v;
    v += shear_a_[i] * w;
    if (flip_[i]) {
      v = -v;
      w = -w;
    }
    hv_[i] = v;
    hw_[i] = w;
  }
}

void SplittingIntegrator::step(GalerkinState& state, double dt) {
  load(state);
  const double t0 = state.t;
  kick(force(state.v, t0), 0.5 * dt);
  drift(dt);
  state.t = t0 + dt;
  store(state);
  kick(force(state.v, state.t), 0.5 * dt);
  store(state);
  shadow_t_ = state.t;
}

EnergyParts SplittingIntegrator::energy(const GalerkinState& state, double* linf_u) const {
  EnergyParts e;
  if (shadow_matches(state)) {
    const ModeTable& modes = config_.grid.modes();
    long double kin = 0.0L;
    long double grad = 0.0L;
    for (std::size_t i = 0; i < hv_.size(); ++i) {
      kin += std::norm(hw_[i]);
      grad += static_cast<long double>(modes.norm_squared[i]) * std::norm(hv_[i]);
    }
    const double vol = config_.grid.volume();
    e.kinetic = static_cast<double>(0.5L * vol * kin);
    e.gradient = static_cast<double>(0.5L * vol * grad);
  } else {
    e.kinetic = 0.5 * l2_norm_squared(state.w);
    e.gradient = 0.5 * gradient_norm_squared(state.v);
  }
  const std::vector<double> vs = synthesize(state.v);
  // The linear test hook conserves kinetic + gradient only.
  e.potential = config_.nonlinearity ? potential_of_samples(vs, config_.grid, config_.p) : 0.0;
  if (linf_u) {
    double m = 0.0;
    if (forcing_) {
      const std::vector<double> us = synthesize(forcing_at(state.t) + state.v);
      for (double x : us) m = std::max(m, std::abs(x));
    } else {
      for (double x : vs) m = std::max(m, std::abs(x));
    }
    *linf_u = m;
  }
  return e;
}

namespace {

void record(EnergyTrace& trace, const SplittingIntegrator& integ, const GalerkinState& s) {
  double linf = 0.0;
  const EnergyParts e = integ.energy(s, &linf);
  trace.times.push_back(s.t);
  trace.kinetic.push_back(e.kinetic);
  trace.gradient.push_back(e.gradient);
  trace.potential.push_back(e.potential);
  trace.l2_v.push_back(std::sqrt(l2_norm_squared(s.v)));
  trace.linf_u.push_back(linf);
}

SolveResult integrate(const GalerkinConfig& config, SplittingIntegrator& integ, GalerkinState state,
                      EnergyLabel label, double reference_energy) {
  SolveResult result{{}, {}, state, SolveStatus::completed, {}};
  result.trace.label = label;
  result.snapshots.push_back(state);
  record(result.trace, integ, state);

  const int steps = config.step_count();
  for (int k = 1; k <= steps; ++k) {
    const double h = (k == steps) ? config.T - state.t : config.dt;
    GalerkinState next = state;
    try {
      integ.step(next, h);
    } catch (const NumericalError& e) {
      result.status = SolveStatus::blowup;
      result.diagnostic = "non-finite nonlinearity at t = " + std::to_string(next.t) + ": " + e.what();
      break;
    }
    double linf = 0.0;
    const EnergyParts e = integ.energy(next, &linf);
    const double previous = result.trace.total(result.trace.size() - 1);
    const double jump = std::abs(e.total() - previous);
    if (!std::isfinite(e.total()) || jump > config.blowup_guard * std::max(previous, reference_energy)) {
      result.status = SolveStatus::blowup;
      char buf[160];
      std::snprintf(buf, sizeof buf, "blowup guard tripped at t = %.6g: energy jump %.6g from %.6g", next.t, jump,
                    previous);
      result.diagnostic = std::string(buf) + " (dt too large or genuine instability)";
      break;
    }
    state = std::move(next);
    result.trace.times.push_back(state.t);
    result.trace.kinetic.push_back(e.kinetic);
    result.trace.gradient.push_back(e.gradient);
    result.trace.potential.push_back(e.potential);
    result.trace.l2_v.push_back(std::sqrt(l2_norm_squared(state.v)));
    result.trace.linf_u.push_back(linf);
    if (config.snapshot_stride > 0 && k % config.snapshot_stride == 0) result.snapshots.push_back(state);
  }
  if (result.snapshots.empty() || result.snapshots.back().t != state.t) result.snapshots.push_back(state);
  result.final_state = state;
  return result;
}

}  // namespace

SolveResult solve_regularized_direct(const GalerkinConfig& config, const WavePair& initial) {
  config.validate();
  if (!initial.u0.grid().same_modes(config.grid) || !initial.u1.grid().same_modes(config.grid)) {
    throw InvalidArgument("solve_regularized_direct: initial pair does not match the solver grid");
  }
  SplittingIntegrator integ(config);
  GalerkinState s{apply_weights(initial.u0, integ.cutoff()), apply_weights(initial.u1, integ.cutoff()), 0.0};
  const double e_ref = energy_reg(s.v, s.w, config.p);
  return integrate(config, integ, std::move(s), EnergyLabel::E_reg, e_ref);
}

SolveResult solve_remainder(const GalerkinConfig& config, const WavePair& randomized) {
  config.validate();
  SplittingIntegrator integ(config, randomized);
  const double e_ref =
      energy_reg(project_P(randomized.u0, config.cutoff_j, config.phi), project_P(randomized.u1, config.cutoff_j, config.phi), config.p);
  GalerkinState s{SpectralField(config.grid), SpectralField(config.grid), 0.0};
  return integrate(config, integ, std::move(s), EnergyLabel::E_n, e_ref);
}

SolveResult solve_remainder(const GalerkinConfig& config, const RandomizationSpec& spec, std::uint64_t sample_index) {
  return solve_remainder(config, sample_randomized_pair(spec, sample_index));
}

CauchyReport cauchy_diagnostic(const GalerkinConfig& config_template, const WavePair& randomized,
                               const std::vector<int>& cutoffs) {
  if (cutoffs.empty()) throw InvalidArgument("cauchy_diagnostic: empty cutoff list");
  GalerkinConfig base = config_template;
  if (base.snapshot_stride == 0) base.snapshot_stride = 1;
  for (int j : cutoffs) {
    GalerkinConfig c = base;
    c.cutoff_j = j;
    c.validate();
  }
  std::vector<std::optional<SolveResult>> slots(cutoffs.size());
  parallel_for(cutoffs.size(), [&](std::size_t a) {
    GalerkinConfig c = base;
    c.cutoff_j = cutoffs[a];
    slots[a] = solve_remainder(c, randomized);
  });
  std::vector<SolveResult> runs;
  for (auto& s : slots) runs.push_back(std::move(*s));

  CauchyReport report;
  report.cutoffs = cutoffs;
  report.snapshot_spacing = base.dt * base.snapshot_stride;
  const std::size_t m = cutoffs.size();
  report.gaps.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    report.status.push_back(runs[a].status);
    double modulus = 0.0;
    const auto& snaps = runs[a].snapshots;
    for (std::size_t k = 1; k < snaps.size(); ++k) modulus = std::max(modulus, l2_distance(snaps[k].v, snaps[k - 1].v));
    report.time_modulus.push_back(modulus);
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto& other = runs[b].snapshots;
      const std::size_t count = std::min(snaps.size(), other.size());
      double gap = 0.0;
      for (std::size_t k = 0; k < count; ++k) gap = std::max(gap, l2_distance(snaps[k].v, other[k].v));
      report.gaps[a][b] = report.gaps[b][a] = gap;
    }
  }
  return report;
}

void write_trajectory_csv(std::ostream& out, const EnergyTrace& trace) {
  const auto old_precision = out.precision(17);
  out << "t,E_kinetic,E_gradient,E_potential,E_total,l2_v,linf_u\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.times[i] << ',' << trace.kinetic[i] << ',' << trace.gradient[i] << ',' << trace.potential[i] << ','
        << trace.total(i) << ',' << trace.l2_v[i] << ',' << trace.linf_u[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace wavelab
