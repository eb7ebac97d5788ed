#include "wavelab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "wavelab/error.hpp"

namespace wavelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::shared_ptr<const ModeTable> build_mode_table(int dim, int modes) {
  auto table = std::make_shared<ModeTable>();
  const std::size_t count = ipow(static_cast<std::size_t>(modes), dim);
  const int half = modes / 2;
  table->wavenumber.resize(count);
  table->norm.resize(count);
  table->norm_squared.resize(count);
  table->mirror.resize(count);
  table->active.resize(count);
  table->canonical.resize(count);

  for (std::size_t i = 0; i < count; ++i) {
    Wavenumber n{0, 0, 0};
    std::size_t rest = i;
    for (int axis = dim - 1; axis >= 0; --axis) {
      n[axis] = static_cast<int>(rest % modes) - half;
      rest /= modes;
    }
    table->wavenumber[i] = n;
    double sq = 0.0;
    bool active = true;
    for (int axis = 0; axis < dim; ++axis) {
      sq += static_cast<double>(n[axis]) * n[axis];
      if (n[axis] == -half) active = false;
    }
    table->norm_squared[i] = sq;
    table->norm[i] = std::sqrt(sq);
    table->active[i] = active ? 1 : 0;
    table->canonical[i] = in_half_space(n, dim) ? 1 : 0;
    if (active) {
      std::size_t m = 0;
      for (int axis = 0; axis < dim; ++axis) m = m * modes + static_cast<std::size_t>(-n[axis] + half);
      table->mirror[i] = static_cast<std::uint32_t>(m);
      table->max_norm = std::max(table->max_norm, table->norm[i]);
    } else {
      table->mirror[i] = ModeTable::kNoMirror;
    }
  }
  return table;
}

std::shared_ptr<const ModeTable> mode_table_for(int dim, int modes) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ModeTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, modes}];
  if (!slot) slot = build_mode_table(dim, modes);
  return slot;
}

// FFTW plans and coefficient-to-half-spectrum offsets for one (dim, N, rho).
struct TransformPlan {
  int dim = 0;
  int samples = 0;
  std::size_t real_count = 0;
  std::size_t half_count = 0;
  // Offset of each retained mode in the r2c half spectrum, or npos when the
  // mode's last component is negative (reached through its mirror).
  std::vector<std::size_t> half_offset;
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r

  TransformPlan() = default;
  TransformPlan(const TransformPlan&) = delete;
  TransformPlan& operator=(const TransformPlan&) = delete;
  ~TransformPlan() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const TransformPlan& transform_plan_for(const TorusGrid& grid) {
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<TransformPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{grid.dim(), grid.modes_per_axis(), grid.oversample_factor()}];
  if (slot) return *slot;

  auto plan = std::make_unique<TransformPlan>();
  const int dim = grid.dim();
  const int m = grid.samples_per_axis();
  plan->dim = dim;
  plan->samples = m;
  plan->real_count = grid.sample_count();
  plan->half_count = ipow(static_cast<std::size_t>(m), dim - 1) * static_cast<std::size_t>(m / 2 + 1);

  const ModeTable& modes = grid.modes();
  plan->half_offset.assign(grid.mode_count(), kNpos);
  for (std::size_t i = 0; i < grid.mode_count(); ++i) {
    const Wavenumber& n = modes.wavenumber[i];
    if (!modes.active[i] || n[dim - 1] < 0) continue;
    std::size_t off = 0;
    for (int axis = 0; axis < dim - 1; ++axis) {
      off = off * m + static_cast<std::size_t>((n[axis] % m + m) % m);
    }
    off = off * static_cast<std::size_t>(m / 2 + 1) + static_cast<std::size_t>(n[dim - 1]);
    plan->half_offset[i] = off;
  }

  std::array<int, 3> dims{m, m, m};
  double* real = fftw_alloc_real(plan->real_count);
  fftw_complex* cplx = fftw_alloc_complex(plan->half_count);
  {
    std::lock_guard planner_lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan->forward = fftw_plan_dft_r2c(dim, dims.data(), real, cplx, flags);
    plan->backward = fftw_plan_dft_c2r(dim, dims.data(), cplx, real, flags);
  }
  fftw_free(real);
  fftw_free(cplx);
  if (!plan->forward || !plan->backward) throw Error("FFTW plan creation failed");
  slot = std::move(plan);
  return *slot;
}

void require_same_modes(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

}  // namespace

bool in_half_space(const Wavenumber& n, int dim) noexcept {
  for (int axis = dim - 1; axis >= 0; --axis) {
    if (n[axis] != 0) return n[axis] > 0;
  }
  return false;
}

// ---------------------------------------------------------------- TorusGrid

TorusGrid::TorusGrid(int dim, int modes_per_axis, int oversample_factor)
    : dim_(dim), modes_(modes_per_axis), oversample_(oversample_factor) {
  if (dim < 1 || dim > 3) throw InvalidArgument("TorusGrid: dim must be 1, 2 or 3");
  if (modes_per_axis < 2 || modes_per_axis % 2 != 0) {
    throw InvalidArgument("TorusGrid: modes_per_axis must be a positive even integer");
  }
  if (oversample_factor < 2) throw InvalidArgument("TorusGrid: oversample factor must be >= 2");
  mode_count_ = ipow(static_cast<std::size_t>(modes_), dim_);
  sample_count_ = ipow(static_cast<std::size_t>(modes_) * oversample_, dim_);
  table_ = mode_table_for(dim_, modes_);
}

double TorusGrid::volume() const noexcept { return std::pow(kTwoPi, dim_); }

double TorusGrid::cell_volume() const noexcept {
  return std::pow(kTwoPi / samples_per_axis(), dim_);
}

bool TorusGrid::in_cube(const Wavenumber& n) const noexcept {
  const int half = modes_ / 2;
  for (int axis = 0; axis < 3; ++axis) {
    if (axis < dim_) {
      if (n[axis] < -half || n[axis] >= half) return false;
    } else if (n[axis] != 0) {
      return false;
    }
  }
  return true;
}

std::size_t TorusGrid::linear_index(const Wavenumber& n) const {
  if (!in_cube(n)) throw InvalidArgument("wavenumber outside the retained cube");
  const int half = modes_ / 2;
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) idx = idx * modes_ + static_cast<std::size_t>(n[axis] + half);
  return idx;
}

// ---------------------------------------------------------------- SpectralField

SpectralField::SpectralField(TorusGrid grid) : grid_(std::move(grid)), coeffs_(grid_.mode_count()) {}

SpectralField SpectralField::from_coefficients(TorusGrid grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != grid.mode_count()) {
    throw InvalidArgument("SpectralField: coefficient count does not match grid");
  }
  SpectralField f(std::move(grid));
  f.coeffs_ = std::move(coeffs);
  const double scale = std::max(f.max_abs_coefficient(), std::numeric_limits<double>::min());
  const double defect = f.hermitian_defect();
  if (!(defect <= 1e-12 * scale)) {
    throw InvalidArgument("SpectralField: coefficients are not Hermitian-symmetric (defect " +
                          std::to_string(defect) + ")");
  }
  const ModeTable& modes = f.grid_.modes();
  for (std::size_t i = 0; i < f.coeffs_.size(); ++i) {
    if (!modes.active[i]) {
      f.coeffs_[i] = 0.0;
    } else if (modes.mirror[i] == i) {
      f.coeffs_[i] = f.coeffs_[i].real();
    } else if (modes.canonical[i]) {
      f.coeffs_[modes.mirror[i]] = std::conj(f.coeffs_[i]);
    }
  }
  return f;
}

SpectralField SpectralField::mode(TorusGrid grid, const Wavenumber& n, Complex amplitude) {
  SpectralField f(std::move(grid));
  f.set_mode(n, amplitude);
  return f;
}

SpectralField SpectralField::constant(TorusGrid grid, double value) {
  return mode(std::move(grid), Wavenumber{0, 0, 0}, value);
}

Complex SpectralField::coefficient(const Wavenumber& n) const {
  if (!grid_.in_cube(n)) return 0.0;
  return coeffs_[grid_.linear_index(n)];
}

void SpectralField::set_mode(const Wavenumber& n, Complex value) {
  const std::size_t i = grid_.linear_index(n);
  const ModeTable& modes = grid_.modes();
  if (!modes.active[i]) throw InvalidArgument("set_mode: wavenumber on a Nyquist face has no conjugate partner");
  const std::size_t j = modes.mirror[i];
  if (i == j) {
    coeffs_[i] = value.real();
  } else {
    coeffs_[i] = value;
    coeffs_[j] = std::conj(value);
  }
}

double SpectralField::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double SpectralField::hermitian_defect() const noexcept {
  const ModeTable& modes = grid_.modes();
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!modes.active[i]) {
      worst = std::max(worst, std::abs(coeffs_[i]));
      continue;
    }
    worst = std::max(worst, std::abs(coeffs_[modes.mirror[i]] - std::conj(coeffs_[i])));
  }
  return worst;
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex{}; });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_modes(grid_, other.grid_, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_modes(grid_, other.grid_, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) noexcept {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

WavePair zero_pair(const TorusGrid& grid) { return WavePair{SpectralField(grid), SpectralField(grid)}; }

// ---------------------------------------------------------------- transforms

std::vector<double> synthesize(const SpectralField& field) {
  const TorusGrid& grid = field.grid();
  const TransformPlan& plan = transform_plan_for(grid);
  std::vector<Complex> half(plan.half_count);
  const auto coeffs = field.coefficients();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (plan.half_offset[i] != kNpos) half[plan.half_offset[i]] = coeffs[i];
  }
  std::vector<double> samples(plan.real_count);
  fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(half.data()), samples.data());
  return samples;
}

SpectralField analyze(std::span<const double> samples, const TorusGrid& grid) {
  const TransformPlan& plan = transform_plan_for(grid);
  if (samples.size() != plan.real_count) {
    throw InvalidArgument("analyze: sample count " + std::to_string(samples.size()) +
                          " does not match grid (" + std::to_string(plan.real_count) + ")");
  }
  std::vector<Complex> half(plan.half_count);
  // r2c with FFTW_ESTIMATE preserves its input.
  fftw_execute_dft_r2c(plan.forward, const_cast<double*>(samples.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / static_cast<double>(plan.real_count);
  SpectralField out(grid);
  auto coeffs = out.mutable_coefficients();
  const ModeTable& modes = grid.modes();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!modes.active[i]) continue;
    if (modes.mirror[i] == i) {
      coeffs[i] = half[plan.half_offset[i]].real() * scale;
    } else if (modes.canonical[i]) {
      const Complex c = half[plan.half_offset[i]] * scale;
      coeffs[i] = c;
      coeffs[modes.mirror[i]] = std::conj(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------- multipliers

MultiplierSymbol MultiplierSymbol::operator*(const MultiplierSymbol& other) const {
  return MultiplierSymbol{
      [a = evaluate, b = other.evaluate](const Wavenumber& n, double r) { return a(n, r) * b(n, r); },
      label + "*" + other.label};
}

namespace symbols {

MultiplierSymbol identity() {
  return {[](const Wavenumber&, double) { return Complex{1.0}; }, "id"};
}

MultiplierSymbol abs_gradient(double power) {
  return {[power](const Wavenumber&, double r) -> Complex {
            if (r == 0.0) {
              if (power > 0.0) return 0.0;
              if (power == 0.0) return 1.0;
              return std::numeric_limits<double>::quiet_NaN();
            }
            return std::pow(r, power);
          },
          "|D|^" + std::to_string(power)};
}

MultiplierSymbol bracket(double power) {
  return {[power](const Wavenumber&, double r) -> Complex { return std::pow(1.0 + r * r, 0.5 * power); },
          "<D>^" + std::to_string(power)};
}

MultiplierSymbol laplacian() {
  return {[](const Wavenumber&, double r) -> Complex { return -r * r; }, "Laplacian"};
}

MultiplierSymbol wave_cos(double t) {
  return {[t](const Wavenumber&, double r) -> Complex { return std::cos(t * r); },
          "cos(t|D|)"};
}

MultiplierSymbol wave_sinc(double t) {
  return {[t](const Wavenumber&, double r) -> Complex {
            if (r == 0.0) return t;
            return std::sin(t * r) / r;
          },
          "sin(t|D|)/|D|"};
}

MultiplierSymbol sharp_ball(double radius) {
  return {[radius](const Wavenumber&, double r) -> Complex { return r <= radius ? 1.0 : 0.0; },
          "1{|D|<=R}"};
}

}  // namespace symbols

SpectralField apply_multiplier(const SpectralField& field, const MultiplierSymbol& symbol) {
  const TorusGrid& grid = field.grid();
  const ModeTable& modes = grid.modes();
  const auto in = field.coefficients();
  std::vector<Complex> values(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!modes.active[i]) continue;
    const Complex m = symbol.evaluate(modes.wavenumber[i], modes.norm[i]);
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
      throw InvalidArgument("apply_multiplier: symbol '" + symbol.label + "' is singular at a retained mode");
    }
    values[i] = m;
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!modes.active[i]) continue;
    const Complex mirrored = std::conj(values[modes.mirror[i]]);
    if (std::abs(values[i] - mirrored) > 1e-14 * std::max(1.0, std::abs(values[i]))) {
      throw InvalidArgument("apply_multiplier: symbol '" + symbol.label + "' does not preserve real fields");
    }
  }
  SpectralField out(grid);
  auto coeffs = out.mutable_coefficients();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!modes.active[i]) continue;
    if (modes.mirror[i] == i) {
      coeffs[i] = (in[i] * values[i]).real();
    } else if (modes.canonical[i]) {
      const Complex c = in[i] * values[i];
      coeffs[i] = c;
      coeffs[modes.mirror[i]] = std::conj(c);
    }
  }
  return out;
}

SpectralField apply_weights(const SpectralField& field, std::span<const double> weights) {
  if (weights.size() != field.grid().mode_count()) throw InvalidArgument("apply_weights: size mismatch");
  SpectralField out = field;
  auto coeffs = out.mutable_coefficients();
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= weights[i];
  return out;
}

// ---------------------------------------------------------------- nonlinear maps

SpectralField pointwise_map(const SpectralField& field, const std::function<double(double)>& fn) {
  std::vector<double> samples = synthesize(field);
  for (double& s : samples) {
    s = fn(s);
    if (!std::isfinite(s)) throw NumericalError("pointwise map produced a non-finite sample");
  }
  return analyze(samples, field.grid());
}

SpectralField pointwise_power(const SpectralField& field, double p) {
  if (!(p > 1.0)) throw InvalidArgument("pointwise_power: exponent must exceed 1");
  std::vector<double> samples = synthesize(field);
  for (double& s : samples) {
    if (!std::isfinite(s)) throw NumericalError("pointwise_power: non-finite sample (prior blow-up)");
    s = std::pow(std::abs(s), p - 1.0) * s;
    if (!std::isfinite(s)) throw NumericalError("pointwise_power: overflow");
  }
  return analyze(samples, field.grid());
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  require_same_modes(a.grid(), b.grid(), "pointwise_product");
  std::vector<double> sa = synthesize(a);
  const std::vector<double> sb = synthesize(b);
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  return analyze(sa, a.grid());
}

// ---------------------------------------------------------------- norms

double lebesgue_norm_of_samples(std::span<const double> samples, const TorusGrid& grid, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("lebesgue_norm: q must be >= 1");
  if (samples.size() != grid.sample_count()) throw InvalidArgument("lebesgue_norm: sample count mismatch");
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (std::isinf(q) || peak == 0.0) return peak;
  double sum = 0.0;
  if (q == 2.0) {
    for (double s : samples) sum += (s / peak) * (s / peak);
  } else {
    for (double s : samples) sum += std::pow(std::abs(s) / peak, q);
  }
  return peak * std::pow(grid.cell_volume() * sum, 1.0 / q);
}

double lebesgue_norm(const SpectralField& field, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("lebesgue_norm: q must be >= 1");
  const std::vector<double> samples = synthesize(field);
  return lebesgue_norm_of_samples(samples, field.grid(), q);
}

double l2_norm_squared(const SpectralField& field) noexcept {
  double sum = 0.0;
  for (const auto& c : field.coefficients()) sum += std::norm(c);
  return field.grid().volume() * sum;
}

double gradient_norm_squared(const SpectralField& field) noexcept {
  const auto coeffs = field.coefficients();
  const ModeTable& modes = field.grid().modes();
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) sum += modes.norm_squared[i] * std::norm(coeffs[i]);
  return field.grid().volume() * sum;
}

}  // namespace wavelab
