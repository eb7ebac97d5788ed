#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wavelab {

using Complex = std::complex<double>;

// Integer wavenumber; components beyond the grid dimension are zero.
using Wavenumber = std::array<int, 3>;

struct ModeTable;

// Periodic grid on [0, 2pi)^dim. Retained wavenumbers span [-N/2, N/2) per
// axis; the physical grid carries rho*N samples per axis.
class TorusGrid {
 public:
  TorusGrid(int dim, int modes_per_axis, int oversample_factor = 4);

  int dim() const noexcept { return dim_; }
  int modes_per_axis() const noexcept { return modes_; }
  int oversample_factor() const noexcept { return oversample_; }
  int samples_per_axis() const noexcept { return modes_ * oversample_; }

  std::size_t mode_count() const noexcept { return mode_count_; }
  std::size_t sample_count() const noexcept { return sample_count_; }

  // (2 pi)^d.
  double volume() const noexcept;
  // Quadrature weight of one physical sample, (2 pi / (rho N))^d.
  double cell_volume() const noexcept;

  bool in_cube(const Wavenumber& n) const noexcept;
  std::size_t linear_index(const Wavenumber& n) const;
  const ModeTable& modes() const noexcept { return *table_; }

  // Same dimension and mode count (physical resolution may differ).
  bool same_modes(const TorusGrid& other) const noexcept {
    return dim_ == other.dim_ && modes_ == other.modes_;
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.dim_ == b.dim_ && a.modes_ == b.modes_ && a.oversample_ == b.oversample_;
  }

 private:
  int dim_;
  int modes_;
  int oversample_;
  std::size_t mode_count_;
  std::size_t sample_count_;
  std::shared_ptr<const ModeTable> table_;
};

// Per-grid lookup tables over the retained cube, in row-major wavenumber
// order (axis 0 slowest, each axis ascending from -N/2).
struct ModeTable {
  static constexpr std::uint32_t kNoMirror = 0xffffffffu;

  std::vector<Wavenumber> wavenumber;
  std::vector<double> norm;           // |n|
  std::vector<double> norm_squared;   // |n|^2
  std::vector<std::uint32_t> mirror;  // index of -n, kNoMirror on the Nyquist faces
  // Wavenumbers with a component equal to -N/2 have no conjugate partner in
  // the cube and are held at zero.
  std::vector<std::uint8_t> active;
  // Half-space representative: n = 0 excluded, last nonzero component > 0.
  std::vector<std::uint8_t> canonical;
  double max_norm = 0.0;
};

// Half-space membership used for independent draws: last nonzero component
// positive.
bool in_half_space(const Wavenumber& n, int dim) noexcept;

// Real field stored through its Hermitian-symmetric Fourier coefficients,
// u(x) = sum_n c_n e^{i n.x}.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);

  // Throws InvalidArgument on size mismatch or broken Hermitian symmetry.
  static SpectralField from_coefficients(TorusGrid grid, std::vector<Complex> coeffs);
  // amplitude * e_n + conj(amplitude) * e_{-n} (just the real amplitude for n = 0).
  static SpectralField mode(TorusGrid grid, const Wavenumber& n, Complex amplitude = 1.0);
  static SpectralField constant(TorusGrid grid, double value);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  // Unchecked mutable access; callers keep the symmetry.
  std::span<Complex> mutable_coefficients() noexcept { return coeffs_; }

  // Zero for wavenumbers outside the retained cube.
  Complex coefficient(const Wavenumber& n) const;
  // Sets c_n and c_{-n} = conj(c_n).
  void set_mode(const Wavenumber& n, Complex value);

  double max_abs_coefficient() const noexcept;
  // Largest |c_{-n} - conj(c_n)|; zero for a valid field.
  double hermitian_defect() const noexcept;
  bool is_zero() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale) noexcept;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

// Initial-data pair (u0, u1) for the wave equation.
struct WavePair {
  SpectralField u0;
  SpectralField u1;
};

WavePair zero_pair(const TorusGrid& grid);

// ---------------------------------------------------------------- transforms

// Real samples on the (rho N)^d physical grid, row-major, x_i = 2 pi i / (rho N).
std::vector<double> synthesize(const SpectralField& field);

// Inverse of synthesize on band-limited data; modes outside the retained cube
// (and on its Nyquist faces) are dropped.
SpectralField analyze(std::span<const double> samples, const TorusGrid& grid);

// ---------------------------------------------------------------- multipliers

using SymbolFunction = std::function<Complex(const Wavenumber& n, double norm)>;

// Fourier multiplier m(n). A symbol returning a non-finite value at a retained
// mode is singular there.
struct MultiplierSymbol {
  SymbolFunction evaluate;
  std::string label;

  MultiplierSymbol operator*(const MultiplierSymbol& other) const;
};

namespace symbols {

MultiplierSymbol identity();
// |n|^power; the n = 0 value is 0 for power > 0, 1 for power = 0 and
// singular for power < 0.
MultiplierSymbol abs_gradient(double power = 1.0);
// <n>^power = (1 + |n|^2)^{power/2}.
MultiplierSymbol bracket(double power);
MultiplierSymbol laplacian();
MultiplierSymbol wave_cos(double t);
// sin(t|n|)/|n| with the value t at n = 0.
MultiplierSymbol wave_sinc(double t);
// Sharp cutoff 1{|n| <= radius}.
MultiplierSymbol sharp_ball(double radius);

}  // namespace symbols

// Throws InvalidArgument if the symbol is singular at a retained mode or does
// not preserve real-valuedness.
SpectralField apply_multiplier(const SpectralField& field, const MultiplierSymbol& symbol);

// Coefficient-wise multiplication by real weights (one per retained mode).
SpectralField apply_weights(const SpectralField& field, std::span<const double> weights);

// ---------------------------------------------------------------- nonlinear maps

// |s|^{p-1} s evaluated on the oversampled grid and truncated back to the cube.
// Throws NumericalError on non-finite samples.
SpectralField pointwise_power(const SpectralField& field, double p);

// Generic pointwise map on the physical grid.
SpectralField pointwise_map(const SpectralField& field, const std::function<double(double)>& fn);

// Product of two fields on the oversampled grid, truncated to the cube.
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

// ---------------------------------------------------------------- norms

// Equal-weight quadrature of |u|^q, normalized so that ||1||_q = (2 pi)^{d/q};
// q = infinity gives the grid maximum.
double lebesgue_norm(const SpectralField& field, double q);
double lebesgue_norm_of_samples(std::span<const double> samples, const TorusGrid& grid, double q);

// (2 pi)^d sum |c_n|^2, equal to ||u||_{L^2}^2.
double l2_norm_squared(const SpectralField& field) noexcept;
// (2 pi)^d sum |n|^2 |c_n|^2, equal to ||grad u||_{L^2}^2.
double gradient_norm_squared(const SpectralField& field) noexcept;

}  // namespace wavelab
