#include "wavelab/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "wavelab/error.hpp"

namespace wavelab {

namespace {

double glue(double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; }

std::string format_exponent(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

double lp_with_ell_r(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  double peak = 0.0;
  for (double t : terms) peak = std::max(peak, t);
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (double t : terms) sum += std::pow(t / peak, r);
  return peak * std::pow(sum, 1.0 / r);
}

}  // namespace

BumpProfile BumpProfile::polynomial(int order) {
  if (order < 1 || order > 3) throw InvalidArgument("BumpProfile::polynomial: order must be 1, 2 or 3");
  return BumpProfile(Kind::polynomial, order);
}

double BumpProfile::operator()(double r) const noexcept {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double x = r - 1.0;
  if (kind_ == Kind::smooth_step) {
    const double a = glue(1.0 - x);
    const double b = glue(x);
    return a / (a + b);
  }
  double step = 0.0;
  switch (order_) {
    case 1: step = x * x * (3.0 - 2.0 * x); break;
    case 2: step = x * x * x * (x * (6.0 * x - 15.0) + 10.0); break;
    default: step = x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x))); break;
  }
  return 1.0 - step;
}

std::string BumpProfile::label() const {
  if (kind_ == Kind::smooth_step) return "smooth_step";
  return "polynomial_C" + std::to_string(order_);
}

double cutoff_weight(double r, int j, const BumpProfile& phi) {
  if (j < 0) return 0.0;
  return phi(std::ldexp(r, -j));
}

double block_weight(double r, int j, const BumpProfile& phi) {
  if (j < 0) return 0.0;
  return cutoff_weight(r, j, phi) - cutoff_weight(r, j - 1, phi);
}

int max_block_index(const TorusGrid& grid) {
  int lg = 0;
  while ((1 << lg) < grid.modes_per_axis()) ++lg;
  return lg + 1;
}

std::vector<double> cutoff_weights(const TorusGrid& grid, int j, const BumpProfile& phi) {
  const ModeTable& modes = grid.modes();
  std::vector<double> w(grid.mode_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = cutoff_weight(modes.norm[i], j, phi);
  return w;
}

std::vector<double> block_weights(const TorusGrid& grid, int j, const BumpProfile& phi) {
  const ModeTable& modes = grid.modes();
  std::vector<double> w(grid.mode_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = block_weight(modes.norm[i], j, phi);
  return w;
}

SpectralField project_P(const SpectralField& field, int j, const BumpProfile& phi) {
  if (j < -1) throw InvalidArgument("project_P: index must be >= -1");
  return apply_weights(field, cutoff_weights(field.grid(), j, phi));
}

SpectralField block_delta(const SpectralField& field, int j, const BumpProfile& phi) {
  if (j < 0) throw InvalidArgument("block_delta: index must be >= 0");
  return apply_weights(field, block_weights(field.grid(), j, phi));
}

LPDecomposition decompose(const SpectralField& field, const BumpProfile& phi) {
  LPDecomposition d{field.grid(), {}};
  const int jmax = max_block_index(field.grid());
  for (int j = 0; j <= jmax; ++j) d.blocks.emplace_back(j, block_delta(field, j, phi));
  return d;
}

SpectralField reconstruct(const LPDecomposition& decomposition) {
  SpectralField sum(decomposition.source_grid);
  for (const auto& [j, block] : decomposition.blocks) {
    if (!block.grid().same_modes(decomposition.source_grid)) {
      throw InvalidArgument("reconstruct: block " + std::to_string(j) + " lives on a different grid");
    }
    sum += block;
  }
  return sum;
}

bool is_band_limited(const SpectralField& field, int j, const BumpProfile& phi) {
  const ModeTable& modes = field.grid().modes();
  const auto c = field.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (cutoff_weight(modes.norm[i], j, phi) == 0.0 && c[i] != Complex{}) return false;
  }
  return true;
}

std::string NormSpec::label() const {
  std::ostringstream os;
  os << (kind == NormKind::besov ? "B" : "W") << (homogeneous ? "dot" : "") << "^" << s << "_" << format_exponent(p);
  if (kind == NormKind::besov) os << "," << format_exponent(r);
  return os.str();
}

NormReport norm_report(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi) {
  if (!(spec.p >= 1.0)) throw InvalidArgument("norm: integrability exponent must be >= 1");
  if (spec.kind == NormKind::besov && !(spec.r >= 1.0)) throw InvalidArgument("norm: summability exponent must be >= 1");
  const TorusGrid& grid = field.grid();
  NormReport report;
  const Complex mean = field.coefficient({0, 0, 0});
  report.excluded_mean = spec.homogeneous ? std::abs(mean) * std::pow(grid.volume(), std::isinf(spec.p) ? 0.0 : 1.0 / spec.p) : 0.0;
  report.ill_conditioned = spec.homogeneous && mean != Complex{} && spec.s <= 0.0;

  SpectralField source = field;
  if (spec.homogeneous) source.set_mode({0, 0, 0}, 0.0);

  const int jmax = max_block_index(grid);
  if (spec.kind == NormKind::sobolev) {
    const MultiplierSymbol symbol = spec.homogeneous ? symbols::abs_gradient(spec.s) : symbols::bracket(spec.s);
    // |D|^s at n = 0 is singular for s < 0, but the mean is already removed.
    SpectralField weighted(grid);
    if (spec.homogeneous) {
      const ModeTable& modes = grid.modes();
      std::vector<double> w(grid.mode_count());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = modes.norm[i] == 0.0 ? 0.0 : std::pow(modes.norm[i], spec.s);
      weighted = apply_weights(source, w);
    } else {
      weighted = apply_multiplier(source, symbol);
    }
    report.value = lebesgue_norm(weighted, spec.p);
    for (int j = 0; j <= jmax; ++j) {
      const SpectralField b = block_delta(source, j, phi);
      if (!b.is_zero()) {
        if (report.j_min < 0) report.j_min = j;
        report.j_max = j;
      }
    }
    return report;
  }

  std::vector<double> terms;
  terms.reserve(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    const SpectralField b = block_delta(source, j, phi);
    if (b.is_zero()) {
      terms.push_back(0.0);
      continue;
    }
    if (report.j_min < 0) report.j_min = j;
    report.j_max = j;
    terms.push_back(std::pow(2.0, j * spec.s) * lebesgue_norm(b, spec.p));
  }
  report.value = lp_with_ell_r(terms, spec.r);
  return report;
}

double besov_norm(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi) {
  NormSpec b = spec;
  b.kind = NormKind::besov;
  return norm_report(field, b, phi).value;
}

double sobolev_norm(const SpectralField& field, double s, double p, bool homogeneous) {
  return norm_report(field, NormSpec::sobolev(s, p, homogeneous)).value;
}

double norm_value(const SpectralField& field, const NormSpec& spec, const BumpProfile& phi) {
  return norm_report(field, spec, phi).value;
}

std::vector<double> square_function_samples(const SpectralField& field, const BumpProfile& phi) {
  const int jmax = max_block_index(field.grid());
  std::vector<double> acc(field.grid().sample_count(), 0.0);
  for (int j = 0; j <= jmax; ++j) {
    const SpectralField b = block_delta(field, j, phi);
    if (b.is_zero()) continue;
    const std::vector<double> s = synthesize(b);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i] * s[i];
  }
  for (double& a : acc) a = std::sqrt(a);
  return acc;
}

double square_function_norm(const SpectralField& field, double p, const BumpProfile& phi) {
  return lebesgue_norm_of_samples(square_function_samples(field, phi), field.grid(), p);
}

NormRow make_norm_row(const std::string& label, const NormSpec& spec, const NormReport& report) {
  return NormRow{label, spec.s, spec.p, spec.kind == NormKind::besov ? spec.r : 2.0, report.value, report.j_min, report.j_max};
}

void write_norm_rows(std::ostream& out, const std::vector<NormRow>& rows) {
  out << "norm_label,s,p,r,value,j_min,j_max\n";
  for (const auto& row : rows) {
    std::ostringstream value;
    value.precision(17);
    value << row.value;
    out << csv_field(row.label) << ',' << format_exponent(row.s) << ',' << format_exponent(row.p) << ','
        << format_exponent(row.r) << ',' << value.str() << ',' << row.j_min << ',' << row.j_max << '\n';
  }
}

}  // namespace wavelab
