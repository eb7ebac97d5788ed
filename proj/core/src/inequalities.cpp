#include "wavelab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "wavelab/error.hpp"

namespace wavelab {

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double conjugate_exponent(double p, double p1, const char* what) {
  const double r = inv(p) - inv(p1);
  if (r < -1e-14) throw InvalidArgument(std::string(what) + ": 1/p - 1/p1 must be nonnegative");
  return r <= 1e-14 ? std::numeric_limits<double>::infinity() : 1.0 / r;
}

InequalityReport start(std::string name, const TorusGrid& grid, std::uint64_t seed,
                       std::vector<std::pair<std::string, double>> params) {
  InequalityReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.corpus_seed = seed;
  r.dim = grid.dim();
  r.N = grid.modes_per_axis();
  r.rho = grid.oversample_factor();
  return r;
}

const TorusGrid& corpus_grid(const CorpusInfo& corpus) {
  if (!corpus.entries || corpus.entries->empty()) throw InvalidArgument("inequality check: empty corpus");
  return corpus.entries->front().field.grid();
}

}  // namespace

void InequalityReport::add(double lhs, double rhs) {
  if (lhs == 0.0 && rhs == 0.0) return;
  ratios.push_back(rhs == 0.0 ? std::numeric_limits<double>::infinity() : lhs / rhs);
}

void InequalityReport::finish() {
  max_ratio = 0.0;
  min_ratio = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (double r : ratios) {
    finite = finite && std::isfinite(r);
    max_ratio = std::max(max_ratio, r);
    min_ratio = std::min(min_ratio, r);
  }
  pass = finite && max_ratio <= bound;
}

std::string report_to_json(const InequalityReport& report) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.params) {
    if (std::isinf(v)) {
      params[k] = "inf";
    } else {
      params[k] = v;
    }
  }
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["params"] = params;
  j["max_ratio"] = report.max_ratio;
  j["min_ratio"] = std::isfinite(report.min_ratio) ? nlohmann::ordered_json(report.min_ratio) : nlohmann::ordered_json(nullptr);
  j["count"] = report.ratios.size();
  j["corpus_seed"] = report.corpus_seed;
  j["grid"] = {{"dim", report.dim}, {"N", report.N}, {"rho", report.rho}};
  j["pass"] = report.pass;
  return j.dump(2);
}

double gn_alpha(int dim, double s, double t, double p, double p0, double p1) {
  if (!(s > 0.0) || !(t > 0.0)) throw InvalidArgument("gn_check: s and t must be positive");
  if (!(p > 1.0) || !(p0 > 1.0) || !(p1 > 1.0) || std::isinf(p0) || std::isinf(p1)) {
    throw InvalidArgument("gn_check: exponents must satisfy p > 1 and p0, p1 in (1, inf)");
  }
  const double d = dim;
  const double a = 1.0 / p0 - t / d;
  const double b = 1.0 / p1;
  if (std::abs(b - a) < 1e-15) throw InvalidArgument("gn_check: scaling relation does not determine alpha");
  const double alpha = (-s / d + 1.0 / p - a) / (b - a);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("gn_check: scaling relation gives alpha = " + std::to_string(alpha) + ", outside (0, 1)");
  }
  if (s > (1.0 - alpha) * t + 1e-12) throw InvalidArgument("gn_check: s exceeds (1 - alpha) t");
  return alpha;
}

InequalityReport gn_check(const CorpusInfo& corpus, double s, double t, double p, double p0, double p1) {
  const TorusGrid& grid = corpus_grid(corpus);
  const double alpha = gn_alpha(grid.dim(), s, t, p, p0, p1);
  auto report = start("gagliardo_nirenberg", grid, corpus.seed,
                      {{"s", s}, {"t", t}, {"p", p}, {"p0", p0}, {"p1", p1}, {"alpha", alpha}});
  for (const auto& e : *corpus.entries) {
    const double lhs = sobolev_norm(e.field, s, p);
    const double rhs = std::pow(sobolev_norm(e.field, t, p0), 1.0 - alpha) * std::pow(lebesgue_norm(e.field, p1), alpha);
    report.add(lhs, rhs);
  }
  report.finish();
  return report;
}

InequalityReport chain_rule_check(const CorpusInfo& corpus, double s, double p_exponent, double q, double q1,
                                  double q2, double r, bool homogeneous) {
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("chain_rule_check: s must lie in (0, 1)");
  if (!(p_exponent > 1.0)) throw InvalidArgument("chain_rule_check: nonlinearity exponent must exceed 1");
  if (!(q >= 1.0) || !(r >= 1.0) || !(q1 > 1.0) || !(q2 > 1.0)) {
    throw InvalidArgument("chain_rule_check: need q, r >= 1 and q1, q2 > 1");
  }
  if (std::abs(inv(q) - inv(q1) - inv(q2)) > 1e-12) throw InvalidArgument("chain_rule_check: 1/q != 1/q1 + 1/q2");
  const TorusGrid& grid = corpus_grid(corpus);
  auto report = start(homogeneous ? "chain_rule_homogeneous" : "chain_rule", grid, corpus.seed,
                      {{"s", s}, {"p", p_exponent}, {"q", q}, {"q1", q1}, {"q2", q2}, {"r", r}});
  const NormSpec lhs_spec = NormSpec::besov(s, q, r, homogeneous);
  const NormSpec rhs_spec = NormSpec::besov(s, q1, r, homogeneous);
  for (const auto& e : *corpus.entries) {
    const double lhs = norm_value(pointwise_power(e.field, p_exponent), lhs_spec);
    const double rhs = norm_value(e.field, rhs_spec) * std::pow(lebesgue_norm(e.field, q2 * (p_exponent - 1.0)), p_exponent - 1.0);
    report.add(lhs, rhs);
  }
  report.finish();
  return report;
}

InequalityReport tame_check(const std::vector<std::pair<SpectralField, SpectralField>>& pairs, std::uint64_t seed,
                            double s, double p, double r, double p1, double p2) {
  if (pairs.empty()) throw InvalidArgument("tame_check: empty corpus");
  if (!(s > 0.0)) throw InvalidArgument("tame_check: s must be positive");
  if (!(p >= 1.0) || !(r >= 1.0) || !(p1 >= 1.0) || !(p2 >= 1.0)) throw InvalidArgument("tame_check: exponents must be >= 1");
  const double p1c = conjugate_exponent(p, p1, "tame_check");
  const double p2c = conjugate_exponent(p, p2, "tame_check");
  const TorusGrid& grid = pairs.front().first.grid();
  auto report = start("tame_product", grid, seed,
                      {{"s", s}, {"p", p}, {"r", r}, {"p1", p1}, {"p1_prime", p1c}, {"p2", p2}, {"p2_prime", p2c}});
  for (const auto& [f, g] : pairs) {
    const double lhs = norm_value(pointwise_product(f, g), NormSpec::besov(s, p, r, true));
    const double rhs = norm_value(f, NormSpec::besov(s, p1, r, true)) * lebesgue_norm(g, p1c) +
                       lebesgue_norm(f, p2) * norm_value(g, NormSpec::besov(s, p2c, r, true));
    report.add(lhs, rhs);
  }
  report.finish();
  return report;
}

std::string embedding_violation(const NormSpec& src, const NormSpec& tgt, int dim) {
  if (src.homogeneous != tgt.homogeneous) return "source and target must both be homogeneous or both nonhomogeneous";
  const double d = dim;
  const double tol = 1e-12;
  const bool src_b = src.kind == NormKind::besov;
  const bool tgt_b = tgt.kind == NormKind::besov;
  if (src_b && tgt_b) {
    if (src.p > tgt.p) return "Besov embedding needs p_source <= p_target";
    const double room = src.s - d * (inv(src.p) - inv(tgt.p)) - tgt.s;
    if (room < -tol) return "target regularity exceeds s - d(1/p1 - 1/p2)";
    if (room <= tol && src.r > tgt.r) return "at equal scaling the summability index cannot decrease";
    return {};
  }
  if (src_b && !tgt_b) {
    if (src.p != tgt.p) return "Besov-to-Sobolev embedding needs equal integrability";
    if (tgt.s > src.s + tol) return "target regularity exceeds source";
    if (std::abs(tgt.s - src.s) <= tol && src.r != 1.0) return "B^s_{p,r} embeds in W^{s,p} only for r = 1";
    return {};
  }
  if (!src_b && tgt_b) {
    if (src.p != tgt.p) return "Sobolev-to-Besov embedding needs equal integrability";
    if (tgt.s > src.s + tol) return "target regularity exceeds source";
    if (std::abs(tgt.s - src.s) <= tol && !std::isinf(tgt.r)) return "W^{s,p} embeds in B^s_{p,r} only for r = inf";
    return {};
  }
  if (inv(src.p) - src.s / d > inv(tgt.p) - tgt.s / d + tol) return "Sobolev embedding needs 1/p - s1/d <= 1/q - s2/d";
  if (tgt.s > src.s + tol) return "target regularity exceeds source";
  return {};
}

InequalityReport embedding_check(const CorpusInfo& corpus, const NormSpec& source, const NormSpec& target) {
  const TorusGrid& grid = corpus_grid(corpus);
  const std::string why = embedding_violation(source, target, grid.dim());
  if (!why.empty()) throw InvalidArgument("embedding_check: " + source.label() + " -> " + target.label() + ": " + why);
  auto report = start("embedding " + source.label() + " -> " + target.label(), grid, corpus.seed,
                      {{"s_source", source.s}, {"p_source", source.p}, {"r_source", source.r},
                       {"s_target", target.s}, {"p_target", target.p}, {"r_target", target.r}});
  for (const auto& e : *corpus.entries) report.add(norm_value(e.field, target), norm_value(e.field, source));
  report.finish();
  return report;
}

InequalityReport bernstein_check(const CorpusInfo& corpus, double p, double q, double derivative_order,
                                 const BumpProfile& phi) {
  const TorusGrid& grid = corpus_grid(corpus);
  if (derivative_order == 0.0) {
    if (!(p > 1.0) || !(p <= q) || std::isinf(q)) throw InvalidArgument("bernstein_check: need 1 < p <= q < inf");
  } else if (!(derivative_order > 0.0) || !(p > 1.0)) {
    throw InvalidArgument("bernstein_check: need k > 0 and p > 1");
  }
  const bool derivative = derivative_order > 0.0;
  auto report = start(derivative ? "bernstein_derivative" : "bernstein", grid, corpus.seed,
                      {{"p", p}, {"q", derivative ? p : q}, {"k", derivative_order}, {"d", double(grid.dim())}});
  const int jmax = max_block_index(grid);
  const MultiplierSymbol dk = symbols::abs_gradient(derivative ? derivative_order : 1.0);
  for (const auto& e : *corpus.entries) {
    for (int j = derivative ? 1 : 0; j <= jmax; ++j) {
      const SpectralField b = block_delta(e.field, j, phi);
      if (b.is_zero()) continue;
      const double base = lebesgue_norm(b, p);
      if (derivative) {
        report.add(lebesgue_norm(apply_multiplier(b, dk), p), std::pow(2.0, j * derivative_order) * base);
      } else {
        report.add(lebesgue_norm(b, q), std::pow(2.0, j * grid.dim() * (1.0 / p - 1.0 / q)) * base);
      }
    }
  }
  report.finish();
  return report;
}

InequalityReport square_function_check(const CorpusInfo& corpus, double p, const BumpProfile& phi) {
  const TorusGrid& grid = corpus_grid(corpus);
  if (!(p >= 1.0)) throw InvalidArgument("square_function_check: p must be >= 1");
  auto report = start("littlewood_paley_square_function", grid, corpus.seed, {{"p", p}});
  for (const auto& e : *corpus.entries) report.add(square_function_norm(e.field, p, phi), lebesgue_norm(e.field, p));
  report.finish();
  return report;
}

InequalityReport besov_sobolev_check(const CorpusInfo& corpus, double s, const BumpProfile& phi) {
  const TorusGrid& grid = corpus_grid(corpus);
  auto report = start("besov22_vs_sobolev", grid, corpus.seed, {{"s", s}});
  for (const auto& e : *corpus.entries) {
    report.add(besov_norm(e.field, NormSpec::besov(s, 2.0, 2.0), phi), sobolev_norm(e.field, s, 2.0));
  }
  report.finish();
  return report;
}

std::pair<double, double> besov_sobolev_bracket(const TorusGrid& grid, double s, const BumpProfile& phi) {
  const ModeTable& modes = grid.modes();
  const int jmax = max_block_index(grid);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < modes.norm.size(); ++i) {
    if (!modes.active[i]) continue;
    double m = 0.0;
    for (int j = 0; j <= jmax; ++j) {
      const double w = block_weight(modes.norm[i], j, phi);
      m += std::pow(2.0, 2.0 * j * s) * w * w;
    }
    const double ratio = std::sqrt(m) / std::pow(1.0 + modes.norm_squared[i], 0.5 * s);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

std::pair<double, double> square_function_bracket(const TorusGrid& grid, const BumpProfile& phi) {
  return besov_sobolev_bracket(grid, 0.0, phi);
}

std::vector<InequalityReport> standard_inequality_battery(const CorpusInfo& corpus,
                                                          const std::vector<std::pair<SpectralField, SpectralField>>& pairs,
                                                          double p) {
  if (!(p > 3.0)) throw InvalidArgument("inequality battery: nonlinearity power must exceed 3");
  const double sp = (p - 3.0) / (p - 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<InequalityReport> out;
  out.push_back(bernstein_check(corpus, 2.0, 4.0));
  out.push_back(bernstein_check(corpus, 2.0, 6.0));
  out.push_back(bernstein_check(corpus, 2.0, 2.0, 1.0));
  out.push_back(bernstein_check(corpus, 4.0, 4.0, 1.0));
  for (double q : {2.0, 4.0, 6.0}) out.push_back(square_function_check(corpus, q));
  for (double q : {2.0, 4.0}) {
    out.push_back(embedding_check(corpus, NormSpec::besov(0.5, q, 1.0), NormSpec::sobolev(0.5, q)));
    out.push_back(embedding_check(corpus, NormSpec::sobolev(0.5, q), NormSpec::besov(0.5, q, inf)));
  }
  out.push_back(gn_check(corpus, 1.0 - sp, 1.0, 0.5 * (p + 1.0), 2.0, p + 1.0));
  const double q1 = 8.0;
  const double q2 = (p + 1.0) / (p - 1.0);
  out.push_back(chain_rule_check(corpus, 1.0 - sp, p, 1.0 / (1.0 / q1 + 1.0 / q2), q1, q2, 2.0));
  out.push_back(tame_check(pairs, corpus.seed, 0.5, 2.0, 2.0, 4.0, 4.0));
  out.push_back(besov_sobolev_check(corpus, 0.5));
  return out;
}

}  // namespace wavelab
