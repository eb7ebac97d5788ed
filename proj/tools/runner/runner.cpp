#include "runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "wavelab/corpus.hpp"
#include "wavelab/error.hpp"
#include "wavelab/field_io.hpp"
#include "wavelab/galerkin.hpp"
#include "wavelab/inequalities.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/probabilistic.hpp"
#include "wavelab/yudovich.hpp"

namespace wavelab::runner {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json exponent_value(double v) { return std::isinf(v) ? json("inf") : json(v); }

// Files written by one run, in emission order.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw FormatError("cannot write " + (dir_ / name).string());
    names_.push_back(name);
  }

  void field(const std::string& name, const SpectralField& f) {
    save_field(dir_ / name, f);
    names_.push_back(name);
  }

  fs::path write_manifest(const RunConfig& config) const {
    std::vector<std::string> sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    json files = json::array();
    for (const auto& n : sorted) {
      const fs::path p = dir_ / n;
      files.push_back({{"path", n}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
    json m;
    m["mode"] = to_string(config.mode);
    m["seed"] = config.seed;
    m["files"] = files;
    const fs::path path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) throw FormatError("cannot write " + path.string());
    return path;
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string trace_csv(const EnergyTrace& trace) {
  std::ostringstream os;
  write_trajectory_csv(os, trace);
  return os.str();
}

json trace_summary(const SolveResult& r) {
  const auto& tr = r.trace;
  json j;
  j["status"] = r.status == SolveStatus::completed ? "completed" : "blowup";
  j["diagnostic"] = r.diagnostic;
  j["energy"] = to_string(tr.label);
  j["records"] = tr.size();
  j["t_final"] = r.final_state.t;
  if (tr.size() > 0) {
    j["E_initial"] = tr.total(0);
    j["E_final"] = tr.total(tr.size() - 1);
    j["sup_E"] = tr.sup_total();
    j["relative_drift"] = tr.relative_drift();
    j["linf_u_final"] = tr.linf_u.back();
  }
  return j;
}

RandomizationSpec randomization_spec(const RunConfig& c) { return {base_pair(c), c.distribution(), c.seed}; }

std::string two_digit(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", j);
  return buf;
}

std::string sample_tag(std::uint64_t m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(m));
  return buf;
}

RunOutcome finish(const Artifacts& art, const RunConfig& c, const std::string& diagnostic) {
  RunOutcome out;
  out.manifest = art.write_manifest(c);
  out.diagnostic = diagnostic;
  out.exit_code = diagnostic.empty() ? kExitOk : kExitBlowup;
  return out;
}

RunOutcome run_simulate(const RunConfig& c, Artifacts& art, std::ostream& log) {
  const GalerkinConfig g = c.galerkin_config();
  log << "simulate: " << g.step_count() << " steps, p = " << g.p << ", j = " << g.cutoff_j << "\n";
  const SolveResult r = solve_regularized_direct(g, base_pair(c));
  art.text("trajectory.csv", trace_csv(r.trace));
  if (c.galerkin.checkpoint) {
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      art.field("snapshot_" + sample_tag(k) + "_u.wlf", r.snapshots[k].v);
      art.field("snapshot_" + sample_tag(k) + "_ut.wlf", r.snapshots[k].w);
    }
    art.field("final_u.wlf", r.final_state.v);
    art.field("final_ut.wlf", r.final_state.w);
  }
  json s = trace_summary(r);
  s["mode"] = "simulate";
  art.text("summary.json", s.dump(2) + "\n");
  return finish(art, c, r.status == SolveStatus::blowup ? r.diagnostic : "");
}

RunOutcome run_remainder(const RunConfig& c, Artifacts& art, std::ostream& log) {
  const GalerkinConfig g = c.galerkin_config();
  const std::uint64_t m = c.randomization.first_sample;
  log << "remainder: sample " << m << ", " << g.step_count() << " steps, j = " << g.cutoff_j << "\n";
  const SolveResult r = solve_remainder(g, randomization_spec(c), m);
  art.text("trace.csv", trace_csv(r.trace));
  if (c.galerkin.checkpoint) {
    art.field("final_v.wlf", r.final_state.v);
    art.field("final_vt.wlf", r.final_state.w);
  }
  json s = trace_summary(r);
  s["mode"] = "remainder";
  s["sample"] = m;
  s["cutoff_j"] = g.cutoff_j;
  art.text("summary.json", s.dump(2) + "\n");
  return finish(art, c, r.status == SolveStatus::blowup ? r.diagnostic : "");
}

RunOutcome run_ensemble(const RunConfig& c, Artifacts& art, std::ostream& log) {
  const GalerkinConfig g = c.galerkin_config();
  const auto& cutoffs = c.ensemble.cutoffs;
  const std::size_t M = c.randomization.samples;
  const std::uint64_t first = c.randomization.first_sample;
  log << "ensemble: " << M << " samples x " << cutoffs.size() << " cutoffs on " << worker_threads() << " workers\n";
  const EnsembleRun ens = run_remainder_ensemble(g, randomization_spec(c), first, M, cutoffs);

  std::vector<std::vector<EnergyTrace>> traces(M);
  std::string diagnostic;
  json runs = json::array();
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
      const SolveResult& r = ens.runs[m][k];
      const std::string name = "trace_s" + sample_tag(first + m) + "_j" + two_digit(cutoffs[k]) + ".csv";
      art.text(name, trace_csv(r.trace));
      traces[m].push_back(r.trace);
      if (r.status == SolveStatus::blowup && diagnostic.empty()) {
        diagnostic = "sample " + std::to_string(first + m) + ", j = " + std::to_string(cutoffs[k]) + ": " + r.diagnostic;
      }
      json e = trace_summary(r);
      e["sample"] = first + m;
      e["cutoff_j"] = cutoffs[k];
      e["file"] = name;
      runs.push_back(e);
    }
  }
  const AprioriReport rep = apriori_bound_report(traces, cutoffs, g.T, c.ensemble.eta);
  art.text("apriori_bound.json", apriori_report_to_json(rep) + "\n");

  json s;
  s["mode"] = "ensemble";
  s["samples"] = M;
  s["cutoffs"] = cutoffs;
  s["blowups"] = ens.blowups;
  s["quantile"] = rep.quantile;
  s["runs"] = runs;
  art.text("summary.json", s.dump(2) + "\n");
  log << "ensemble: (1 - eta) quantile of sup E_n = " << rep.quantile << ", blowups = " << ens.blowups << "\n";
  return finish(art, c, diagnostic);
}

RunOutcome run_tails(const RunConfig& c, Artifacts& art, std::ostream& log) {
  TailConfig t = c.tail_config();
  t.require_fit = false;
  log << "tails: " << t.samples << " samples, " << t.time_nodes << " time nodes\n";
  const TailEstimate est = strichartz_tail(randomization_spec(c), t);
  std::ostringstream csv;
  write_tail_csv(csv, est);
  art.text("tail.csv", csv.str());
  json s;
  s["mode"] = "tails";
  s["samples"] = est.samples;
  s["norm"] = {{"T", t.T},
               {"q1", exponent_value(t.q1)},
               {"q2", exponent_value(t.q2)},
               {"r", exponent_value(t.r)},
               {"s", t.s},
               {"operator", c.tails.op},
               {"time_nodes", t.time_nodes}};
  s["fit_ok"] = est.fit_ok;
  s["fit_message"] = est.fit_message;
  s["fitted_c"] = number_or_null(est.fitted_c);
  s["intercept"] = number_or_null(est.intercept);
  s["r_squared"] = number_or_null(est.r_squared);
  s["fit_window"] = {est.fit_begin, est.fit_end};
  art.text("summary.json", s.dump(2) + "\n");
  log << "tails: fit " << (est.fit_ok ? "ok" : "unavailable") << ", c = " << est.fitted_c << ", R^2 = " << est.r_squared
      << "\n";
  return finish(art, c, "");
}

RunOutcome run_inequalities(const RunConfig& c, Artifacts& art, std::ostream& log) {
  CorpusSpec spec;
  spec.grid = c.torus();
  spec.power_law_count = c.inequalities.corpus_size;
  spec.adversarial_count = c.inequalities.adversarial;
  spec.extent = c.inequalities.extent;
  spec.seed = c.seed;
  const auto corpus = make_corpus(spec);
  const auto pairs = make_pair_corpus(spec);
  log << "inequalities: corpus of " << corpus.size() << " fields, extent " << spec.resolved_extent() << "\n";
  const auto reports = standard_inequality_battery(CorpusInfo{&corpus, spec.seed}, pairs, c.inequalities.p);
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(json::parse(report_to_json(r)));
    log << "  " << r.name << ": max ratio " << r.max_ratio << (r.pass ? "" : "  [not finite]") << "\n";
  }
  art.text("inequalities.json", arr.dump(2) + "\n");
  return finish(art, c, "");
}

RunOutcome run_report(const RunConfig& c, Artifacts& art, std::ostream& log) {
  const WavePair pair = base_pair(c);
  std::vector<NormRow> rows;
  for (const auto& n : c.report.norms) {
    const NormSpec spec = n.kind == "besov" ? NormSpec::besov(n.s, n.p, n.r, n.homogeneous)
                                            : NormSpec::sobolev(n.s, n.p, n.homogeneous);
    rows.push_back(make_norm_row("u0:" + spec.label(), spec, norm_report(pair.u0, spec)));
    rows.push_back(make_norm_row("u1:" + spec.label(), spec, norm_report(pair.u1, spec)));
  }
  std::ostringstream csv;
  write_norm_rows(csv, rows);
  art.text("norms.csv", csv.str());

  json exps = json::array();
  for (double p : c.report.p_values) {
    json e;
    e["p"] = p;
    e["s_p"] = critical_regularity(p);
    e["beta_p"] = p > 1.0 && p < 5.0 ? json(beta_p(p)) : json(nullptr);
    const int a = alpha_p(p);
    e["alpha_p"] = a;
    json qk = json::array();
    for (int k = 1; k <= std::max(1, a + 1); ++k) qk.push_back(holder_q_k(p, k));
    e["q_k"] = qk;
    try {
      e["r_p"] = exponent_value(holder_r_p(p));
    } catch (const InvalidArgument&) {
      e["r_p"] = nullptr;
    }
    exps.push_back(e);
  }
  json crit;
  crit["exponents"] = exps;
  if (c.report.yudovich) {
    const auto& y = *c.report.yudovich;
    const RandomizationSpec spec = randomization_spec(c);
    const WavePair sample = sample_randomized_pair(spec, c.randomization.first_sample);
    const YudovichDerivation d = derive_yudovich_params(sample, y.cutoff_j, y.p, y.T, y.q0, y.q_grid);
    json yj;
    yj["p"] = y.p;
    yj["sample"] = c.randomization.first_sample;
    yj["cutoff_j"] = y.cutoff_j;
    yj["a"] = d.a;
    yj["b"] = d.b;
    yj["lambda0"] = d.params.lambda0;
    yj["C"] = d.params.C;
    yj["q0"] = d.params.q0;
    yj["alpha"] = d.params.alpha;
    json times = json::array();
    for (double q : y.q_grid) times.push_back({{"q", q}, {"yudovich_time", yudovich_time(d.params, q)}});
    yj["times"] = times;
    crit["yudovich"] = yj;
    log << "report: lambda0 = " << d.params.lambda0 << ", C = " << d.params.C << ", alpha = " << d.params.alpha << "\n";
  }
  art.text("critical.json", crit.dump(2) + "\n");
  return finish(art, c, "");
}

}  // namespace

WavePair base_pair(const RunConfig& c) {
  const TorusGrid grid = c.torus();
  const auto& d = c.data;
  if (d.kind == "zero") return zero_pair(grid);
  if (d.kind == "mode") {
    const Wavenumber n{d.wavenumber[0], d.wavenumber[1], d.wavenumber[2]};
    const bool mean = n == Wavenumber{0, 0, 0};
    // A cos(n.x) is A/2 on each of e_n and e_{-n}.
    auto cosine = [&](double amp) {
      return mean ? SpectralField::constant(grid, amp) : SpectralField::mode(grid, n, 0.5 * amp);
    };
    return {cosine(d.amplitude), cosine(d.velocity_amplitude)};
  }
  if (d.kind == "power_law") {
    return {power_law_field(grid, d.sigma, d.amplitude, true),
            power_law_field(grid, d.sigma1.value_or(d.sigma - 1.0), d.amplitude, true)};
  }
  if (d.kind == "files") {
    auto rebase = [&](const std::string& file) {
      const SpectralField f = load_field(file);
      if (!f.grid().same_modes(grid)) throw ConfigError("data file '" + file + "' does not match the configured grid");
      return SpectralField::from_coefficients(grid, {f.coefficients().begin(), f.coefficients().end()});
    };
    return {rebase(d.u0_file), rebase(d.u1_file)};
  }
  throw ConfigError("config: unknown data.kind '" + d.kind + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunOutcome run(const RunConfig& config, std::ostream& log) {
  validate(config);
  set_worker_threads(config.threads);
  Artifacts art(config.output_dir);
  // The worker cap does not influence any output, so the recorded config omits
  // it and manifests stay identical across thread counts.
  RunConfig recorded = config;
  recorded.threads = 0;
  art.text("config.json", config_to_json(recorded));
  switch (config.mode) {
    case Mode::simulate: return run_simulate(config, art, log);
    case Mode::remainder: return run_remainder(config, art, log);
    case Mode::ensemble: return run_ensemble(config, art, log);
    case Mode::tails: return run_tails(config, art, log);
    case Mode::inequalities: return run_inequalities(config, art, log);
    case Mode::report: return run_report(config, art, log);
  }
  throw ConfigError("unknown mode");
}

}  // namespace wavelab::runner
