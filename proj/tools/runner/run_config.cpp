#include "run_config.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wavelab/error.hpp"
#include "wavelab/yudovich.hpp"

namespace wavelab::runner {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads the keys of one JSON object and rejects whatever is left over.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  const json* take(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "must be a number");
      out = v->get<double>();
    }
  }

  // Numbers plus the strings "inf" / "infinity".
  void exponent(const char* key, double& out) {
    if (const json* v = take(key)) out = read_exponent(*v, key);
  }

  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "must be an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "out of range");
      out = static_cast<int>(x);
    }
  }

  template <typename Unsigned>
  void count(const char* key, Unsigned& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned()) {
        fail(key, "must be a non-negative integer");
      }
      const auto x = v->get<std::uint64_t>();
      if (x > std::numeric_limits<Unsigned>::max()) fail(key, "out of range");
      out = static_cast<Unsigned>(x);
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "must be a string");
      out = v->get<std::string>();
    }
  }

  void optional_number(const char* key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "must be a number or null");
      }
    }
  }

  void integer_list(const char* key, std::vector<int>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "must be an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) fail(key, "must be an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

  void exponent_list(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "must be an array of numbers");
      out.clear();
      for (const auto& e : *v) out.push_back(read_exponent(e, key));
    }
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key().c_str(), "unknown key");
    }
  }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    std::string where = path_;
    if (key && *key) where = child_path(key);
    throw ConfigError("config: " + (where.empty() ? std::string("document") : where) + ": " + what);
  }

 private:
  double read_exponent(const json& v, const char* key) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return kInf;
    }
    fail(key, "must be a number or \"inf\"");
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json exponent_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json exponent_list_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(exponent_json(x));
  return a;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::remainder: return "remainder";
    case Mode::ensemble: return "ensemble";
    case Mode::inequalities: return "inequalities";
    case Mode::tails: return "tails";
    case Mode::report: return "report";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::simulate, Mode::remainder, Mode::ensemble, Mode::inequalities, Mode::tails, Mode::report}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + name + "' (simulate, remainder, ensemble, inequalities, tails, report)");
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section top(doc, "");
  if (const json* m = top.take("mode")) {
    if (!m->is_string()) top.fail("mode", "must be a string");
    c.mode = parse_mode(m->get<std::string>());
  }
  top.count("seed", c.seed);
  top.count("threads", c.threads);
  top.string("output_dir", c.output_dir);

  if (const json* v = top.take("grid")) {
    Section s(*v, "grid");
    s.integer("dim", c.grid.dim);
    s.integer("N", c.grid.N);
    s.integer("rho", c.grid.rho);
    s.finish();
  }
  if (const json* v = top.take("galerkin")) {
    Section s(*v, "galerkin");
    s.number("p", c.galerkin.p);
    s.integer("cutoff_j", c.galerkin.cutoff_j);
    s.number("dt", c.galerkin.dt);
    s.number("T", c.galerkin.T);
    s.number("blowup_guard", c.galerkin.blowup_guard);
    s.integer("snapshot_stride", c.galerkin.snapshot_stride);
    s.boolean("checkpoint", c.galerkin.checkpoint);
    s.finish();
  }
  if (const json* v = top.take("data")) {
    Section s(*v, "data");
    s.string("kind", c.data.kind);
    s.number("amplitude", c.data.amplitude);
    s.number("velocity_amplitude", c.data.velocity_amplitude);
    if (const json* k = s.take("wavenumber")) {
      if (!k->is_array() || k->empty() || k->size() > 3) s.fail("wavenumber", "must be an array of 1 to 3 integers");
      c.data.wavenumber = {0, 0, 0};
      for (std::size_t i = 0; i < k->size(); ++i) {
        if (!(*k)[i].is_number_integer()) s.fail("wavenumber", "must be an array of 1 to 3 integers");
        c.data.wavenumber[i] = (*k)[i].get<int>();
      }
    }
    s.number("sigma", c.data.sigma);
    s.optional_number("sigma1", c.data.sigma1);
    s.string("u0_file", c.data.u0_file);
    s.string("u1_file", c.data.u1_file);
    s.finish();
  }
  if (const json* v = top.take("randomization")) {
    Section s(*v, "randomization");
    s.string("family", c.randomization.family);
    s.optional_number("c", c.randomization.c);
    s.count("samples", c.randomization.samples);
    s.count("first_sample", c.randomization.first_sample);
    s.finish();
  }
  if (const json* v = top.take("ensemble")) {
    Section s(*v, "ensemble");
    s.integer_list("cutoffs", c.ensemble.cutoffs);
    s.number("eta", c.ensemble.eta);
    s.finish();
  }
  if (const json* v = top.take("tails")) {
    Section s(*v, "tails");
    s.number("T", c.tails.T);
    s.exponent("q1", c.tails.q1);
    s.exponent("q2", c.tails.q2);
    s.exponent("r", c.tails.r);
    s.number("s", c.tails.s);
    s.integer("time_nodes", c.tails.time_nodes);
    s.count("samples", c.tails.samples);
    s.string("operator", c.tails.op);
    s.integer("cutoff_j", c.tails.cutoff_j);
    s.integer("lambda_points", c.tails.lambda_points);
    s.finish();
  }
  if (const json* v = top.take("inequalities")) {
    Section s(*v, "inequalities");
    s.count("corpus_size", c.inequalities.corpus_size);
    s.count("adversarial", c.inequalities.adversarial);
    s.integer("extent", c.inequalities.extent);
    s.number("p", c.inequalities.p);
    s.finish();
  }
  if (const json* v = top.take("report")) {
    Section s(*v, "report");
    s.exponent_list("p_values", c.report.p_values);
    if (const json* n = s.take("norms")) {
      if (!n->is_array()) s.fail("norms", "must be an array of objects");
      c.report.norms.clear();
      for (std::size_t i = 0; i < n->size(); ++i) {
        Section e((*n)[i], "report.norms[" + std::to_string(i) + "]");
        NormEntry entry;
        e.string("kind", entry.kind);
        e.number("s", entry.s);
        e.exponent("p", entry.p);
        e.exponent("r", entry.r);
        e.boolean("homogeneous", entry.homogeneous);
        e.finish();
        c.report.norms.push_back(entry);
      }
    }
    if (const json* y = s.take("yudovich")) {
      if (y->is_null()) {
        c.report.yudovich.reset();
      } else {
        Section e(*y, "report.yudovich");
        YudovichSection ys;
        e.number("p", ys.p);
        e.number("q0", ys.q0);
        e.exponent_list("q_grid", ys.q_grid);
        e.integer("cutoff_j", ys.cutoff_j);
        e.number("T", ys.T);
        e.finish();
        c.report.yudovich = ys;
      }
    }
    s.finish();
  }
  top.finish();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  j["grid"] = {{"dim", c.grid.dim}, {"N", c.grid.N}, {"rho", c.grid.rho}};
  j["galerkin"] = {{"p", c.galerkin.p},
                   {"cutoff_j", c.galerkin.cutoff_j},
                   {"dt", c.galerkin.dt},
                   {"T", c.galerkin.T},
                   {"blowup_guard", c.galerkin.blowup_guard},
                   {"snapshot_stride", c.galerkin.snapshot_stride},
                   {"checkpoint", c.galerkin.checkpoint}};
  j["data"] = {{"kind", c.data.kind},
               {"amplitude", c.data.amplitude},
               {"velocity_amplitude", c.data.velocity_amplitude},
               {"wavenumber", c.data.wavenumber},
               {"sigma", c.data.sigma},
               {"sigma1", c.data.sigma1 ? json(*c.data.sigma1) : json(nullptr)},
               {"u0_file", c.data.u0_file},
               {"u1_file", c.data.u1_file}};
  j["randomization"] = {{"family", c.randomization.family},
                        {"c", c.randomization.c ? json(*c.randomization.c) : json(nullptr)},
                        {"samples", c.randomization.samples},
                        {"first_sample", c.randomization.first_sample}};
  j["ensemble"] = {{"cutoffs", c.ensemble.cutoffs}, {"eta", c.ensemble.eta}};
  j["tails"] = {{"T", c.tails.T},
                {"q1", exponent_json(c.tails.q1)},
                {"q2", exponent_json(c.tails.q2)},
                {"r", exponent_json(c.tails.r)},
                {"s", c.tails.s},
                {"time_nodes", c.tails.time_nodes},
                {"samples", c.tails.samples},
                {"operator", c.tails.op},
                {"cutoff_j", c.tails.cutoff_j},
                {"lambda_points", c.tails.lambda_points}};
  j["inequalities"] = {{"corpus_size", c.inequalities.corpus_size},
                       {"adversarial", c.inequalities.adversarial},
                       {"extent", c.inequalities.extent},
                       {"p", c.inequalities.p}};
  json norms = json::array();
  for (const auto& n : c.report.norms) {
    norms.push_back({{"kind", n.kind},
                     {"s", n.s},
                     {"p", exponent_json(n.p)},
                     {"r", exponent_json(n.r)},
                     {"homogeneous", n.homogeneous}});
  }
  json report;
  report["p_values"] = exponent_list_json(c.report.p_values);
  report["norms"] = norms;
  if (c.report.yudovich) {
    const auto& y = *c.report.yudovich;
    report["yudovich"] = {{"p", y.p},
                          {"q0", y.q0},
                          {"q_grid", exponent_list_json(y.q_grid)},
                          {"cutoff_j", y.cutoff_j},
                          {"T", y.T}};
  } else {
    report["yudovich"] = nullptr;
  }
  j["report"] = report;
  return j.dump(2) + "\n";
}

std::string apply_override(const std::string& json_text, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "': empty path component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override '" + assignment + "': '" + key + "' is not inside an object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
  return doc.dump(2);
}

RunConfig load_config(const std::string& json_text, Mode mode, const std::vector<std::string>& overrides) {
  std::string text = json_text;
  for (const auto& o : overrides) text = apply_override(text, o);
  RunConfig c = parse_config(text);
  const json doc = json::parse(text);
  if (doc.contains("mode") && c.mode != mode) {
    throw ConfigError("config: mode '" + to_string(c.mode) + "' disagrees with the requested mode '" + to_string(mode) + "'");
  }
  c.mode = mode;
  return c;
}

TorusGrid RunConfig::torus() const { return TorusGrid(grid.dim, grid.N, grid.rho); }

GalerkinConfig RunConfig::galerkin_config() const {
  GalerkinConfig g;
  g.p = galerkin.p;
  g.cutoff_j = galerkin.cutoff_j;
  g.dt = galerkin.dt;
  g.T = galerkin.T;
  g.grid = torus();
  g.blowup_guard = galerkin.blowup_guard;
  g.snapshot_stride = galerkin.snapshot_stride;
  return g;
}

TailConfig RunConfig::tail_config() const {
  TailConfig t;
  t.T = tails.T;
  t.q1 = tails.q1;
  t.q2 = tails.q2;
  t.r = tails.r;
  t.s = tails.s;
  t.time_nodes = tails.time_nodes;
  t.samples = tails.samples;
  t.op = tails.op == "z_tilde" ? TailOperator::z_tilde : TailOperator::z;
  t.cutoff_j = tails.cutoff_j;
  t.lambda_points = tails.lambda_points;
  return t;
}

CoefficientDistribution RunConfig::distribution() const {
  auto d = CoefficientDistribution::standard(parse_family(randomization.family));
  if (randomization.c) d.subgaussian_constant = *randomization.c;
  return d;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& what) -> void { throw ConfigError("config: " + what); };
  std::optional<TorusGrid> grid;
  try {
    grid.emplace(c.torus());
  } catch (const wavelab::Error& e) {
    bad(std::string("grid: ") + e.what());
  }
  const int N = c.grid.N;
  if (N & (N - 1)) bad("grid.N must be a power of two");
  if (c.output_dir.empty()) bad("output_dir must not be empty");

  auto check_galerkin = [&](const GalerkinConfig& g) {
    try {
      g.validate();
    } catch (const wavelab::Error& e) {
      bad(e.what());
    }
  };
  auto check_data = [&] {
    const auto& d = c.data;
    if (d.kind == "zero") return;
    if (!std::isfinite(d.amplitude)) bad("data.amplitude must be finite");
    if (d.kind == "mode") {
      for (int i = c.grid.dim; i < 3; ++i) {
        if (d.wavenumber[i] != 0) bad("data.wavenumber has components beyond grid.dim");
      }
      if (!grid->in_cube({d.wavenumber[0], d.wavenumber[1], d.wavenumber[2]})) {
        bad("data.wavenumber lies outside the retained cube");
      }
      for (int i = 0; i < c.grid.dim; ++i) {
        if (d.wavenumber[i] == -N / 2) bad("data.wavenumber sits on a Nyquist face");
      }
      if (!std::isfinite(d.velocity_amplitude)) bad("data.velocity_amplitude must be finite");
    } else if (d.kind == "power_law") {
      if (!std::isfinite(d.sigma)) bad("data.sigma must be finite");
      if (d.sigma1 && !std::isfinite(*d.sigma1)) bad("data.sigma1 must be finite");
    } else if (d.kind == "files") {
      if (d.u0_file.empty() || d.u1_file.empty()) bad("data.kind = files needs u0_file and u1_file");
      for (const auto& f : {d.u0_file, d.u1_file}) {
        if (!std::filesystem::is_regular_file(f)) bad("data file '" + f + "' does not exist");
      }
    } else {
      bad("data.kind must be one of mode, power_law, files, zero");
    }
  };
  auto check_randomization = [&] {
    try {
      (void)parse_family(c.randomization.family);
    } catch (const wavelab::Error& e) {
      bad(std::string("randomization.family: ") + e.what());
    }
    if (c.randomization.c && !(*c.randomization.c > 0.0)) bad("randomization.c must be positive");
    if (c.randomization.samples == 0) bad("randomization.samples must be >= 1");
  };

  switch (c.mode) {
    case Mode::simulate:
      check_galerkin(c.galerkin_config());
      check_data();
      break;
    case Mode::remainder:
      check_galerkin(c.galerkin_config());
      check_data();
      check_randomization();
      break;
    case Mode::ensemble: {
      check_data();
      check_randomization();
      if (c.ensemble.cutoffs.empty()) bad("ensemble.cutoffs must not be empty");
      for (int j : c.ensemble.cutoffs) {
        GalerkinConfig g = c.galerkin_config();
        g.cutoff_j = j;
        check_galerkin(g);
      }
      if (!(c.ensemble.eta > 0.0 && c.ensemble.eta < 1.0)) bad("ensemble.eta must lie in (0, 1)");
      break;
    }
    case Mode::tails: {
      check_data();
      check_randomization();
      const auto& t = c.tails;
      if (!(t.T > 0.0) || !std::isfinite(t.T)) bad("tails.T must be positive");
      if (!(t.q1 >= 1.0) || !(t.q2 >= 1.0) || !(t.r >= 1.0)) bad("tails exponents must be >= 1");
      if (!std::isfinite(t.s)) bad("tails.s must be finite");
      if (t.time_nodes < 64) bad("tails.time_nodes must be >= 64");
      if (t.samples < 100) bad("tails.samples must be >= 100");
      if (t.op != "z" && t.op != "z_tilde") bad("tails.operator must be z or z_tilde");
      if (t.cutoff_j < -1) bad("tails.cutoff_j must be >= -1");
      if (t.lambda_points < 10) bad("tails.lambda_points must be >= 10");
      break;
    }
    case Mode::inequalities: {
      const auto& q = c.inequalities;
      if (q.corpus_size == 0) bad("inequalities.corpus_size must be >= 1");
      if (q.extent < 0 || q.extent >= N / 2) bad("inequalities.extent must lie in [0, N/2)");
      if (!(q.p > 3.0) || !std::isfinite(q.p)) bad("inequalities.p must be a finite real > 3");
      break;
    }
    case Mode::report: {
      check_data();
      for (double p : c.report.p_values) {
        if (!(p >= 1.0) || !std::isfinite(p)) bad("report.p_values entries must be finite and >= 1");
      }
      for (const auto& n : c.report.norms) {
        if (n.kind != "besov" && n.kind != "sobolev") bad("report.norms kind must be besov or sobolev");
        if (!(n.p >= 1.0) || !(n.r >= 1.0) || !std::isfinite(n.s)) bad("report.norms exponents out of range");
      }
      if (c.report.yudovich) {
        const auto& y = *c.report.yudovich;
        check_randomization();
        if (!(y.p > 3.0 && y.p < 5.0)) bad("report.yudovich.p must lie in (3, 5)");
        if (!(y.q0 > beta_p(y.p))) bad("report.yudovich.q0 must exceed beta_p = " + std::to_string(beta_p(y.p)));
        if (y.q_grid.empty()) bad("report.yudovich.q_grid must not be empty");
        for (double q : y.q_grid) {
          if (!(q >= y.q0) || !std::isfinite(q)) bad("report.yudovich.q_grid entries must be finite and >= q0");
        }
        if (!(y.T > 0.0) || !std::isfinite(y.T)) bad("report.yudovich.T must be positive");
        GalerkinConfig g = c.galerkin_config();
        g.cutoff_j = y.cutoff_j;
        g.p = y.p;
        g.T = std::max(y.T, g.dt);
        check_galerkin(g);
      }
      break;
    }
  }
}

}  // namespace wavelab::runner
