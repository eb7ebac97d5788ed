#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "runner/run_config.hpp"
#include "runner/runner.hpp"
#include "wavelab/field_io.hpp"

using namespace wavelab;
using namespace wavelab::runner;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch_root() {
  static const struct Root {
    fs::path path = fs::temp_directory_path() / ("wavelab_test_runner_" + std::to_string(::getpid()));
    ~Root() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } root;
  return root.path;
}

fs::path scratch(const std::string& name) {
  const fs::path p = scratch_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig quick(Mode mode, const fs::path& out) {
  RunConfig c;
  c.mode = mode;
  c.output_dir = out.string();
  c.grid.N = 64;
  c.galerkin.cutoff_j = 3;
  c.galerkin.dt = 0.01;
  c.galerkin.T = 0.2;
  return c;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + WAVELAB_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config: serialization round trip") {
  RunConfig c;
  c.mode = Mode::ensemble;
  c.seed = 99;
  c.grid = {2, 32, 3};
  c.galerkin.p = 5.0;
  c.data.kind = "power_law";
  c.data.sigma1 = 0.25;
  c.randomization.family = "rademacher";
  c.randomization.c = 0.75;
  c.ensemble.cutoffs = {1, 2};
  c.tails.q1 = std::numeric_limits<double>::infinity();
  c.report.yudovich = YudovichSection{};
  const std::string text = config_to_json(c);
  const RunConfig back = parse_config(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.mode == Mode::ensemble);
  CHECK(back.grid.dim == 2);
  CHECK(back.data.sigma1.value() == 0.25);
  CHECK(back.randomization.c.value() == 0.75);
  CHECK(std::isinf(back.tails.q1));
  CHECK(back.report.yudovich.has_value());
  for (Mode m : {Mode::simulate, Mode::remainder, Mode::ensemble, Mode::inequalities, Mode::tails, Mode::report}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("integrate"), ConfigError);
}

TEST_CASE("config: strict parsing") {
  CHECK_NOTHROW(parse_config("{}"));
  CHECK_THROWS_AS(parse_config("{\"grid\": {\"dims\": 2}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"colour\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"grid\": {\"N\": \"64\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"grid\": {\"N\": 64.5}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"randomization\": {\"samples\": -3}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  try {
    parse_config("{\"galerkin\": {\"dtt\": 1}}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("galerkin.dtt") != std::string::npos);
  }
}

TEST_CASE("config: overrides and mode binding") {
  std::string text = apply_override("{}", "galerkin.dt=5e-4");
  text = apply_override(text, "data.kind=power_law");
  text = apply_override(text, "ensemble.cutoffs=[2,3]");
  const RunConfig c = parse_config(text);
  CHECK(c.galerkin.dt == 5e-4);
  CHECK(c.data.kind == "power_law");
  CHECK(c.ensemble.cutoffs == std::vector<int>{2, 3});
  CHECK_THROWS_AS(apply_override("{}", "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override("{}", "=3"), ConfigError);

  CHECK(load_config("{}", Mode::tails, {"seed=5"}).seed == 5);
  CHECK(load_config("{}", Mode::tails, {}).mode == Mode::tails);
  CHECK_THROWS_AS(load_config("{\"mode\": \"simulate\"}", Mode::tails, {}), ConfigError);
  CHECK_NOTHROW(load_config("{\"mode\": \"tails\"}", Mode::tails, {}));
}

TEST_CASE("config: validation catches what the solver would reject") {
  const fs::path out = scratch("validate");
  RunConfig ok = quick(Mode::simulate, out);
  CHECK_NOTHROW(validate(ok));
  auto expect_bad = [&](auto mutate) {
    RunConfig c = ok;
    mutate(c);
    CHECK_THROWS_AS(validate(c), ConfigError);
  };
  expect_bad([](RunConfig& c) { c.grid.N = 48; });
  expect_bad([](RunConfig& c) { c.grid.dim = 4; });
  expect_bad([](RunConfig& c) { c.galerkin.cutoff_j = 5; });
  expect_bad([](RunConfig& c) { c.galerkin.dt = 0.0; });
  expect_bad([](RunConfig& c) { c.data.kind = "noise"; });
  expect_bad([](RunConfig& c) { c.data.wavenumber = {32, 0, 0}; });  // Nyquist face
  expect_bad([](RunConfig& c) {
    c.data.kind = "files";
    c.data.u0_file = "/nonexistent/u0.wlf";
  });
  RunConfig e = quick(Mode::ensemble, out);
  e.ensemble.cutoffs = {2, 3};
  CHECK_NOTHROW(validate(e));
  e.ensemble.eta = 1.0;
  CHECK_THROWS_AS(validate(e), ConfigError);
  e.ensemble.eta = 0.1;
  e.ensemble.cutoffs = {3, 9};
  CHECK_THROWS_AS(validate(e), ConfigError);
  RunConfig t = quick(Mode::tails, out);
  t.tails.time_nodes = 10;
  CHECK_THROWS_AS(validate(t), ConfigError);
  RunConfig r = quick(Mode::report, out);
  r.report.yudovich = YudovichSection{};
  r.report.yudovich->cutoff_j = 3;
  CHECK_NOTHROW(validate(r));
  r.report.yudovich->q0 = 5.0;  // below beta_4 = 9
  CHECK_THROWS_AS(validate(r), ConfigError);
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("simulate: zero data gives an all-zero trajectory") {
  const fs::path out = scratch("zero");
  RunConfig c = quick(Mode::simulate, out);
  c.data.kind = "zero";
  std::ostringstream log;
  const RunOutcome r = run(c, log);
  CHECK(r.exit_code == kExitOk);
  std::istringstream csv(slurp(out / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');  // time
    while (std::getline(fields, cell, ',')) CHECK(std::stod(cell) == 0.0);
  }
  CHECK(rows == 21);
  const json s = json::parse(slurp(out / "summary.json"));
  CHECK(s.at("status") == "completed");
  CHECK(s.at("E_final") == 0.0);
}

TEST_CASE("reruns produce byte-identical manifests") {
  const fs::path a = scratch("rerun");
  for (Mode m : {Mode::simulate, Mode::remainder, Mode::tails}) {
    RunConfig ca = quick(m, a);
    ca.data.kind = "power_law";
    ca.galerkin.checkpoint = true;
    ca.tails.samples = 200;
    RunConfig cb = ca;
    cb.threads = 3;
    std::ostringstream log;
    const RunOutcome ra = run(ca, log);
    const std::string first = slurp(ra.manifest);
    const RunOutcome rb = run(cb, log);
    INFO(to_string(m));
    CHECK(ra.exit_code == kExitOk);
    CHECK(first == slurp(rb.manifest));
    const json man = json::parse(first);
    CHECK(man.at("mode") == to_string(m));
    for (const auto& f : man.at("files")) {
      CHECK(sha256_file(a / f.at("path").get<std::string>()) == f.at("sha256"));
      CHECK(fs::file_size(a / f.at("path").get<std::string>()) == f.at("bytes").get<std::uintmax_t>());
    }
    // A different seed changes the randomized artifacts.
    if (m != Mode::simulate) {
      RunConfig cc = ca;
      cc.seed = 2;
      CHECK(slurp(run(cc, log).manifest) != first);
    }
  }
  // Checkpoints read back through the field codec.
  const SpectralField u = load_field(a / "final_v.wlf");
  CHECK(u.grid().modes_per_axis() == 64);
}

TEST_CASE("ensemble: fifty p = 7 samples in one dimension") {
  const fs::path out = scratch("ensemble");
  RunConfig c = quick(Mode::ensemble, out);
  c.galerkin.p = 7.0;
  c.data.kind = "power_law";
  c.data.sigma = 1.2;
  c.randomization.samples = 50;
  c.ensemble.cutoffs = {3};
  std::ostringstream log;
  const RunOutcome r = run(c, log);
  CHECK(r.exit_code == kExitOk);
  int traces = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("trace_s", 0) == 0 && e.path().extension() == ".csv") ++traces;
  }
  CHECK(traces == 50);
  CHECK(fs::exists(out / "trace_s000049_j03.csv"));
  const json a = json::parse(slurp(out / "apriori_bound.json"));
  CHECK(a.at("per_sample_sup").size() == 50);
  CHECK(a.at("quantile").get<double>() > 0.0);
  const json s = json::parse(slurp(out / "summary.json"));
  CHECK(s.at("runs").size() == 50);
  CHECK(s.at("blowups") == 0);
}

TEST_CASE("report and inequalities modes write their artifacts") {
  const fs::path out = scratch("report");
  RunConfig c = quick(Mode::report, out);
  c.data.kind = "power_law";
  std::ostringstream log;
  CHECK(run(c, log).exit_code == kExitOk);
  const json crit = json::parse(slurp(out / "critical.json"));
  CHECK(crit.contains("exponents"));
  CHECK(slurp(out / "norms.csv").find("\"u0:B^0.5_2,2\"") != std::string::npos);

  const fs::path iq = scratch("inequalities");
  RunConfig ci = quick(Mode::inequalities, iq);
  ci.inequalities.corpus_size = 12;
  ci.inequalities.adversarial = 4;
  CHECK(run(ci, log).exit_code == kExitOk);
  const json reps = json::parse(slurp(iq / "inequalities.json"));
  CHECK(reps.size() == 15);
  for (const auto& rep : reps) CHECK(rep.at("pass") == true);
}

TEST_CASE("blowup still writes artifacts and reports its own status") {
  const fs::path out = scratch("blowup");
  RunConfig c = quick(Mode::simulate, out);
  c.data.amplitude = 10.0;
  c.galerkin.dt = 0.2;
  c.galerkin.T = 2.0;
  std::ostringstream log;
  const RunOutcome r = run(c, log);
  CHECK(r.exit_code == kExitBlowup);
  CHECK(r.diagnostic.find("blowup guard") != std::string::npos);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(json::parse(slurp(out / "summary.json")).at("status") == "blowup");
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  const fs::path cfg = dir / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"grid": {"N": 64}, "galerkin": {"cutoff_j": 3, "dt": 0.05, "T": 0.2}, "output_dir": ")"
      << (dir / "out").string() << "\"}";
  }
  const fs::path log = dir / "log.txt";
  CHECK(run_cli("simulate --config \"" + cfg.string() + "\"", log) == kExitOk);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(run_cli("simulate --config \"" + cfg.string() + "\" --set galerkin.cutoff_j=9", log) == kExitInvalidConfig);
  CHECK(slurp(log).find("invalid configuration") != std::string::npos);
  CHECK(run_cli("simulate --config \"" + cfg.string() + "\" --set grid.bogus=1", log) == kExitInvalidConfig);
  CHECK(run_cli("simulate --config /nonexistent.json", log) == kExitInvalidConfig);
  CHECK(run_cli("bogus --config \"" + cfg.string() + "\"", log) == kExitInvalidConfig);
  CHECK(run_cli("simulate --config \"" + cfg.string() +
                    "\" --set data.amplitude=10 --set galerkin.dt=0.2 --set galerkin.T=2 --set galerkin.p=7",
                log) == kExitBlowup);
  CHECK(slurp(log).find("blowup") != std::string::npos);
  CHECK(run_cli("simulate", log) != kExitOk);  // missing --config
}
