#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cqed/harness/cache.hpp"
#include "cqed/harness/commands.hpp"
#include "cqed/harness/config.hpp"
#include "cqed/harness/csv.hpp"
#include "cqed/harness/figures.hpp"
#include "cqed/harness/pool.hpp"

using namespace cqed;
using namespace cqed::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("readout-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_first_line(const std::string& text) {
  return text.substr(text.find('\n') + 1);
}

ConfigValues parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "run.cfg");
}

} // namespace

TEST_CASE("config parsing is strict") {
  const ConfigValues ok = parse("# near-term\nQ = 2e5\n\nr_g=5   # cyclic\n");
  CHECK(ok.issues.empty());
  CHECK(ok.values.at("Q") == "2e5");
  CHECK(ok.values.at("r_g") == "5");
  CHECK(ok.lines.at("r_g") == 4);

  const ConfigValues bad = parse("Q = 1e5\nbogus = 3\nQ = 2e5\neta_cav =\njust words\n");
  REQUIRE(bad.issues.size() == 4);
  CHECK(bad.issues[0].line == 2);
  CHECK(bad.issues[0].key == "bogus");
  CHECK(bad.issues[1].line == 3);
  CHECK(bad.issues[2].key == "eta_cav");
  CHECK(bad.issues[3].line == 5);
  CHECK(bad.issues[0].describe().find("run.cfg:2") == 0);

  CHECK(flag_name("t_pulse_ns") == "t-pulse-ns");
  CHECK(flag_name("P_in_pW") == "p-in-pw");
  CHECK(is_known_key("gamma_sd_GHz"));
  CHECK_FALSE(is_known_key("gamma"));
}

TEST_CASE("ranges") {
  std::string err;
  const auto lin = parse_range("r_g=1:5:5", &err);
  REQUIRE(lin);
  CHECK(lin->values == std::vector<double>{1, 2, 3, 4, 5});
  const auto lg = parse_range("P_in_pW = 0.1:100:4:log", &err);
  REQUIRE(lg);
  CHECK(lg->values[1] == doctest::Approx(1.0));
  CHECK(lg->values[3] == doctest::Approx(100.0));
  const auto list = parse_range("eta_cav=0.3,0.5,0.8", &err);
  REQUIRE(list);
  CHECK(list->values.size() == 3);
  CHECK_FALSE(parse_range("r_g=5:5:3", &err));
  CHECK(err.find("positive length") != std::string::npos);
  CHECK_FALSE(parse_range("r_g=5:1:3", &err));
  CHECK_FALSE(parse_range("nope=1,2", &err));
  CHECK_FALSE(parse_range("wait_mode=1,2", &err));
  CHECK_FALSE(parse_range("r_g=1:2:0", &err));
}

TEST_CASE("resolution and validation") {
  RunConfig rc;
  rc.command = "fluorescence";
  Resolution r = resolve(rc);
  CHECK(r.ok());
  CHECK(r.config.P_in == doctest::Approx(1e-10));
  CHECK(r.config.t_pulse == doctest::Approx(1e-8));
  CHECK(validation_report(rc)["valid"] == true);

  rc.command = "reflection";
  CHECK(resolve(rc).config.t_pulse == doctest::Approx(47e-6));

  rc.file = parse("gamma_GHz = 0.0001\nr_g = 3\n");
  rc.flags["eta_cav"] = "1.5";
  r = resolve(rc);
  REQUIRE(r.issues.size() == 2);
  bool named_gamma = false, named_eta = false;
  for (const auto& i : r.issues) {
    if (i.key == "gamma_GHz" && i.line == 1 && i.message.find("Gamma >= Gamma0") != std::string::npos) named_gamma = true;
    if (i.key == "eta_cav" && i.source == "flag") named_eta = true;
  }
  CHECK(named_gamma);
  CHECK(named_eta);
  CHECK(validation_report(rc)["valid"] == false);

  RunConfig flags;
  flags.command = "fluorescence";
  flags.file = parse("r_g = 3\n");
  flags.flags["r_g"] = "7";
  flags.flags["delta_a_GHz"] = "0.5";
  const Resolution fr = resolve(flags);
  CHECK(fr.config.system.r_g == 7);
  CHECK_FALSE(fr.ok());

  RunConfig unknown;
  unknown.command = "fluorescence";
  unknown.preset = "fig9";
  CHECK_FALSE(resolve(unknown).ok());
  unknown.preset = "fig2ab";
  CHECK(resolve(unknown).config.system.Q == 1e5);
  CHECK(resolve(unknown).config.system.Gamma == doctest::Approx(ghz(1.0)));
}

TEST_CASE("canonical text and hashing") {
  RunConfig rc;
  rc.command = "fluorescence";
  const ResolvedConfig a = resolve(rc).config;
  rc.flags["r_g"] = "10.000000001";
  const ResolvedConfig b = resolve(rc).config;
  CHECK(canonical_text(a, "fluorescence") == canonical_text(resolve(RunConfig{}).config, "fluorescence"));
  CHECK(canonical_text(a, "fluorescence") != canonical_text(b, "fluorescence"));
  CHECK(config_hash("x").size() == 16);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("csv formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(123456789012.0) == "1.23456789e+11");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  CHECK(format_number(0.0) == "0");

  CsvTable t({"x", "y"});
  t.add_row({1.0, 2.0 / 3.0});
  t.add_note("grid 1x1");
  const std::string text = t.render();
  CHECK(text.rfind("# generated ", 0) == 0);
  CHECK(without_first_line(text) == "# grid 1x1\nx,y\n1,0.666666667\n");
  CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
}

TEST_CASE("result cache") {
  const fs::path dir = scratch("cache");
  const ResultCache cache(dir);
  const Json payload{{"fidelity", 0.99969357708966311}, {"N", 433}};
  cache.store("abc", make_record("abc", payload, Json{{"fock_dim", 4}}));
  const auto hit = cache.load("abc");
  REQUIRE(hit);
  CHECK((*hit)["payload"]["fidelity"].get<double>() == 0.99969357708966311);
  CHECK((*hit)["config_hash"] == "abc");
  CHECK(hit->contains("timestamp"));
  CHECK(hit->contains("engine_version"));
  CHECK_FALSE(cache.load("missing"));

  int calls = 0;
  auto compute = [&](Json& prov) {
    ++calls;
    prov["grid"] = 3;
    return Json{{"value", 1.0 / 7.0}};
  };
  const Json first = cached(cache, "key text", compute);
  const Json second = cached(cache, "key text", compute);
  CHECK(calls == 1);
  CHECK(first == second);

  const ResultCache off(scratch("cache-off"), false);
  cached(off, "key text", compute);
  cached(off, "key text", compute);
  CHECK(calls == 3);
  CHECK(fs::is_empty(off.dir()));

  CHECK(default_cache_dir("out") == fs::path("out") / ".readout-cache");
}

TEST_CASE("worker pool keeps order and reports errors") {
  const auto squares = parallel_map<int>(100, 4, [](std::size_t i) { return int(i * i); });
  for (std::size_t i = 0; i < squares.size(); ++i) CHECK(squares[i] == int(i * i));
  CHECK_THROWS_AS(parallel_map<int>(10, 3, [](std::size_t i) -> int {
                    if (i == 6) throw InvalidArgument("six");
                    return 0;
                  }),
                  InvalidArgument);
}

TEST_CASE("figure helpers") {
  CHECK(linspace(0, 1, 3) == std::vector<double>{0, 0.5, 1});
  const auto lg = logspace(1, 100, 3);
  CHECK(lg[1] == doctest::Approx(10));
  CHECK(with_pins({1, 2, 3}, {2.5, 2}) == std::vector<double>{1, 2, 2.5, 3});
  CHECK_THROWS_AS(build_figure("fig9", SystemParams{}, {}), InvalidArgument);
  CHECK(figure_names().size() == 10);
}

TEST_CASE("commands: determinism and cache agreement") {
  const fs::path dir = scratch("commands");
  RunConfig rc;
  rc.command = "fluorescence";
  rc.output_dir = dir;
  std::ostringstream out1, out2, err;
  REQUIRE(run(rc, out1, err) == exit_ok);
  const std::string csv1 = slurp(dir / "fluor_point.csv");
  REQUIRE(run(rc, out2, err) == exit_ok);
  const std::string csv2 = slurp(dir / "fluor_point.csv");
  CHECK(without_first_line(csv1) == without_first_line(csv2));

  RunConfig fresh = rc;
  fresh.use_cache = false;
  std::ostringstream out3;
  REQUIRE(run(fresh, out3, err) == exit_ok);
  const Json cachedj = Json::parse(out2.str())["payload"];
  const Json freshj = Json::parse(out3.str())["payload"];
  for (auto it = freshj.begin(); it != freshj.end(); ++it) {
    if (it->is_number()) {
      CHECK(std::abs(it->get<double>() - cachedj[it.key()].get<double>()) <=
            1e-12 * std::max(1.0, std::abs(it->get<double>())));
    }
  }
  CHECK(freshj["fidelity"].get<double>() > 0.999);

  RunConfig bad = rc;
  bad.flags["eta_cav"] = "1.5";
  std::ostringstream o, e;
  CHECK(run(bad, o, e) == exit_config_error);
  CHECK(e.str().find("eta_cav") != std::string::npos);

  RunConfig engine = rc;
  engine.command = "reflection";
  engine.flags["P_in_pW"] = "0";
  engine.flags["t_pulse_ns"] = "1000";
  std::ostringstream o2, e2;
  const int code = run(engine, o2, e2);
  CHECK((code == exit_ok || code == exit_engine_error));

  RunConfig sweep = rc;
  sweep.sweep_specs = {"r_g=5,10", "t_pulse_ns=10,30"};
  std::ostringstream o3, e3;
  REQUIRE(run(sweep, o3, e3) == exit_ok);
  const std::string table = slurp(dir / "sweep_fluorescence.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 6);
}
