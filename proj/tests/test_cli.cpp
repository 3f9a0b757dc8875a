#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sys/wait.h>

#include "iquad/config.hpp"
#include "iquad/field_io.hpp"

using namespace iquad;
namespace fs = std::filesystem;

namespace {

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "iquad_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string bin = env("IQUAD_BIN");
  REQUIRE_MESSAGE(!bin.empty(), "IQUAD_BIN not set");
  const int status = std::system(("'" + bin + "' " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(read_text(p.string())); }

}  // namespace

TEST_CASE("config text roundtrip") {
  RunConfig c;
  c.n = 32;
  c.pitch = 0.1 + 0.2;
  c.zernikes = "4:0:0.2";
  c.seed = 18446744073709551615ULL;
  c.phase_file = "a b.iqf";
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
  CHECK(config_keys().size() == 32);
}

TEST_CASE("config parsing handles comments and reports line numbers") {
  const RunConfig c = parse_config("# header\n\n  n = 32   # grid\nmethod=cg\r\n");
  CHECK(c.n == 32);
  CHECK(c.method == "cg");
  try {
    parse_config("n=32\npitch=0.5\ncolour=blue\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("n=3.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("pitch=fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed=-1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n=99999999999\n"), ConfigError);
}

TEST_CASE("validation") {
  CHECK_NOTHROW(validate(RunConfig{}));
  auto bad = [](const std::string& kv) {
    RunConfig c;
    apply_override(c, kv);
    return c;
  };
  for (const char* kv : {"n=31", "n=6", "pitch=0", "pad=0", "diameter=40", "delta=0.7", "axis_policy=median",
                         "modulation=square", "phase=file", "method=sirt", "s=2", "s=1", "tau=-1", "max_iters=-1",
                         "verify_tier=quick", "mutation=flip", "out=", "scan_amplitude=0"}) {
    INFO(std::string(kv));
    CHECK_THROWS_AS(validate(bad(kv)), ConfigError);
  }
}

TEST_CASE("shipped default config matches the built-in defaults") {
  const std::string src = env("IQUAD_SOURCE");
  if (src.empty()) return;
  CHECK(load_config(src + "/configs/default.cfg") == RunConfig{});
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate colour=blue --out '" + dir.string() + "'") == 2);
  CHECK(run("simulate n=33 --out '" + dir.string() + "'") == 2);
  CHECK(run("simulate --config '" + (dir / "missing.cfg").string() + "'") == 3);
  CHECK(run("simulate phase=file phase_file='" + (dir / "missing.iqf").string() + "' --out '" + dir.string() + "'") ==
        3);
  CHECK(run("verify verify_tier=oracle16 --out '" + dir.string() + "'") == 0);
  CHECK(fs::exists(dir / "verify.json"));
}

TEST_CASE("verify passes and fails on a sign mutation") {
  const fs::path ok = scratch("verify_ok"), bad = scratch("verify_bad");
  CHECK(run("verify n=32 --out '" + ok.string() + "'") == 0);
  const auto j = load_json(ok / "verify.json");
  REQUIRE(j.contains("checks"));
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);
  CHECK(run("verify n=32 mutation=hilbert_sign --out '" + bad.string() + "'") == 1);
  bool any_fail = false;
  const auto jb = load_json(bad / "verify.json");
  CHECK(jb["all_pass"] == false);
  for (const auto& c : jb["checks"]) any_fail = any_fail || !c["pass"].get<bool>();
  CHECK(any_fail);
}

TEST_CASE("simulate is deterministic and writes its outputs") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  CHECK(run("simulate n=32 phase=screen --seed 5 --out '" + a.string() + "'") == 0);
  CHECK(run("simulate n=32 phase=screen --seed 5 --out '" + b.string() + "'") == 0);
  for (const char* f : {"phase.iqf", "intensity.iqf", "double_difference.iqf", "double_difference.png", "manifest.json",
                        "config.cfg"})
    CHECK_MESSAGE(fs::exists(a / f), f);
  CHECK(read_text((a / "manifest.json").string()) == read_text((b / "manifest.json").string()));
  CHECK(read_field_raw((a / "double_difference.iqf").string()).field.values() ==
        read_field_raw((b / "double_difference.iqf").string()).field.values());
  CHECK(load_config((a / "config.cfg").string()).seed == 5);

  // a saved phase feeds back in through phase=file
  const fs::path c = scratch("sim_c");
  CHECK(run("simulate n=32 phase=file phase_file='" + (a / "phase.iqf").string() + "' --out '" + c.string() + "'") ==
        0);
  CHECK(read_field_raw((c / "double_difference.iqf").string()).field.values() ==
        read_field_raw((a / "double_difference.iqf").string()).field.values());
  const fs::path d = scratch("sim_d");
  CHECK(run("simulate n=64 phase=file phase_file='" + (a / "phase.iqf").string() + "' --out '" + d.string() + "'") ==
        2);
}

TEST_CASE("reconstruct writes a report for every method") {
  for (const char* m : {"landweber-linear", "cg", "modal", "landweber-nonlinear"}) {
    INFO(m);
    const fs::path dir = scratch(std::string("rec_") + m);
    CHECK(run(std::string("reconstruct n=32 max_iters=60 method=") + m + " --out '" + dir.string() + "'") == 0);
    const auto j = load_json(dir / "report.json");
    CHECK(j["method"] == m);
    CHECK(j.contains("relative_error"));
    CHECK(j["final_residual"].get<double>() < 1.0);
    CHECK(fs::exists(dir / "residuals.csv"));
    if (std::string(m) == "modal") {
      CHECK(fs::exists(dir / "interaction_matrix.bin"));
      CHECK(j.contains("regularization"));
    }
  }
}

TEST_CASE("compare and scan") {
  const fs::path c = scratch("compare"), s = scratch("scan");
  CHECK(run("compare n=32 --out '" + c.string() + "'") == 0);
  CHECK(fs::exists(c / "compare.json"));
  CHECK(run("scan n=32 scan_max_order=3 --out '" + s.string() + "'") == 0);
  CHECK(fs::exists(s / "scan.csv"));
}
