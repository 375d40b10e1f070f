#include "boussinesq/cli_runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace boussinesq::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("boussinesq_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(RunOptions o) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(o, out, err);
  return {code, out.str(), err.str()};
}

RunOptions quick_expsum(const fs::path& out_dir) {
  RunOptions o;
  o.subcommand = "expsum";
  o.out_dir = out_dir;
  o.seed = 7;
  o.N_list = std::vector<int>{16, 32, 64};
  o.overrides = {"expsum.x_samples=33", "expsum.t_samples=8"};
  return o;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate_config") {
    CHECK(validate_config(default_config()).empty());
    nlohmann::json cfg = default_config();
    cfg["strichartz"]["q"] = 1;
    cfg["strichartz"]["p"] = "inf";
    cfg["strichartz"]["beta"] = 3;
    const auto beta = validate_config(cfg);
    REQUIRE(beta.size() == 1);
    CHECK(beta[0].find("β exceeds 2q/(q+1)=1") != std::string::npos);

    cfg = default_config();
    cfg["expsum"]["N"] = {64, -1};
    const auto negative = validate_config(cfg);
    REQUIRE(negative.size() == 1);
    CHECK(negative[0].find("N must be ≥ 1") != std::string::npos);
  }

  TEST_CASE("overrides") {
    nlohmann::json cfg = default_config();
    apply_override(cfg, "strichartz.p=inf");
    CHECK(cfg["strichartz"]["p"] == "inf");
    apply_override(cfg, "expsum.N=[8,16,32]");
    CHECK(cfg["expsum"]["N"].size() == 3);
    CHECK_THROWS_AS(apply_override(cfg, "expsum.nope=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "expsum"), ConfigError);
  }

  TEST_CASE("expsum run writes deterministic reports") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const Result ra = invoke(quick_expsum(a));
    const Result rb = invoke(quick_expsum(b));
    CHECK(ra.code == kExitPass);
    CHECK(rb.code == kExitPass);
    CHECK(ra.out == "expsum: PASS\n");
    for (const char* f : {"expsum.csv", "expsum.json"}) {
      REQUIRE(fs::exists(a / f));
      CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto report = nlohmann::json::parse(slurp(a / "expsum.json"));
    CHECK(report["seeds"]["omega"] == 7);
    CHECK(report["passed"] == true);
    CHECK(report["config"]["N"].size() == 3);
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["tool_version"] == kToolVersion);
    CHECK(manifest.contains("duration_seconds"));
    for (const auto& f : manifest["files"]) CHECK(fs::exists(a / f.get<std::string>()));
    const std::string csv = slurp(a / "expsum.csv");
    CHECK(csv.find("# seed_omega=7") != std::string::npos);
    CHECK(csv.find("\r\n") != std::string::npos);
  }

  TEST_CASE("failing check exits 1 and names the invariant") {
    RunOptions o = quick_expsum(scratch("fail"));
    o.overrides.push_back("expsum.max_spread=1");
    const Result r = invoke(o);
    CHECK(r.code == kExitCheckFailed);
    CHECK(r.err.find("check failed: expsum.decay_spread") != std::string::npos);
  }

  TEST_CASE("configuration errors exit 2") {
    const fs::path dir = scratch("config");
    RunOptions o = quick_expsum(dir / "out");
    SUBCASE("missing file") {
      o.config_path = dir / "missing.json";
      const Result r = invoke(o);
      CHECK(r.code == kExitBadConfig);
      CHECK(r.err.find("cannot open config file") != std::string::npos);
    }
    SUBCASE("parse error carries line and column") {
      write(dir / "bad.json", "{\n  \"expsum\": {\n    \"t_samples\": 8,,\n  }\n}\n");
      o.config_path = dir / "bad.json";
      const Result r = invoke(o);
      CHECK(r.code == kExitBadConfig);
      CHECK(r.err.find("bad.json:3:") != std::string::npos);
    }
    SUBCASE("unknown field carries its line") {
      write(dir / "unknown.json", "{\n  \"expsum\": {\n    \"t_sample\": 8\n  }\n}\n");
      o.config_path = dir / "unknown.json";
      const Result r = invoke(o);
      CHECK(r.code == kExitBadConfig);
      CHECK(r.err.find("unknown.json:3: unknown field 'expsum.t_sample'") != std::string::npos);
    }
    SUBCASE("inadmissible exponents") {
      o.subcommand = "strichartz";
      o.overrides = {"strichartz.q=1", "strichartz.p=inf", "strichartz.beta=3"};
      const Result r = invoke(o);
      CHECK(r.code == kExitBadConfig);
      CHECK(r.err.find("β exceeds 2q/(q+1)=1") != std::string::npos);
    }
    SUBCASE("unknown subcommand") {
      o.subcommand = "plot";
      CHECK(invoke(o).code == kExitBadConfig);
    }
    SUBCASE("valid file overlays defaults") {
      write(dir / "ok.json", "{\"expsum\": {\"x_samples\": 17}}");
      o.config_path = dir / "ok.json";
      o.overrides = {"expsum.t_samples=4"};
      CHECK(invoke(o).code == kExitPass);
      const auto report = nlohmann::json::parse(slurp(dir / "out" / "expsum.json"));
      CHECK(report["config"]["x_samples"] == 17);
    }
  }

  TEST_CASE("executable exit codes") {
    const fs::path dir = scratch("exe");
    const std::string exe = BOUSSINESQ_LAB_PATH;
    const std::string common = " --out \"" + (dir / "out").string() + "\" > \"" + (dir / "log").string() + "\" 2>&1";
    const auto status = [](int raw) {
#ifdef _WIN32
      return raw;
#else
      return WEXITSTATUS(raw);
#endif
    };
    CHECK(status(std::system((exe + " expsum --N 16,32,64 --seed 7 --override expsum.x_samples=17" + common).c_str())) == 0);
    CHECK(status(std::system((exe + " expsum --config \"" + (dir / "nope.json").string() + "\"" + common).c_str())) == 2);
    CHECK(status(std::system((exe + " expsum --N 16,32,64 --override expsum.max_spread=1" + common).c_str())) == 1);
    CHECK(status(std::system((exe + " --threads 0 expsum" + common).c_str())) == 2);
  }
}
