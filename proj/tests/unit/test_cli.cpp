#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdemux/cli.hpp"
#include "qdemux/config.hpp"
#include "qdemux/scenarios.hpp"

using namespace qdemux;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code = 0;
  std::string out;
  std::string err;
};

Captured call(const std::vector<std::string>& args) {
  Captured c;
  c.code = cli::run_captured(args, c.out, c.err);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qdemux_cli" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("plan prints the channel table") {
    const Captured c = call({"plan"});
    CHECK(c.code == 0);
    CHECK(c.out.find("S2") != std::string::npos);
    CHECK(c.out.find("1559.79") != std::string::npos);
    CHECK(c.out.find("1540.56") != std::string::npos);
  }

  TEST_CASE("loss prints the three ledgers") {
    const Captured c = call({"loss"});
    CHECK(c.code == 0);
    CHECK(c.out.find("8.59") != std::string::npos);
    CHECK(c.out.find("13.99") != std::string::npos);
    CHECK(c.out.find("15.59") != std::string::npos);
  }

  TEST_CASE("unknown flag exits 1") {
    const Captured c = call({"plan", "--bogus"});
    CHECK(c.code == 1);
  }

  TEST_CASE("validation error exits 1 with the field name") {
    const Captured c = call({"plan", "--config", (fs::path(QDEMUX_TEST_DATA) / "bad_dead_time.json").string()});
    CHECK(c.code == 1);
    CHECK(c.err.find("detectors.apd1.dead_time_us") != std::string::npos);
  }

  TEST_CASE("emit-tags without out is rejected") {
    CHECK(call({"fringe", "--emit-tags"}).code == 1);
  }

  TEST_CASE("json format") {
    const Captured c = call({"plan", "--format", "json"});
    CHECK(c.code == 0);
    CHECK(nlohmann::json::parse(c.out).is_array());
  }

  TEST_CASE("reruns are byte-identical and manifests complete") {
    const fs::path a = fresh_dir("rerun_a");
    const fs::path b = fresh_dir("rerun_b");
    const std::vector<std::string> base{"fringe", "--pair", "S2", "--duration", "2", "--seed", "5"};
    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", a.string()});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", b.string()});
    REQUIRE(call(args_a).code == 0);
    REQUIRE(call(args_b).code == 0);
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    for (const char* key : {"scenario", "command", "config_digest", "seed", "tool_version", "outputs", "wall_clock_s"}) {
      CHECK(manifest.contains(key));
    }
    CHECK(manifest["seed"] == 5);
    for (const auto& name : manifest["outputs"]) {
      const std::string n = name.get<std::string>();
      CHECK_MESSAGE(slurp(a / n) == slurp(b / n), n);
    }
  }

  TEST_CASE("analyze on emitted tags reproduces the in-memory visibility") {
    const fs::path dir = fresh_dir("closure");
    const Captured run = call({"fringe", "--pair", "S2", "--duration", "5", "--emit-tags", "--out", dir.string()});
    REQUIRE(run.code == 0);
    std::vector<std::string> args{"analyze"};
    for (const auto& e : fs::directory_iterator(dir / "tags")) {
      if (e.path().extension() == ".csv") args.push_back(e.path().string());
    }
    std::sort(args.begin() + 1, args.end());
    REQUIRE(args.size() == 9);
    const Captured an = call(args);
    REQUIRE(an.code == 0);

    ScenarioConfig cfg = reference_config();
    const FringeScanResult mem = run_fringe_scan(cfg, "S2", SignalPath::up_converted, 5.0);
    const std::string expected =
        "visibility: raw " + format_percent(mem.visibility.raw) + "  net " + format_percent(mem.visibility.net);
    CHECK_MESSAGE(an.out.find(expected) != std::string::npos, an.out);
  }
}
