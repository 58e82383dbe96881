#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tgf/app/commands.hpp"
#include "tgf/app/io.hpp"

using namespace tgf;
using namespace tgf::app;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(# small run
[grid]
dim = 2
n_max = 4

[time]
T = 0.4
steps = 10

[run]
samples = 4
seed = 11
)";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tgf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = run_command(args, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config text round trip and hash") {
  const auto j = parse_config_text(kSmall);
  const auto c = from_json(j);
  CHECK(c.sim.grid.n_max() == 4);
  CHECK(c.sim.steps == 10);
  CHECK(c.sim.seed == 11);

  const auto again = from_json(parse_config_text(to_text(c)));
  CHECK(to_json(again) == to_json(c));
  CHECK(config_hash(again) == config_hash(c));
  const auto via_json = from_json(parse_config_text(to_json(c).dump()));
  CHECK(config_hash(via_json) == config_hash(c));

  const char* reordered = R"(
[run]
seed = 11
samples = 4
[time]
steps = 10
T = 0.4
[grid]
n_max = 4
dim = 2
)";
  CHECK(config_hash(from_json(parse_config_text(reordered))) == config_hash(c));
  auto other = c;
  other.sim.seed = 12;
  CHECK(config_hash(other) != config_hash(c));
  other = c;
  other.out = "elsewhere";
  other.sim.workers = 3;
  CHECK(config_hash(other) == config_hash(c));

  auto lists = from_json(parse_config_text("[probe]\nrhos = 0.5, 0.25\nstop_factors = 2\n"));
  CHECK(lists.rhos == std::vector<double>{0.5, 0.25});
  CHECK(lists.stop_factors == std::vector<double>{2.0});
  CHECK(from_json(parse_config_text(to_text(lists))).stop_factors == std::vector<double>{2.0});

  CHECK_THROWS_AS(from_json(parse_config_text("[grid]\nn_maxx = 4\n")), ConfigError);
  CHECK_THROWS_AS(from_json(parse_config_text("[grid]\nn_max = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n_max = 4\n"), ConfigError);
  CHECK_THROWS_AS(from_json(parse_config_text("[noise]\nfamily = cubic\n")), ConfigError);
  CHECK_THROWS_AS(from_json(parse_config_text("[time]\nsteps = ten\n")), ConfigError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const auto bad = write_config(dir, std::string(kSmall) + "\n[physics]\nnu = 0.01\nbeta = 0.01\nalpha1 = 0.1\nalpha2 = 0.1\n");
  const auto r = run({"simulate", "--config", bad.string(), "--out", (dir / "o").string()});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("|alpha1 + alpha2| <= sqrt(24 nu beta)") != std::string::npos);

  CHECK(run({"explode"}).code == kConfigError);
  CHECK(run({"simulate", "--config", (dir / "missing.cfg").string()}).code == kConfigError);
  CHECK(run({"--help"}).code == kOk);

  // A tolerance no computation can meet is reported under the identity's name.
  const auto strict = write_config(dir, std::string(kSmall) + "\n[verify]\ncurl_cross = 1e-300\n");
  const auto v = run({"verify", "--config", strict.string(), "--out", (dir / "v").string(), "--quiet"});
  CHECK(v.code == kVerificationFailure);
  CHECK(v.err.find("curl_cross_identity") != std::string::npos);
  CHECK(v.out.empty());

  const auto ok = write_config(dir, kSmall);
  CHECK(run({"verify", "--config", ok.string(), "--out", (dir / "v2").string(), "--quiet"}).code == kOk);

  // Deterministic subset: no noise.
  const auto det = write_config(dir, std::string(kSmall) + "\n[noise]\nfamily = zero\n");
  CHECK(run({"verify", "--config", det.string(), "--out", (dir / "v3").string(), "--quiet"}).code == kOk);

  // Kick large enough to exceed the blow-up guard.
  const auto kick = write_config(dir, std::string(kSmall) + "\n[control]\namplitude = 1e6\n");
  const auto k = run({"simulate", "--config", kick.string(), "--out", (dir / "k").string(), "--quiet"});
  CHECK(k.code == kRuntimeAbort);
  CHECK(k.err.find("blow-up") != std::string::npos);
}

TEST_CASE("zero data and binary records") {
  const auto dir = scratch("zero");
  const auto cfg = write_config(dir, std::string(kSmall) + "\n[initial]\nkind = zero\n[noise]\nfamily = zero\n");
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(), "--quiet"}).code == kOk);
  const auto rec = read_field_records(dir / "o" / "trajectory.bin");
  CHECK(rec.dim == 2);
  CHECK(rec.n_max == 4);
  CHECK(rec.steps == 10);
  CHECK(rec.dt == doctest::Approx(0.04));
  CHECK(rec.version == version());
  CHECK(rec.records.size() == 11);
  for (const auto& f : rec.records) CHECK(f.is_zero());
  const auto summary = nlohmann::json::parse(slurp(dir / "o" / "simulate.json"));
  CHECK(summary["sample0"]["stop_index"] == 10);
  CHECK(summary["sample0"]["stop_time"].get<double>() == doctest::Approx(0.4));
  CHECK(rec.hash == summary["config_hash"]);

  // Nonzero run: records match a direct simulation bit for bit.
  const auto c = from_json(parse_config_text(kSmall));
  REQUIRE(run({"simulate", "--config", write_config(dir, kSmall).string(), "--out", (dir / "p").string(), "--quiet"})
              .code == kOk);
  const auto tr = simulate(initial_field(c), initial_control(c), c.sim.path(0), c.sim);
  const auto got = read_field_records(dir / "p" / "trajectory.bin");
  REQUIRE(got.records.size() == tr.fields.size());
  for (std::size_t n = 0; n < tr.fields.size(); ++n) CHECK(max_abs_difference(got.records[n], tr.fields[n]) == 0.0);
}

TEST_CASE("reruns are byte identical") {
  const auto dir = scratch("rerun");
  const auto cfg = write_config(dir, std::string(kSmall) + "\n[noise]\nfamily = smooth_nonlinear\n[optimizer]\nmax_iter = 5\n");
  for (const std::string cmd : {"simulate", "tangent-check", "duality-check", "optimize", "stability-probe", "stop-probe"}) {
    CAPTURE(cmd);
    const auto a = dir / (cmd + "_a"), b = dir / (cmd + "_b");
    REQUIRE(run({cmd, "--config", cfg.string(), "--out", a.string(), "--quiet"}).code == kOk);
    REQUIRE(run({cmd, "--config", cfg.string(), "--out", b.string(), "--quiet"}).code == kOk);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      const auto text = slurp(e.path());
      CHECK(text.find(config_hash(from_json(load_config_file(cfg.string())))) != std::string::npos);
    }
    CHECK(files >= 2);
  }
}

}  // TEST_SUITE
