#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crsm_tools/cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "crsm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = crsm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return std::string(CRSM_MODELS_DIR) + "/" + name + ".json"; }

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "crsm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("check reports the alternation witness") {
  const auto r = run({"check", "--model", model("avar4")});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["completely_alternating"] == false);
  CHECK(j["witness"]["F"] == json({"1", "2", "3"}));
  CHECK(std::abs(j["witness"]["nu"].get<double>() + 0.25) <= 1e-12);
  CHECK(j["provenance"].contains("model_hash"));
  CHECK(j["provenance"].contains("timestamp"));

  const auto ok = json::parse(run({"check", "--model", model("theta2"), "--deterministic"}).out);
  CHECK(ok["completely_alternating"] == true);
  CHECK(ok["witness"].is_null());
  CHECK(ok["direct"]["exhaustive"] == true);
  CHECK_FALSE(ok["provenance"].contains("timestamp"));
}

TEST_CASE("integrals print a bare number") {
  const auto r = run({"choquet", "--model", model("theta2"), "--f", R"({"a":2,"b":1})"});
  CHECK(r.code == 0);
  CHECK(r.out == "2.5\n");
  CHECK(run({"extremal", "--model", model("theta2"), "--f", R"({"f":{"a":2,"b":1}})"}).out == "2.0\n");
}

TEST_CASE("dual, mobius, materialize and cdf") {
  const auto d = json::parse(run({"dual", "--model", model("theta2"), "--f", R"({"a":2,"b":1})"}).out);
  CHECK(d["greedy"] == 2.5);
  CHECK(d["oracle"] == 2.5);
  CHECK(d["measure"]["a"] == 1.0);

  const auto m = json::parse(run({"mobius", "--model", model("theta2")}).out);
  CHECK(m["weights"]["a,b"] == 0.5);

  const auto t = json::parse(run({"materialize", "--model", model("storm4")}).out);
  CHECK(t["kind"] == "table");
  CHECK(t["table"]["0,2"] == 4.0);
  CHECK(t["torus"]["n"] == 4);

  const auto c = json::parse(
      run({"cdf", "--model", model("full_dependence"), "--pairs", R"([{"K":["a"],"a":1},{"K":["b"],"a":1}])"}).out);
  CHECK(c["cdf"].get<double>() == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("exit codes") {
  const auto bad = write_temp("bad.json", R"({"carrier":["a","b"],"table":{"a":1,"b":"x","a,b":1}})");
  const auto r = run({"check", "--model", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("/table/b") != std::string::npos);

  const auto broken = write_temp("broken.json", "{\"carrier\": [");
  CHECK(run({"mobius", "--model", broken}).code == 2);

  const auto big = write_temp("big.json", R"({"kind":"subset_size","d":25,"p":[1]})");
  CHECK(run({"check", "--model", big}).code == 3);

  CHECK(run({"verify", "--model", model("avar4"), "--samples", "100", "--seed", "1"}).code == 1);
  CHECK(run({"dual", "--model", model("avar4"), "--f", "[1,1,1,1]"}).code == 4);
  CHECK(run({"check", "--model", "/nonexistent/model.json"}).code == 4);

  // Randomised commands need an explicit seed.
  CHECK(run({"simulate", "--model", model("theta2"), "--samples", "10"}).code != 0);
  CHECK(run({"frobnicate"}).code != 0);
}

TEST_CASE("simulate writes reproducible CSV with a provenance sidecar") {
  const auto dir = scratch();
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  for (const auto& out : {a, b})
    REQUIRE(run({"simulate", "--model", model("theta2"), "--samples", "50", "--seed", "9", "--out", out,
                 "--deterministic"})
                .code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a + ".meta.json") == slurp(b + ".meta.json"));
  CHECK(slurp(a).rfind("sample_index,a,b\n0,", 0) == 0);
  const auto meta = json::parse(slurp(a + ".meta.json"));
  CHECK(meta["provenance"]["seed"] == 9);

  const auto j = json::parse(run({"simulate", "--model", model("theta2"), "--samples", "3", "--seed", "9",
                                  "--format", "json"})
                                 .out);
  CHECK(j["samples"].size() == 3);

  // The estimate from the written batch equals the in-process one.
  const auto from_file = json::parse(
      run({"estimate", "--model", model("theta2"), "--f", R"({"a":1,"b":1})", "--in", a, "--seed", "9", "--deterministic"})
          .out);
  CHECK(from_file["samples"] == 50);
}

TEST_CASE("verify, couple and argmax-test pass on reference models") {
  const auto v = run({"verify", "--model", model("theta2"), "--samples", "100000", "--seed", "7"});
  CHECK(v.code == 0);
  const auto j = json::parse(v.out);
  CHECK(j["pass"] == true);
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("check"));
    CHECK(c.contains("statistic"));
    CHECK(c.contains("threshold"));
    CHECK(c["pass"] == true);
  }

  const auto cp = json::parse(run({"couple", "--model", model("spectral_g"), "--samples", "5000", "--seed", "2"}).out);
  CHECK(cp["violations"] == 0);
  CHECK(cp["strict_lower_points"].get<int>() > 0);

  const auto am = run({"argmax-test", "--model", model("storm4"), "--samples", "20000", "--seed", "3", "--K", R"(["0"])"});
  CHECK(am.code == 0);
  CHECK(json::parse(am.out)["pass"] == true);
}
