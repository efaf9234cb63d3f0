#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "smoothfix/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "smoothfix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = smoothfix::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::current_path() / "cli_test_tmp";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_config(const std::string& name, const std::string& body) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string polya8() { return write_config("polya8.json", R"({"model": {"type": "polya", "b": 8}})"); }

}  // namespace

TEST_CASE("analyze reports alpha for Polya b = 8") {
  const auto out = (workdir() / "report.json").string();
  const auto r = cli({"analyze", "--model", polya8(), "--samples", "5000", "--seed", "7", "--out", out});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(slurp(out));
  CHECK(doc["alpha"].get<double>() == doctest::Approx(1.414214).epsilon(1e-6));
  CHECK(doc["flags"]["A1"]["verdict"] == "pass");
  const auto manifest = json::parse(slurp(out + ".manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["command"] == "analyze");
  CHECK(manifest["model_fingerprint"].get<std::string>().size() == 16);
  CHECK(manifest["version"] == smoothfix::kVersion);
  CHECK(manifest["argv"].size() == 10);
}

TEST_CASE("sample is byte-for-byte reproducible") {
  const auto a = (workdir() / "a" / "pool.csv").string();
  const auto b = (workdir() / "b" / "pool.csv").string();
  for (const auto& path : {a, b}) {
    const auto r = cli({"sample", "--model", polya8(), "--pool-size", "100", "--iterations", "1", "--seed", "7",
                        "--out", path});
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a + ".summary.json") == slurp(b + ".summary.json"));
  CHECK(slurp(a).rfind("re,im\n", 0) == 0);

  // Thread count does not change the output.
  const auto c = (workdir() / "c" / "pool.csv").string();
  REQUIRE(cli({"sample", "--model", polya8(), "--pool-size", "100", "--iterations", "1", "--seed", "7", "--out", c,
               "--threads", "1"})
              .code == 0);
  CHECK(slurp(a) == slurp(c));
}

TEST_CASE("missing seed is a validation error") {
  const auto r = cli({"sample", "--model", polya8(), "--pool-size", "100", "--iterations", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("seed required") != std::string::npos);
  CHECK(cli({"analyze", "--model", polya8()}).code == 1);
  CHECK(cli({"figures", "--desk"}).code == 1);
}

TEST_CASE("bad flags and configs exit with 1 and name the problem") {
  CHECK(cli({"sample", "--model", polya8(), "--bogus", "--seed", "1"}).code == 1);
  CHECK(cli({}).code == 1);
  const auto missing = cli({"analyze", "--model", (workdir() / "nope.json").string(), "--seed", "1"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("nope.json") != std::string::npos);
  const auto bad = write_config("bad.json", R"({"model": {"type": "polya"}})");
  const auto r = cli({"analyze", "--model", bad, "--seed", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("model.b") != std::string::npos);
  const auto k0 = cli({"sample", "--model", polya8(), "--iterations", "0", "--seed", "1", "--out",
                       (workdir() / "k0.csv").string()});
  CHECK(k0.code == 1);
  CHECK(k0.err.find("K >= 1") != std::string::npos);
}

TEST_CASE("runtime failures exit with 2") {
  const auto big = write_config("big.json", R"({"model": {"type": "tabular",
      "atoms": [{"probability": 1, "weights": [[1e200, 0], [1e200, 0]]}]}})");
  const auto r = cli({"sample", "--model", big, "--init", "1e200", "--pool-size", "10", "--iterations", "1",
                      "--moment-p", "1", "--seed", "1", "--out", (workdir() / "inf.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("index 0") != std::string::npos);
}

TEST_CASE("martingale, ecf and density pipeline") {
  const auto traj = (workdir() / "traj.csv").string();
  REQUIRE(cli({"martingale", "--model", polya8(), "--depth", "3", "--reps", "200", "--seed", "3", "--out", traj})
              .code == 0);
  const auto t = slurp(traj);
  CHECK(t.rfind("n,mean_W,se_W,mean_Z_re,mean_Z_im,se_Z,node_count_mean\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 5);

  const auto pool = (workdir() / "p" / "pool.csv").string();
  REQUIRE(cli({"sample", "--model", polya8(), "--pool-size", "2000", "--iterations", "10", "--seed", "3", "--out",
               pool})
              .code == 0);
  const auto scan = (workdir() / "scan.csv").string();
  REQUIRE(cli({"ecf", "--pool", pool, "--radii", "1,5,10,50", "--angles", "8", "--order", "1", "--out", scan})
              .code == 0);
  const auto s = slurp(scan);
  CHECK(s.rfind("R,theta,re,im,abs,stderr\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 33);
  CHECK(json::parse(slurp(scan + ".manifest.json")).contains("radial_max"));

  const auto dens = (workdir() / "density.csv").string();
  REQUIRE(cli({"density", "--pool", pool, "--grid", "32", "--out", dens}).code == 0);
  const auto d = slurp(dens);
  CHECK(d.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(d.begin(), d.end(), '\n') == 32 * 32 + 1);
  const double integral = json::parse(slurp(dens + ".manifest.json"))["integral"].get<double>();
  CHECK(integral > 0.9);
}

TEST_CASE("figures writes one density per case") {
  const auto dir = (workdir() / "figs").string();
  const auto r = cli({"figures", "--desk", "--figure", "3", "--grid", "16", "--seed", "1", "--out-dir", dir});
  REQUIRE(r.code == 0);
  const auto index = json::parse(slurp(fs::path(dir) / "figures.json"));
  CHECK(index["figures"].size() == 4);
  for (const auto& f : index["figures"]) CHECK(fs::exists(f["density"].get<std::string>()));
}

TEST_CASE("help and version") {
  CHECK(cli({"--version"}).out.find(smoothfix::kVersion) != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}
