#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = biphoton::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "biphoton_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kEd8 = R"({"kind":"exp_decay","gamma":1,"detuning":8,"start":0})";
const std::string kEdm8 = R"({"kind":"exp_decay","gamma":1,"detuning":-8,"start":0})";

}  // namespace

TEST_CASE("probs") {
  const auto r = run({"probs", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--grid-max", "20"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["data"]["P11"].get<double>() == doctest::Approx(0.4923).epsilon(1e-3));
  CHECK(doc["config"]["t_sq"] == 0.5);
  CHECK(doc["config"]["shape1"]["detuning"] == 8);
}

TEST_CASE("shapes from files and csv output") {
  const fs::path shape = scratch("shape.json");
  std::ofstream(shape) << kEd8;
  const auto r = run({"probs", "--shape1", "@" + shape.string(), "--shape2", kEdm8, "--grid-min", "0", "--format",
                      "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("J_abs,J_re,J_im,P20,P11,P02\n", 0) == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({"probs", "--shape1", kEd8, "--shape2", kEdm8, "--t-sq", "1.5"}).code == 64);
  CHECK(run({"probs", "--shape1", kEd8}).code == 64);
  CHECK(run({"probs", "--shape1", "{bad", "--shape2", kEdm8}).code == 64);
  CHECK(run({"probs", "--shape1", kEd8, "--shape2", kEdm8, "--grid-points", "abc"}).code == 64);
  CHECK(run({"joint", "--shape1", kEd8, "--shape2", kEdm8}).code == 64);
  CHECK(run({"frobnicate"}).code == 64);
  CHECK(run({}).code == 64);
  CHECK(run({"optimize", "--problem", "{}"}).code == 64);
  CHECK(run({"optimize", "--problem", R"({"bounds":{}})"}).code == 64);
  const fs::path empty = scratch("empty.json");
  std::ofstream(empty).close();
  CHECK(run({"optimize", "--problem", "@" + empty.string()}).code == 64);
  const auto r = run({"probs", "--shape1", kEd8, "--shape2", kEdm8, "--t-sq", "2"});
  CHECK(json::parse(r.err)["error"] == "usage");
}

TEST_CASE("data and io errors") {
  const std::string ed = R"({"kind":"exp_decay","gamma":1,"detuning":0,"start":0})";
  // identical photons have no |1,1> component
  const auto r = run({"joint", "--shape1", ed, "--shape2", ed, "--grid-min", "0", "--grid-max", "20",
                      "--grid-points", "101", "--out", scratch("j.csv").string()});
  CHECK(r.code == 65);
  CHECK(json::parse(r.err)["error"] == "degenerate_outcome");
  // window too short to hold the photon
  CHECK(run({"probs", "--shape1", ed, "--shape2", ed, "--grid-min", "0", "--grid-max", "1"}).code == 65);
  CHECK(run({"herald", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--grid-max", "20", "--t-dec",
             "-1"})
            .code == 65);
  CHECK(run({"probs", "--shape1", "@/nonexistent/shape.json", "--shape2", ed}).code == 74);
  CHECK(run({"entropy-surface", "--out", "/nonexistent/dir/s.csv", "--resolution", "3"}).code == 74);
}

TEST_CASE("joint writes csv and metadata") {
  const fs::path out = scratch("joint.csv");
  const auto r = run({"joint", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--grid-max", "20",
                      "--grid-points", "41", "--out", out.string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41 * 41 + 1);
  const json meta = json::parse(slurp(out.string() + ".meta.json"));
  CHECK(meta["data"]["outcome"] == "11");
}

TEST_CASE("herald sweep is monotone") {
  const auto r = run({"herald", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--grid-max", "20",
                      "--t-dec", "0", "--t-r-sweep", "0,0.1,0.2,0.4", "--target",
                      R"({"kind":"exp_decay_sine","gamma":1,"omega":4,"start":0})"});
  REQUIRE(r.code == 0);
  const json sweep = json::parse(r.out)["data"]["sweep"];
  REQUIRE(sweep.size() == 4);
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    CHECK(sweep[k]["success_probability"].get<double>() >= sweep[k - 1]["success_probability"].get<double>());
    CHECK(sweep[k]["fidelity"].get<double>() <= sweep[k - 1]["fidelity"].get<double>() + 1e-12);
  }
}

TEST_CASE("replaying the echoed config reproduces the data") {
  const std::vector<std::vector<std::string>> commands{
      {"probs", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--t-sq", "0.3"},
      {"herald", "--shape1", kEd8, "--shape2", kEdm8, "--grid-min", "0", "--grid-max", "20", "--grid-points",
       "401", "--t-r", "0.1"},
      {"optimize", "--problem", R"({"grid":{"t_min":-10,"t_max":30,"n_points":301}})", "--budget", "200",
       "--restarts", "2", "--seed", "9"},
  };
  for (const auto& args : commands) {
    const auto first = run(args);
    REQUIRE(first.code == 0);
    const fs::path saved = scratch("replay.json");
    std::ofstream(saved) << first.out;
    const auto again = run({args[0], "--config", saved.string()});
    REQUIRE(again.code == 0);
    CHECK(json::parse(first.out)["data"].dump() == json::parse(again.out)["data"].dump());
    CHECK(first.out == again.out);
  }
  // explicit flags override the replayed config
  const fs::path saved = scratch("replay.json");
  std::ofstream(saved) << run(commands[0]).out;
  const auto changed = run({"probs", "--config", saved.string(), "--t-sq", "0.5"});
  CHECK(json::parse(changed.out)["config"]["t_sq"] == 0.5);
  CHECK(run({"herald", "--config", saved.string()}).code == 64);
}
