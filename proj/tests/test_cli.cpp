#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "confdim/cli.hpp"

using namespace confdim;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<const char*> args) {
  args.insert(args.begin(), "confdim");
  const RunConfig c = parse_args(static_cast<int>(args.size()), args.data());
  std::ostringstream out;
  std::ostringstream err;
  const int status = run(c, out, err);
  return {status, out.str(), err.str()};
}

const char* kCircle = R"({"kind": "circle", "resolution": 128})";
const char* kGrid = R"({"kind": "square_grid", "resolution": 16})";

}  // namespace

TEST_CASE("p grid parsing") {
  const auto g = parse_p_grid("1.0:0.1:2.0");
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 1.0);
  CHECK(g[3] == 1.3);
  CHECK(g.back() == 2.0);
  CHECK(parse_p_grid("2:1:2") == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_p_grid("1:0:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("2:0.1:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("1,0.1,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("1:0.1:2x"), std::invalid_argument);
}

TEST_CASE("argument parsing") {
  const char* argv[] = {"confdim", "bound", "--generate", "{}", "--m", "2,4", "--budgets", "1,3", "--center", "7",
                        "--workers", "3"};
  const RunConfig c = parse_args(12, argv);
  CHECK(c.subcommand == "bound");
  CHECK(c.m == std::vector<int>{2, 4});
  CHECK(c.budgets == std::vector<int>{1, 3});
  CHECK(c.center == std::size_t{7});
  CHECK(c.workers == 3);
  CHECK(c.a == 2.0);
  const char* bad[] = {"confdim", "scan", "--bogus", "1"};
  CHECK_THROWS_AS(parse_args(4, bad), std::invalid_argument);
  const char* zero_workers[] = {"confdim", "scan", "--workers", "0"};
  CHECK_THROWS_AS(parse_args(4, zero_workers), std::invalid_argument);
  bool help = false;
  std::string text;
  const char* h[] = {"confdim", "--help"};
  parse_args(2, h, &help, &text);
  CHECK(help);
  CHECK(text.find("--p-grid") != std::string::npos);
}

TEST_CASE("generate and nets") {
  const auto g = invoke({"generate", "--generate", kCircle});
  CHECK(g.status == kExitOk);
  const auto doc = nlohmann::json::parse(g.out);
  CHECK(doc["points"].size() == 128);
  CHECK(doc["config"]["subcommand"] == "generate");

  const auto n = invoke({"nets", "--generate", kCircle, "--depth", "5"});
  CHECK(n.status == kExitOk);
  CHECK(nlohmann::json::parse(n.out).contains("config"));
}

TEST_CASE("space files round trip through generate") {
  const auto dir = std::filesystem::temp_directory_path() / "confdim_cli_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "circle.json").string();
  CHECK(invoke({"generate", "--generate", kCircle, "--out", path.c_str()}).status == kExitOk);
  CHECK(std::filesystem::exists(path));
  const auto m = invoke({"modulus", "--space", path.c_str(), "--depth", "5", "--k", "2", "--n", "3", "--p", "1"});
  CHECK(m.status == kExitOk);
  const auto doc = nlohmann::json::parse(m.out);
  CHECK(doc["min_cut"]["value"] == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verdict exit codes") {
  CHECK(invoke({"uws", "--generate", kCircle, "--depth", "5", "--C-max", "2"}).status == kExitOk);
  CHECK(invoke({"uws", "--generate", kGrid, "--depth", "4", "--C-max", "2"}).status == kExitVerdictFailure);
  CHECK(invoke({"ws", "--generate", kCircle, "--depth", "5", "--budgets", "2,4,8"}).status == kExitOk);
}

TEST_CASE("errors exit with status one") {
  const auto unknown = invoke({"frobnicate", "--generate", kCircle});
  CHECK(unknown.status == kExitError);
  CHECK(unknown.err.find("unknown subcommand") != std::string::npos);
  CHECK(invoke({"nets"}).status == kExitError);
  CHECK(invoke({"nets", "--space", "/nonexistent/space.json"}).status == kExitError);
  CHECK(invoke({"modulus", "--generate", kCircle, "--depth", "4", "--k", "3", "--n", "3"}).status == kExitError);
  const auto infeasible = invoke({"bound", "--generate", R"({"kind": "sierpinski_gasket", "resolution": 4})",
                                  "--depth", "4", "--k", "0", "--n", "4", "--m", "4"});
  CHECK(infeasible.status == kExitError);
  CHECK(infeasible.err.find("max feasible m = 2") != std::string::npos);
}

TEST_CASE("scan output is deterministic and echoes the config") {
  const auto a = invoke({"scan", "--generate", kCircle, "--depth", "5", "--p-grid", "1:0.5:2", "--n-max", "2"});
  const auto b = invoke({"scan", "--generate", kCircle, "--depth", "5", "--p-grid", "1:0.5:2", "--n-max", "2"});
  CHECK(a.status == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# p_grid=\"1:0.5:2\"") != std::string::npos);
  CHECK(a.out.find("p,n,k,M_pn,balls_sampled") != std::string::npos);
  auto body = [](const std::string& s) { return s.substr(s.find("p,n,k")); };
  const auto c = invoke({"scan", "--generate", kCircle, "--depth", "5", "--p-grid", "1:0.5:2", "--n-max", "2",
                         "--workers", "2"});
  CHECK(body(c.out) == body(a.out));
}

TEST_CASE("pc and all") {
  // 128 points on the circle support five levels.
  const auto pc = invoke({"pc", "--generate", kCircle, "--depth", "6", "--p-grid", "1:0.5:2", "--n-max", "3"});
  CHECK(pc.status == kExitOk);
  const auto doc = nlohmann::json::parse(pc.out);
  CHECK(doc.contains("value"));
  CHECK(doc["depth"] == 5);
  const auto all = invoke({"all", "--generate", kCircle, "--depth", "6", "--p-grid", "1:0.5:2", "--n-max", "3",
                           "--k", "0", "--n", "5", "--m", "2"});
  CAPTURE(all.err);
  const auto ad = nlohmann::json::parse(all.out);
  for (const char* key : {"nets", "scan", "pc", "uws", "ws", "bound", "config"}) CHECK(ad.contains(key));
}
