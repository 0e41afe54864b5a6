#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

#include "icf/cli.hpp"
#include "icf/dense.hpp"

using namespace icf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("icf_cli_test_" + tag + "_" + std::to_string(std::rand()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "icf");
  return run_cli(args);
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0.5:2:4");
  REQUIRE(g.size() == 4);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 2.0);
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(parse_grid("3") == std::vector<double>{3.0});
  CHECK(parse_grid("1:1:1").size() == 1);
  CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("2:1:5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:1:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
}

TEST_CASE("missing required flag writes nothing") {
  TempDir d("missing");
  CHECK(run({"icf-euclidean", "--N", "40", "--L", "4", "--out", d.path.string()}) == exit_config);
  CHECK(fs::is_empty(d.path));
  CHECK(run({"icf-euclidean", "--N", "40", "--L", "-1", "--V0", "1", "--tau", "1", "--out", d.path.string()}) ==
        exit_config);
  CHECK(fs::is_empty(d.path));
  CHECK(run({"no-such-command"}) == exit_config);
}

TEST_CASE("euclidean run, manifest and replay") {
  TempDir d("euclid");
  REQUIRE(run({"icf-euclidean", "--N", "60", "--L", "4", "--V0", "1.5", "--tau", "0.5:2:4", "--out",
               d.path.string()}) == exit_ok);
  const fs::path csv = d.path / "icf-euclidean.csv";
  const fs::path man = d.path / "icf-euclidean.json";
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(man));

  const auto m = nlohmann::json::parse(slurp(man));
  CHECK(m["schema_version"] == 1);
  CHECK(m["subcommand"] == "icf-euclidean");
  CHECK(m["tool_version"] == tool_version());
  CHECK(m["parameters"]["N"] == "60");
  CHECK(m["parameters"]["V0"] == "1.5");
  CHECK(m.contains("runtime_seconds"));
  CHECK(m.contains("seed"));

  int data = 0;
  for (const auto& l : lines_of(slurp(csv))) data += !l.empty() && l[0] != '#';
  CHECK(data == 5);  // header + four rows

  TempDir again("replay");
  REQUIRE(run({"replay", man.string(), "--out", again.path.string()}) == exit_ok);
  CHECK(slurp(again.path / "icf-euclidean.csv") == slurp(csv));
}

TEST_CASE("config file with command-line override") {
  TempDir d("config");
  const fs::path cfg = d.path / "run.cfg";
  {
    std::ofstream os(cfg);
    os << "# lattice\nN = 40\nL = 4\nV0 = \"2.5\"\ntau = 1:2:2\n";
  }
  REQUIRE(run({"icf-euclidean", "--config", cfg.string(), "--V0", "-0.5", "--out", d.path.string()}) == exit_ok);
  const auto m = nlohmann::json::parse(slurp(d.path / "icf-euclidean.json"));
  CHECK(m["parameters"]["V0"] == "-0.5");
  CHECK(m["parameters"]["N"] == "40");
  CHECK(run({"icf-euclidean", "--config", (d.path / "absent.cfg").string()}) == exit_config);
}

TEST_CASE("numerical failure exit code") {
  TempDir d("overflow");
  CHECK(run({"icf-euclidean", "--N", "50", "--L", "2", "--V0", "-100", "--tau", "2", "--out", d.path.string()}) ==
        exit_numerical);
  CHECK(fs::is_empty(d.path));
}

TEST_CASE("phase-il columns and env output directory") {
  TempDir d("env");
  ::setenv("PHASESHIFT_OUTPUT_DIR", d.path.string().c_str(), 1);
  const int code = run({"phase-il", "--N", "80", "--L", "6", "--V0", "1", "--emin", "0.2", "--emax", "1",
                        "--esteps", "3"});
  ::unsetenv("PHASESHIFT_OUTPUT_DIR");
  REQUIRE(code == exit_ok);
  const auto ls = lines_of(slurp(d.path / "phase-il.csv"));
  std::string header;
  for (const auto& l : ls) {
    if (!l.empty() && l[0] != '#') {
      header = l;
      break;
    }
  }
  CHECK(header.find("E[energy]") != std::string::npos);
  CHECK(header.find("cot_phi") != std::string::npos);
}

TEST_CASE("binary entry point") {
  TempDir d("binary");
  const std::string cmd = std::string(ICF_CLI_PATH) + " --version > " + (d.path / "v.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(d.path / "v.txt").find(tool_version()) != std::string::npos);
  const std::string bad = std::string(ICF_CLI_PATH) + " icf-euclidean --N 10 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == exit_config);
}
