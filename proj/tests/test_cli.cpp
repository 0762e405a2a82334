#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  static const fs::path dir = fs::temp_directory_path() / "hamlearn_cli_test";
  fs::create_directories(dir);
  const fs::path log = dir / "out.txt";
  const std::string cmd = std::string(HAMLEARN_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string tmp(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hamlearn_cli_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("candidate on a full span") {
  const std::string out = tmp("full");
  REQUIRE(run("gen --n 3 --k-local 3 --include-identity -o " + out).code == 0);
  const Run r = run("learn " + out + "/table_T1.txt --n 3 --k-local 3 --include-identity --true-temperature 1");
  INFO(r.out);
  CHECK(r.code == 0);
  CHECK(r.out.find("Candidate") != std::string::npos);
}

TEST_CASE("not stationary") {
  const std::string out = tmp("ns");
  const std::string terms =
      "--terms \"1.0 * X0 Z1 Y2 + 0.4 * Y0 + 0.3 * Z1 X2 + 0.5 * X0 X1 + 0.6 * Y1 Z2 + 0.8 * Z0 Y1 X2\"";
  REQUIRE(run("gen --n 3 --k-local 3 " + terms + " -o " + out).code == 0);
  const Run r = run("learn " + out + "/table_T1.txt --n 3 --k-local 2 " + terms);
  INFO(r.out);
  CHECK(r.code == 2);
}

TEST_CASE("not Gibbs") {
  const std::string out = tmp("ng");
  const std::string terms = "--terms \"1.3 * X0 Y1 Z2 + 0.9 * Z0 Z1 X2 + 0.7 * Y0 X1 + 0.2 * X2\"";
  REQUIRE(run("gen --n 3 --k-local 3 " + terms + " -o " + out).code == 0);
  const Run r = run("learn " + out + "/table_T1.txt --n 3 --k-local 2 " + terms);
  INFO(r.out);
  CHECK(r.code == 3);
}

TEST_CASE("configuration errors") {
  const std::string cfg = tmp("bad.ini");
  std::ofstream(cfg) << "[system]\nn = 3\n[sweep]\nbogus = 1\n";
  Run r = run("sweep -c " + cfg + " -o -");
  CHECK(r.code == 1);
  CHECK(r.out.find("bad.ini:4: unknown key 'sweep.bogus'") != std::string::npos);
  CHECK(run("gen --n 40").code == 1);
  CHECK(run("learn /nonexistent/table.txt --n 2").code == 4);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("sweep to stdout") {
  const Run r = run("sweep --n 3 --temperatures 1 --sigma-grid 0,1e-6 --runs 2 -o -");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("sigma_noise,temperature,run,theta,temp_ratio,mu_star,verdict,q,wall_ms\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 5);
}

TEST_CASE("verify battery") {
  Run r = run("verify --n 2 --instances 2 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run("verify --n 2 --corrupt-trace 0.1");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL build_gns") != std::string::npos);
  CHECK(run("verify --n 5").code == 1);
}
