#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
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

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("berger-cgc-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const std::string cmd =
      std::string("\"") + BERGER_CGC_EXE + "\" " + args + " > \"" + out.string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("thresholds table") {
  const auto dir = scratch("thresholds");
  const auto r = run("thresholds --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("tau,lambda,k0,kP,gap_lo,gap_hi\n") == 0);
  CHECK(r.out.find("0.75,0.4375,2.3125,2.3125,,\n") != std::string::npos);
  CHECK(r.out.find("2,-3,0.25,4,0.25,4\n") != std::string::npos);
  CHECK(r.out.find("1,0,1,1,,\n") != std::string::npos);
  CHECK(slurp(dir / "o" / "thresholds.csv") == r.out);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const auto o = " --out " + (dir / "o").string();
  CHECK(run("sphere --tau 0.75 --k 2" + o, dir).code == 3);
  CHECK(run("sphere --tau 0.75 --k 3 --tau-range 0.1:0.2:3" + o, dir).code == 2);
  CHECK(run("phase --tau-range 0.5:1 --k 3" + o, dir).code == 2);
  CHECK(run("phase --tau 0.75 --k 3 --format csv,png" + o, dir).code == 2);
  CHECK(run("sphere --tau -1 --k 3" + o, dir).code == 2);
  CHECK(run("sphere --tau 0.75 --k 3 --samples 2" + o, dir).code == 2);
  CHECK(run("frobnicate" + o, dir).code == 2);
  CHECK(run("verify --tol -1" + o, dir).code == 2);
  CHECK(run("sphere --tau 0.75 --k 3 --samples 33" + o, dir).code == 0);
}

TEST_CASE("sphere report, profile and mesh") {
  const auto dir = scratch("sphere");
  const auto r = run("sphere --tau 0.1 --tau 0.5 --k 5 --samples 65 --mesh-steps 16 --format csv,obj,svg --out " +
                         (dir / "o").string(),
                     dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("0.10000000000000001,5,") != std::string::npos);
  CHECK(r.out.find(",not_embedded\n") != std::string::npos);
  CHECK(r.out.find(",embedded\n") != std::string::npos);
  CHECK(fs::exists(dir / "o" / "sphere_tau0.1_K5_profile.csv"));
  CHECK(fs::exists(dir / "o" / "sphere_tau0.5_K5.obj"));
  CHECK(fs::exists(dir / "o" / "sphere_profiles.svg"));
  const auto obj = slurp(dir / "o" / "sphere_tau0.5_K5.obj");
  CHECK(obj.find("# tau 0.5") != std::string::npos);
}

TEST_CASE("pole-touching threshold sphere is reported without a profile") {
  const auto dir = scratch("pole");
  const auto r = run("sphere --tau 2 --k 0.25 --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("2,0.25,1.5707963267948966,inf,,not_embedded") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical CSV, independent of worker count") {
  const auto dir = scratch("determinism");
  const std::string args = "phase --tau 0.75 --tau 2 --k 0.3 --k 3 --grid 21 --format csv";
  REQUIRE(run(args + " --jobs 1 --out " + (dir / "a").string(), dir).code == 0);
  REQUIRE(run(args + " --jobs 4 --out " + (dir / "b").string(), dir).code == 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    ++compared;
  }
  CHECK(compared == 8);
  const std::string region = "embed-region --tau-range 0.05:0.5:10 --k-range 4:6:3";
  REQUIRE(run(region + " --jobs 1 --out " + (dir / "c").string(), dir).code == 0);
  REQUIRE(run(region + " --jobs 3 --out " + (dir / "d").string(), dir).code == 0);
  CHECK(slurp(dir / "c" / "region.csv") == slurp(dir / "d" / "region.csv"));
  CHECK(slurp(dir / "c" / "boundary.csv") == slurp(dir / "d" / "boundary.csv"));
}

TEST_CASE("phase portraits with connectivity verdicts") {
  const auto dir = scratch("phase");
  const auto r = run("phase --tau 0.75 --k 2 --k 2.3125 --k 3 --format csv,svg --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("0.75,2,2.3125,0,0,0") != std::string::npos);
  CHECK(r.out.find("0.75,2.3125,2.3125,1,1,1") != std::string::npos);
  CHECK(r.out.find("0.75,3,2.3125,1,1,0") != std::string::npos);
  const auto grid = slurp(dir / "o" / "phase_tau0.75_K3_grid.csv");
  CHECK(grid.rfind("X,Y,F\n", 0) == 0);
  const auto svg = slurp(dir / "o" / "phase_tau0.75_K3.svg");
  CHECK(svg.find("stroke-width=\"3\"") != std::string::npos);
}

TEST_CASE("embed-region boundary at K = 5") {
  const auto dir = scratch("region");
  const auto r = run("embed-region --tau-range 0.05:0.5:10 --k 5 --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  double tau_star = 0.0;
  REQUIRE(std::sscanf(r.out.c_str(), "K,tau_star,status\n5,%lf,boundary", &tau_star) == 1);
  CHECK(tau_star > 0.1);
  CHECK(tau_star < 0.2);
  CHECK(slurp(dir / "o" / "region.csv").rfind("tau,K,h,embedded\n", 0) == 0);
}

TEST_CASE("config file values yield to flags") {
  const auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "tau = 2\nk = 1\nsamples = 65\n";
  }
  const auto o = " --out " + (dir / "o").string();
  REQUIRE(run("sphere --config " + (dir / "run.ini").string() + o, dir).code == 0);
  const auto a = slurp(dir / "o" / "sphere_tau2_K1_profile.csv");
  CHECK(std::count(a.begin(), a.end(), '\n') == 66);
  REQUIRE(run("sphere --config " + (dir / "run.ini").string() + " --samples 17" + o, dir).code == 0);
  const auto b = slurp(dir / "o" / "sphere_tau2_K1_profile.csv");
  CHECK(std::count(b.begin(), b.end(), '\n') == 18);
  {
    std::ofstream cfg(dir / "bad.ini");
    cfg << "samples = lots\n";
  }
  CHECK(run("sphere --tau 1 --k 2 --config " + (dir / "bad.ini").string() + o, dir).code == 2);
}

TEST_CASE("verify prints a passing JSON summary") {
  const auto dir = scratch("verify");
  const auto r = run("verify --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("\"passed\": true") != std::string::npos);
  CHECK(r.out.find("\"boundary-identity\"") != std::string::npos);
  CHECK(fs::exists(dir / "o" / "verify.json"));
}

}  // TEST_SUITE
