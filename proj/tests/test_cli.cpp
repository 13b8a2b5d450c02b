#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks that drive the installed binary: flag parsing, output
// formats, exit codes, and byte-level determinism of repeated runs.

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR")
                                                                 : "/tmp") +
                               "/grflow_cli_out.txt";
  const std::string cmd =
      std::string(GRFLOW_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

std::string second_line(const std::string& s) {
  const auto a = s.find('\n');
  const auto b = s.find('\n', a + 1);
  return s.substr(a + 1, b - a - 1);
}

}  // namespace

TEST_CASE("flow: header, initial-condition echo, round-ray endpoint") {
  const RunResult r =
      run("flow --scenario hopf --A 1 --B 1 --dt 1e-3 --t-max 0.2");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "t,A,B");
  CHECK(second_line(r.out) == "0,1,1");

  // final A and B stay within 1e-3 of each other on the round ray and the
  // run reaches the horizon
  CHECK(r.out.find("# termination=horizon") != std::string::npos);
  std::istringstream lines(r.out);
  std::string line, last_data;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] != '#') last_data = line;
  }
  double t, A, B;
  CHECK(std::sscanf(last_data.c_str(), "%lf,%lf,%lf", &t, &A, &B) == 3);
  CHECK(std::abs(A - B) < 1e-3);
  CHECK(std::abs(A - 0.8) < 1e-6);
}

TEST_CASE("flow --dual: commutation column stays under tolerance") {
  const RunResult r =
      run("flow --scenario hopf --A 1 --B 1 --dt 1e-3 --t-max 0.1 --dual");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "t,A,B,Abar,Bbar,commutation_residual");
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    double t, A, B, Ab, Bb, res;
    CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &A, &B, &Ab, &Bb,
                      &res) == 6);
    CHECK(res <= 1e-6);
  }
  CHECK(r.out.find("max_commutation_residual=") != std::string::npos);
}

TEST_CASE("flow: byte-identical output across repeated runs") {
  const std::string args = "flow --scenario cpn --n 2 --A 1.2 --B 0.9 --dt 1e-3 --t-max 0.05";
  const RunResult a = run(args);
  const RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("flow: config file mirrors flags, flags win") {
  const std::string cfg = "/tmp/grflow_flow_cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"scenario": "hopf", "A": 1.0, "B": 1.0, "dt": 1e-3, "t_max": 0.1})";
  }
  const RunResult base = run("flow --config " + cfg);
  const RunResult flag = run("flow --scenario hopf --A 1 --B 1 --dt 1e-3 --t-max 0.1");
  CHECK(base.exit_code == 0);
  CHECK(base.out == flag.out);

  const RunResult override_run = run("flow --config " + cfg + " --t-max 0.05");
  CHECK(override_run.exit_code == 0);
  CHECK(override_run.out != base.out);
}

TEST_CASE("flow: usage errors exit 2") {
  CHECK(run("flow --scenario torus").exit_code == 2);
  CHECK(run("flow --scenario hopf --dt -1").exit_code == 2);
  CHECK(run("flow --scenario hopf --A -3").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);
}

TEST_CASE("dualize: inline components and fixed value") {
  const RunResult r = run("dualize --m 2 --phi 2 --a [0.5,0] --eta [0,0] --mu [0]");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["phi"].get<double>() == 0.5);
  CHECK(j["a"][0].get<double>() == 0.0);
  CHECK(j["eta"][0].get<double>() == 0.5);

  CHECK(run("dualize --m 2 --phi -2").exit_code == 2);
}

TEST_CASE("dualize --twice returns to the input to machine precision") {
  const std::string cfg = "/tmp/grflow_dual_cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"m": 2, "phi": 1.7, "a": [0.3, -0.2], "h": [[1.2, 0.1], [0.1, 0.9]],
             "eta": [0.5, 0.25], "mu": [0.4]})";
  }
  const RunResult r = run("dualize --config " + cfg + " --twice");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["phi"].get<double>() == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(j["a"][0].get<double>() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(j["a"][1].get<double>() == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(j["eta"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(j["mu"][0].get<double>() == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("dualize: Hopf scenario produces the inverted fiber and no two-form") {
  const RunResult r = run("dualize --scenario hopf --A 2 --B 1");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["phi"].get<double>() == doctest::Approx(0.5));
  for (const auto& v : j["a"]) CHECK(v.get<double>() == 0.0);
  for (const auto& v : j["eta"]) CHECK(v.get<double>() == 0.0);
  for (const auto& v : j["mu"]) CHECK(v.get<double>() == 0.0);
  // base block is untouched by duality
  CHECK(j["h"][0][0].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("verify: suites pass, are deterministic, and exit codes work") {
  const RunResult ok = run("verify --suite courant --seed 7 --n 50");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("VERIFIED") != std::string::npos);
  CHECK(ok.out.find("flow equivalence residual") != std::string::npos);

  const RunResult again = run("verify --suite courant --seed 7 --n 50");
  CHECK(again.out == ok.out);

  const RunResult commut = run("verify --suite commutation --seed 7 --n 40");
  CHECK(commut.exit_code == 0);

  const RunResult control = run("verify --suite commutation --seed 7 --n 20 --omit-dilaton");
  CHECK(control.exit_code == 1);
  CHECK(control.out.find("FAILED") != std::string::npos);

  const RunResult all = run("verify --suite all --seed 11 --n 30");
  CHECK(all.exit_code == 0);
  CHECK(all.out.find("suite curvature") != std::string::npos);
  CHECK(all.out.find("suite tduality") != std::string::npos);
  CHECK(all.out.find("suite commutation") != std::string::npos);

  CHECK(run("verify --suite nonsense").exit_code == 2);
}
